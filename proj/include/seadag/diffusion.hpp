/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <functional>
#include <vector>

#include "seadag/dag.hpp"
#include "seadag/dataset.hpp"
#include "seadag/noise_model.hpp"
#include "seadag/rng.hpp"
#include "seadag/tensor.hpp"

namespace seadag
{

/*! \brief Normalized level of a node for the schedule (max level at least 1
 * to keep single-level graphs well defined). */
inline double normalized_level( int level, int max_level )
{
  return static_cast<double>( level ) / static_cast<double>( std::max( 1, max_level ) );
}

/*! \brief Samples the corrupted graph at global step t.  Every element is
 * corrupted at its own local timestep (nodes by their level, edges by the
 * parent's level); level labels are carried over unchanged.  With
 * freeze_node_types set (the AIG task), node types are left clean. */
Dag corrupt( const Dag& clean, int t, const NoiseModel& nm, Rng& rng,
             bool freeze_node_types );

/*! \brief One-element reverse kernel.
 *
 * Given the model's distribution over the clean category and the current
 * corrupted category at local step tau_t, returns the distribution over the
 * category at local step tau_prev (tau_prev <= tau_t).  Equal timesteps give
 * a point mass at the current category.  The result is renormalized;
 * deviations beyond 1e-9 or zero-probability conditioning raise
 * NumericalError.
 */
std::vector<double> posterior_step( const std::vector<double>& pred_dist, int current_cat,
                                    int tau_t, int tau_prev, const NoiseModel& nm,
                                    Alphabet a );

/*! \brief Draws a level scaffold from harvested stats: number of levels from
 * p_levels (resampled up to 32 times until at least 2), level 0 sized n_in,
 * the top level sized n_out, interior levels from p_size.  Returns per-node
 * levels in ascending order. */
std::vector<int> sample_level_structure( const LevelStructureStats& stats, int n_in,
                                         int n_out, Rng& rng );

/*! \brief Denoiser interface for sampling: fills pX (n x k_x) and pE
 * (n^2 x k_e) with per-element clean-category distributions for the given
 * corrupted graph at global step t. */
using DenoiseFn = std::function<void( const Dag& noisy, int t, Tensor& pX, Tensor& pE )>;

struct ReverseOptions
{
  /* fixed node roster (categories per node). When nonempty, node types are
   * pinned and only edges diffuse (the AIG task). When empty, node types are
   * sampled from the marginal and denoised alongside edges. */
  std::vector<int> fixed_node_cats;
  int k_x = 3;
  int k_e = 3;
};

/*! \brief Full reverse process: draws a level scaffold, initializes all
 * elements from the marginals, then walks t = T..1 querying the denoiser
 * once per step and applying the one-element reverse kernel at each node and
 * ordered pair.  Elements whose local step is already 0 never change. */
Dag reverse_sample( const DenoiseFn& denoise, const LevelStructureStats& stats,
                    const NoiseModel& nm, int n_in, int n_out, Rng& rng,
                    const ReverseOptions& opt );

/*! \brief Same reverse walk on a caller-provided scaffold (levels must be
 * ascending; node roster taken from opt or sampled). */
Dag reverse_sample_with_levels( const DenoiseFn& denoise, const std::vector<int>& levels,
                                const NoiseModel& nm, Rng& rng, const ReverseOptions& opt );

} // namespace seadag
