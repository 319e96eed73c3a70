/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include "seadag/dag.hpp"
#include "seadag/noise_model.hpp"
#include "seadag/tensor.hpp"

namespace seadag
{

/*! \brief Raw model inputs for one (possibly corrupted) graph. */
struct GraphFeatures
{
  int n = 0;
  Tensor fx; /* n x raw node width */
  Tensor fe; /* n^2 x k_e, pair (i,j) at row i*n+j */
  Tensor y;  /* 1 x raw graph width */
};

/* sinusoidal position code: 4 octave frequencies, sin/cos interleaved */
inline constexpr int kTimeEmbedDim = 8;

/*! \brief Embeds a phase u in [0,1] as [sin(w_i u), cos(w_i u)] for
 * w_i = (pi/2) * 2^i, i = 0..3.  Written into out[offset..offset+7]. */
void time_embedding( double u, double* out );

/*! \brief Raw node feature width given a condition of cond_cols columns. */
int node_feature_width( int k_x, int cond_cols );

/*! \brief Raw graph feature width (time code + edge-type proportions). */
int graph_feature_width( int k_e );

/*! \brief Assembles model inputs from a corrupted graph.
 *
 * Node rows: type one-hot, normalized level, time code of the node's local
 * timestep over T, in/out degree of existing edges divided by n, then the
 * per-node condition row.  Edge rows: type one-hot.  Graph row: time code of
 * the global step over T, then edge-type proportions over ordered pairs.
 */
GraphFeatures extract_features( const Dag& noisy, int t, const NoiseModel& nm,
                                const Tensor& cond );

} // namespace seadag
