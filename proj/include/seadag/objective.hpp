/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <vector>

#include "seadag/condition.hpp"
#include "seadag/dag.hpp"
#include "seadag/rng.hpp"
#include "seadag/tape.hpp"
#include "seadag/truth_table.hpp"

namespace seadag
{

struct LossBreakdown
{
  double l_graph = 0.0;
  double l_cond = 0.0;
  double lambda = 0.0;
  double total = 0.0;
};

/*! \brief total = l_graph + lambda * l_cond; rejects non-finite inputs. */
LossBreakdown total_loss( double l_graph, double l_cond, double lambda );

/*! \brief Cross-entropy of predicted type distributions against the clean
 * one-hot graph, summed over nodes (when enabled) and all ordered pairs
 * including the diagonal.  Probabilities are floored at 1e-12. */
ad::Var graph_ce_loss( ad::Tape& tape, ad::Var px, ad::Var pe, const Dag& clean,
                       bool node_loss_enabled );

/*! \brief Differentiable circuit readout from edge-type distributions.
 *
 * Gates are processed in level order.  Every lower-level non-output node is
 * a wiring candidate; candidates are weighted by a softmax over the log of
 * their connection mass (p_normal + p_negated), polarity blends the child
 * signal with its complement through tanh(p_normal - p_negated).  AND gates
 * square the blended sum (two soft slots sharing one selection), outputs
 * pass it through.  Gates with no candidates emit constant 0.  Returns an
 * n_out x 2^n_in matrix of soft signals.
 *
 * `roles`, when given, fixes which enumeration column each input node reads
 * and which table row each output node fills, keeping the readout invariant
 * under node relabeling; without it both follow node id order.
 */
ad::Var soft_simulate( ad::Tape& tape, ad::Var pe, const std::vector<int>& node_cats,
                       const std::vector<int>& levels, int n_in,
                       const std::vector<NodeRole>* roles = nullptr );

/*! \brief Convenience wrapper evaluating soft_simulate on a throwaway tape. */
Tensor soft_simulate_values( const Tensor& pe, const std::vector<int>& node_cats,
                             const std::vector<int>& levels, int n_in,
                             const std::vector<NodeRole>* roles = nullptr );

/*! \brief Mean binary cross-entropy of soft output signals against the
 * target table bits, inputs clamped to [1e-7, 1 - 1e-7]. */
ad::Var condition_loss( ad::Tape& tape, ad::Var soft_outputs, const TruthTable& target );

/*! \brief Relaxed categorical sample: softmax((log p + gumbel) / temperature).
 * With hard set, the forward value is the one-hot argmax (straight-through
 * on the tape variant). */
std::vector<double> gumbel_sample( const std::vector<double>& dist, double temperature,
                                   Rng& rng, bool hard );

ad::Var gumbel_sample_on_tape( ad::Tape& tape, ad::Var dist, double temperature,
                               Rng& rng, bool straight_through );

} // namespace seadag
