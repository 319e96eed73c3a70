/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <cmath>

#include "seadag/aig.hpp"
#include "seadag/rng.hpp"
#include "seadag/truth_table.hpp"

namespace seadag
{

/*! \brief Rewires one gate: an AND receives two children, an output one.
 * Children always sit at strictly lower levels than the target, so applying
 * an action can never create a cycle. */
struct EditAction
{
  int gate = 0; /* node id in the state's id space */
  int n_children = 0;
  int children[2] = { 0, 0 };
  bool negated[2] = { false, false };
};

struct MctsConfig
{
  int simulations = 500;
  int steps = 50;
  int rollout_depth = 5;
  double ucb_c = 1.4142135623730951;
  double pw_c = 1.0;
  double pw_alpha = 0.5;
};

/*! \brief Uniform gate choice, children uniform without replacement from
 * lower-level non-output nodes, fair-coin polarities.  A duplicated child is
 * possible only when a single candidate exists. */
EditAction sample_action( const Aig& state, Rng& rng );

/*! \brief Applies the rewiring and restores the canonical id order (ANDs
 * sorted by level; children remapped). */
Aig apply_action( const Aig& state, const EditAction& action );

/*! \brief Exact simulation accuracy against the target table. */
double reward( const Aig& state, const TruthTable& cond );

/*! \brief Bookkeeping counters exposed for invariant checks. */
struct TreeAudit
{
  int node_count = 0;
  bool visit_counts_consistent = true;
};

struct StepResult
{
  Aig next_state;
  Aig best_state;
  double best_reward = 0.0;
};

/*! \brief One decision point: runs config.simulations tree walks (UCB
 * selection, progressive widening, random rollouts, terminal-only rewards),
 * then advances to the most-visited child.  best_state tracks the highest
 * exactly-evaluated reward seen, including rollout terminals. */
StepResult mcts_decision_step( const Aig& state, const TruthTable& cond,
                               const MctsConfig& cfg, Rng& rng,
                               TreeAudit* audit = nullptr );

/*! \brief Full refinement: config.steps decision points from start; returns
 * the best exactly-evaluated state, or start itself when nothing beat it. */
Aig mcts_refine( const Aig& start, const TruthTable& cond, const MctsConfig& cfg,
                 Rng& rng, double* reward_before = nullptr,
                 double* reward_after = nullptr );

} // namespace seadag
