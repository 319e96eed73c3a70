/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <vector>

#include "seadag/aig.hpp"
#include "seadag/noise_model.hpp"
#include "seadag/truth_table.hpp"

namespace seadag
{

/*! \brief Slow cross-checking implementations kept deliberately independent
 * of the main code paths.  Tests compare these against the fast versions;
 * nothing here is reachable from the CLI. */
namespace ref
{

/*! Recursive memoized simulation, one input row at a time. */
TruthTable simulate( const Aig& aig );

/*! Multi-step transition built as an explicit left-to-right product of the
 * single-step matrices Q^1 ... Q^t (identity at t = 0). */
std::vector<double> cumulative_transition_by_product( int t, const NoiseModel& nm,
                                                      Alphabet a );

/*! Reverse kernel by brute force: enumerates every forward trajectory
 * x^0 = k, x^1, ..., x^{tau_t} = s, reads off the marginal of x^{tau_prev},
 * and mixes over pred_dist.  Exponential in tau_t; keep tau_t small. */
std::vector<double> posterior_by_enumeration( const std::vector<double>& pred_dist,
                                              int current_cat, int tau_t, int tau_prev,
                                              const NoiseModel& nm, Alphabet a );

/*! Longest-path levels by iterating relaxation to a fixed point. */
std::vector<int> node_levels( const std::vector<int>& edge_cats, int n );

/*! Upper critical value of the chi-squared distribution at significance 0.01
 * for 1 <= df <= 10 (table lookup). */
double chi2_critical_99( int df );

} // namespace ref

} // namespace seadag
