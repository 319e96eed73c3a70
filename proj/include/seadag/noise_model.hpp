/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <string>
#include <vector>

#include "seadag/error.hpp"

namespace seadag
{

/*! \brief Direction of the level-dependent denoising schedule: bottom-up
 * finishes low levels first, top-down finishes high levels first. */
enum class ScheduleMode
{
  BottomUp,
  TopDown,
};

std::string schedule_mode_name( ScheduleMode m );
ScheduleMode schedule_mode_from_name( const std::string& name );

enum class Alphabet
{
  Node,
  Edge,
};

/*! \brief Cosine retention schedule (offset 0.008), clipped to (1e-8, 1].
 * Returns the cumulative retention probability after t of T steps; exactly 1
 * at t = 0. */
double cosine_alpha_bar( int t, int T );

/*! \brief Single-step marginal transition matrix over k categories,
 * row-major k*k: alpha_t * I + (1 - alpha_t) * ones * m^T.  Rows sum to 1. */
std::vector<double> transition_matrix( double alpha_t, const std::vector<double>& m );

/*! \brief Discrete corruption process shared by nodes and edges: per-step
 * retention probabilities from the cosine schedule, category marginals as
 * the terminal distribution, and the level-dependent time reparameterization
 * controlled by beta. */
class NoiseModel
{
public:
  static NoiseModel cosine( int T, double beta, std::vector<double> m_x,
                            std::vector<double> m_e, ScheduleMode mode );

  int T() const { return T_; }
  double beta() const { return beta_; }
  ScheduleMode mode() const { return mode_; }
  const std::vector<double>& m( Alphabet a ) const
  {
    return a == Alphabet::Node ? m_x_ : m_e_;
  }
  const std::vector<double>& m_x() const { return m_x_; }
  const std::vector<double>& m_e() const { return m_e_; }

  /* per-step retention, t in [1, T] */
  double alpha( int t ) const;
  /* cumulative retention, t in [0, T]; alpha_bar(0) == 1 */
  double alpha_bar( int t ) const;

private:
  int T_ = 0;
  double beta_ = 0.0;
  ScheduleMode mode_ = ScheduleMode::BottomUp;
  std::vector<double> m_x_, m_e_;
  std::vector<double> alphas_;     /* index 1..T */
  std::vector<double> alpha_bars_; /* index 0..T */
};

/*! \brief Closed-form multi-step transition from step 0 to step t (identity
 * at t = 0): alpha_bar_t * I + (1 - alpha_bar_t) * ones * m^T. */
std::vector<double> cumulative_transition( int t, const NoiseModel& nm, Alphabet a );

/*! \brief Level-local timestep tau = clip(T / (T - beta*w) * (t - beta*w), 0, T)
 * rounded half-up, where w is 1 - l for bottom-up and l for top-down, and l
 * is the node's level normalized to [0, 1].  Monotone in t with tau(0) = 0
 * and tau(T) = T; throws ConfigError when beta*w >= T. */
int local_timestep( int t, double normalized_level, const NoiseModel& nm );

} // namespace seadag
