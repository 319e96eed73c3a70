/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/noise_model.hpp"

#include <algorithm>
#include <cmath>

namespace seadag
{

namespace
{
constexpr double kCosineOffset = 0.008;
constexpr double kAlphaBarFloor = 1e-8;
constexpr double kPi = 3.14159265358979323846;

void validate_marginal( const std::vector<double>& m, const char* what )
{
  if ( m.size() < 2 )
  {
    throw ConfigError( std::string( what ) + ": need at least two categories" );
  }
  double sum = 0.0;
  for ( double x : m )
  {
    if ( x < 0.0 || !std::isfinite( x ) )
    {
      throw ConfigError( std::string( what ) + ": entries must be nonnegative" );
    }
    sum += x;
  }
  if ( std::abs( sum - 1.0 ) > 1e-9 )
  {
    throw ConfigError( std::string( what ) + ": entries must sum to 1" );
  }
}
} // namespace

std::string schedule_mode_name( ScheduleMode m )
{
  return m == ScheduleMode::BottomUp ? "bottom-up" : "top-down";
}

ScheduleMode schedule_mode_from_name( const std::string& name )
{
  if ( name == "bottom-up" )
  {
    return ScheduleMode::BottomUp;
  }
  if ( name == "top-down" )
  {
    return ScheduleMode::TopDown;
  }
  throw ConfigError( "unknown schedule mode: " + name );
}

double cosine_alpha_bar( int t, int T )
{
  if ( T < 1 || t < 0 || t > T )
  {
    throw ConfigError( "cosine_alpha_bar: t out of range" );
  }
  double const s = kCosineOffset;
  auto f = [&]( double u ) {
    double const c = std::cos( ( u + s ) / ( 1.0 + s ) * kPi / 2.0 );
    return c * c;
  };
  double const value = f( static_cast<double>( t ) / T ) / f( 0.0 );
  return std::min( 1.0, std::max( kAlphaBarFloor, value ) );
}

std::vector<double> transition_matrix( double alpha_t, const std::vector<double>& m )
{
  validate_marginal( m, "transition_matrix" );
  if ( !( alpha_t >= 0.0 && alpha_t <= 1.0 ) )
  {
    throw ConfigError( "transition_matrix: alpha must lie in [0,1]" );
  }
  int const k = static_cast<int>( m.size() );
  std::vector<double> q( static_cast<size_t>( k ) * k );
  for ( int i = 0; i < k; ++i )
  {
    for ( int j = 0; j < k; ++j )
    {
      q[static_cast<size_t>( i ) * k + j] = ( 1.0 - alpha_t ) * m[j] + ( i == j ? alpha_t : 0.0 );
    }
  }
  return q;
}

NoiseModel NoiseModel::cosine( int T, double beta, std::vector<double> m_x,
                               std::vector<double> m_e, ScheduleMode mode )
{
  if ( T < 1 )
  {
    throw ConfigError( "NoiseModel: T must be at least 1" );
  }
  if ( beta < 0.0 || beta >= T )
  {
    throw ConfigError( "NoiseModel: beta must lie in [0, T)" );
  }
  validate_marginal( m_x, "NoiseModel m_x" );
  validate_marginal( m_e, "NoiseModel m_e" );

  NoiseModel nm;
  nm.T_ = T;
  nm.beta_ = beta;
  nm.mode_ = mode;
  nm.m_x_ = std::move( m_x );
  nm.m_e_ = std::move( m_e );
  nm.alpha_bars_.resize( T + 1 );
  for ( int t = 0; t <= T; ++t )
  {
    nm.alpha_bars_[t] = cosine_alpha_bar( t, T );
  }
  nm.alphas_.resize( T + 1 );
  nm.alphas_[0] = 1.0;
  for ( int t = 1; t <= T; ++t )
  {
    nm.alphas_[t] = nm.alpha_bars_[t] / nm.alpha_bars_[t - 1];
    if ( !( nm.alphas_[t] > 0.0 && nm.alphas_[t] <= 1.0 ) )
    {
      throw NumericalError( "NoiseModel: per-step retention out of (0,1] at t=" +
                            std::to_string( t ) );
    }
  }
  return nm;
}

double NoiseModel::alpha( int t ) const
{
  if ( t < 1 || t > T_ )
  {
    throw ConfigError( "NoiseModel::alpha: t out of range" );
  }
  return alphas_[t];
}

double NoiseModel::alpha_bar( int t ) const
{
  if ( t < 0 || t > T_ )
  {
    throw ConfigError( "NoiseModel::alpha_bar: t out of range" );
  }
  return alpha_bars_[t];
}

std::vector<double> cumulative_transition( int t, const NoiseModel& nm, Alphabet a )
{
  return transition_matrix( nm.alpha_bar( t ), nm.m( a ) );
}

int local_timestep( int t, double normalized_level, const NoiseModel& nm )
{
  if ( t < 0 || t > nm.T() )
  {
    throw ConfigError( "local_timestep: t out of range" );
  }
  if ( normalized_level < 0.0 || normalized_level > 1.0 )
  {
    throw ConfigError( "local_timestep: level must be normalized to [0,1]" );
  }
  double const w =
      nm.mode() == ScheduleMode::BottomUp ? 1.0 - normalized_level : normalized_level;
  double const T = static_cast<double>( nm.T() );
  double const shift = nm.beta() * w;
  if ( shift >= T )
  {
    throw ConfigError( "local_timestep: beta too large for this schedule" );
  }
  double const raw = T / ( T - shift ) * ( static_cast<double>( t ) - shift );
  double const clipped = std::min( T, std::max( 0.0, raw ) );
  return static_cast<int>( std::floor( clipped + 0.5 ) );
}

} // namespace seadag
