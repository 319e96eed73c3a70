/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/selftest.hpp"

#include <cmath>
#include <sstream>

#include "seadag/aig.hpp"
#include "seadag/diffusion.hpp"
#include "seadag/noise_model.hpp"
#include "seadag/reference.hpp"
#include "seadag/rng.hpp"
#include "seadag/tape.hpp"

namespace seadag
{

namespace
{

SelftestResult check_schedule()
{
  SelftestResult r{ "schedule", true, "ok" };
  std::ostringstream why;
  NoiseModel const nm =
      NoiseModel::cosine( 50, 8.0, { 0.4, 0.4, 0.2 }, { 0.9, 0.05, 0.05 },
                          ScheduleMode::BottomUp );
  if ( nm.alpha_bar( 0 ) != 1.0 )
  {
    r.passed = false;
    why << "alpha_bar(0) != 1; ";
  }
  for ( int t = 1; t <= nm.T(); ++t )
  {
    if ( nm.alpha_bar( t ) > nm.alpha_bar( t - 1 ) + 1e-15 )
    {
      r.passed = false;
      why << "alpha_bar increased at t=" << t << "; ";
      break;
    }
  }
  for ( double level : { 0.0, 0.25, 0.5, 1.0 } )
  {
    if ( local_timestep( 0, level, nm ) != 0 || local_timestep( nm.T(), level, nm ) != nm.T() )
    {
      r.passed = false;
      why << "tau endpoints wrong at level " << level << "; ";
    }
    int prev = 0;
    for ( int t = 1; t <= nm.T(); ++t )
    {
      int const tau = local_timestep( t, level, nm );
      if ( tau < prev || tau < 0 || tau > nm.T() )
      {
        r.passed = false;
        why << "tau not monotone at level " << level << ", t=" << t << "; ";
        break;
      }
      prev = tau;
    }
  }
  if ( !r.passed )
  {
    r.detail = why.str();
  }
  return r;
}

SelftestResult check_posterior()
{
  SelftestResult r{ "posterior", true, "ok" };
  std::ostringstream why;
  NoiseModel const nm =
      NoiseModel::cosine( 50, 8.0, { 0.4, 0.4, 0.2 }, { 0.9, 0.05, 0.05 },
                          ScheduleMode::BottomUp );
  Rng rng( 7 );
  for ( int trial = 0; trial < 20 && r.passed; ++trial )
  {
    std::vector<double> pred( 3 );
    double norm = 0.0;
    for ( double& p : pred )
    {
      p = 0.05 + rng.uniform();
      norm += p;
    }
    for ( double& p : pred )
    {
      p /= norm;
    }
    int const tau_t = 1 + static_cast<int>( rng.uniform_int( 49 ) );
    int const tau_prev = static_cast<int>( rng.uniform_int( tau_t + 1 ) );
    int const cur = static_cast<int>( rng.uniform_int( 3 ) );
    std::vector<double> const post =
        posterior_step( pred, cur, tau_t, tau_prev, nm, Alphabet::Edge );
    double sum = 0.0;
    for ( double p : post )
    {
      if ( p < 0.0 )
      {
        r.passed = false;
        why << "negative mass (tau " << tau_prev << "<-" << tau_t << "); ";
      }
      sum += p;
    }
    if ( std::abs( sum - 1.0 ) > 1e-9 )
    {
      r.passed = false;
      why << "mass " << sum << " != 1; ";
    }
    if ( tau_prev == tau_t && post[cur] != 1.0 )
    {
      r.passed = false;
      why << "no point mass at equal steps; ";
    }
  }
  if ( !r.passed )
  {
    r.detail = why.str();
  }
  return r;
}

SelftestResult check_parser()
{
  SelftestResult r{ "parser", true, "ok" };
  NoiseModel const nm =
      NoiseModel::cosine( 50, 8.0, { 0.4, 0.4, 0.2 }, { 0.9, 0.05, 0.05 },
                          ScheduleMode::BottomUp );
  Rng rng( 11 );
  for ( int trial = 0; trial < 100; ++trial )
  {
    auto [aig, tt] = random_aig( 3, 1, 12, rng );
    int const t = 1 + static_cast<int>( rng.uniform_int( nm.T() ) );
    Dag const noisy = corrupt( aig.to_dag(), t, nm, rng, true );
    try
    {
      Aig const parsed = parse_dag_to_aig( noisy, rng );
      simulate( parsed );
    }
    catch ( const std::exception& e )
    {
      r.passed = false;
      r.detail = std::string( "parse/simulate threw: " ) + e.what();
      return r;
    }
  }
  return r;
}

SelftestResult check_simulators()
{
  SelftestResult r{ "simulators", true, "ok" };
  Rng rng( 13 );
  for ( int trial = 0; trial < 100; ++trial )
  {
    int const n_in = 1 + static_cast<int>( rng.uniform_int( 5 ) );
    auto [aig, tt] = random_aig( n_in, 1 + static_cast<int>( rng.uniform_int( 2 ) ), 16, rng );
    if ( function_accuracy( ref::simulate( aig ), tt ) != 1.0 )
    {
      std::ostringstream why;
      why << "simulators disagree on trial " << trial;
      r.passed = false;
      r.detail = why.str();
      return r;
    }
  }
  return r;
}

SelftestResult check_gradient()
{
  SelftestResult r{ "gradient", true, "ok" };
  /* finite differences on sum(softmax(X W)) with a tanh in the middle */
  Rng rng( 17 );
  Tensor x( 2, 3 ), w( 3, 3 );
  for ( double& v : x.v )
  {
    v = rng.uniform() - 0.5;
  }
  for ( double& v : w.v )
  {
    v = rng.uniform() - 0.5;
  }
  auto loss_at = [&]( const Tensor& wt, Tensor* gw ) {
    ad::Tape tape;
    ad::Var const vx = tape.leaf( x );
    ad::Var const vw = tape.leaf( wt );
    ad::Var const h = tape.tanh_of( tape.matmul( vx, vw ) );
    ad::Var const p = tape.softmax_rows( h );
    ad::Var const l = tape.sum_all( tape.mul( p, p ) );
    if ( gw != nullptr )
    {
      tape.backward( l );
      *gw = tape.grad( vw );
    }
    return tape.value( l ).v[0];
  };
  Tensor gw( 3, 3 );
  loss_at( w, &gw );
  double const h = 1e-6;
  for ( size_t i = 0; i < w.v.size(); ++i )
  {
    Tensor wp = w, wm = w;
    wp.v[i] += h;
    wm.v[i] -= h;
    double const num = ( loss_at( wp, nullptr ) - loss_at( wm, nullptr ) ) / ( 2.0 * h );
    if ( std::abs( num - gw.v[i] ) > 1e-5 * ( 1.0 + std::abs( num ) ) )
    {
      std::ostringstream why;
      why << "dL/dW[" << i << "]: analytic " << gw.v[i] << " vs numeric " << num;
      r.passed = false;
      r.detail = why.str();
      return r;
    }
  }
  return r;
}

} // namespace

std::vector<SelftestResult> run_selftests( const std::string& filter )
{
  std::vector<SelftestResult> all;
  auto want = [&]( const std::string& name ) {
    return filter.empty() || name.find( filter ) != std::string::npos;
  };
  if ( want( "schedule" ) )
  {
    all.push_back( check_schedule() );
  }
  if ( want( "posterior" ) )
  {
    all.push_back( check_posterior() );
  }
  if ( want( "parser" ) )
  {
    all.push_back( check_parser() );
  }
  if ( want( "simulators" ) )
  {
    all.push_back( check_simulators() );
  }
  if ( want( "gradient" ) )
  {
    all.push_back( check_gradient() );
  }
  return all;
}

} // namespace seadag
