/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "seadag/aig.hpp"
#include "seadag/dataset.hpp"
#include "seadag/diffusion.hpp"
#include "seadag/reference.hpp"

using namespace seadag;

namespace
{

NoiseModel desk_model()
{
  return NoiseModel::cosine( 50, 8.0, { 0.4, 0.4, 0.2 }, { 0.85, 0.08, 0.07 },
                             ScheduleMode::BottomUp );
}

/* emits the clean graph's one-hots regardless of the noisy state */
DenoiseFn oracle_denoiser( const Dag& clean )
{
  return [clean]( const Dag& noisy, int, Tensor& pX, Tensor& pE ) {
    int const n = noisy.n();
    pX = Tensor( n, clean.k_x() );
    pE = Tensor( n * n, clean.k_e() );
    for ( int i = 0; i < n; ++i )
    {
      pX.at( i, clean.node_cat( i ) ) = 1.0;
      for ( int j = 0; j < n; ++j )
      {
        pE.at( i * n + j, i == j ? 0 : clean.edge_cat( i, j ) ) = 1.0;
      }
    }
  };
}

} // namespace

TEST_CASE( "retention schedule: endpoints, monotonicity, clipping" )
{
  CHECK( cosine_alpha_bar( 0, 500 ) == 1.0 );
  for ( int t = 1; t <= 500; ++t )
  {
    double const a = cosine_alpha_bar( t, 500 );
    CHECK( a > 0.0 );
    CHECK( a <= 1.0 );
    CHECK( a <= cosine_alpha_bar( t - 1, 500 ) + 1e-15 );
  }
  CHECK( cosine_alpha_bar( 500, 500 ) >= 1e-8 );
}

TEST_CASE( "transition matrices: row-stochastic with the marginal mix" )
{
  std::vector<double> const m = { 0.7, 0.2, 0.1 };
  auto q = transition_matrix( 0.6, m );
  for ( int r = 0; r < 3; ++r )
  {
    double sum = 0.0;
    for ( int c = 0; c < 3; ++c )
    {
      double const expect = ( r == c ? 0.6 : 0.0 ) + 0.4 * m[c];
      CHECK( q[r * 3 + c] == doctest::Approx( expect ) );
      sum += q[r * 3 + c];
    }
    CHECK( sum == doctest::Approx( 1.0 ).epsilon( 1e-12 ) );
  }
}

TEST_CASE( "closed-form cumulative transition equals the explicit product" )
{
  NoiseModel const nm = desk_model();
  for ( int t : { 0, 1, 7, 25, 50 } )
  {
    auto closed = cumulative_transition( t, nm, Alphabet::Edge );
    auto prod = ref::cumulative_transition_by_product( t, nm, Alphabet::Edge );
    REQUIRE( closed.size() == prod.size() );
    for ( size_t i = 0; i < closed.size(); ++i )
    {
      CHECK( std::abs( closed[i] - prod[i] ) < 1e-12 );
    }
  }
}

TEST_CASE( "local timestep: frozen value and rounding convention" )
{
  NoiseModel const nm =
      NoiseModel::cosine( 500, 32.0, { 0.5, 0.5 }, { 0.8, 0.1, 0.1 },
                          ScheduleMode::BottomUp );
  /* level 0 under bottom-up: w = 1, tau = 500/468 * (100 - 32) = 72.65 -> 73 */
  CHECK( local_timestep( 100, 0.0, nm ) == 73 );
  /* top level: w = 0, tau = t exactly */
  CHECK( local_timestep( 100, 1.0, nm ) == 100 );
}

TEST_CASE( "local timestep: laws over a level grid" )
{
  NoiseModel const nm =
      NoiseModel::cosine( 500, 32.0, { 0.5, 0.5 }, { 0.8, 0.1, 0.1 },
                          ScheduleMode::BottomUp );
  for ( int g = 0; g <= 20; ++g )
  {
    double const l = g / 20.0;
    CHECK( local_timestep( 0, l, nm ) == 0 );
    CHECK( local_timestep( 500, l, nm ) == 500 );
    int prev = 0;
    for ( int t = 1; t <= 500; ++t )
    {
      int const tau = local_timestep( t, l, nm );
      CHECK( tau >= prev );
      prev = tau;
    }
  }
  /* bottom-up: at a fixed interior t, higher levels keep larger tau */
  for ( int t : { 50, 137, 300 } )
  {
    int last = -1;
    for ( int g = 0; g <= 20; ++g )
    {
      int const tau = local_timestep( t, g / 20.0, nm );
      CHECK( tau >= last );
      last = tau;
    }
  }
  /* top-down mirrors the ordering */
  NoiseModel const td =
      NoiseModel::cosine( 500, 32.0, { 0.5, 0.5 }, { 0.8, 0.1, 0.1 },
                          ScheduleMode::TopDown );
  CHECK( local_timestep( 100, 0.0, td ) == 100 );
  CHECK( local_timestep( 100, 1.0, td ) == 73 );
}

TEST_CASE( "noise model: beta at or above T rejected" )
{
  CHECK_THROWS_AS( NoiseModel::cosine( 10, 10.0, { 0.5, 0.5 }, { 0.8, 0.1, 0.1 },
                                       ScheduleMode::BottomUp ),
                   ConfigError );
  CHECK_THROWS_AS( NoiseModel::cosine( 10, 12.0, { 0.5, 0.5 }, { 0.8, 0.1, 0.1 },
                                       ScheduleMode::BottomUp ),
                   ConfigError );
}

TEST_CASE( "beta = 0 collapses the schedule to one shared clock" )
{
  NoiseModel const nm = NoiseModel::cosine( 50, 0.0, { 0.5, 0.5 },
                                            { 0.8, 0.1, 0.1 }, ScheduleMode::BottomUp );
  for ( int t : { 0, 13, 50 } )
  {
    for ( double l : { 0.0, 0.3, 1.0 } )
    {
      CHECK( local_timestep( t, l, nm ) == t );
    }
  }
}

TEST_CASE( "corrupt: freezes node types in the conditional task" )
{
  Rng gen( 3 );
  auto [aig, tt] = random_aig( 3, 1, 10, gen );
  Dag const clean = aig.to_dag();
  NoiseModel const nm = desk_model();

  Rng r1( 9 );
  Dag const noisy = corrupt( clean, 40, nm, r1, true );
  CHECK( noisy.node_cats() == clean.node_cats() );
  CHECK( noisy.levels() == clean.levels() );

  Rng r2( 9 );
  Dag const again = corrupt( clean, 40, nm, r2, true );
  CHECK( again.edge_cats() == noisy.edge_cats() );
}

TEST_CASE( "corrupt: high t scrambles edges toward the marginal" )
{
  Rng gen( 4 );
  auto [aig, tt] = random_aig( 4, 1, 14, gen );
  Dag const clean = aig.to_dag();
  NoiseModel const nm = desk_model();
  Rng rng( 5 );
  int changed = 0, total = 0;
  for ( int trial = 0; trial < 50; ++trial )
  {
    Dag const noisy = corrupt( clean, nm.T(), nm, rng, true );
    for ( int i = 0; i < clean.n(); ++i )
    {
      for ( int j = 0; j < clean.n(); ++j )
      {
        if ( i == j )
        {
          CHECK( noisy.edge_cat( i, j ) == 0 );
          continue;
        }
        ++total;
        changed += noisy.edge_cat( i, j ) != clean.edge_cat( i, j ) ? 1 : 0;
      }
    }
  }
  /* at full noise a solid share of pairs must move */
  CHECK( static_cast<double>( changed ) / total > 0.1 );
}

TEST_CASE( "posterior: equal local steps give a point mass" )
{
  NoiseModel const nm = desk_model();
  std::vector<double> const pred = { 0.2, 0.5, 0.3 };
  for ( int tau : { 1, 9, 33 } )
  {
    auto post = posterior_step( pred, 2, tau, tau, nm, Alphabet::Edge );
    CHECK( post[2] == doctest::Approx( 1.0 ) );
    CHECK( post[0] == doctest::Approx( 0.0 ) );
  }
}

TEST_CASE( "posterior: matches trajectory enumeration" )
{
  NoiseModel const nm3 =
      NoiseModel::cosine( 6, 0.0, { 0.4, 0.4, 0.2 }, { 0.65, 0.2, 0.15 },
                          ScheduleMode::BottomUp );
  Rng rng( 8 );
  for ( int tau_t = 1; tau_t <= 6; ++tau_t )
  {
    for ( int tau_p = 0; tau_p <= tau_t; ++tau_p )
    {
      std::vector<double> pred( 3 );
      double norm = 0.0;
      for ( double& p : pred )
      {
        p = 0.1 + rng.uniform();
        norm += p;
      }
      for ( double& p : pred )
      {
        p /= norm;
      }
      for ( int cur = 0; cur < 3; ++cur )
      {
        auto fast = posterior_step( pred, cur, tau_t, tau_p, nm3, Alphabet::Edge );
        auto slow = ref::posterior_by_enumeration( pred, cur, tau_t, tau_p, nm3,
                                                   Alphabet::Edge );
        for ( int k = 0; k < 3; ++k )
        {
          CHECK( std::abs( fast[k] - slow[k] ) < 1e-12 );
        }
      }
    }
  }
}

TEST_CASE( "posterior: renormalized mass sums to one" )
{
  NoiseModel const nm = desk_model();
  Rng rng( 12 );
  for ( int trial = 0; trial < 200; ++trial )
  {
    std::vector<double> pred( 3 );
    double norm = 0.0;
    for ( double& p : pred )
    {
      p = rng.uniform() + 1e-3;
      norm += p;
    }
    for ( double& p : pred )
    {
      p /= norm;
    }
    int const tau_t = 1 + rng.uniform_int( nm.T() );
    int const tau_p = rng.uniform_int( tau_t + 1 );
    auto post =
        posterior_step( pred, rng.uniform_int( 3 ), tau_t, tau_p, nm, Alphabet::Edge );
    double sum = 0.0;
    for ( double p : post )
    {
      CHECK( p >= 0.0 );
      sum += p;
    }
    CHECK( sum == doctest::Approx( 1.0 ).epsilon( 1e-12 ) );
  }
}

TEST_CASE( "level scaffold: endpoints sized to the task, levels ascending" )
{
  Rng gen( 15 );
  std::vector<DatasetRecord> records;
  for ( int i = 0; i < 80; ++i )
  {
    auto [aig, tt] = random_aig( 3, 1, 10, gen );
    records.push_back( { 3, 1, aig.to_dag(), std::move( tt ) } );
  }
  LevelStructureStats const stats = harvest_level_stats( records );
  Rng rng( 23 );
  for ( int trial = 0; trial < 100; ++trial )
  {
    auto levels = sample_level_structure( stats, 3, 1, rng );
    REQUIRE( levels.size() >= 4 );
    int max_l = levels.back();
    CHECK( max_l >= 1 );
    int n0 = 0, ntop = 0;
    for ( size_t i = 0; i + 1 < levels.size(); ++i )
    {
      CHECK( levels[i] <= levels[i + 1] );
    }
    for ( int l : levels )
    {
      n0 += l == 0 ? 1 : 0;
      ntop += l == max_l ? 1 : 0;
    }
    CHECK( n0 == 3 );
    CHECK( ntop == 1 );
  }
}

TEST_CASE( "reverse walk: an oracle denoiser reconstructs the exact target" )
{
  NoiseModel const nm = desk_model();
  Rng gen( 19 );
  for ( int trial = 0; trial < 10; ++trial )
  {
    auto [aig, tt] = random_aig( 3, 1, 10, gen );
    Dag const clean = aig.to_dag();
    ReverseOptions opt;
    opt.fixed_node_cats = clean.node_cats();
    Rng rng( split_seed( 100, trial ) );
    Dag const out =
        reverse_sample_with_levels( oracle_denoiser( clean ), clean.levels(), nm, rng,
                                    opt );
    CHECK( out.node_cats() == clean.node_cats() );
    CHECK( out.edge_cats() == clean.edge_cats() );
  }
}

TEST_CASE( "reverse walk: node diffusion also reconstructs under the oracle" )
{
  NoiseModel const nm = desk_model();
  Rng gen( 29 );
  auto [aig, tt] = random_aig( 3, 1, 10, gen );
  Dag const clean = aig.to_dag();
  ReverseOptions opt; /* empty roster: nodes diffuse too */
  Rng rng( 55 );
  Dag const out =
      reverse_sample_with_levels( oracle_denoiser( clean ), clean.levels(), nm, rng,
                                  opt );
  CHECK( out.node_cats() == clean.node_cats() );
  CHECK( out.edge_cats() == clean.edge_cats() );
}
