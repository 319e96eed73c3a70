/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "seadag/aig.hpp"
#include "seadag/denoiser.hpp"
#include "seadag/diffusion.hpp"

using namespace seadag;

namespace
{

NoiseModel desk_model()
{
  return NoiseModel::cosine( 50, 8.0, { 0.4, 0.4, 0.2 }, { 0.85, 0.08, 0.07 },
                             ScheduleMode::BottomUp );
}

DenoiserConfig tiny_config()
{
  DenoiserConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 16;
  cfg.heads = 4;
  return cfg;
}

struct Instance
{
  Dag clean;
  Dag noisy;
  TruthTable tt;
  std::vector<NodeRole> roles;
  int t = 0;
};

Instance make_instance( uint64_t seed, int t )
{
  Rng gen( seed );
  auto [aig, tt] = random_aig( 3, 1, 10, gen );
  Dag clean = aig.to_dag();
  NoiseModel const nm = desk_model();
  Dag noisy = corrupt( clean, t, nm, gen, true );
  std::vector<NodeRole> roles = roles_from_types( noisy.node_cats() );
  return { std::move( clean ), std::move( noisy ), std::move( tt ),
           std::move( roles ), t };
}

} // namespace

TEST_CASE( "time embedding: interleaved octaves" )
{
  double out[kTimeEmbedDim];
  time_embedding( 0.0, out );
  for ( int i = 0; i < 4; ++i )
  {
    CHECK( out[2 * i] == doctest::Approx( 0.0 ) );
    CHECK( out[2 * i + 1] == doctest::Approx( 1.0 ) );
  }
  time_embedding( 1.0, out );
  /* w_0 = pi/2: sin = 1, cos = 0; w_1 = pi: sin = 0, cos = -1 */
  CHECK( out[0] == doctest::Approx( 1.0 ) );
  CHECK( out[1] == doctest::Approx( 0.0 ).epsilon( 1e-12 ) );
  CHECK( out[2] == doctest::Approx( 0.0 ).epsilon( 1e-12 ) );
  CHECK( out[3] == doctest::Approx( -1.0 ) );
}

TEST_CASE( "feature widths add up" )
{
  CHECK( node_feature_width( 3, 32 ) == 3 + 1 + kTimeEmbedDim + 2 + 32 );
  CHECK( graph_feature_width( 3 ) == kTimeEmbedDim + 3 );
}

TEST_CASE( "extract_features: shapes, finiteness, level/time placement" )
{
  Instance const inst = make_instance( 31, 20 );
  NoiseModel const nm = desk_model();
  Tensor const cond = encode_condition( inst.tt, inst.roles );
  GraphFeatures const gf = extract_features( inst.noisy, inst.t, nm, cond );
  int const n = inst.noisy.n();
  CHECK( gf.n == n );
  CHECK( gf.fx.rows == n );
  CHECK( gf.fx.cols == node_feature_width( 3, kConditionDim ) );
  CHECK( gf.fe.rows == n * n );
  CHECK( gf.fe.cols == 3 );
  CHECK( gf.y.rows == 1 );
  CHECK( gf.y.cols == graph_feature_width( 3 ) );
  CHECK( all_finite( gf.fx ) );
  CHECK( all_finite( gf.fe ) );
  CHECK( all_finite( gf.y ) );

  /* node type one-hot occupies the first k_x columns */
  for ( int i = 0; i < n; ++i )
  {
    for ( int k = 0; k < 3; ++k )
    {
      CHECK( gf.fx.at( i, k ) == ( inst.noisy.node_cat( i ) == k ? 1.0 : 0.0 ) );
    }
  }
  /* edge rows are the type one-hots */
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      for ( int k = 0; k < 3; ++k )
      {
        CHECK( gf.fe.at( i * n + j, k ) ==
               ( inst.noisy.edge_cat( i, j ) == k ? 1.0 : 0.0 ) );
      }
    }
  }
  /* condition row is appended verbatim */
  int const cond_off = 3 + 1 + kTimeEmbedDim + 2;
  for ( int i = 0; i < n; ++i )
  {
    for ( int c = 0; c < kConditionDim; ++c )
    {
      CHECK( gf.fx.at( i, cond_off + c ) == cond.at( i, c ) );
    }
  }
}

TEST_CASE( "extract_features: rejects bad time and mismatched condition" )
{
  Instance const inst = make_instance( 37, 10 );
  NoiseModel const nm = desk_model();
  Tensor const cond = encode_condition( inst.tt, inst.roles );
  CHECK_THROWS_AS( extract_features( inst.noisy, -1, nm, cond ), ShapeError );
  CHECK_THROWS_AS( extract_features( inst.noisy, nm.T() + 1, nm, cond ), ShapeError );
  Tensor bad( inst.noisy.n() + 1, kConditionDim );
  CHECK_THROWS_AS( extract_features( inst.noisy, 10, nm, bad ), ShapeError );
}

TEST_CASE( "config: head split must divide the width" )
{
  DenoiserConfig cfg = tiny_config();
  cfg.heads = 3;
  CHECK_THROWS_AS( cfg.validate(), ConfigError );
  cfg = tiny_config();
  CHECK_NOTHROW( cfg.validate() );
}

TEST_CASE( "init: deterministic under seed, norm gains start at one" )
{
  DenoiserConfig const cfg = tiny_config();
  DenoiserParams const a = init_params( cfg, 5 );
  DenoiserParams const b = init_params( cfg, 5 );
  DenoiserParams const c = init_params( cfg, 6 );
  bool identical = true, differs = false;
  for_each_tensor( a, [&]( const std::string& name, const Tensor& ta ) {
    const Tensor* tb = nullptr;
    const Tensor* tc = nullptr;
    for_each_tensor( b, [&]( const std::string& nb, const Tensor& t ) {
      if ( nb == name )
      {
        tb = &t;
      }
    } );
    for_each_tensor( c, [&]( const std::string& nc, const Tensor& t ) {
      if ( nc == name )
      {
        tc = &t;
      }
    } );
    REQUIRE( tb != nullptr );
    REQUIRE( tc != nullptr );
    if ( ta.v != tb->v )
    {
      identical = false;
    }
    if ( ta.v != tc->v )
    {
      differs = true;
    }
  } );
  CHECK( identical );
  CHECK( differs );

  for_each_tensor( a, [&]( const std::string& name, const Tensor& t ) {
    if ( name.find( "ln_" ) != std::string::npos && name.size() > 2 &&
         name.substr( name.size() - 2 ) == ".g" )
    {
      for ( double v : t.v )
      {
        CHECK( v == 1.0 );
      }
    }
  } );
}

TEST_CASE( "forward: distribution heads produce row-stochastic outputs" )
{
  Instance const inst = make_instance( 41, 15 );
  NoiseModel const nm = desk_model();
  DenoiserParams const p = init_params( tiny_config(), 7 );
  Tensor const cond = encode_condition( inst.tt, inst.roles );
  GraphFeatures const gf = extract_features( inst.noisy, inst.t, nm, cond );
  ForwardOut const out = forward_infer( p, gf );
  int const n = inst.noisy.n();
  REQUIRE( out.px.rows == n );
  REQUIRE( out.px.cols == 3 );
  REQUIRE( out.pe.rows == n * n );
  REQUIRE( out.pe.cols == 3 );
  for ( int i = 0; i < out.px.rows; ++i )
  {
    double s = 0.0;
    for ( int k = 0; k < 3; ++k )
    {
      CHECK( out.px.at( i, k ) >= 0.0 );
      s += out.px.at( i, k );
    }
    CHECK( s == doctest::Approx( 1.0 ).epsilon( 1e-9 ) );
  }
  for ( int r = 0; r < out.pe.rows; ++r )
  {
    double s = 0.0;
    for ( int k = 0; k < 3; ++k )
    {
      s += out.pe.at( r, k );
    }
    CHECK( s == doctest::Approx( 1.0 ).epsilon( 1e-9 ) );
  }
}

TEST_CASE( "forward: zero-weight layers keep the residual identity path" )
{
  /* with all layer projections zeroed, each block's update is zero and the
   * residual + layer norm leave a pure LN(embedding): node outputs must not
   * mix across the graph, so a node whose raw features are unchanged keeps
   * its output row when the rest of the wiring changes */
  NoiseModel const nm = desk_model();
  DenoiserConfig const cfg = tiny_config();
  DenoiserParams params = init_params( cfg, 9 );
  for_each_tensor( params, [&]( const std::string& name, Tensor& t ) {
    if ( name.rfind( "layer", 0 ) == 0 && name.find( ".ln_" ) == std::string::npos )
    {
      for ( double& v : t.v )
      {
        v = 0.0;
      }
    }
  } );

  /* two graphs differing only in wiring away from node 0 */
  std::vector<int> const cats = { 0, 0, 0, 1, 1, 2 };
  int const n = 6;
  auto build = [&]( bool variant ) {
    std::vector<int> edges( static_cast<size_t>( n ) * n, 0 );
    edges[0 * n + 3] = 1;
    edges[1 * n + 3] = 1;
    edges[3 * n + 4] = 1;
    edges[( variant ? 1 : 2 ) * n + 4] = 1;
    edges[4 * n + 5] = 1;
    return Dag::from_categories( 3, 3, cats, edges );
  };
  Dag const ga = build( false );
  Dag const gb = build( true );

  TruthTable tt;
  tt.n_in = 3;
  tt.outputs = { column_from_hex( "e1", 3 ) };
  std::vector<NodeRole> const roles = roles_from_types( cats );
  Tensor const cond = encode_condition( tt, roles );

  ForwardOut const a = forward_infer( params, extract_features( ga, 12, nm, cond ) );
  ForwardOut const b = forward_infer( params, extract_features( gb, 12, nm, cond ) );

  /* node 0: same raw features in both graphs -> same output row */
  for ( int c = 0; c < 3; ++c )
  {
    CHECK( a.px.at( 0, c ) == doctest::Approx( b.px.at( 0, c ) ).epsilon( 1e-12 ) );
  }
  /* every ordered pair touching node 0 has the same edge category in both
   * graphs, so those rows agree too */
  for ( int j = 0; j < n; ++j )
  {
    for ( int c = 0; c < 3; ++c )
    {
      CHECK( a.pe.at( 0 * n + j, c ) ==
             doctest::Approx( b.pe.at( 0 * n + j, c ) ).epsilon( 1e-12 ) );
      CHECK( a.pe.at( j * n + 0, c ) ==
             doctest::Approx( b.pe.at( j * n + 0, c ) ).epsilon( 1e-12 ) );
    }
  }
  /* within one graph, pairs with identical raw categories collapse to
   * identical rows: (0,1) and (0,2) are both absent */
  for ( int c = 0; c < 3; ++c )
  {
    CHECK( a.pe.at( 0 * n + 1, c ) ==
           doctest::Approx( a.pe.at( 0 * n + 2, c ) ).epsilon( 1e-12 ) );
  }
}

TEST_CASE( "forward: permutation equivariance of both heads" )
{
  NoiseModel const nm = desk_model();
  DenoiserParams const p = init_params( tiny_config(), 11 );
  Rng prng( 61 );
  for ( int trial = 0; trial < 20; ++trial )
  {
    Instance const inst = make_instance( 100 + trial, 5 + ( trial % 40 ) );
    int const n = inst.noisy.n();
    Tensor const cond = encode_condition( inst.tt, inst.roles );
    ForwardOut const base =
        forward_infer( p, extract_features( inst.noisy, inst.t, nm, cond ) );

    for ( int rep = 0; rep < 5; ++rep )
    {
      Permutation const perm = random_permutation( n, prng );
      Dag const permuted = permute( inst.noisy, perm );
      std::vector<NodeRole> proles( n );
      for ( int i = 0; i < n; ++i )
      {
        proles[perm.map[i]] = inst.roles[i];
      }
      Tensor const pcond = encode_condition( inst.tt, proles );
      ForwardOut const out =
          forward_infer( p, extract_features( permuted, inst.t, nm, pcond ) );
      for ( int i = 0; i < n; ++i )
      {
        for ( int k = 0; k < 3; ++k )
        {
          CHECK( std::abs( out.px.at( perm.map[i], k ) - base.px.at( i, k ) ) < 1e-4 );
        }
        for ( int j = 0; j < n; ++j )
        {
          for ( int k = 0; k < 3; ++k )
          {
            CHECK( std::abs( out.pe.at( perm.map[i] * n + perm.map[j], k ) -
                             base.pe.at( i * n + j, k ) ) < 1e-4 );
          }
        }
      }
    }
  }
}

TEST_CASE( "roles_from_types: slots follow id order within each kind" )
{
  auto roles = roles_from_types( { 0, 1, 0, 2, 1, 2 } );
  CHECK( roles[0].kind == kNodeInput );
  CHECK( roles[0].index == 0 );
  CHECK( roles[2].kind == kNodeInput );
  CHECK( roles[2].index == 1 );
  CHECK( roles[3].kind == kNodeOutput );
  CHECK( roles[3].index == 0 );
  CHECK( roles[5].kind == kNodeOutput );
  CHECK( roles[5].index == 1 );
  CHECK( roles[1].kind == kNodeAnd );
  CHECK( roles[4].kind == kNodeAnd );
}

TEST_CASE( "sampling adapter: emits the expected shapes for reverse_sample" )
{
  Instance const inst = make_instance( 53, 25 );
  NoiseModel const nm = desk_model();
  DenoiserParams const p = init_params( tiny_config(), 13 );
  DenoiseFn const fn = make_denoiser( p, nm, inst.tt );
  Tensor px, pe;
  fn( inst.noisy, inst.t, px, pe );
  CHECK( px.rows == inst.noisy.n() );
  CHECK( px.cols == 3 );
  CHECK( pe.rows == inst.noisy.n() * inst.noisy.n() );
  CHECK( pe.cols == 3 );
  CHECK( all_finite( px ) );
  CHECK( all_finite( pe ) );
}
