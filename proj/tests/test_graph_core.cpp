/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "seadag/aig.hpp"
#include "seadag/condition.hpp"
#include "seadag/dataset.hpp"
#include "seadag/reference.hpp"

using namespace seadag;

namespace
{

/* random acyclic edge categories: only lower id -> higher id pairs used */
std::vector<int> random_dag_edges( int n, double density, Rng& rng )
{
  std::vector<int> e( static_cast<size_t>( n ) * n, 0 );
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = i + 1; j < n; ++j )
    {
      if ( rng.uniform() < density )
      {
        e[static_cast<size_t>( i ) * n + j] = 1 + rng.uniform_int( 2 );
      }
    }
  }
  return e;
}

std::string write_temp( const std::string& text )
{
  std::string const path = "graph_core_tmp.jsonl";
  std::ofstream os( path, std::ios::trunc );
  os << text;
  return path;
}

} // namespace

TEST_CASE( "levels: chain and diamond" )
{
  /* 0 -> 1 -> 2 */
  std::vector<int> chain = { 0, 1, 0, 0, 0, 1, 0, 0, 0 };
  CHECK( node_levels( chain, 3 ) == std::vector<int>{ 0, 1, 2 } );

  /* diamond: 0 -> 1, 0 -> 2, 1 -> 3, 2 -> 3 */
  std::vector<int> diamond( 16, 0 );
  diamond[0 * 4 + 1] = 1;
  diamond[0 * 4 + 2] = 2;
  diamond[1 * 4 + 3] = 1;
  diamond[2 * 4 + 3] = 1;
  CHECK( node_levels( diamond, 4 ) == std::vector<int>{ 0, 1, 1, 2 } );
}

TEST_CASE( "levels: agree with the fixed-point reference on random dags" )
{
  Rng rng( 42 );
  for ( int trial = 0; trial < 200; ++trial )
  {
    int const n = 2 + rng.uniform_int( 12 );
    auto edges = random_dag_edges( n, 0.3, rng );
    CHECK( node_levels( edges, n ) == ref::node_levels( edges, n ) );
  }
}

TEST_CASE( "levels: cycles raise an error that names a cycle" )
{
  /* 0 -> 1 -> 2 -> 0 */
  std::vector<int> cyc( 9, 0 );
  cyc[0 * 3 + 1] = 1;
  cyc[1 * 3 + 2] = 1;
  cyc[2 * 3 + 0] = 1;
  try
  {
    node_levels( cyc, 3 );
    FAIL( "expected CyclicGraphError" );
  }
  catch ( const CyclicGraphError& e )
  {
    CHECK( !e.cycle.empty() );
    /* every reported node really is on a cycle here */
    for ( int id : e.cycle )
    {
      CHECK( id >= 0 );
      CHECK( id < 3 );
    }
  }
}

TEST_CASE( "permutation: compose, invert, apply" )
{
  Rng rng( 3 );
  Permutation const p = random_permutation( 7, rng );
  CHECK( p.is_valid() );
  Permutation const q = p.then( p.inverse() );
  for ( int i = 0; i < 7; ++i )
  {
    CHECK( q.map[i] == i );
  }

  auto edges = random_dag_edges( 7, 0.4, rng );
  Dag const g = Dag::from_categories( 3, 3, std::vector<int>( 7, 1 ), edges );
  Dag const gp = permute( g, p );
  for ( int i = 0; i < 7; ++i )
  {
    CHECK( gp.level( p.map[i] ) == g.level( i ) );
    for ( int j = 0; j < 7; ++j )
    {
      CHECK( gp.edge_cat( p.map[i], p.map[j] ) == g.edge_cat( i, j ) );
    }
  }
  CHECK( permute( gp, p.inverse() ).edge_cats() == g.edge_cats() );
}

TEST_CASE( "one-hot validation flags bad rows" )
{
  std::vector<uint8_t> nodes = { 1, 0, 0, 0, 1, 1 }; /* second row doubled */
  std::vector<uint8_t> edges( 2 * 2 * 3, 0 );
  for ( int i = 0; i < 4; ++i )
  {
    edges[i * 3] = 1;
  }
  edges[1 * 3 + 0] = 0; /* pair (0,1) all-zero */
  Dag const g = Dag::from_raw( 2, 3, 3, nodes, edges, { 0, 0 } );
  auto violations = check_onehot( g );
  REQUIRE( violations.size() == 2 );
  CHECK( !violations[0].is_edge );
  CHECK( violations[0].i == 1 );
  CHECK( violations[1].is_edge );
  CHECK( violations[1].i == 0 );
  CHECK( violations[1].j == 1 );
}

TEST_CASE( "edges_respect_levels distinguishes clean from corrupted wiring" )
{
  std::vector<int> chain = { 0, 1, 0, 0, 0, 1, 0, 0, 0 };
  Dag const g = Dag::from_categories( 3, 3, { 0, 1, 2 }, chain );
  CHECK( edges_respect_levels( g ) );

  /* add a same-level edge by keeping the old levels */
  std::vector<int> bad = chain;
  bad[2 * 3 + 0] = 1; /* 2 -> 0 goes downhill */
  std::vector<int> lv = { 0, 1, 2 };
  Dag const h = Dag::from_categories( 3, 3, { 0, 1, 2 }, bad, &lv );
  CHECK( !edges_respect_levels( h ) );
}

TEST_CASE( "hex codec: packing convention and round trip" )
{
  /* bits 1,1,1,0 with first row most significant -> 0xe */
  CHECK( column_to_hex( { 1, 1, 1, 0 } ) == "e" );
  CHECK( column_from_hex( "e", 2 ) == std::vector<uint8_t>{ 1, 1, 1, 0 } );

  Rng rng( 5 );
  for ( int n_in = 1; n_in <= 6; ++n_in )
  {
    std::vector<uint8_t> col( 1 << n_in );
    for ( auto& b : col )
    {
      b = rng.bernoulli( 0.5 ) ? 1 : 0;
    }
    CHECK( column_from_hex( column_to_hex( col ), n_in ) == col );
  }
}

TEST_CASE( "hex codec: wrong length and bad digits rejected" )
{
  CHECK_THROWS_AS( column_from_hex( "e8", 2 ), ShapeError );
  CHECK_THROWS_AS( column_from_hex( "", 2 ), ShapeError );
  CHECK_THROWS_AS( column_from_hex( "zz", 3 ), ShapeError );
  /* sub-nibble tables: padding bits must be zero */
  CHECK( column_from_hex( "8", 1 ) == std::vector<uint8_t>{ 1, 0 } );
  CHECK_THROWS_AS( column_from_hex( "a", 1 ), ShapeError );
}

TEST_CASE( "row convention: input i is bit i of the row index" )
{
  CHECK( input_bit( 0, 0 ) == 0 );
  CHECK( input_bit( 0, 1 ) == 1 );
  CHECK( input_bit( 1, 2 ) == 1 );
  CHECK( input_bit( 2, 3 ) == 0 );
  CHECK( input_bit( 2, 4 ) == 1 );
}

TEST_CASE( "function accuracy: agreement fraction with shape checks" )
{
  TruthTable a, b;
  a.n_in = b.n_in = 2;
  a.outputs = { { 1, 1, 1, 0 } };
  b.outputs = { { 1, 1, 1, 0 } };
  CHECK( function_accuracy( a, b ) == doctest::Approx( 1.0 ) );
  b.outputs[0][3] = 1;
  CHECK( function_accuracy( a, b ) == doctest::Approx( 0.75 ) );
  b.outputs.push_back( { 0, 0, 0, 0 } );
  CHECK_THROWS_AS( function_accuracy( a, b ), ShapeError );
}

TEST_CASE( "condition encoding: packing arithmetic" )
{
  TruthTable tt;
  tt.n_in = 3;
  tt.outputs = { std::vector<uint8_t>( 8, 0 ) };
  auto roles = canonical_roles( 5, 3, 1 );

  Tensor enc = encode_condition( tt, roles );
  REQUIRE( enc.rows == 5 );
  REQUIRE( enc.cols == kConditionDim );
  /* all-zero output column -> zeros */
  for ( int b = 0; b < kConditionDim; ++b )
  {
    CHECK( enc.at( 4, b ) == 0.0 );
  }
  /* AND rows are zeros */
  for ( int b = 0; b < kConditionDim; ++b )
  {
    CHECK( enc.at( 3, b ) == 0.0 );
  }

  /* single leading bit per 8-row group: 10000000 -> 128/256 */
  tt.outputs[0] = { 1, 0, 0, 0, 0, 0, 0, 0 };
  enc = encode_condition( tt, roles );
  for ( int b = 0; b < kConditionDim; ++b )
  {
    CHECK( enc.at( 4, b ) == doctest::Approx( 0.5 ) );
  }

  /* all ones -> 255/256 everywhere */
  tt.outputs[0] = std::vector<uint8_t>( 8, 1 );
  enc = encode_condition( tt, roles );
  for ( int b = 0; b < kConditionDim; ++b )
  {
    CHECK( enc.at( 4, b ) == doctest::Approx( 255.0 / 256.0 ) );
  }
}

TEST_CASE( "condition encoding: equivariant under relabeled rosters" )
{
  Rng rng( 9 );
  auto [aig, tt] = random_aig( 3, 2, 12, rng );
  int const n = aig.num_nodes();
  auto roles = canonical_roles( n, aig.n_in + ( aig.has_const_zero ? 1 : 0 ), aig.n_out );
  /* treat a possible constant-zero node as one more input slot */
  Tensor const base = encode_condition( tt, roles );

  for ( int trial = 0; trial < 5; ++trial )
  {
    Permutation const p = random_permutation( n, rng );
    std::vector<NodeRole> permuted( n );
    for ( int i = 0; i < n; ++i )
    {
      permuted[p.map[i]] = roles[i];
    }
    Tensor const enc = encode_condition( tt, permuted );
    for ( int i = 0; i < n; ++i )
    {
      for ( int b = 0; b < kConditionDim; ++b )
      {
        CHECK( enc.at( p.map[i], b ) == base.at( i, b ) );
      }
    }
  }
}

TEST_CASE( "condition encoding: shapes accepted for 3..10 inputs" )
{
  for ( int n_in = 3; n_in <= 10; ++n_in )
  {
    TruthTable tt;
    tt.n_in = n_in;
    tt.outputs = { std::vector<uint8_t>( 1u << n_in, 1 ) };
    auto roles = canonical_roles( n_in + 2, n_in, 1 );
    Tensor const enc = encode_condition( tt, roles );
    CHECK( enc.rows == n_in + 2 );
    CHECK( enc.cols == kConditionDim );
    CHECK( all_finite( enc ) );
  }
}

TEST_CASE( "dataset: deterministic round trip" )
{
  Rng rng( 11 );
  std::vector<DatasetRecord> records;
  for ( int i = 0; i < 100; ++i )
  {
    auto [aig, tt] = random_aig( 2 + rng.uniform_int( 3 ), 1 + rng.uniform_int( 2 ), 14,
                                 rng );
    records.push_back(
        { aig.n_in, aig.n_out, aig.to_dag(), std::move( tt ) } );
  }
  std::string const path = "graph_core_roundtrip.jsonl";
  write_dataset( path, records );
  auto loaded = read_dataset( path );
  REQUIRE( loaded.size() == records.size() );
  for ( size_t i = 0; i < records.size(); ++i )
  {
    CHECK( loaded[i].n_in == records[i].n_in );
    CHECK( loaded[i].dag.node_cats() == records[i].dag.node_cats() );
    CHECK( loaded[i].dag.edge_cats() == records[i].dag.edge_cats() );
    CHECK( loaded[i].dag.levels() == records[i].dag.levels() );
    CHECK( loaded[i].tt.outputs == records[i].tt.outputs );
    /* serialization itself is byte-stable */
    CHECK( record_to_json_line( loaded[i] ) == record_to_json_line( records[i] ) );
  }
  std::remove( path.c_str() );
}

TEST_CASE( "dataset: malformed line reported with its line number" )
{
  auto path = write_temp(
      "{\"n_in\":1,\"n_out\":1,\"node_types\":[0,2],\"edges\":[[0,1,1]],\"tt\":[\"8\"]}\n"
      "{\"n_in\":1,\"broken\n" );
  try
  {
    read_dataset( path );
    FAIL( "expected IoError" );
  }
  catch ( const IoError& e )
  {
    CHECK( std::string( e.what() ).find( "2" ) != std::string::npos );
  }
  std::remove( path.c_str() );
}

TEST_CASE( "dataset: empty file gives an empty set" )
{
  auto path = write_temp( "" );
  CHECK( read_dataset( path ).empty() );
  std::remove( path.c_str() );
}

TEST_CASE( "level statistics: distributions normalized" )
{
  Rng rng( 13 );
  std::vector<DatasetRecord> records;
  for ( int i = 0; i < 60; ++i )
  {
    auto [aig, tt] = random_aig( 3, 1, 10, rng );
    records.push_back( { 3, 1, aig.to_dag(), std::move( tt ) } );
  }
  LevelStructureStats const stats = harvest_level_stats( records );
  double sum = 0.0;
  for ( auto [k, p] : stats.p_levels )
  {
    CHECK( p >= 0.0 );
    sum += p;
  }
  CHECK( sum == doctest::Approx( 1.0 ).epsilon( 1e-9 ) );
  for ( const auto& [lvl, dist] : stats.p_size )
  {
    double s = 0.0;
    for ( auto [sz, p] : dist )
    {
      s += p;
    }
    CHECK( s == doctest::Approx( 1.0 ).epsilon( 1e-9 ) );
  }

  /* json round trip */
  LevelStructureStats const back = level_stats_from_json( level_stats_to_json( stats ) );
  CHECK( back.p_levels == stats.p_levels );
  CHECK( back.p_size == stats.p_size );
}

TEST_CASE( "marginals: nonnegative and normalized" )
{
  Rng rng( 17 );
  std::vector<DatasetRecord> records;
  for ( int i = 0; i < 40; ++i )
  {
    auto [aig, tt] = random_aig( 3, 1, 10, rng );
    records.push_back( { 3, 1, aig.to_dag(), std::move( tt ) } );
  }
  std::vector<double> m_x, m_e;
  harvest_marginals( records, m_x, m_e );
  REQUIRE( m_x.size() == 3 );
  REQUIRE( m_e.size() == 3 );
  double sx = 0.0, se = 0.0;
  for ( double p : m_x )
  {
    CHECK( p >= 0.0 );
    sx += p;
  }
  for ( double p : m_e )
  {
    CHECK( p >= 0.0 );
    se += p;
  }
  CHECK( sx == doctest::Approx( 1.0 ).epsilon( 1e-9 ) );
  CHECK( se == doctest::Approx( 1.0 ).epsilon( 1e-9 ) );
  /* absent dominates the edge marginal on sparse graphs */
  CHECK( m_e[0] > 0.5 );
}

TEST_CASE( "rng: fixed seeds give fixed streams, split streams differ" )
{
  Rng a( 123 ), b( 123 );
  for ( int i = 0; i < 100; ++i )
  {
    CHECK( a.next_u64() == b.next_u64() );
  }
  CHECK( split_seed( 1, 2 ) != split_seed( 1, 3 ) );
  CHECK( split_seed( 1, 2 ) != split_seed( 2, 2 ) );
  CHECK( split_seed( 7, 9 ) == split_seed( 7, 9 ) );

  Rng c( 99 );
  auto picks = c.sample_without_replacement( 10, 10 );
  std::set<int> const uniq( picks.begin(), picks.end() );
  CHECK( uniq.size() == 10 );
}

TEST_CASE( "dot export names node types and marks negated edges" )
{
  std::vector<int> chain = { 0, 1, 0, 0, 0, 2, 0, 0, 0 };
  Dag const g = Dag::from_categories( 3, 3, { 0, 1, 2 }, chain );
  std::string const dot = to_dot( g, { "IN", "AND", "OUT" } );
  CHECK( dot.find( "IN" ) != std::string::npos );
  CHECK( dot.find( "OUT" ) != std::string::npos );
  CHECK( dot.find( "dashed" ) != std::string::npos );
}
