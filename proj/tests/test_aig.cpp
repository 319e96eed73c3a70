/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seadag/aig.hpp"
#include "seadag/reference.hpp"

using namespace seadag;

namespace
{

Aig nand2()
{
  Aig a;
  a.n_in = 2;
  a.n_out = 1;
  a.and_gates.push_back( { 0, false, 1, false } );
  a.outputs.push_back( { 2, true } );
  return a;
}

} // namespace

TEST_CASE( "simulate: not(a and b) gives rows 1,1,1,0" )
{
  TruthTable const tt = simulate( nand2() );
  REQUIRE( tt.n_out() == 1 );
  CHECK( tt.outputs[0] == std::vector<uint8_t>{ 1, 1, 1, 0 } );
  CHECK( column_to_hex( tt.outputs[0] ) == "e" );
}

TEST_CASE( "simulate: matches the recursive reference on random circuits" )
{
  Rng rng( 21 );
  for ( int trial = 0; trial < 1000; ++trial )
  {
    int const n_in = 1 + rng.uniform_int( 4 );
    auto [aig, tt] = random_aig( n_in, 1 + rng.uniform_int( 2 ), 16, rng );
    TruthTable const again = ref::simulate( aig );
    REQUIRE( again.outputs.size() == tt.outputs.size() );
    CHECK( again.outputs == tt.outputs );
  }
}

TEST_CASE( "simulate: rejects dangling ids and cyclic wiring" )
{
  Aig bad = nand2();
  bad.and_gates[0].child_b = 9;
  CHECK_THROWS_AS( simulate( bad ), ShapeError );

  Aig cyc;
  cyc.n_in = 1;
  cyc.n_out = 1;
  cyc.and_gates.push_back( { 0, false, 2, false } );
  cyc.and_gates.push_back( { 1, false, 0, false } );
  cyc.outputs.push_back( { 1, false } );
  CHECK_THROWS_AS( simulate( cyc ), ShapeError );
}

TEST_CASE( "levels: recomputed from wiring" )
{
  Aig a = nand2();
  auto lv = a.levels();
  REQUIRE( lv.size() == 4 );
  CHECK( lv[0] == 0 );
  CHECK( lv[1] == 0 );
  CHECK( lv[2] == 1 );
  CHECK( lv[3] == 2 );
}

TEST_CASE( "to_dag: encodes polarities as edge categories" )
{
  Dag const g = nand2().to_dag();
  CHECK( g.n() == 4 );
  CHECK( g.node_cat( 0 ) == kNodeInput );
  CHECK( g.node_cat( 2 ) == kNodeAnd );
  CHECK( g.node_cat( 3 ) == kNodeOutput );
  CHECK( g.edge_cat( 0, 2 ) == kEdgeNormal );
  CHECK( g.edge_cat( 1, 2 ) == kEdgeNormal );
  CHECK( g.edge_cat( 2, 3 ) == kEdgeNegated );
  CHECK( g.edge_cat( 3, 2 ) == kEdgeAbsent );
  CHECK( aig_validity( g ) == doctest::Approx( 1.0 ) );
}

TEST_CASE( "validity: counts gate wiring, not levels" )
{
  /* one AND with three in-edges, one output with one -> 1 of 2 gates valid */
  std::vector<int> nodes = { 0, 0, 0, 1, 2 };
  std::vector<int> edges( 25, 0 );
  edges[0 * 5 + 3] = 1;
  edges[1 * 5 + 3] = 1;
  edges[2 * 5 + 3] = 2;
  edges[3 * 5 + 4] = 1;
  Dag const g = Dag::from_categories( 3, 3, nodes, edges );
  ValidityCount const vc = aig_validity_counts( g );
  CHECK( vc.gates == 2 );
  CHECK( vc.valid == 1 );
  CHECK( aig_validity( g ) == doctest::Approx( 0.5 ) );

  /* no gates at all -> vacuous 1.0 */
  Dag const empty = Dag::from_categories( 3, 3, { 0, 0 }, std::vector<int>( 4, 0 ) );
  CHECK( aig_validity( empty ) == doctest::Approx( 1.0 ) );
}

TEST_CASE( "parse: a legal circuit decodes to exactly its own wiring" )
{
  Rng rng( 31 );
  for ( int trial = 0; trial < 50; ++trial )
  {
    auto [aig, tt] = random_aig( 3, 2, 14, rng );
    Rng dec( 1 );
    Aig const back = parse_dag_to_aig( aig.to_dag(), dec );
    TruthTable const tt2 = simulate( back );
    CHECK( tt2.outputs == tt.outputs );
  }
}

TEST_CASE( "parse: AND without usable children is stuck at constant zero" )
{
  /* single AND feeding the output, no in-edges at all */
  std::vector<int> nodes = { 0, 1, 2 };
  std::vector<int> edges( 9, 0 );
  edges[1 * 3 + 2] = 1;
  Dag const g = Dag::from_categories( 3, 3, nodes, edges );
  Rng rng( 2 );
  Aig const a = parse_dag_to_aig( g, rng );
  REQUIRE( a.n_and() == 1 );
  CHECK( a.has_const_zero );
  /* one slot reads the constant zero unnegated, so the gate always emits 0;
   * the other slot reads a distinct node to keep the in-degree at 2 */
  CHECK( ( ( a.and_gates[0].child_a == a.const_zero_id() && !a.and_gates[0].neg_a ) ||
           ( a.and_gates[0].child_b == a.const_zero_id() && !a.and_gates[0].neg_b ) ) );
  CHECK( a.and_gates[0].child_a != a.and_gates[0].child_b );
  CHECK( aig_validity( a.to_dag() ) == 1.0 );
  TruthTable const tt = simulate( a );
  CHECK( tt.outputs[0] == std::vector<uint8_t>{ 0, 0 } );
}

TEST_CASE( "parse: gates outside every output cone are dropped" )
{
  Rng rng( 5 );
  auto [aig, tt] = random_aig( 3, 1, 12, rng );
  Dag const g = aig.to_dag();
  Rng dec( 3 );
  Aig const back = parse_dag_to_aig( g, dec );
  /* every AND feeds into some output cone */
  std::vector<char> live( back.num_nodes(), 0 );
  std::vector<int> stack;
  for ( const auto& w : back.outputs )
  {
    stack.push_back( w.child );
  }
  while ( !stack.empty() )
  {
    int const id = stack.back();
    stack.pop_back();
    if ( live[id] )
    {
      continue;
    }
    live[id] = 1;
    if ( id >= back.num_inputs_total() && !back.is_output_id( id ) )
    {
      stack.push_back( back.and_gates[id - back.num_inputs_total()].child_a );
      stack.push_back( back.and_gates[id - back.num_inputs_total()].child_b );
    }
  }
  for ( int k = 0; k < back.n_and(); ++k )
  {
    CHECK( live[back.and_id( k )] );
  }
}

TEST_CASE( "parse: total on fully random graphs" )
{
  Rng rng( 71 );
  for ( int trial = 0; trial < 1000; ++trial )
  {
    int const n = 2 + rng.uniform_int( 10 );
    std::vector<int> nodes( n ), edges( static_cast<size_t>( n ) * n, 0 );
    for ( int i = 0; i < n; ++i )
    {
      nodes[i] = rng.uniform_int( 3 );
      for ( int j = 0; j < n; ++j )
      {
        if ( i != j )
        {
          edges[static_cast<size_t>( i ) * n + j] = rng.uniform_int( 3 );
        }
      }
    }
    /* levels chosen arbitrarily; wiring may point anywhere */
    std::vector<int> lv( n );
    for ( int i = 0; i < n; ++i )
    {
      lv[i] = rng.uniform_int( 4 );
    }
    Dag const g = Dag::from_categories( 3, 3, nodes, edges, &lv );
    Aig const a = parse_dag_to_aig( g, rng );
    CHECK( aig_validity( a.to_dag() ) == doctest::Approx( 1.0 ) );
    TruthTable const tt = simulate( a ); /* must not throw */
    if ( a.n_out > 0 )
    {
      CHECK( tt.n_out() == a.n_out );
    }
  }
}

TEST_CASE( "generator: well formed, self consistent, sized to the task" )
{
  Rng rng( 77 );
  long nodes = 0;
  int const trials = 300;
  for ( int trial = 0; trial < trials; ++trial )
  {
    auto [aig, tt] = random_aig( 8, 2, 32, rng );
    CHECK( aig.num_nodes() <= 32 );
    CHECK( aig_validity( aig.to_dag() ) == doctest::Approx( 1.0 ) );
    CHECK( simulate( aig ).outputs == tt.outputs );
    nodes += aig.num_nodes();
  }
  double const mean = static_cast<double>( nodes ) / trials;
  /* generator sanity: paper-scale config keeps the historical size spread */
  CHECK( mean > 21.0 * 0.75 );
  CHECK( mean < 21.0 * 1.25 );
}

TEST_CASE( "generator: infeasible bounds rejected, determinism held" )
{
  Rng rng( 1 );
  CHECK_THROWS_AS( random_aig( 3, 1, 2, rng ), ShapeError );
  CHECK_THROWS_AS( random_aig( 0, 1, 8, rng ), ShapeError );

  Rng a( 42 ), b( 42 );
  auto [g1, t1] = random_aig( 4, 2, 20, a );
  auto [g2, t2] = random_aig( 4, 2, 20, b );
  CHECK( g1.to_dag().edge_cats() == g2.to_dag().edge_cats() );
  CHECK( t1.outputs == t2.outputs );
}
