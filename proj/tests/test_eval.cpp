/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "seadag/aig.hpp"
#include "seadag/eval.hpp"

using namespace seadag;

namespace
{

NoiseModel desk_model()
{
  return NoiseModel::cosine( 50, 8.0, { 0.4, 0.4, 0.2 }, { 0.85, 0.08, 0.07 },
                             ScheduleMode::BottomUp );
}

std::vector<DatasetRecord> tiny_dataset( int count, uint64_t seed )
{
  std::vector<DatasetRecord> records;
  for ( int i = 0; i < count; ++i )
  {
    Rng rng( split_seed( seed, i ) );
    auto [aig, tt] = random_aig( 3, 1, 10, rng );
    records.push_back( { 3, 1, aig.to_dag(), std::move( tt ) } );
  }
  return records;
}

/* emits each test record's own clean graph whenever the scaffold matches;
 * otherwise wires each gate to its lowest-id feasible children so the sample
 * is still a correctly wired circuit */
CaseDenoiserFactory oracle_factory( const std::vector<DatasetRecord>& test )
{
  return [&test]( int case_index, const DatasetRecord& ) {
    const Dag& clean = test[case_index].dag;
    return [clean]( const Dag& noisy, int, Tensor& pX, Tensor& pE ) {
      int const n = noisy.n();
      pX = Tensor( n, 3 );
      pE = Tensor( n * n, 3 );
      bool const match = n == clean.n();
      if ( match )
      {
        for ( int i = 0; i < n; ++i )
        {
          pX.at( i, clean.node_cat( i ) ) = 1.0;
          for ( int j = 0; j < n; ++j )
          {
            pE.at( i * n + j, i != j ? clean.edge_cat( i, j ) : 0 ) = 1.0;
          }
        }
        return;
      }
      std::vector<std::vector<char>> want( n, std::vector<char>( n, 0 ) );
      for ( int j = 0; j < n; ++j )
      {
        int const need = noisy.node_cat( j ) == kNodeAnd
                             ? 2
                             : ( noisy.node_cat( j ) == kNodeOutput ? 1 : 0 );
        int taken = 0;
        for ( int i = 0; i < n && taken < need; ++i )
        {
          if ( noisy.level( i ) < noisy.level( j ) &&
               noisy.node_cat( i ) != kNodeOutput )
          {
            want[i][j] = 1;
            ++taken;
          }
        }
      }
      for ( int i = 0; i < n; ++i )
      {
        pX.at( i, noisy.node_cat( i ) ) = 1.0;
        for ( int j = 0; j < n; ++j )
        {
          pE.at( i * n + j, want[i][j] ? kEdgeNormal : kEdgeAbsent ) = 1.0;
        }
      }
    };
  };
}

} // namespace

TEST_CASE( "histogram distance: hand-computed cases" )
{
  /* identical -> 0 */
  std::map<int, long> a = { { 1, 2 }, { 2, 2 } };
  CHECK( histogram_emd( a, a ) == doctest::Approx( 0.0 ) );

  /* unit mass moved one bin -> 1 */
  std::map<int, long> b = { { 1, 1 } };
  std::map<int, long> c = { { 2, 1 } };
  CHECK( histogram_emd( b, c ) == doctest::Approx( 1.0 ) );

  /* unit mass moved three bins -> 3 */
  std::map<int, long> d = { { 5, 1 } };
  CHECK( histogram_emd( c, d ) == doctest::Approx( 3.0 ) );

  /* half the mass moved one bin -> 0.5, symmetric */
  std::map<int, long> e = { { 1, 1 }, { 2, 1 } };
  std::map<int, long> f = { { 1, 1 }, { 3, 1 } };
  CHECK( histogram_emd( e, f ) == doctest::Approx( 0.5 ) );
  CHECK( histogram_emd( f, e ) == doctest::Approx( 0.5 ) );

  /* counts are normalized before comparing */
  std::map<int, long> g = { { 1, 10 }, { 2, 10 } };
  CHECK( histogram_emd( e, g ) == doctest::Approx( 0.0 ) );
}

TEST_CASE( "evaluate: oracle denoiser scores validity and accuracy 1" )
{
  auto const test = tiny_dataset( 8, 7 );
  /* stats that force the exact reference scaffolds are not available in
   * general; harvest from the same records so sizes frequently match */
  LevelStructureStats const stats = harvest_level_stats( test );
  NoiseModel const nm = desk_model();
  EvalReport const report = evaluate( oracle_factory( test ), test, 8, nm, stats, 5 );
  CHECK( report.validity == doctest::Approx( 1.0 ) );
  /* some scaffolds inevitably miss; the oracle still lands many exact hits */
  CHECK( report.accuracy > 0.6 );
  REQUIRE( report.cases.size() == 8 );
  for ( const EvalCase& c : report.cases )
  {
    CHECK( c.accuracy >= 0.0 );
    CHECK( c.accuracy <= 1.0 );
    CHECK( c.best_k >= 0 );
    CHECK( c.best_k < 8 );
  }
}

TEST_CASE( "evaluate: per-case streams make K=1 a prefix of K=4" )
{
  auto const test = tiny_dataset( 5, 11 );
  LevelStructureStats const stats = harvest_level_stats( test );
  NoiseModel const nm = desk_model();
  EvalReport const k1 = evaluate( oracle_factory( test ), test, 1, nm, stats, 9 );
  EvalReport const k4 = evaluate( oracle_factory( test ), test, 4, nm, stats, 9 );
  for ( size_t c = 0; c < test.size(); ++c )
  {
    CHECK( k4.cases[c].accuracy >= k1.cases[c].accuracy - 1e-12 );
    if ( k4.cases[c].best_k == 0 )
    {
      CHECK( k4.cases[c].accuracy == doctest::Approx( k1.cases[c].accuracy ) );
    }
  }
}

TEST_CASE( "evaluate: thread count leaves the report unchanged" )
{
  auto const test = tiny_dataset( 6, 13 );
  LevelStructureStats const stats = harvest_level_stats( test );
  NoiseModel const nm = desk_model();
  EvalReport const serial = evaluate( oracle_factory( test ), test, 3, nm, stats, 21, 1 );
  EvalReport const threaded =
      evaluate( oracle_factory( test ), test, 3, nm, stats, 21, 4 );
  CHECK( serial.validity == doctest::Approx( threaded.validity ) );
  CHECK( serial.accuracy == doctest::Approx( threaded.accuracy ) );
  CHECK( serial.level_emd == doctest::Approx( threaded.level_emd ) );
  CHECK( serial.sample_hist == threaded.sample_hist );
}

TEST_CASE( "evaluate: rejects empty input" )
{
  LevelStructureStats stats;
  NoiseModel const nm = desk_model();
  std::vector<DatasetRecord> const empty;
  CHECK_THROWS_AS( evaluate( oracle_factory( empty ), empty, 3, nm, stats, 1 ),
                   ConfigError );
}

TEST_CASE( "report: json fields and histogram csv" )
{
  EvalReport r;
  r.validity = 0.5;
  r.accuracy = 0.75;
  r.level_emd = 1.25;
  r.sample_hist = { { 1, 3 }, { 2, 1 } };
  r.reference_hist = { { 2, 4 } };
  r.cases.push_back( { 0.75, 2, 1 } );

  std::string const text = report_to_json( r );
  CHECK( text.find( "\"validity\"" ) != std::string::npos );
  CHECK( text.find( "\"accuracy\"" ) != std::string::npos );
  CHECK( text.find( "\"level_emd\"" ) != std::string::npos );
  CHECK( text.find( "\"histograms\"" ) != std::string::npos );
  CHECK( text.find( "\"cases\"" ) != std::string::npos );
  CHECK( text.find( "pooled" ) != std::string::npos );

  std::string const csv_path = "eval_hist_test.csv";
  write_histogram_csv( r, csv_path );
  std::ifstream is( csv_path );
  std::string line;
  std::getline( is, line );
  CHECK( line == "level,sample_count,reference_count" );
  std::getline( is, line );
  CHECK( line == "1,3,0" );
  std::getline( is, line );
  CHECK( line == "2,1,4" );
  std::remove( csv_path.c_str() );
}

TEST_CASE( "ablation: configs must differ in exactly one field" )
{
  TrainConfig base;
  TrainConfig same = base;
  TrainConfig two = base;
  two.lambda = 0.0;
  two.beta = 0.0;
  auto const data = tiny_dataset( 4, 17 );
  CHECK_THROWS_AS(
      ablation_run( base, same, data, data, data, 1, 1, "." ), ConfigError );
  CHECK_THROWS_AS(
      ablation_run( base, two, data, data, data, 1, 1, "." ), ConfigError );
}
