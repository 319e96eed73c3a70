/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include <json.hpp>

#include "seadag/aig.hpp"
#include "seadag/denoiser.hpp"

namespace seadag
{

double histogram_emd( const std::map<int, long>& a, const std::map<int, long>& b )
{
  long ta = 0, tb = 0;
  for ( const auto& [k, v] : a )
  {
    ta += v;
  }
  for ( const auto& [k, v] : b )
  {
    tb += v;
  }
  if ( ta == 0 || tb == 0 )
  {
    return 0.0;
  }
  int lo = 1 << 30, hi = -( 1 << 30 );
  for ( const auto& [k, v] : a )
  {
    lo = std::min( lo, k );
    hi = std::max( hi, k );
  }
  for ( const auto& [k, v] : b )
  {
    lo = std::min( lo, k );
    hi = std::max( hi, k );
  }
  double cdf_a = 0.0, cdf_b = 0.0, emd = 0.0;
  for ( int x = lo; x <= hi; ++x )
  {
    auto ia = a.find( x );
    auto ib = b.find( x );
    cdf_a += ia != a.end() ? static_cast<double>( ia->second ) / ta : 0.0;
    cdf_b += ib != b.end() ? static_cast<double>( ib->second ) / tb : 0.0;
    emd += std::abs( cdf_a - cdf_b );
  }
  return emd;
}

EvalReport evaluate( const CaseDenoiserFactory& make_denoiser,
                     const std::vector<DatasetRecord>& test, int K,
                     const NoiseModel& nm, const LevelStructureStats& stats,
                     uint64_t seed, int threads )
{
  if ( test.empty() || K < 1 )
  {
    throw ConfigError( "evaluate: need a non-empty test set and K >= 1" );
  }
  int const cases = static_cast<int>( test.size() );

  struct CaseOut
  {
    long valid_gates = 0;
    long total_gates = 0;
    EvalCase summary;
  };
  std::vector<CaseOut> outs( cases );

  auto run_case = [&]( int c ) {
    const DatasetRecord& rec = test[c];
    DenoiseFn denoise = make_denoiser( c, rec );
    CaseOut& out = outs[c];
    out.summary.accuracy = -1.0;
    uint64_t const case_seed = split_seed( seed, static_cast<uint64_t>( c ) );
    for ( int k = 0; k < K; ++k )
    {
      Rng rng( split_seed( case_seed, static_cast<uint64_t>( k ) ) );
      ReverseOptions opt;
      opt.k_x = kNodeTypes;
      opt.k_e = kEdgeTypes;
      Dag const raw = reverse_sample( denoise, stats, nm, rec.n_in, rec.n_out, rng, opt );
      ValidityCount const vc = aig_validity_counts( raw );
      out.valid_gates += vc.valid;
      out.total_gates += vc.gates;
      Aig const parsed = parse_dag_to_aig( raw, rng );
      double const acc = function_accuracy( simulate( parsed ), rec.tt );
      if ( acc > out.summary.accuracy )
      {
        out.summary.accuracy = acc;
        out.summary.best_k = k;
        std::vector<int> const levels = parsed.levels();
        out.summary.max_level =
            levels.empty() ? 0 : *std::max_element( levels.begin(), levels.end() );
      }
    }
  };

  int const workers = std::max( 1, std::min( threads, cases ) );
  if ( workers == 1 )
  {
    for ( int c = 0; c < cases; ++c )
    {
      run_case( c );
    }
  }
  else
  {
    std::vector<std::thread> pool;
    for ( int w = 0; w < workers; ++w )
    {
      pool.emplace_back( [&, w]() {
        for ( int c = w; c < cases; c += workers )
        {
          run_case( c );
        }
      } );
    }
    for ( auto& th : pool )
    {
      th.join();
    }
  }

  EvalReport report;
  long valid = 0, total = 0;
  double acc_sum = 0.0;
  for ( int c = 0; c < cases; ++c )
  {
    valid += outs[c].valid_gates;
    total += outs[c].total_gates;
    acc_sum += outs[c].summary.accuracy;
    report.cases.push_back( outs[c].summary );
    report.sample_hist[outs[c].summary.max_level] += 1;
    report.reference_hist[test[c].dag.max_level()] += 1;
  }
  report.validity = total == 0 ? 1.0 : static_cast<double>( valid ) / total;
  report.accuracy = acc_sum / cases;
  report.level_emd = histogram_emd( report.sample_hist, report.reference_hist );
  return report;
}

CaseDenoiserFactory checkpoint_denoiser_factory( const Checkpoint& ck,
                                                 const NoiseModel& nm )
{
  return [&ck, &nm]( int, const DatasetRecord& rec ) {
    return make_denoiser( ck.params, nm, rec.tt );
  };
}

std::string report_to_json( const EvalReport& r )
{
  nlohmann::ordered_json j;
  j["validity"] = r.validity;
  j["accuracy"] = r.accuracy;
  j["level_emd"] = r.level_emd;
  j["validity_note"] = r.validity_note;
  nlohmann::ordered_json sample = nlohmann::ordered_json::object();
  nlohmann::ordered_json reference = nlohmann::ordered_json::object();
  for ( const auto& [lvl, count] : r.sample_hist )
  {
    sample[std::to_string( lvl )] = count;
  }
  for ( const auto& [lvl, count] : r.reference_hist )
  {
    reference[std::to_string( lvl )] = count;
  }
  j["histograms"] = { { "sample", std::move( sample ) },
                      { "reference", std::move( reference ) } };
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for ( const EvalCase& c : r.cases )
  {
    cases.push_back( { { "accuracy", c.accuracy },
                       { "best_k", c.best_k },
                       { "max_level", c.max_level } } );
  }
  j["cases"] = std::move( cases );
  return j.dump( 2 );
}

void write_report( const EvalReport& r, const std::string& path )
{
  std::ofstream os( path, std::ios::trunc );
  if ( !os )
  {
    throw IoError( "report: cannot open for writing: " + path );
  }
  os << report_to_json( r ) << '\n';
  if ( !os )
  {
    throw IoError( "report: write failed: " + path );
  }
}

void write_histogram_csv( const EvalReport& r, const std::string& path )
{
  std::ofstream os( path, std::ios::trunc );
  if ( !os )
  {
    throw IoError( "histogram: cannot open for writing: " + path );
  }
  os << "level,sample_count,reference_count\n";
  std::set<int> levels;
  for ( const auto& [lvl, count] : r.sample_hist )
  {
    levels.insert( lvl );
  }
  for ( const auto& [lvl, count] : r.reference_hist )
  {
    levels.insert( lvl );
  }
  for ( int lvl : levels )
  {
    auto is = r.sample_hist.find( lvl );
    auto ir = r.reference_hist.find( lvl );
    os << lvl << ',' << ( is != r.sample_hist.end() ? is->second : 0 ) << ','
       << ( ir != r.reference_hist.end() ? ir->second : 0 ) << '\n';
  }
  if ( !os )
  {
    throw IoError( "histogram: write failed: " + path );
  }
}

namespace
{

int count_config_differences( const TrainConfig& a, const TrainConfig& b )
{
  nlohmann::json const ja = nlohmann::json::parse( train_config_to_json( a ) );
  nlohmann::json const jb = nlohmann::json::parse( train_config_to_json( b ) );
  int diffs = 0;
  for ( const auto& [key, value] : ja.items() )
  {
    if ( jb.at( key ) != value )
    {
      ++diffs;
    }
  }
  return diffs;
}

} // namespace

std::pair<EvalReport, EvalReport> ablation_run( const TrainConfig& base,
                                                const TrainConfig& variant,
                                                const std::vector<DatasetRecord>& train,
                                                const std::vector<DatasetRecord>& val,
                                                const std::vector<DatasetRecord>& test,
                                                int K, uint64_t eval_seed,
                                                const std::string& scratch_dir )
{
  if ( count_config_differences( base, variant ) != 1 )
  {
    throw ConfigError( "ablation: configs must differ in exactly one field" );
  }
  auto run_one = [&]( const TrainConfig& cfg, const std::string& tag ) {
    TrainResult tr = train_loop( cfg, train, val, scratch_dir + "/" + tag + ".ckpt",
                                 scratch_dir + "/" + tag + ".metrics.csv" );
    NoiseModel const nm = tr.checkpoint.noise_model();
    return evaluate( checkpoint_denoiser_factory( tr.checkpoint, nm ), test, K, nm,
                     tr.checkpoint.stats, eval_seed, cfg.threads );
  };
  EvalReport const a = run_one( base, "ablate_base" );
  EvalReport const b = run_one( variant, "ablate_variant" );
  return { a, b };
}

} // namespace seadag
