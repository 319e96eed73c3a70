/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seadag/aig.hpp"
#include "seadag/checkpoint.hpp"
#include "seadag/dataset.hpp"
#include "seadag/eval.hpp"
#include "seadag/mcts.hpp"
#include "seadag/selftest.hpp"
#include "seadag/trainer.hpp"

namespace
{

using namespace seadag;

int resolve_threads( int flag_value )
{
  if ( flag_value > 0 )
  {
    return flag_value;
  }
  if ( const char* env = std::getenv( "SEADAG_THREADS" ) )
  {
    int const v = std::atoi( env );
    if ( v > 0 )
    {
      return v;
    }
  }
  return 1;
}

/* --tt accepts comma-separated hex columns (needs an input count) or a path
 * to a JSONL record whose table is used as the condition */
TruthTable parse_tt_argument( const std::string& arg, int n_inputs_flag )
{
  std::ifstream probe( arg );
  if ( probe.good() )
  {
    std::string line;
    while ( std::getline( probe, line ) )
    {
      if ( !line.empty() )
      {
        return record_from_json_line( line ).tt;
      }
    }
    throw IoError( "condition file is empty: " + arg );
  }
  if ( n_inputs_flag <= 0 )
  {
    throw ConfigError( "--tt given as hex needs --n-inputs" );
  }
  TruthTable tt;
  tt.n_in = n_inputs_flag;
  std::stringstream ss( arg );
  std::string column;
  while ( std::getline( ss, column, ',' ) )
  {
    tt.outputs.push_back( column_from_hex( column, tt.n_in ) );
  }
  if ( tt.outputs.empty() )
  {
    throw ConfigError( "--tt lists no columns" );
  }
  return tt;
}

/* an Aig either parsed from a dataset record line or read from the native
 * JSON written by refine */
Aig read_aig_file( const std::string& path, TruthTable* tt_out )
{
  std::ifstream is( path );
  if ( !is )
  {
    throw IoError( "cannot open: " + path );
  }
  std::string first;
  while ( std::getline( is, first ) && first.empty() )
  {
  }
  if ( first.empty() )
  {
    throw IoError( "no content in: " + path );
  }
  if ( first.find( "\"and_gates\"" ) != std::string::npos )
  {
    nlohmann::json const j = nlohmann::json::parse( first );
    Aig aig;
    aig.n_in = j.at( "n_in" ).get<int>();
    aig.n_out = j.at( "n_out" ).get<int>();
    aig.has_const_zero = j.at( "has_const_zero" ).get<bool>();
    for ( const auto& g : j.at( "and_gates" ) )
    {
      aig.and_gates.push_back( { g.at( 0 ).get<int>(), g.at( 1 ).get<bool>(),
                                 g.at( 2 ).get<int>(), g.at( 3 ).get<bool>() } );
    }
    for ( const auto& w : j.at( "outputs" ) )
    {
      aig.outputs.push_back( { w.at( 0 ).get<int>(), w.at( 1 ).get<bool>() } );
    }
    if ( tt_out != nullptr )
    {
      *tt_out = simulate( aig );
    }
    return aig;
  }
  DatasetRecord const rec = record_from_json_line( first );
  if ( tt_out != nullptr )
  {
    *tt_out = rec.tt;
  }
  Rng rng( 0 ); /* clean records decode without choices */
  return parse_dag_to_aig( rec.dag, rng );
}

std::string aig_to_json( const Aig& aig, double reward_before, double reward_after )
{
  nlohmann::ordered_json j;
  j["n_in"] = aig.n_in;
  j["n_out"] = aig.n_out;
  j["has_const_zero"] = aig.has_const_zero;
  nlohmann::ordered_json gates = nlohmann::ordered_json::array();
  for ( const AndGate& g : aig.and_gates )
  {
    gates.push_back( { g.child_a, g.neg_a, g.child_b, g.neg_b } );
  }
  j["and_gates"] = std::move( gates );
  nlohmann::ordered_json outs = nlohmann::ordered_json::array();
  for ( const OutputWire& w : aig.outputs )
  {
    outs.push_back( { w.child, w.neg } );
  }
  j["outputs"] = std::move( outs );
  j["reward_before"] = reward_before;
  j["reward_after"] = reward_after;
  TruthTable const tt = simulate( aig );
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for ( const auto& column : tt.outputs )
  {
    cols.push_back( column_to_hex( column ) );
  }
  j["tt"] = std::move( cols );
  return j.dump();
}

int cmd_gen_data( int n_inputs, int n_outputs, int max_gates, int count, uint64_t seed,
                  const std::string& out )
{
  std::vector<DatasetRecord> records;
  records.reserve( count );
  for ( int i = 0; i < count; ++i )
  {
    Rng rng( split_seed( seed, static_cast<uint64_t>( i ) ) );
    auto [aig, tt] = random_aig( n_inputs, n_outputs, max_gates, rng );
    records.push_back( { n_inputs, n_outputs, aig.to_dag(), std::move( tt ) } );
  }
  write_dataset( out, records );
  write_level_stats( out + ".stats.json", harvest_level_stats( records ) );
  long nodes = 0;
  for ( const DatasetRecord& r : records )
  {
    nodes += r.dag.n();
  }
  std::cout << "wrote " << records.size() << " graphs to " << out << " (mean nodes "
            << static_cast<double>( nodes ) / records.size() << ")\n";
  return 0;
}

int cmd_train( const std::string& config_path, const std::string& data_path,
               const std::string& val_path, const std::string& out, int threads,
               int epochs_override, long seed_override )
{
  TrainConfig cfg =
      config_path.empty() ? TrainConfig{} : read_train_config( config_path );
  cfg.threads = resolve_threads( threads );
  if ( epochs_override > 0 )
  {
    cfg.epochs = epochs_override;
  }
  if ( seed_override >= 0 )
  {
    cfg.seed = static_cast<uint64_t>( seed_override );
  }
  std::vector<DatasetRecord> const all = read_dataset( data_path );
  std::vector<DatasetRecord> train, val;
  if ( val_path.empty() )
  {
    split_dataset( all, cfg.val_fraction, cfg.seed, train, val );
  }
  else
  {
    train = all;
    val = read_dataset( val_path );
  }
  TrainResult const res = train_loop( cfg, train, val, out, out + ".metrics.csv" );
  std::cout << "final train total " << res.final_train.total << ", val graph "
            << res.val_l_graph << ", val condition " << res.val_l_cond << "\n"
            << "checkpoint " << out << "\n";
  return 0;
}

int cmd_sample( const std::string& ckpt, const std::string& tt_arg, int n_inputs_flag,
                int num, uint64_t seed, const std::string& out,
                const std::string& dot_path )
{
  Checkpoint const ck = load_checkpoint( ckpt );
  TruthTable const tt =
      parse_tt_argument( tt_arg, n_inputs_flag > 0 ? n_inputs_flag : ck.n_in );
  NoiseModel const nm = ck.noise_model();
  DenoiseFn const denoise = make_denoiser( ck.params, nm, tt );
  std::ofstream os( out, std::ios::trunc );
  if ( !os )
  {
    throw IoError( "cannot open for writing: " + out );
  }
  ReverseOptions opt;
  opt.k_x = ck.params.config.k_x;
  opt.k_e = ck.params.config.k_e;
  for ( int k = 0; k < num; ++k )
  {
    Rng rng( split_seed( seed, static_cast<uint64_t>( k ) ) );
    Dag const dag = reverse_sample( denoise, ck.stats, nm, tt.n_in, tt.n_out(), rng, opt );
    os << record_to_json_line( { tt.n_in, tt.n_out(), dag, tt } ) << '\n';
    if ( k == 0 && !dot_path.empty() )
    {
      std::ofstream dot( dot_path, std::ios::trunc );
      if ( !dot )
      {
        throw IoError( "cannot open for writing: " + dot_path );
      }
      dot << to_dot( dag, { "IN", "AND", "OUT" } );
    }
  }
  if ( !os )
  {
    throw IoError( "write failed: " + out );
  }
  std::cout << "wrote " << num << " samples to " << out << "\n";
  return 0;
}

int cmd_refine( const std::string& aig_path, const std::string& tt_arg, int sims,
                int steps, uint64_t seed, const std::string& out )
{
  TruthTable tt;
  Aig const start = read_aig_file( aig_path, &tt );
  if ( !tt_arg.empty() )
  {
    tt = parse_tt_argument( tt_arg, start.n_in );
  }
  MctsConfig cfg;
  cfg.simulations = sims;
  cfg.steps = steps;
  Rng rng( seed );
  double before = 0.0, after = 0.0;
  Aig const refined = mcts_refine( start, tt, cfg, rng, &before, &after );
  std::cout << "reward " << before << " -> " << after << "\n";
  if ( !out.empty() )
  {
    std::ofstream os( out, std::ios::trunc );
    if ( !os )
    {
      throw IoError( "cannot open for writing: " + out );
    }
    os << aig_to_json( refined, before, after ) << '\n';
    if ( !os )
    {
      throw IoError( "write failed: " + out );
    }
  }
  return 0;
}

int cmd_simulate( const std::string& aig_path )
{
  Aig const aig = read_aig_file( aig_path, nullptr );
  TruthTable const tt = simulate( aig );
  for ( const auto& column : tt.outputs )
  {
    std::cout << column_to_hex( column ) << "\n";
  }
  return 0;
}

int cmd_eval( const std::string& ckpt, const std::string& test_path, int K,
              const std::string& report_path, const std::string& hist_path,
              uint64_t seed, int threads )
{
  Checkpoint const ck = load_checkpoint( ckpt );
  std::vector<DatasetRecord> const test = read_dataset( test_path );
  NoiseModel const nm = ck.noise_model();
  EvalReport const report = evaluate( checkpoint_denoiser_factory( ck, nm ), test, K,
                                      nm, ck.stats, seed, resolve_threads( threads ) );
  write_report( report, report_path );
  if ( !hist_path.empty() )
  {
    write_histogram_csv( report, hist_path );
  }
  std::cout << "validity " << report.validity << ", accuracy " << report.accuracy
            << ", level_emd " << report.level_emd << "\n";
  return 0;
}

int cmd_selftest( const std::string& suite )
{
  std::vector<SelftestResult> const results = run_selftests( suite );
  if ( results.empty() )
  {
    std::cerr << "no suite matches '" << suite << "'\n";
    return 2;
  }
  bool all = true;
  for ( const SelftestResult& r : results )
  {
    std::cout << r.suite << ": " << ( r.passed ? "PASS" : "FAIL" );
    if ( !r.passed )
    {
      std::cout << " (" << r.detail << ")";
      all = false;
    }
    std::cout << "\n";
  }
  return all ? 0 : 1;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "conditional AIG synthesis via semi-autoregressive graph diffusion" };
  app.require_subcommand( 1 );

  /* gen-data */
  int gd_n_in = 8, gd_n_out = 2, gd_max_gates = 32, gd_count = 0;
  uint64_t gd_seed = 0;
  std::string gd_out;
  CLI::App* gen = app.add_subcommand( "gen-data", "synthesize a random AIG dataset" );
  gen->add_option( "--n-inputs", gd_n_in, "primary inputs per graph" );
  gen->add_option( "--n-outputs", gd_n_out, "outputs per graph" );
  gen->add_option( "--max-gates", gd_max_gates, "node budget per graph" );
  gen->add_option( "--count", gd_count, "number of graphs" )->required();
  gen->add_option( "--seed", gd_seed, "base seed" );
  gen->add_option( "--out", gd_out, "output JSONL path" )->required();

  /* train */
  std::string tr_config, tr_data, tr_val, tr_out;
  int tr_threads = 0, tr_epochs = 0;
  long tr_seed = -1;
  CLI::App* train = app.add_subcommand( "train", "train a denoiser" );
  train->add_option( "--config", tr_config, "JSON config path" );
  train->add_option( "--data", tr_data, "training JSONL" )->required();
  train->add_option( "--val", tr_val, "validation JSONL (default: split from --data)" );
  train->add_option( "--out", tr_out, "checkpoint path" )->required();
  train->add_option( "--threads", tr_threads, "worker threads (SEADAG_THREADS fallback)" );
  train->add_option( "--epochs", tr_epochs, "override config epochs" );
  train->add_option( "--seed", tr_seed, "override config seed" );

  /* sample */
  std::string sm_ckpt, sm_tt, sm_out, sm_dot;
  int sm_n_in = 0, sm_num = 1;
  uint64_t sm_seed = 0;
  CLI::App* sample = app.add_subcommand( "sample", "sample graphs for a condition" );
  sample->add_option( "--ckpt", sm_ckpt, "checkpoint path" )->required();
  sample->add_option( "--tt", sm_tt, "hex columns (comma separated) or JSONL record path" )
      ->required();
  sample->add_option( "--n-inputs", sm_n_in, "input count for hex conditions" );
  sample->add_option( "--num", sm_num, "samples to draw" );
  sample->add_option( "--seed", sm_seed, "base seed" );
  sample->add_option( "--out", sm_out, "output JSONL path" )->required();
  sample->add_option( "--dot", sm_dot, "write the first sample as GraphViz" );

  /* refine */
  std::string rf_aig, rf_tt, rf_out;
  int rf_sims = 500, rf_steps = 50;
  uint64_t rf_seed = 0;
  CLI::App* refine = app.add_subcommand( "refine", "tree-search rewiring refinement" );
  refine->add_option( "--aig", rf_aig, "record JSONL or native circuit JSON" )->required();
  refine->add_option( "--tt", rf_tt, "target condition (defaults to the record's)" );
  refine->add_option( "--sims", rf_sims, "simulations per decision" );
  refine->add_option( "--steps", rf_steps, "decision steps" );
  refine->add_option( "--seed", rf_seed, "seed" );
  refine->add_option( "--out", rf_out, "write the refined circuit JSON here" );

  /* simulate */
  std::string si_aig;
  CLI::App* simulate = app.add_subcommand( "simulate", "print a circuit's truth table" );
  simulate->add_option( "--aig", si_aig, "record JSONL or native circuit JSON" )
      ->required();

  /* eval */
  std::string ev_ckpt, ev_test, ev_report, ev_hist;
  int ev_k = 10, ev_threads = 0;
  uint64_t ev_seed = 0;
  CLI::App* eval = app.add_subcommand( "eval", "best-of-K evaluation on a test set" );
  eval->add_option( "--ckpt", ev_ckpt, "checkpoint path" )->required();
  eval->add_option( "--test", ev_test, "test JSONL" )->required();
  eval->add_option( "--k", ev_k, "samples per condition" );
  eval->add_option( "--report", ev_report, "report JSON path" )->required();
  eval->add_option( "--hist", ev_hist, "level histogram CSV path" );
  eval->add_option( "--seed", ev_seed, "base seed" );
  eval->add_option( "--threads", ev_threads, "worker threads (SEADAG_THREADS fallback)" );

  /* selftest */
  std::string st_suite;
  CLI::App* selftest = app.add_subcommand( "selftest", "built-in consistency checks" );
  selftest->add_option( "--suite", st_suite, "substring filter on suite names" );

  try
  {
    app.parse( argc, argv );
    if ( gen->parsed() )
    {
      return cmd_gen_data( gd_n_in, gd_n_out, gd_max_gates, gd_count, gd_seed, gd_out );
    }
    if ( train->parsed() )
    {
      return cmd_train( tr_config, tr_data, tr_val, tr_out, tr_threads, tr_epochs,
                        tr_seed );
    }
    if ( sample->parsed() )
    {
      return cmd_sample( sm_ckpt, sm_tt, sm_n_in, sm_num, sm_seed, sm_out, sm_dot );
    }
    if ( refine->parsed() )
    {
      return cmd_refine( rf_aig, rf_tt, rf_sims, rf_steps, rf_seed, rf_out );
    }
    if ( simulate->parsed() )
    {
      return cmd_simulate( si_aig );
    }
    if ( eval->parsed() )
    {
      return cmd_eval( ev_ckpt, ev_test, ev_k, ev_report, ev_hist, ev_seed, ev_threads );
    }
    if ( selftest->parsed() )
    {
      return cmd_selftest( st_suite );
    }
    return 2;
  }
  catch ( const CLI::ParseError& e )
  {
    int const code = app.exit( e );
    return code == 0 ? 0 : 2;
  }
  catch ( const ConfigError& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  catch ( const IoError& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  catch ( const NumericalError& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  catch ( const nlohmann::json::exception& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  catch ( const std::exception& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
