/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/trainer.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "seadag/aig.hpp"
#include "seadag/diffusion.hpp"

namespace seadag
{

void TrainConfig::validate() const
{
  if ( T < 1 || beta < 0 || beta >= T || batch_size < 1 || epochs < 1 ||
       learning_rate <= 0 || weight_decay < 0 || val_fraction < 0 || val_fraction >= 1 ||
       checkpoint_every < 1 || threads < 1 )
  {
    throw ConfigError( "train config: values out of range" );
  }
  DenoiserConfig dc;
  dc.layers = layers;
  dc.hidden = hidden;
  dc.heads = heads;
  dc.validate();
}

TrainConfig train_config_from_json( const std::string& text )
{
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse( text );
  }
  catch ( const nlohmann::json::exception& e )
  {
    throw ConfigError( std::string( "train config: malformed JSON: " ) + e.what() );
  }
  if ( !j.is_object() )
  {
    throw ConfigError( "train config: top level must be an object" );
  }
  TrainConfig c;
  for ( const auto& [key, value] : j.items() )
  {
    try
    {
      if ( key == "T" )
      {
        c.T = value.get<int>();
      }
      else if ( key == "beta" )
      {
        c.beta = value.get<double>();
      }
      else if ( key == "lambda" )
      {
        c.lambda = value.get<double>();
      }
      else if ( key == "layers" )
      {
        c.layers = value.get<int>();
      }
      else if ( key == "hidden" )
      {
        c.hidden = value.get<int>();
      }
      else if ( key == "heads" )
      {
        c.heads = value.get<int>();
      }
      else if ( key == "learning_rate" )
      {
        c.learning_rate = value.get<double>();
      }
      else if ( key == "weight_decay" )
      {
        c.weight_decay = value.get<double>();
      }
      else if ( key == "batch_size" )
      {
        c.batch_size = value.get<int>();
      }
      else if ( key == "epochs" )
      {
        c.epochs = value.get<int>();
      }
      else if ( key == "seed" )
      {
        c.seed = value.get<uint64_t>();
      }
      else if ( key == "mode" )
      {
        c.mode = schedule_mode_from_name( value.get<std::string>() );
      }
      else if ( key == "node_diffusion_enabled" )
      {
        c.node_diffusion_enabled = value.get<bool>();
      }
      else if ( key == "grad_clip" )
      {
        c.grad_clip = value.get<double>();
      }
      else if ( key == "checkpoint_every" )
      {
        c.checkpoint_every = value.get<int>();
      }
      else if ( key == "val_fraction" )
      {
        c.val_fraction = value.get<double>();
      }
      else if ( key == "threads" )
      {
        c.threads = value.get<int>();
      }
      else
      {
        throw ConfigError( "train config: unknown key \"" + key + "\"" );
      }
    }
    catch ( const nlohmann::json::exception& e )
    {
      throw ConfigError( "train config: bad value for \"" + key + "\": " + e.what() );
    }
  }
  c.validate();
  return c;
}

std::string train_config_to_json( const TrainConfig& c )
{
  nlohmann::ordered_json j;
  j["T"] = c.T;
  j["beta"] = c.beta;
  j["lambda"] = c.lambda;
  j["layers"] = c.layers;
  j["hidden"] = c.hidden;
  j["heads"] = c.heads;
  j["learning_rate"] = c.learning_rate;
  j["weight_decay"] = c.weight_decay;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["mode"] = schedule_mode_name( c.mode );
  j["node_diffusion_enabled"] = c.node_diffusion_enabled;
  j["grad_clip"] = c.grad_clip;
  j["checkpoint_every"] = c.checkpoint_every;
  j["val_fraction"] = c.val_fraction;
  j["threads"] = c.threads;
  return j.dump( 2 );
}

TrainConfig read_train_config( const std::string& path )
{
  std::ifstream is( path );
  if ( !is )
  {
    throw IoError( "train config: cannot open: " + path );
  }
  std::stringstream ss;
  ss << is.rdbuf();
  return train_config_from_json( ss.str() );
}

namespace
{

DenoiserConfig denoiser_config_of( const TrainConfig& cfg )
{
  DenoiserConfig dc;
  dc.layers = cfg.layers;
  dc.hidden = cfg.hidden;
  dc.heads = cfg.heads;
  dc.k_x = kNodeTypes;
  dc.k_e = kEdgeTypes;
  dc.cond_cols = kConditionDim;
  return dc;
}

void run_sharded( int items, int threads, const std::function<void( int, int, int )>& fn )
{
  threads = std::max( 1, std::min( threads, items ) );
  if ( threads == 1 )
  {
    fn( 0, items, 0 );
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve( threads );
  int const per = ( items + threads - 1 ) / threads;
  for ( int s = 0; s < threads; ++s )
  {
    int const lo = s * per;
    int const hi = std::min( items, lo + per );
    if ( lo >= hi )
    {
      break;
    }
    pool.emplace_back( [lo, hi, s, &fn]() { fn( lo, hi, s ); } );
  }
  for ( auto& th : pool )
  {
    th.join();
  }
}

} // namespace

LossBreakdown example_loss( const DenoiserParams& params, const NoisyExample& ex,
                            const TrainConfig& cfg, const NoiseModel& nm,
                            GradBuffer* grads )
{
  /* A NaN weight can vanish inside the forward pass (relu(NaN) reads as 0),
     so the activations look clean while the model is already poisoned. Check
     the parameters themselves. */
  for_each_tensor( params, [&]( const std::string& name, const Tensor& t ) {
    if ( !all_finite( t ) )
    {
      throw NumericalError( "example loss: non-finite parameter " + name );
    }
  } );
  Tensor const cond = encode_condition( ex.tt, ex.roles );
  GraphFeatures const gf = extract_features( ex.noisy, ex.t, nm, cond );

  ad::Tape tape;
  VarMap vm = bind_params( tape, params );
  ForwardVars fv = forward_on_tape( tape, vm, params.config, gf );
  ad::Var l_graph = graph_ce_loss( tape, fv.px, fv.pe, ex.clean,
                                   cfg.node_diffusion_enabled );
  ad::Var soft = soft_simulate( tape, fv.pe, ex.clean.node_cats(), ex.clean.levels(),
                                ex.tt.n_in, &ex.roles );
  ad::Var l_cond = condition_loss( tape, soft, ex.tt );
  ad::Var total = tape.add( l_graph, tape.scale( l_cond, cfg.lambda ) );

  LossBreakdown b;
  b.l_graph = tape.value( l_graph ).v[0];
  b.l_cond = tape.value( l_cond ).v[0];
  b.lambda = cfg.lambda;
  b.total = tape.value( total ).v[0];
  if ( !std::isfinite( b.total ) )
  {
    throw NumericalError( "example loss: non-finite total (t=" +
                          std::to_string( ex.t ) + ")" );
  }

  if ( grads != nullptr )
  {
    tape.backward( total );
    for ( size_t i = 0; i < grads->names.size(); ++i )
    {
      const Tensor& g = tape.grad( vm.at( grads->names[i] ) );
      for ( size_t j = 0; j < g.v.size(); ++j )
      {
        grads->g[i].v[j] += g.v[j];
      }
    }
  }
  return b;
}

LossBreakdown train_step_on_noisy( DenoiserParams& params, OptimizerState& opt,
                                   const std::vector<NoisyExample>& batch,
                                   const TrainConfig& cfg, const NoiseModel& nm )
{
  if ( batch.empty() )
  {
    throw ConfigError( "train step: empty batch" );
  }
  int const b = static_cast<int>( batch.size() );
  /* The shard layout depends only on the batch, never on cfg.threads, so
     every gradient reduction associates in the same order and a training run
     is bit-identical at any thread count. */
  int const shards = std::min( b, 16 );
  int const per_shard = ( b + shards - 1 ) / shards;
  std::vector<GradBuffer> shard_grads;
  std::vector<double> shard_graph( shards, 0.0 ), shard_cond( shards, 0.0 );
  std::vector<int> bad_index( shards, -1 );
  shard_grads.reserve( shards );
  for ( int s = 0; s < shards; ++s )
  {
    shard_grads.push_back( GradBuffer::for_params( params ) );
  }
  int const workers = std::max( 1, std::min( cfg.threads, shards ) );
  run_sharded( shards, workers, [&]( int lo, int hi, int ) {
    for ( int s = lo; s < hi; ++s )
    {
      int const elo = s * per_shard;
      int const ehi = std::min( b, elo + per_shard );
      for ( int i = elo; i < ehi; ++i )
      {
        try
        {
          LossBreakdown const lb =
              example_loss( params, batch[i], cfg, nm, &shard_grads[s] );
          shard_graph[s] += lb.l_graph;
          shard_cond[s] += lb.l_cond;
        }
        catch ( const NumericalError& )
        {
          bad_index[s] = i;
          return;
        }
      }
    }
  } );
  for ( int s = 0; s < shards; ++s )
  {
    if ( bad_index[s] >= 0 )
    {
      throw NumericalError( "train step: non-finite loss at batch index " +
                            std::to_string( bad_index[s] ) +
                            " (t=" + std::to_string( batch[bad_index[s]].t ) + ")" );
    }
  }
  GradBuffer& total_grads = shard_grads[0];
  for ( int s = 1; s < shards; ++s )
  {
    total_grads.add( shard_grads[s] );
  }
  total_grads.scale( 1.0 / b );

  AdamwConfig ac;
  ac.lr = cfg.learning_rate;
  ac.weight_decay = cfg.weight_decay;
  apply_updates( params, total_grads, opt, ac, cfg.grad_clip );

  double const mg = ( std::accumulate( shard_graph.begin(), shard_graph.end(), 0.0 ) ) / b;
  double const mc = ( std::accumulate( shard_cond.begin(), shard_cond.end(), 0.0 ) ) / b;
  return total_loss( mg, mc, cfg.lambda );
}

namespace
{

NoisyExample make_noisy( const DatasetRecord& rec, const TrainConfig& cfg,
                         const NoiseModel& nm, uint64_t seed )
{
  Rng rng( seed );
  NoisyExample ex;
  ex.clean = rec.dag;
  ex.t = 1 + rng.uniform_int( cfg.T );
  ex.noisy = corrupt( rec.dag, ex.t, nm, rng, !cfg.node_diffusion_enabled );
  ex.roles = roles_from_types( rec.dag.node_cats() );
  ex.tt = rec.tt;
  return ex;
}

} // namespace

LossBreakdown train_step( DenoiserParams& params, OptimizerState& opt,
                          const std::vector<DatasetRecord>& batch,
                          const TrainConfig& cfg, const NoiseModel& nm,
                          uint64_t step_seed )
{
  std::vector<NoisyExample> examples;
  examples.reserve( batch.size() );
  for ( size_t i = 0; i < batch.size(); ++i )
  {
    examples.push_back( make_noisy( batch[i], cfg, nm, split_seed( step_seed, i ) ) );
  }
  return train_step_on_noisy( params, opt, examples, cfg, nm );
}

namespace
{

std::pair<double, double> validation_losses( const DenoiserParams& params,
                                             const std::vector<DatasetRecord>& val,
                                             const TrainConfig& cfg, const NoiseModel& nm,
                                             uint64_t seed )
{
  if ( val.empty() )
  {
    return { 0.0, 0.0 };
  }
  int const items = static_cast<int>( val.size() );
  int const shards = std::min( items, 16 );
  int const per_shard = ( items + shards - 1 ) / shards;
  std::vector<double> sg( shards, 0.0 ), sc( shards, 0.0 );
  std::vector<int> bad( shards, -1 );
  int const workers = std::max( 1, std::min( cfg.threads, shards ) );
  run_sharded( shards, workers, [&]( int lo, int hi, int ) {
    for ( int s = lo; s < hi; ++s )
    {
      int const elo = s * per_shard;
      int const ehi = std::min( items, elo + per_shard );
      for ( int i = elo; i < ehi; ++i )
      {
        try
        {
          NoisyExample const ex = make_noisy( val[i], cfg, nm, split_seed( seed, i ) );
          LossBreakdown const lb = example_loss( params, ex, cfg, nm, nullptr );
          sg[s] += lb.l_graph;
          sc[s] += lb.l_cond;
        }
        catch ( const NumericalError& )
        {
          bad[s] = i;
          return;
        }
      }
    }
  } );
  for ( int s = 0; s < shards; ++s )
  {
    if ( bad[s] >= 0 )
    {
      throw NumericalError( "validation: non-finite loss at index " +
                            std::to_string( bad[s] ) );
    }
  }
  double const g = std::accumulate( sg.begin(), sg.end(), 0.0 ) / items;
  double const c = std::accumulate( sc.begin(), sc.end(), 0.0 ) / items;
  return { g, c };
}

std::string fmt( double x )
{
  std::ostringstream os;
  os.precision( 10 );
  os << x;
  return os.str();
}

} // namespace

void split_dataset( const std::vector<DatasetRecord>& all, double val_fraction,
                    uint64_t seed, std::vector<DatasetRecord>& train,
                    std::vector<DatasetRecord>& val )
{
  train.clear();
  val.clear();
  std::vector<int> idx( all.size() );
  for ( size_t i = 0; i < all.size(); ++i )
  {
    idx[i] = static_cast<int>( i );
  }
  Rng rng( split_seed( seed, 0x5917 ) );
  for ( int i = static_cast<int>( idx.size() ) - 1; i > 0; --i )
  {
    std::swap( idx[i], idx[rng.uniform_int( i + 1 )] );
  }
  int const n_val = static_cast<int>( val_fraction * static_cast<double>( all.size() ) );
  for ( size_t i = 0; i < idx.size(); ++i )
  {
    ( static_cast<int>( i ) < n_val ? val : train ).push_back( all[idx[i]] );
  }
}

TrainResult train_loop( const TrainConfig& cfg, const std::vector<DatasetRecord>& train,
                        const std::vector<DatasetRecord>& val,
                        const std::string& checkpoint_path,
                        const std::string& metrics_path )
{
  cfg.validate();
  if ( train.empty() )
  {
    throw ConfigError( "train loop: empty training set" );
  }
  int const n_in = train.front().n_in;
  int const n_out = train.front().n_out;
  for ( const DatasetRecord& r : train )
  {
    if ( r.n_in != n_in || r.n_out != n_out )
    {
      throw ConfigError( "train loop: mixed task shapes in training set" );
    }
  }

  std::vector<double> m_x, m_e;
  harvest_marginals( train, m_x, m_e );
  NoiseModel const nm = NoiseModel::cosine( cfg.T, cfg.beta, m_x, m_e, cfg.mode );
  LevelStructureStats const stats = harvest_level_stats( train );

  DenoiserParams params = init_params( denoiser_config_of( cfg ), cfg.seed );
  OptimizerState opt = OptimizerState::for_params( params );

  std::ofstream metrics( metrics_path, std::ios::trunc );
  if ( !metrics )
  {
    throw IoError( "train loop: cannot open metrics log: " + metrics_path );
  }
  metrics << "epoch,step,l_graph,l_cond,total,val_l_graph,val_l_cond\n";

  Checkpoint ck;
  ck.T = cfg.T;
  ck.beta = cfg.beta;
  ck.mode = cfg.mode;
  ck.node_diffusion_enabled = cfg.node_diffusion_enabled;
  ck.m_x = m_x;
  ck.m_e = m_e;
  ck.stats = stats;
  ck.n_in = n_in;
  ck.n_out = n_out;

  TrainResult result;
  std::vector<int> order( train.size() );
  for ( size_t i = 0; i < order.size(); ++i )
  {
    order[i] = static_cast<int>( i );
  }

  long global_step = 0;
  for ( int epoch = 1; epoch <= cfg.epochs; ++epoch )
  {
    Rng shuffle_rng( split_seed( cfg.seed, 1000000 + epoch ) );
    for ( int i = static_cast<int>( order.size() ) - 1; i > 0; --i )
    {
      std::swap( order[i], order[shuffle_rng.uniform_int( i + 1 )] );
    }

    int const steps = ( static_cast<int>( train.size() ) + cfg.batch_size - 1 ) /
                      cfg.batch_size;
    for ( int step = 0; step < steps; ++step )
    {
      std::vector<DatasetRecord> batch;
      int const lo = step * cfg.batch_size;
      int const hi = std::min<int>( static_cast<int>( train.size() ),
                                    lo + cfg.batch_size );
      batch.reserve( hi - lo );
      for ( int i = lo; i < hi; ++i )
      {
        batch.push_back( train[order[i]] );
      }
      ++global_step;
      uint64_t const step_seed =
          split_seed( split_seed( cfg.seed, 0xBA7C ), static_cast<uint64_t>( global_step ) );
      LossBreakdown const lb = train_step( params, opt, batch, cfg, nm, step_seed );
      result.final_train = lb;

      bool const last_of_epoch = step == steps - 1;
      metrics << epoch << ',' << global_step << ',' << fmt( lb.l_graph ) << ','
              << fmt( lb.l_cond ) << ',' << fmt( lb.total );
      if ( last_of_epoch )
      {
        auto [vg, vc] = validation_losses( params, val, cfg, nm,
                                           split_seed( cfg.seed, 2000000 + epoch ) );
        result.val_l_graph = vg;
        result.val_l_cond = vc;
        metrics << ',' << fmt( vg ) << ',' << fmt( vc ) << '\n';
      }
      else
      {
        metrics << ",,\n";
      }
    }

    bool params_ok = true;
    for_each_tensor( params, [&params_ok]( const std::string&, const Tensor& t ) {
      if ( !all_finite( t ) )
      {
        params_ok = false;
      }
    } );
    if ( !params_ok )
    {
      throw NumericalError( "train loop: non-finite parameter after epoch " +
                            std::to_string( epoch ) );
    }

    if ( epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs )
    {
      ck.params = params;
      save_checkpoint( ck, checkpoint_path );
    }
  }
  metrics.flush();
  if ( !metrics )
  {
    throw IoError( "train loop: metrics write failed: " + metrics_path );
  }

  ck.params = std::move( params );
  result.checkpoint = std::move( ck );
  return result;
}

} // namespace seadag
