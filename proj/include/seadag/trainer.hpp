/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seadag/checkpoint.hpp"
#include "seadag/condition.hpp"
#include "seadag/dataset.hpp"
#include "seadag/objective.hpp"
#include "seadag/optimizer.hpp"

namespace seadag
{

struct TrainConfig
{
  int T = 50;
  double beta = 8.0;
  double lambda = 1.0;
  int layers = 4;
  int hidden = 64;
  int heads = 4;
  double learning_rate = 2e-4;
  double weight_decay = 1e-12;
  int batch_size = 32;
  int epochs = 60;
  uint64_t seed = 0;
  ScheduleMode mode = ScheduleMode::BottomUp;
  bool node_diffusion_enabled = false;
  double grad_clip = 10.0; /* 0 disables */
  int checkpoint_every = 10;
  double val_fraction = 0.1;
  int threads = 1;

  void validate() const;
};

/*! \brief Parses the JSON config; unknown keys are rejected, missing keys
 * keep their defaults. */
TrainConfig train_config_from_json( const std::string& text );
std::string train_config_to_json( const TrainConfig& c );
TrainConfig read_train_config( const std::string& path );

/*! \brief One already-corrupted training example; the seam that lets tests
 * control the noise realization directly. */
struct NoisyExample
{
  Dag clean;
  Dag noisy;
  std::vector<NodeRole> roles;
  TruthTable tt;
  int t = 1;
};

/*! \brief Forward + loss for one example on a fresh tape; fills grads when
 * a buffer is supplied. */
LossBreakdown example_loss( const DenoiserParams& params, const NoisyExample& ex,
                            const TrainConfig& cfg, const NoiseModel& nm,
                            GradBuffer* grads );

/*! \brief One optimizer step over pre-corrupted examples; returns the batch
 * mean losses.  Deterministic: all randomness lives in the corruption that
 * produced the examples. */
LossBreakdown train_step_on_noisy( DenoiserParams& params, OptimizerState& opt,
                                   const std::vector<NoisyExample>& batch,
                                   const TrainConfig& cfg, const NoiseModel& nm );

/*! \brief Samples a timestep and corruption per record (seeded per index),
 * then steps. */
LossBreakdown train_step( DenoiserParams& params, OptimizerState& opt,
                          const std::vector<DatasetRecord>& batch,
                          const TrainConfig& cfg, const NoiseModel& nm,
                          uint64_t step_seed );

struct TrainResult
{
  Checkpoint checkpoint;
  LossBreakdown final_train;
  double val_l_graph = 0.0;
  double val_l_cond = 0.0;
};

/*! \brief Full training run: seeded shuffling, per-epoch validation, metrics
 * CSV (epoch,step,l_graph,l_cond,total,val_l_graph,val_l_cond; validation
 * columns filled on epoch-final rows), periodic checkpointing.  Parameters
 * are checked for finiteness every epoch. */
TrainResult train_loop( const TrainConfig& cfg, const std::vector<DatasetRecord>& train,
                        const std::vector<DatasetRecord>& val,
                        const std::string& checkpoint_path,
                        const std::string& metrics_path );

/*! \brief Deterministic train/validation split by seeded shuffle. */
void split_dataset( const std::vector<DatasetRecord>& all, double val_fraction,
                    uint64_t seed, std::vector<DatasetRecord>& train,
                    std::vector<DatasetRecord>& val );

} // namespace seadag
