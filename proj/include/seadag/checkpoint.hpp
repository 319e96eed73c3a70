/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <string>
#include <vector>

#include "seadag/dataset.hpp"
#include "seadag/denoiser.hpp"
#include "seadag/noise_model.hpp"

namespace seadag
{

/*! \brief Everything needed to sample from a trained model: weights plus the
 * noise process, the level statistics of the training set, and the task
 * shape.  Weights are stored as 32-bit floats; values are quantized at save
 * time so a save/load cycle is idempotent byte for byte. */
struct Checkpoint
{
  DenoiserParams params;
  int T = 50;
  double beta = 0.0;
  ScheduleMode mode = ScheduleMode::BottomUp;
  bool node_diffusion_enabled = false;
  std::vector<double> m_x;
  std::vector<double> m_e;
  LevelStructureStats stats;
  int n_in = 0;
  int n_out = 0;

  NoiseModel noise_model() const
  {
    return NoiseModel::cosine( T, beta, m_x, m_e, mode );
  }
};

void save_checkpoint( const Checkpoint& ck, const std::string& path );
Checkpoint load_checkpoint( const std::string& path );

} // namespace seadag
