/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <map>
#include <string>
#include <vector>

#include "seadag/checkpoint.hpp"
#include "seadag/dataset.hpp"
#include "seadag/diffusion.hpp"
#include "seadag/trainer.hpp"

namespace seadag
{

struct EvalCase
{
  double accuracy = 0.0;
  int best_k = 0;
  int max_level = 0; /* of the best sample after parsing */
};

struct EvalReport
{
  double validity = 0.0;  /* correct-wiring fraction pooled over every gate of
                             every raw sample across the test set */
  double accuracy = 0.0;  /* mean over conditions of best-of-K accuracy */
  double level_emd = 0.0; /* 1-D Wasserstein between normalized histograms */
  std::map<int, long> sample_hist;    /* max level of each best sample */
  std::map<int, long> reference_hist; /* max level of each reference graph */
  std::vector<EvalCase> cases;
  std::string validity_note =
      "validity pooled over all gates of all samples across the test set";
};

/*! \brief Per-condition denoiser factory; lets tests substitute oracles. */
using CaseDenoiserFactory =
    std::function<DenoiseFn( int case_index, const DatasetRecord& rec )>;

/*! \brief Best-of-K evaluation.  Each (case, k) pair draws from its own seed
 * stream, so the k = 0 sample of a K = 1 run matches a K = 10 run. */
EvalReport evaluate( const CaseDenoiserFactory& make_denoiser,
                     const std::vector<DatasetRecord>& test, int K,
                     const NoiseModel& nm, const LevelStructureStats& stats,
                     uint64_t seed, int threads = 1 );

/*! \brief Model-backed factory over a loaded checkpoint. */
CaseDenoiserFactory checkpoint_denoiser_factory( const Checkpoint& ck,
                                                 const NoiseModel& nm );

/*! \brief Sum of absolute CDF differences between the normalized histograms
 * over their joint integer support. */
double histogram_emd( const std::map<int, long>& a, const std::map<int, long>& b );

std::string report_to_json( const EvalReport& r );
void write_report( const EvalReport& r, const std::string& path );
void write_histogram_csv( const EvalReport& r, const std::string& path );

/*! \brief Trains both configs (which must differ in exactly one field) on
 * the same data and evaluates them on the same conditions. */
std::pair<EvalReport, EvalReport> ablation_run( const TrainConfig& base,
                                                const TrainConfig& variant,
                                                const std::vector<DatasetRecord>& train,
                                                const std::vector<DatasetRecord>& val,
                                                const std::vector<DatasetRecord>& test,
                                                int K, uint64_t eval_seed,
                                                const std::string& scratch_dir );

} // namespace seadag
