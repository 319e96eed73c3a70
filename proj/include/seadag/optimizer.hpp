/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <string>
#include <vector>

#include "seadag/denoiser.hpp"
#include "seadag/tensor.hpp"

namespace seadag
{

/*! \brief Adaptive-moment state, one slot per parameter tensor in
 * for_each_tensor order. */
struct OptimizerState
{
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::vector<std::string> names;
  long step = 0;

  static OptimizerState for_params( const DenoiserParams& p );
};

struct AdamwConfig
{
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-12;
};

/*! \brief One decoupled-weight-decay adaptive-moment update of a single
 * tensor.  step is the 1-based update count already including this call.
 * The epsilon enters the denominator scaled by sqrt(1 - beta2^step) so a
 * first step from zero moments moves by exactly
 * -lr * g / (|g| + eps * sqrt(1 - beta2)). */
void adamw_update( Tensor& param, const Tensor& grad, Tensor& m, Tensor& v, long step,
                   const AdamwConfig& cfg );

/*! \brief Gradient buffers aligned with for_each_tensor order. */
struct GradBuffer
{
  std::vector<Tensor> g;
  std::vector<std::string> names;

  static GradBuffer for_params( const DenoiserParams& p );
  void add( const GradBuffer& other );
  void scale( double s );
  /* global L2 norm across every entry */
  double norm() const;
};

/*! \brief Applies one optimizer step over all parameters; clips the global
 * gradient norm to clip_norm first when clip_norm > 0. */
void apply_updates( DenoiserParams& p, GradBuffer& grads, OptimizerState& opt,
                    const AdamwConfig& cfg, double clip_norm );

} // namespace seadag
