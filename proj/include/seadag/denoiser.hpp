/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "seadag/condition.hpp"
#include "seadag/diffusion.hpp"
#include "seadag/features.hpp"
#include "seadag/tape.hpp"

namespace seadag
{

struct DenoiserConfig
{
  int layers = 4;
  int hidden = 64;
  int heads = 4;
  int k_x = 3;
  int k_e = 3;
  int cond_cols = kConditionDim;

  int d_x() const { return hidden; }
  int d_e() const { return std::max( 8, hidden / 2 ); }
  int d_y() const { return std::max( 8, hidden / 2 ); }
  int head_dim() const { return hidden / heads; }
  int raw_x() const { return node_feature_width( k_x, cond_cols ); }
  int raw_e() const { return k_e; }
  int raw_y() const { return graph_feature_width( k_e ); }

  void validate() const;
};

/* x @ W + b, with W stored input-rows * output-cols */
struct Lin
{
  Tensor w;
  Tensor b;
};

/* Linear -> ReLU -> Linear */
struct Mlp
{
  Lin in;
  Lin out;
};

struct Norm
{
  Tensor gamma;
  Tensor beta;
};

struct DenoiserLayer
{
  Lin wq, wk, wv;     /* d_x -> d_x, split across heads */
  Lin e_mul, e_add;   /* d_e -> heads: per-head attention gain / bias */
  Lin yx_mul, yx_add; /* d_y -> d_x: graph-feature gain / bias on the node update */
  Lin ye_mul;         /* d_y -> heads */
  Lin ye_add;         /* d_y -> d_e */
  Lin x_out;          /* d_x -> d_x */
  Lin e_out;          /* heads -> d_e */
  Lin y_from_x;       /* d_x -> d_y */
  Lin y_from_e;       /* d_e -> d_y */
  Lin y_from_y;       /* d_y -> d_y */
  Lin y_out;          /* d_y -> d_y */
  Norm ln_x, ln_e, ln_y;
};

struct DenoiserParams
{
  DenoiserConfig config;
  Mlp embed_x; /* raw_x -> d_x */
  Mlp embed_e; /* raw_e -> d_e */
  Mlp embed_y; /* raw_y -> d_y */
  std::vector<DenoiserLayer> layers;
  Mlp head_x; /* d_x -> k_x */
  Mlp head_e; /* d_e -> k_e */
};

/*! \brief Visits every tensor with a stable dotted name; the enumeration
 * order is the canonical parameter order used by the optimizer, gradient
 * accumulation, and the checkpoint layout. */
void for_each_tensor( DenoiserParams& p,
                      const std::function<void( const std::string&, Tensor& )>& fn );
void for_each_tensor( const DenoiserParams& p,
                      const std::function<void( const std::string&, const Tensor& )>& fn );

/*! \brief Fan-in-scaled uniform init for projections, ones/zeros for norms
 * and biases. */
DenoiserParams init_params( const DenoiserConfig& cfg, uint64_t seed );

/* parameter leaf handles on a tape, keyed by for_each_tensor names */
using VarMap = std::map<std::string, ad::Var>;

VarMap bind_params( ad::Tape& tape, const DenoiserParams& p );

struct ForwardVars
{
  ad::Var px; /* n   x k_x rows summing to 1 */
  ad::Var pe; /* n^2 x k_e rows summing to 1 */
};

/*! \brief Records the full forward pass on the tape; activations are checked
 * per layer and a non-finite value raises NumericalError naming the layer. */
ForwardVars forward_on_tape( ad::Tape& tape, const VarMap& vm, const DenoiserConfig& cfg,
                             const GraphFeatures& gf );

struct ForwardOut
{
  Tensor px;
  Tensor pe;
};

/*! \brief Forward pass without retaining differentiation state. */
ForwardOut forward_infer( const DenoiserParams& p, const GraphFeatures& gf );

/*! \brief Canonical roles from a typed roster: the i-th input-typed node in
 * id order gets input slot i, likewise for outputs; AND slots are unused. */
std::vector<NodeRole> roles_from_types( const std::vector<int>& node_cats );

/*! \brief Wraps parameters and a target table as the sampling-time denoiser:
 * encodes the condition against the noisy graph's roster, extracts features,
 * and runs inference. */
DenoiseFn make_denoiser( const DenoiserParams& p, const NoiseModel& nm,
                         const TruthTable& tt );

} // namespace seadag
