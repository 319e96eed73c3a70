/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "seadag/tensor.hpp"

namespace seadag::ad
{

using seadag::Tensor;

/*! \brief Handle to a value on a DifferentiableTape. */
struct Var
{
  int id = -1;
  bool valid() const { return id >= 0; }
};

/*! \brief Reverse-mode automatic differentiation over 2-D tensors.
 *
 * Operations append nodes in topological order; backward() walks them in
 * reverse, accumulating gradients for every node, including leaves, so
 * gradients with respect to inputs are available on request.  The tape owns
 * all values; Var handles stay valid for the tape's lifetime.
 */
class Tape
{
public:
  /* leaves */
  Var leaf( Tensor value );

  /* linear algebra */
  Var matmul( Var a, Var b );
  Var transpose( Var a );

  /* elementwise, same shape */
  Var add( Var a, Var b );
  Var sub( Var a, Var b );
  Var mul( Var a, Var b );

  /* broadcasting against a 1 x c row vector or r x 1 column vector */
  Var add_rowvec( Var a, Var row );
  Var mul_rowvec( Var a, Var row );
  Var mul_colvec( Var a, Var col );

  /* scalar maps */
  Var scale( Var a, double c );
  Var add_scalar( Var a, double c );
  Var relu( Var a );
  Var tanh_of( Var a );
  /* log(max(x, floor)); gradient is 0 where clamped */
  Var log_clamped( Var a, double floor );

  /* structure */
  Var reshape( Var a, int rows, int cols );
  Var slice_cols( Var a, int start, int len );
  Var concat_cols( const std::vector<Var>& parts );
  Var concat_rows( const std::vector<Var>& parts );
  Var gather( Var a, const std::vector<std::pair<int, int>>& coords ); /* 1 x m */

  /* reductions and normalizations */
  Var sum_all( Var a );
  Var mean_rows( Var a ); /* r x c -> 1 x c */
  Var softmax_rows( Var a );
  Var layer_norm_rows( Var a, Var gamma, Var beta, double eps = 1e-5 );

  /* losses (targets are constants) */
  /* sum over rows of -log(max(p[row, target], floor)); rows with target < 0
   * are skipped */
  Var neglog_pick_sum( Var probs, const std::vector<int>& targets, double floor );
  /* mean over entries of binary cross-entropy against bits, probabilities
   * clamped into [floor, 1 - floor] */
  Var bce_mean( Var probs, const std::vector<double>& bits, double floor );

  /* forward one-hot argmax per row, backward identity (straight-through) */
  Var hard_argmax_rows( Var a );

  void backward( Var loss );

  const Tensor& value( Var v ) const;
  const Tensor& grad( Var v ) const;
  int size() const { return static_cast<int>( nodes_.size() ); }

private:
  struct Node
  {
    Tensor val;
    Tensor grad;
    std::function<void( Tape&, int )> back; /* empty for leaves; int = own id */
  };

  std::vector<Node> nodes_;

  Var push( Tensor val, std::function<void( Tape&, int )> back );
  Tensor& grad_mut( Var v ) { return nodes_[v.id].grad; }
  void check( Var v ) const;
};

/*! \brief Records which parameter tensors were bound as leaves so gradients
 * can be routed back to their owners after backward(). */
class Binder
{
public:
  explicit Binder( Tape& tape ) : tape_( &tape ) {}

  Var operator()( const Tensor& param )
  {
    Var v = tape_->leaf( param );
    bound_.emplace_back( &param, v );
    return v;
  }

  const std::vector<std::pair<const Tensor*, Var>>& bound() const { return bound_; }

private:
  Tape* tape_;
  std::vector<std::pair<const Tensor*, Var>> bound_;
};

} // namespace seadag::ad
