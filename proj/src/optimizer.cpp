/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/optimizer.hpp"

#include <cmath>

namespace seadag
{

OptimizerState OptimizerState::for_params( const DenoiserParams& p )
{
  OptimizerState s;
  for_each_tensor( p, [&s]( const std::string& name, const Tensor& t ) {
    s.m.emplace_back( t.rows, t.cols );
    s.v.emplace_back( t.rows, t.cols );
    s.names.push_back( name );
  } );
  return s;
}

void adamw_update( Tensor& param, const Tensor& grad, Tensor& m, Tensor& v, long step,
                   const AdamwConfig& cfg )
{
  if ( !param.same_shape( grad ) || !param.same_shape( m ) || !param.same_shape( v ) )
  {
    throw ShapeError( "adamw_update: shape mismatch" );
  }
  double const bc1 = 1.0 - std::pow( cfg.beta1, static_cast<double>( step ) );
  double const bc2 = 1.0 - std::pow( cfg.beta2, static_cast<double>( step ) );
  double const eps_hat = cfg.eps * std::sqrt( bc2 );
  for ( size_t i = 0; i < param.v.size(); ++i )
  {
    m.v[i] = cfg.beta1 * m.v[i] + ( 1.0 - cfg.beta1 ) * grad.v[i];
    v.v[i] = cfg.beta2 * v.v[i] + ( 1.0 - cfg.beta2 ) * grad.v[i] * grad.v[i];
    double const m_hat = m.v[i] / bc1;
    double const v_hat = v.v[i] / bc2;
    double const prev = param.v[i];
    param.v[i] = prev - cfg.lr * m_hat / ( std::sqrt( v_hat ) + eps_hat ) -
                 cfg.lr * cfg.weight_decay * prev;
  }
}

GradBuffer GradBuffer::for_params( const DenoiserParams& p )
{
  GradBuffer b;
  for_each_tensor( p, [&b]( const std::string& name, const Tensor& t ) {
    b.g.emplace_back( t.rows, t.cols );
    b.names.push_back( name );
  } );
  return b;
}

void GradBuffer::add( const GradBuffer& other )
{
  if ( other.g.size() != g.size() )
  {
    throw ShapeError( "GradBuffer::add: buffer size mismatch" );
  }
  for ( size_t i = 0; i < g.size(); ++i )
  {
    for ( size_t j = 0; j < g[i].v.size(); ++j )
    {
      g[i].v[j] += other.g[i].v[j];
    }
  }
}

void GradBuffer::scale( double s )
{
  for ( Tensor& t : g )
  {
    for ( double& x : t.v )
    {
      x *= s;
    }
  }
}

double GradBuffer::norm() const
{
  double acc = 0.0;
  for ( const Tensor& t : g )
  {
    for ( double x : t.v )
    {
      acc += x * x;
    }
  }
  return std::sqrt( acc );
}

void apply_updates( DenoiserParams& p, GradBuffer& grads, OptimizerState& opt,
                    const AdamwConfig& cfg, double clip_norm )
{
  if ( clip_norm > 0.0 )
  {
    double const norm = grads.norm();
    if ( norm > clip_norm )
    {
      grads.scale( clip_norm / norm );
    }
  }
  ++opt.step;
  size_t idx = 0;
  for_each_tensor( p, [&]( const std::string&, Tensor& t ) {
    adamw_update( t, grads.g[idx], opt.m[idx], opt.v[idx], opt.step, cfg );
    ++idx;
  } );
}

} // namespace seadag
