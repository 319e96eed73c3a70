/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seadag/aig.hpp"

namespace seadag
{

LossBreakdown total_loss( double l_graph, double l_cond, double lambda )
{
  if ( !std::isfinite( l_graph ) || !std::isfinite( l_cond ) || !std::isfinite( lambda ) )
  {
    throw NumericalError( "total_loss: non-finite input" );
  }
  LossBreakdown b;
  b.l_graph = l_graph;
  b.l_cond = l_cond;
  b.lambda = lambda;
  b.total = l_graph + lambda * l_cond;
  return b;
}

ad::Var graph_ce_loss( ad::Tape& tape, ad::Var px, ad::Var pe, const Dag& clean,
                       bool node_loss_enabled )
{
  int const n = clean.n();
  const Tensor& PE = tape.value( pe );
  if ( PE.rows != n * n || PE.cols != clean.k_e() )
  {
    throw ShapeError( "graph_ce_loss: edge prediction shape mismatch" );
  }
  std::vector<int> edge_targets( static_cast<size_t>( n ) * n );
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      edge_targets[static_cast<size_t>( i ) * n + j] = clean.edge_cat( i, j );
    }
  }
  ad::Var loss = tape.neglog_pick_sum( pe, edge_targets, 1e-12 );
  if ( node_loss_enabled )
  {
    const Tensor& PX = tape.value( px );
    if ( PX.rows != n || PX.cols != clean.k_x() )
    {
      throw ShapeError( "graph_ce_loss: node prediction shape mismatch" );
    }
    loss = tape.add( loss, tape.neglog_pick_sum( px, clean.node_cats(), 1e-12 ) );
  }
  return loss;
}

ad::Var soft_simulate( ad::Tape& tape, ad::Var pe, const std::vector<int>& node_cats,
                       const std::vector<int>& levels, int n_in,
                       const std::vector<NodeRole>* roles )
{
  int const n = static_cast<int>( node_cats.size() );
  if ( static_cast<int>( levels.size() ) != n )
  {
    throw ShapeError( "soft_simulate: levels/types length mismatch" );
  }
  if ( roles && static_cast<int>( roles->size() ) != n )
  {
    throw ShapeError( "soft_simulate: roles/types length mismatch" );
  }
  const Tensor& PE = tape.value( pe );
  if ( PE.rows != n * n || PE.cols != kEdgeTypes )
  {
    throw ShapeError( "soft_simulate: edge prediction shape mismatch" );
  }
  if ( n_in < 1 || n_in > 16 )
  {
    throw ShapeError( "soft_simulate: unsupported input count" );
  }
  int const rows = 1 << n_in;

  /* constant input rows; signals[i] becomes the soft signal of node i */
  std::vector<ad::Var> signals( n );
  std::vector<bool> have_signal( n, false );
  {
    int slot = 0;
    for ( int i = 0; i < n; ++i )
    {
      if ( node_cats[i] != kNodeInput )
      {
        continue;
      }
      int const s = roles ? ( *roles )[i].index : slot;
      ++slot;
      if ( s < 0 || s >= n_in )
      {
        throw ShapeError( "soft_simulate: input slot out of range" );
      }
      Tensor row( 1, rows );
      for ( int r = 0; r < rows; ++r )
      {
        row.v[r] = input_bit( s, r );
      }
      signals[i] = tape.leaf( std::move( row ) );
      have_signal[i] = true;
    }
  }

  std::vector<int> gate_order;
  for ( int i = 0; i < n; ++i )
  {
    if ( node_cats[i] != kNodeInput )
    {
      gate_order.push_back( i );
    }
  }
  std::stable_sort( gate_order.begin(), gate_order.end(),
                    [&levels]( int a, int b ) { return levels[a] < levels[b]; } );

  for ( int g : gate_order )
  {
    std::vector<int> cands;
    for ( int c = 0; c < n; ++c )
    {
      if ( c != g && node_cats[c] != kNodeOutput && levels[c] < levels[g] &&
           have_signal[c] )
      {
        cands.push_back( c );
      }
    }
    if ( cands.empty() )
    {
      signals[g] = tape.leaf( Tensor( 1, rows ) );
      have_signal[g] = true;
      continue;
    }
    std::vector<std::pair<int, int>> norm_coords, neg_coords;
    std::vector<ad::Var> child_rows;
    norm_coords.reserve( cands.size() );
    neg_coords.reserve( cands.size() );
    child_rows.reserve( cands.size() );
    for ( int c : cands )
    {
      norm_coords.emplace_back( c * n + g, kEdgeNormal );
      neg_coords.emplace_back( c * n + g, kEdgeNegated );
      child_rows.push_back( signals[c] );
    }
    ad::Var p_norm = tape.gather( pe, norm_coords ); /* 1 x |C| */
    ad::Var p_neg = tape.gather( pe, neg_coords );
    ad::Var presence = tape.add( p_norm, p_neg );
    ad::Var weights =
        tape.softmax_rows( tape.log_clamped( tape.add_scalar( presence, 1e-12 ), 1e-300 ) );
    ad::Var sigma = tape.tanh_of( tape.sub( p_norm, p_neg ) );

    /* blended child signals: 0.5 + sigma * (s - 0.5) */
    ad::Var stacked = tape.concat_rows( child_rows ); /* |C| x rows */
    ad::Var blended = tape.add_scalar(
        tape.mul_colvec( tape.add_scalar( stacked, -0.5 ), sigma ), 0.5 );
    ad::Var mix = tape.matmul( weights, blended ); /* 1 x rows */
    signals[g] = node_cats[g] == kNodeAnd ? tape.mul( mix, mix ) : mix;
    have_signal[g] = true;
  }

  std::vector<int> out_ids;
  for ( int i = 0; i < n; ++i )
  {
    if ( node_cats[i] == kNodeOutput )
    {
      out_ids.push_back( i );
    }
  }
  if ( out_ids.empty() )
  {
    throw ShapeError( "soft_simulate: roster has no output node" );
  }
  if ( roles )
  {
    std::vector<int> by_slot( out_ids.size(), -1 );
    for ( int i : out_ids )
    {
      int const s = ( *roles )[i].index;
      if ( s < 0 || s >= static_cast<int>( out_ids.size() ) || by_slot[s] != -1 )
      {
        throw ShapeError( "soft_simulate: output slot out of range" );
      }
      by_slot[s] = i;
    }
    out_ids = std::move( by_slot );
  }
  std::vector<ad::Var> out_rows;
  out_rows.reserve( out_ids.size() );
  for ( int i : out_ids )
  {
    out_rows.push_back( signals[i] );
  }
  return tape.concat_rows( out_rows );
}

Tensor soft_simulate_values( const Tensor& pe, const std::vector<int>& node_cats,
                             const std::vector<int>& levels, int n_in,
                             const std::vector<NodeRole>* roles )
{
  ad::Tape tape;
  ad::Var v = soft_simulate( tape, tape.leaf( pe ), node_cats, levels, n_in, roles );
  return tape.value( v );
}

ad::Var condition_loss( ad::Tape& tape, ad::Var soft_outputs, const TruthTable& target )
{
  const Tensor& S = tape.value( soft_outputs );
  if ( S.rows != target.n_out() || S.cols != target.rows() )
  {
    throw ShapeError( "condition_loss: output signal shape mismatch" );
  }
  std::vector<double> bits;
  bits.reserve( static_cast<size_t>( S.rows ) * S.cols );
  for ( const auto& col : target.outputs )
  {
    for ( uint8_t b : col )
    {
      bits.push_back( b );
    }
  }
  return tape.bce_mean( soft_outputs, bits, 1e-7 );
}

std::vector<double> gumbel_sample( const std::vector<double>& dist, double temperature,
                                   Rng& rng, bool hard )
{
  if ( temperature <= 0.0 )
  {
    throw ConfigError( "gumbel_sample: temperature must be positive" );
  }
  int const k = static_cast<int>( dist.size() );
  std::vector<double> z( k );
  double mx = -1e300;
  for ( int i = 0; i < k; ++i )
  {
    z[i] = ( std::log( std::max( dist[i], 1e-12 ) ) + rng.gumbel() ) / temperature;
    mx = std::max( mx, z[i] );
  }
  double sum = 0.0;
  for ( int i = 0; i < k; ++i )
  {
    z[i] = std::exp( z[i] - mx );
    sum += z[i];
  }
  for ( double& x : z )
  {
    x /= sum;
  }
  if ( hard )
  {
    int const best = static_cast<int>( std::max_element( z.begin(), z.end() ) - z.begin() );
    std::fill( z.begin(), z.end(), 0.0 );
    z[best] = 1.0;
  }
  return z;
}

ad::Var gumbel_sample_on_tape( ad::Tape& tape, ad::Var dist, double temperature,
                               Rng& rng, bool straight_through )
{
  if ( temperature <= 0.0 )
  {
    throw ConfigError( "gumbel_sample: temperature must be positive" );
  }
  const Tensor& D = tape.value( dist );
  Tensor noise( D.rows, D.cols );
  for ( double& x : noise.v )
  {
    x = rng.gumbel();
  }
  ad::Var z = tape.softmax_rows(
      tape.scale( tape.add( tape.log_clamped( dist, 1e-12 ), tape.leaf( std::move( noise ) ) ),
                  1.0 / temperature ) );
  return straight_through ? tape.hard_argmax_rows( z ) : z;
}

} // namespace seadag
