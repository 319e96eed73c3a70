/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/features.hpp"

#include <cmath>

#include "seadag/diffusion.hpp"

namespace seadag
{

void time_embedding( double u, double* out )
{
  double const base = std::acos( -1.0 ) / 2.0;
  for ( int i = 0; i < kTimeEmbedDim / 2; ++i )
  {
    double const w = base * static_cast<double>( 1 << i );
    out[2 * i] = std::sin( w * u );
    out[2 * i + 1] = std::cos( w * u );
  }
}

int node_feature_width( int k_x, int cond_cols )
{
  return k_x + 1 + kTimeEmbedDim + 2 + cond_cols;
}

int graph_feature_width( int k_e )
{
  return kTimeEmbedDim + k_e;
}

GraphFeatures extract_features( const Dag& noisy, int t, const NoiseModel& nm,
                                const Tensor& cond )
{
  int const n = noisy.n();
  int const k_x = noisy.k_x();
  int const k_e = noisy.k_e();
  if ( cond.rows != n )
  {
    throw ShapeError( "extract_features: condition row count must equal n" );
  }
  if ( t < 0 || t > nm.T() )
  {
    throw ShapeError( "extract_features: t outside [0, T]" );
  }

  GraphFeatures gf;
  gf.n = n;
  int const width = k_x + 1 + kTimeEmbedDim + 2 + cond.cols;
  gf.fx = Tensor( n, width );
  gf.fe = Tensor( n * n, k_e );
  gf.y = Tensor( 1, kTimeEmbedDim + k_e );

  std::vector<int> indeg( n, 0 ), outdeg( n, 0 );
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      int const cat = noisy.edge_cat( i, j );
      gf.fe.at( i * n + j, cat ) = 1.0;
      if ( i != j && cat != 0 )
      {
        ++outdeg[i];
        ++indeg[j];
      }
    }
  }

  for ( int i = 0; i < n; ++i )
  {
    double* row = gf.fx.v.data() + static_cast<size_t>( i ) * width;
    row[noisy.node_cat( i )] = 1.0;
    double const l = normalized_level( noisy.level( i ), noisy.max_level() );
    row[k_x] = l;
    int const tau = local_timestep( t, l, nm );
    time_embedding( static_cast<double>( tau ) / nm.T(), row + k_x + 1 );
    row[k_x + 1 + kTimeEmbedDim] = static_cast<double>( indeg[i] ) / n;
    row[k_x + 1 + kTimeEmbedDim + 1] = static_cast<double>( outdeg[i] ) / n;
    for ( int c = 0; c < cond.cols; ++c )
    {
      row[k_x + 1 + kTimeEmbedDim + 2 + c] = cond.at( i, c );
    }
  }

  time_embedding( static_cast<double>( t ) / nm.T(), gf.y.v.data() );
  long const pairs = static_cast<long>( n ) * n - n;
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      if ( i != j )
      {
        gf.y.v[kTimeEmbedDim + noisy.edge_cat( i, j )] += 1.0;
      }
    }
  }
  if ( pairs > 0 )
  {
    for ( int c = 0; c < k_e; ++c )
    {
      gf.y.v[kTimeEmbedDim + c] /= static_cast<double>( pairs );
    }
  }
  return gf;
}

} // namespace seadag
