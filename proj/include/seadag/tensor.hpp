/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <vector>

#include "seadag/error.hpp"

namespace seadag
{

/*! \brief Dense row-major 2-D double matrix; scalars are 1x1, vectors 1xc. */
struct Tensor
{
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor( int r, int c, double fill = 0.0 )
      : rows( r ), cols( c ), v( static_cast<size_t>( r ) * c, fill )
  {
    if ( r < 0 || c < 0 )
    {
      throw ShapeError( "Tensor: negative dimension" );
    }
  }

  static Tensor scalar( double x )
  {
    Tensor t( 1, 1 );
    t.v[0] = x;
    return t;
  }

  static Tensor row( std::vector<double> data )
  {
    Tensor t;
    t.rows = 1;
    t.cols = static_cast<int>( data.size() );
    t.v = std::move( data );
    return t;
  }

  double& at( int r, int c ) { return v[static_cast<size_t>( r ) * cols + c]; }
  double at( int r, int c ) const { return v[static_cast<size_t>( r ) * cols + c]; }
  int size() const { return rows * cols; }
  bool same_shape( const Tensor& o ) const { return rows == o.rows && cols == o.cols; }
};

bool all_finite( const Tensor& t );

} // namespace seadag
