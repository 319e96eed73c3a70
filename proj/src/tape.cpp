/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/tape.hpp"

#include <algorithm>
#include <cmath>

namespace seadag::ad
{

namespace
{
void add_into( Tensor& dst, const Tensor& src )
{
  for ( size_t i = 0; i < dst.v.size(); ++i )
  {
    dst.v[i] += src.v[i];
  }
}
} // namespace

void Tape::check( Var v ) const
{
  if ( v.id < 0 || v.id >= static_cast<int>( nodes_.size() ) )
  {
    throw ShapeError( "tape: invalid variable handle" );
  }
}

Var Tape::push( Tensor val, std::function<void( Tape&, int )> back )
{
  Node node;
  node.grad = Tensor( val.rows, val.cols );
  node.val = std::move( val );
  node.back = std::move( back );
  nodes_.push_back( std::move( node ) );
  return Var{ static_cast<int>( nodes_.size() ) - 1 };
}

const Tensor& Tape::value( Var v ) const
{
  check( v );
  return nodes_[v.id].val;
}

const Tensor& Tape::grad( Var v ) const
{
  check( v );
  return nodes_[v.id].grad;
}

Var Tape::leaf( Tensor value )
{
  return push( std::move( value ), nullptr );
}

Var Tape::matmul( Var a, Var b )
{
  check( a );
  check( b );
  const Tensor& A = value( a );
  const Tensor& B = value( b );
  if ( A.cols != B.rows )
  {
    throw ShapeError( "matmul: inner dimensions differ" );
  }
  Tensor C( A.rows, B.cols );
  for ( int i = 0; i < A.rows; ++i )
  {
    const double* arow = A.v.data() + static_cast<size_t>( i ) * A.cols;
    double* crow = C.v.data() + static_cast<size_t>( i ) * C.cols;
    for ( int p = 0; p < A.cols; ++p )
    {
      double const av = arow[p];
      if ( av == 0.0 )
      {
        continue;
      }
      const double* brow = B.v.data() + static_cast<size_t>( p ) * B.cols;
      for ( int j = 0; j < B.cols; ++j )
      {
        crow[j] += av * brow[j];
      }
    }
  }
  return push( std::move( C ), [a, b]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& A = t.nodes_[a.id].val;
    const Tensor& B = t.nodes_[b.id].val;
    Tensor& dA = t.nodes_[a.id].grad;
    Tensor& dB = t.nodes_[b.id].grad;
    /* dA += G * B^T */
    for ( int i = 0; i < A.rows; ++i )
    {
      const double* grow = G.v.data() + static_cast<size_t>( i ) * G.cols;
      double* darow = dA.v.data() + static_cast<size_t>( i ) * dA.cols;
      for ( int p = 0; p < A.cols; ++p )
      {
        const double* brow = B.v.data() + static_cast<size_t>( p ) * B.cols;
        double acc = 0.0;
        for ( int j = 0; j < B.cols; ++j )
        {
          acc += grow[j] * brow[j];
        }
        darow[p] += acc;
      }
    }
    /* dB += A^T * G */
    for ( int p = 0; p < A.cols; ++p )
    {
      double* dbrow = dB.v.data() + static_cast<size_t>( p ) * dB.cols;
      for ( int i = 0; i < A.rows; ++i )
      {
        double const av = A.v[static_cast<size_t>( i ) * A.cols + p];
        if ( av == 0.0 )
        {
          continue;
        }
        const double* grow = G.v.data() + static_cast<size_t>( i ) * G.cols;
        for ( int j = 0; j < G.cols; ++j )
        {
          dbrow[j] += av * grow[j];
        }
      }
    }
  } );
}

Var Tape::transpose( Var a )
{
  check( a );
  const Tensor& A = value( a );
  Tensor C( A.cols, A.rows );
  for ( int i = 0; i < A.rows; ++i )
  {
    for ( int j = 0; j < A.cols; ++j )
    {
      C.at( j, i ) = A.at( i, j );
    }
  }
  return push( std::move( C ), [a]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( int i = 0; i < G.rows; ++i )
    {
      for ( int j = 0; j < G.cols; ++j )
      {
        dA.at( j, i ) += G.at( i, j );
      }
    }
  } );
}

Var Tape::add( Var a, Var b )
{
  check( a );
  check( b );
  const Tensor& A = value( a );
  const Tensor& B = value( b );
  if ( !A.same_shape( B ) )
  {
    throw ShapeError( "add: shape mismatch" );
  }
  Tensor C = A;
  add_into( C, B );
  return push( std::move( C ), [a, b]( Tape& t, int self ) {
    add_into( t.nodes_[a.id].grad, t.nodes_[self].grad );
    add_into( t.nodes_[b.id].grad, t.nodes_[self].grad );
  } );
}

Var Tape::sub( Var a, Var b )
{
  check( a );
  check( b );
  const Tensor& A = value( a );
  const Tensor& B = value( b );
  if ( !A.same_shape( B ) )
  {
    throw ShapeError( "sub: shape mismatch" );
  }
  Tensor C = A;
  for ( size_t i = 0; i < C.v.size(); ++i )
  {
    C.v[i] -= B.v[i];
  }
  return push( std::move( C ), [a, b]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    add_into( t.nodes_[a.id].grad, G );
    Tensor& dB = t.nodes_[b.id].grad;
    for ( size_t i = 0; i < dB.v.size(); ++i )
    {
      dB.v[i] -= G.v[i];
    }
  } );
}

Var Tape::mul( Var a, Var b )
{
  check( a );
  check( b );
  const Tensor& A = value( a );
  const Tensor& B = value( b );
  if ( !A.same_shape( B ) )
  {
    throw ShapeError( "mul: shape mismatch" );
  }
  Tensor C = A;
  for ( size_t i = 0; i < C.v.size(); ++i )
  {
    C.v[i] *= B.v[i];
  }
  return push( std::move( C ), [a, b]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& A = t.nodes_[a.id].val;
    const Tensor& B = t.nodes_[b.id].val;
    Tensor& dA = t.nodes_[a.id].grad;
    Tensor& dB = t.nodes_[b.id].grad;
    for ( size_t i = 0; i < G.v.size(); ++i )
    {
      dA.v[i] += G.v[i] * B.v[i];
      dB.v[i] += G.v[i] * A.v[i];
    }
  } );
}

Var Tape::add_rowvec( Var a, Var row )
{
  check( a );
  check( row );
  const Tensor& A = value( a );
  const Tensor& R = value( row );
  if ( R.rows != 1 || R.cols != A.cols )
  {
    throw ShapeError( "add_rowvec: need a 1 x cols row vector" );
  }
  Tensor C = A;
  for ( int i = 0; i < A.rows; ++i )
  {
    for ( int j = 0; j < A.cols; ++j )
    {
      C.at( i, j ) += R.v[j];
    }
  }
  return push( std::move( C ), [a, row]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    add_into( t.nodes_[a.id].grad, G );
    Tensor& dR = t.nodes_[row.id].grad;
    for ( int i = 0; i < G.rows; ++i )
    {
      for ( int j = 0; j < G.cols; ++j )
      {
        dR.v[j] += G.at( i, j );
      }
    }
  } );
}

Var Tape::mul_rowvec( Var a, Var row )
{
  check( a );
  check( row );
  const Tensor& A = value( a );
  const Tensor& R = value( row );
  if ( R.rows != 1 || R.cols != A.cols )
  {
    throw ShapeError( "mul_rowvec: need a 1 x cols row vector" );
  }
  Tensor C = A;
  for ( int i = 0; i < A.rows; ++i )
  {
    for ( int j = 0; j < A.cols; ++j )
    {
      C.at( i, j ) *= R.v[j];
    }
  }
  return push( std::move( C ), [a, row]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& A = t.nodes_[a.id].val;
    const Tensor& R = t.nodes_[row.id].val;
    Tensor& dA = t.nodes_[a.id].grad;
    Tensor& dR = t.nodes_[row.id].grad;
    for ( int i = 0; i < G.rows; ++i )
    {
      for ( int j = 0; j < G.cols; ++j )
      {
        dA.at( i, j ) += G.at( i, j ) * R.v[j];
        dR.v[j] += G.at( i, j ) * A.at( i, j );
      }
    }
  } );
}

Var Tape::mul_colvec( Var a, Var col )
{
  check( a );
  check( col );
  const Tensor& A = value( a );
  const Tensor& Cv = value( col );
  if ( Cv.size() != A.rows || ( Cv.rows != 1 && Cv.cols != 1 ) )
  {
    throw ShapeError( "mul_colvec: need a vector with one entry per row" );
  }
  Tensor C = A;
  for ( int i = 0; i < A.rows; ++i )
  {
    for ( int j = 0; j < A.cols; ++j )
    {
      C.at( i, j ) *= Cv.v[i];
    }
  }
  return push( std::move( C ), [a, col]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& A = t.nodes_[a.id].val;
    const Tensor& Cv = t.nodes_[col.id].val;
    Tensor& dA = t.nodes_[a.id].grad;
    Tensor& dC = t.nodes_[col.id].grad;
    for ( int i = 0; i < G.rows; ++i )
    {
      for ( int j = 0; j < G.cols; ++j )
      {
        dA.at( i, j ) += G.at( i, j ) * Cv.v[i];
        dC.v[i] += G.at( i, j ) * A.at( i, j );
      }
    }
  } );
}

Var Tape::scale( Var a, double c )
{
  check( a );
  Tensor C = value( a );
  for ( double& x : C.v )
  {
    x *= c;
  }
  return push( std::move( C ), [a, c]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( size_t i = 0; i < G.v.size(); ++i )
    {
      dA.v[i] += c * G.v[i];
    }
  } );
}

Var Tape::add_scalar( Var a, double c )
{
  check( a );
  Tensor C = value( a );
  for ( double& x : C.v )
  {
    x += c;
  }
  return push( std::move( C ), [a]( Tape& t, int self ) {
    add_into( t.nodes_[a.id].grad, t.nodes_[self].grad );
  } );
}

Var Tape::relu( Var a )
{
  check( a );
  Tensor C = value( a );
  for ( double& x : C.v )
  {
    x = x > 0.0 ? x : 0.0;
  }
  return push( std::move( C ), [a]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& A = t.nodes_[a.id].val;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( size_t i = 0; i < G.v.size(); ++i )
    {
      if ( A.v[i] > 0.0 )
      {
        dA.v[i] += G.v[i];
      }
    }
  } );
}

Var Tape::tanh_of( Var a )
{
  check( a );
  Tensor C = value( a );
  for ( double& x : C.v )
  {
    x = std::tanh( x );
  }
  return push( std::move( C ), [a]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& Y = t.nodes_[self].val;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( size_t i = 0; i < G.v.size(); ++i )
    {
      dA.v[i] += G.v[i] * ( 1.0 - Y.v[i] * Y.v[i] );
    }
  } );
}

Var Tape::log_clamped( Var a, double floor )
{
  check( a );
  if ( !( floor > 0.0 ) )
  {
    throw ShapeError( "log_clamped: floor must be positive" );
  }
  Tensor C = value( a );
  for ( double& x : C.v )
  {
    x = std::log( std::max( x, floor ) );
  }
  return push( std::move( C ), [a, floor]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& A = t.nodes_[a.id].val;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( size_t i = 0; i < G.v.size(); ++i )
    {
      if ( A.v[i] >= floor )
      {
        dA.v[i] += G.v[i] / A.v[i];
      }
    }
  } );
}

Var Tape::reshape( Var a, int rows, int cols )
{
  check( a );
  const Tensor& A = value( a );
  if ( rows * cols != A.size() )
  {
    throw ShapeError( "reshape: element count mismatch" );
  }
  Tensor C = A;
  C.rows = rows;
  C.cols = cols;
  return push( std::move( C ), [a]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( size_t i = 0; i < G.v.size(); ++i )
    {
      dA.v[i] += G.v[i];
    }
  } );
}

Var Tape::slice_cols( Var a, int start, int len )
{
  check( a );
  const Tensor& A = value( a );
  if ( start < 0 || len < 1 || start + len > A.cols )
  {
    throw ShapeError( "slice_cols: range out of bounds" );
  }
  Tensor C( A.rows, len );
  for ( int i = 0; i < A.rows; ++i )
  {
    for ( int j = 0; j < len; ++j )
    {
      C.at( i, j ) = A.at( i, start + j );
    }
  }
  return push( std::move( C ), [a, start, len]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( int i = 0; i < G.rows; ++i )
    {
      for ( int j = 0; j < len; ++j )
      {
        dA.at( i, start + j ) += G.at( i, j );
      }
    }
  } );
}

Var Tape::concat_cols( const std::vector<Var>& parts )
{
  if ( parts.empty() )
  {
    throw ShapeError( "concat_cols: no parts" );
  }
  int rows = -1;
  int cols = 0;
  for ( Var p : parts )
  {
    check( p );
    const Tensor& P = value( p );
    if ( rows < 0 )
    {
      rows = P.rows;
    }
    if ( P.rows != rows )
    {
      throw ShapeError( "concat_cols: row counts differ" );
    }
    cols += P.cols;
  }
  Tensor C( rows, cols );
  int off = 0;
  for ( Var p : parts )
  {
    const Tensor& P = value( p );
    for ( int i = 0; i < rows; ++i )
    {
      for ( int j = 0; j < P.cols; ++j )
      {
        C.at( i, off + j ) = P.at( i, j );
      }
    }
    off += P.cols;
  }
  auto ids = parts;
  return push( std::move( C ), [ids]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    int off = 0;
    for ( Var p : ids )
    {
      Tensor& dP = t.nodes_[p.id].grad;
      for ( int i = 0; i < dP.rows; ++i )
      {
        for ( int j = 0; j < dP.cols; ++j )
        {
          dP.at( i, j ) += G.at( i, off + j );
        }
      }
      off += dP.cols;
    }
  } );
}

Var Tape::concat_rows( const std::vector<Var>& parts )
{
  if ( parts.empty() )
  {
    throw ShapeError( "concat_rows: no parts" );
  }
  int cols = -1;
  int rows = 0;
  for ( Var p : parts )
  {
    check( p );
    const Tensor& P = value( p );
    if ( cols < 0 )
    {
      cols = P.cols;
    }
    if ( P.cols != cols )
    {
      throw ShapeError( "concat_rows: column counts differ" );
    }
    rows += P.rows;
  }
  Tensor C( rows, cols );
  int off = 0;
  for ( Var p : parts )
  {
    const Tensor& P = value( p );
    std::copy( P.v.begin(), P.v.end(), C.v.begin() + static_cast<size_t>( off ) * cols );
    off += P.rows;
  }
  auto ids = parts;
  return push( std::move( C ), [ids]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    int off = 0;
    for ( Var p : ids )
    {
      Tensor& dP = t.nodes_[p.id].grad;
      for ( int i = 0; i < dP.rows; ++i )
      {
        for ( int j = 0; j < dP.cols; ++j )
        {
          dP.at( i, j ) += G.at( off + i, j );
        }
      }
      off += dP.rows;
    }
  } );
}

Var Tape::gather( Var a, const std::vector<std::pair<int, int>>& coords )
{
  check( a );
  const Tensor& A = value( a );
  Tensor C( 1, static_cast<int>( coords.size() ) );
  for ( size_t i = 0; i < coords.size(); ++i )
  {
    auto [r, c] = coords[i];
    if ( r < 0 || r >= A.rows || c < 0 || c >= A.cols )
    {
      throw ShapeError( "gather: coordinate out of bounds" );
    }
    C.v[i] = A.at( r, c );
  }
  auto cc = coords;
  return push( std::move( C ), [a, cc]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( size_t i = 0; i < cc.size(); ++i )
    {
      dA.at( cc[i].first, cc[i].second ) += G.v[i];
    }
  } );
}

Var Tape::sum_all( Var a )
{
  check( a );
  const Tensor& A = value( a );
  double s = 0.0;
  for ( double x : A.v )
  {
    s += x;
  }
  return push( Tensor::scalar( s ), [a]( Tape& t, int self ) {
    double const g = t.nodes_[self].grad.v[0];
    Tensor& dA = t.nodes_[a.id].grad;
    for ( double& x : dA.v )
    {
      x += g;
    }
  } );
}

Var Tape::mean_rows( Var a )
{
  check( a );
  const Tensor& A = value( a );
  if ( A.rows < 1 )
  {
    throw ShapeError( "mean_rows: empty tensor" );
  }
  Tensor C( 1, A.cols );
  for ( int i = 0; i < A.rows; ++i )
  {
    for ( int j = 0; j < A.cols; ++j )
    {
      C.v[j] += A.at( i, j );
    }
  }
  for ( double& x : C.v )
  {
    x /= A.rows;
  }
  return push( std::move( C ), [a]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    Tensor& dA = t.nodes_[a.id].grad;
    double const inv = 1.0 / dA.rows;
    for ( int i = 0; i < dA.rows; ++i )
    {
      for ( int j = 0; j < dA.cols; ++j )
      {
        dA.at( i, j ) += G.v[j] * inv;
      }
    }
  } );
}

Var Tape::softmax_rows( Var a )
{
  check( a );
  const Tensor& A = value( a );
  Tensor C( A.rows, A.cols );
  for ( int i = 0; i < A.rows; ++i )
  {
    double mx = A.at( i, 0 );
    for ( int j = 1; j < A.cols; ++j )
    {
      mx = std::max( mx, A.at( i, j ) );
    }
    double sum = 0.0;
    for ( int j = 0; j < A.cols; ++j )
    {
      double const e = std::exp( A.at( i, j ) - mx );
      C.at( i, j ) = e;
      sum += e;
    }
    for ( int j = 0; j < A.cols; ++j )
    {
      C.at( i, j ) /= sum;
    }
  }
  return push( std::move( C ), [a]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& Y = t.nodes_[self].val;
    Tensor& dA = t.nodes_[a.id].grad;
    for ( int i = 0; i < G.rows; ++i )
    {
      double dot = 0.0;
      for ( int j = 0; j < G.cols; ++j )
      {
        dot += G.at( i, j ) * Y.at( i, j );
      }
      for ( int j = 0; j < G.cols; ++j )
      {
        dA.at( i, j ) += Y.at( i, j ) * ( G.at( i, j ) - dot );
      }
    }
  } );
}

Var Tape::layer_norm_rows( Var a, Var gamma, Var beta, double eps )
{
  check( a );
  check( gamma );
  check( beta );
  const Tensor& A = value( a );
  const Tensor& Gm = value( gamma );
  const Tensor& Bt = value( beta );
  if ( Gm.rows != 1 || Gm.cols != A.cols || Bt.rows != 1 || Bt.cols != A.cols )
  {
    throw ShapeError( "layer_norm_rows: gamma/beta must be 1 x cols" );
  }
  Tensor C( A.rows, A.cols );
  for ( int i = 0; i < A.rows; ++i )
  {
    double mu = 0.0;
    for ( int j = 0; j < A.cols; ++j )
    {
      mu += A.at( i, j );
    }
    mu /= A.cols;
    double var = 0.0;
    for ( int j = 0; j < A.cols; ++j )
    {
      double const d = A.at( i, j ) - mu;
      var += d * d;
    }
    var /= A.cols;
    double const inv = 1.0 / std::sqrt( var + eps );
    for ( int j = 0; j < A.cols; ++j )
    {
      C.at( i, j ) = Gm.v[j] * ( A.at( i, j ) - mu ) * inv + Bt.v[j];
    }
  }
  return push( std::move( C ), [a, gamma, beta, eps]( Tape& t, int self ) {
    const Tensor& G = t.nodes_[self].grad;
    const Tensor& A = t.nodes_[a.id].val;
    const Tensor& Gm = t.nodes_[gamma.id].val;
    Tensor& dA = t.nodes_[a.id].grad;
    Tensor& dGm = t.nodes_[gamma.id].grad;
    Tensor& dBt = t.nodes_[beta.id].grad;
    int const cols = A.cols;
    std::vector<double> xhat( cols );
    for ( int i = 0; i < A.rows; ++i )
    {
      double mu = 0.0;
      for ( int j = 0; j < cols; ++j )
      {
        mu += A.at( i, j );
      }
      mu /= cols;
      double var = 0.0;
      for ( int j = 0; j < cols; ++j )
      {
        double const d = A.at( i, j ) - mu;
        var += d * d;
      }
      var /= cols;
      double const inv = 1.0 / std::sqrt( var + eps );
      double mean_d = 0.0;
      double mean_dx = 0.0;
      for ( int j = 0; j < cols; ++j )
      {
        xhat[j] = ( A.at( i, j ) - mu ) * inv;
        double const d = Gm.v[j] * G.at( i, j );
        mean_d += d;
        mean_dx += d * xhat[j];
        dGm.v[j] += G.at( i, j ) * xhat[j];
        dBt.v[j] += G.at( i, j );
      }
      mean_d /= cols;
      mean_dx /= cols;
      for ( int j = 0; j < cols; ++j )
      {
        double const d = Gm.v[j] * G.at( i, j );
        dA.at( i, j ) += ( d - mean_d - xhat[j] * mean_dx ) * inv;
      }
    }
  } );
}

Var Tape::neglog_pick_sum( Var probs, const std::vector<int>& targets, double floor )
{
  check( probs );
  const Tensor& P = value( probs );
  if ( static_cast<int>( targets.size() ) != P.rows )
  {
    throw ShapeError( "neglog_pick_sum: one target per row required" );
  }
  double loss = 0.0;
  for ( int i = 0; i < P.rows; ++i )
  {
    int const tgt = targets[i];
    if ( tgt < 0 )
    {
      continue;
    }
    if ( tgt >= P.cols )
    {
      throw ShapeError( "neglog_pick_sum: target out of range" );
    }
    loss -= std::log( std::max( P.at( i, tgt ), floor ) );
  }
  auto tg = targets;
  return push( Tensor::scalar( loss ), [probs, tg, floor]( Tape& t, int self ) {
    double const g = t.nodes_[self].grad.v[0];
    const Tensor& P = t.nodes_[probs.id].val;
    Tensor& dP = t.nodes_[probs.id].grad;
    for ( int i = 0; i < P.rows; ++i )
    {
      int const tgt = tg[i];
      if ( tgt < 0 )
      {
        continue;
      }
      double const p = P.at( i, tgt );
      if ( p >= floor )
      {
        dP.at( i, tgt ) -= g / p;
      }
    }
  } );
}

Var Tape::bce_mean( Var probs, const std::vector<double>& bits, double floor )
{
  check( probs );
  const Tensor& P = value( probs );
  if ( static_cast<int>( bits.size() ) != P.size() )
  {
    throw ShapeError( "bce_mean: target size mismatch" );
  }
  if ( P.size() == 0 )
  {
    throw ShapeError( "bce_mean: empty prediction" );
  }
  double const hi = 1.0 - floor;
  double loss = 0.0;
  for ( int i = 0; i < P.size(); ++i )
  {
    double const s = std::min( hi, std::max( floor, P.v[i] ) );
    double const y = bits[i];
    loss -= y * std::log( s ) + ( 1.0 - y ) * std::log( 1.0 - s );
  }
  loss /= P.size();
  auto bb = bits;
  return push( Tensor::scalar( loss ), [probs, bb, floor, hi]( Tape& t, int self ) {
    double const g = t.nodes_[self].grad.v[0] / t.nodes_[probs.id].val.size();
    const Tensor& P = t.nodes_[probs.id].val;
    Tensor& dP = t.nodes_[probs.id].grad;
    for ( int i = 0; i < P.size(); ++i )
    {
      double const raw = P.v[i];
      if ( raw <= floor || raw >= hi )
      {
        continue; /* clamped region */
      }
      double const y = bb[i];
      dP.v[i] += g * ( -y / raw + ( 1.0 - y ) / ( 1.0 - raw ) );
    }
  } );
}

Var Tape::hard_argmax_rows( Var a )
{
  check( a );
  const Tensor& A = value( a );
  Tensor C( A.rows, A.cols );
  for ( int i = 0; i < A.rows; ++i )
  {
    int best = 0;
    for ( int j = 1; j < A.cols; ++j )
    {
      if ( A.at( i, j ) > A.at( i, best ) )
      {
        best = j;
      }
    }
    C.at( i, best ) = 1.0;
  }
  return push( std::move( C ), [a]( Tape& t, int self ) {
    /* straight-through: pass the gradient unchanged */
    add_into( t.nodes_[a.id].grad, t.nodes_[self].grad );
  } );
}

void Tape::backward( Var loss )
{
  check( loss );
  const Tensor& L = value( loss );
  if ( L.rows != 1 || L.cols != 1 )
  {
    throw ShapeError( "backward: loss must be scalar" );
  }
  for ( auto& node : nodes_ )
  {
    std::fill( node.grad.v.begin(), node.grad.v.end(), 0.0 );
  }
  nodes_[loss.id].grad.v[0] = 1.0;
  for ( int i = loss.id; i >= 0; --i )
  {
    if ( nodes_[i].back )
    {
      nodes_[i].back( *this, i );
    }
  }
}

} // namespace seadag::ad
