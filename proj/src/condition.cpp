/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/condition.hpp"

#include <cmath>

#include "seadag/aig.hpp"

namespace seadag
{

namespace
{
bool all_finite_impl( const Tensor& t )
{
  for ( double x : t.v )
  {
    if ( !std::isfinite( x ) )
    {
      return false;
    }
  }
  return true;
}
} // namespace

bool all_finite( const Tensor& t )
{
  return all_finite_impl( t );
}

std::vector<NodeRole> canonical_roles( int n, int n_in, int n_out )
{
  if ( n_in < 0 || n_out < 0 || n_in + n_out > n )
  {
    throw ShapeError( "canonical_roles: inconsistent counts" );
  }
  std::vector<NodeRole> roles( n );
  for ( int i = 0; i < n_in; ++i )
  {
    roles[i] = { kNodeInput, i };
  }
  for ( int i = n_in; i < n - n_out; ++i )
  {
    roles[i] = { kNodeAnd, i - n_in };
  }
  for ( int k = 0; k < n_out; ++k )
  {
    roles[n - n_out + k] = { kNodeOutput, k };
  }
  return roles;
}

Tensor encode_condition( const TruthTable& tt, const std::vector<NodeRole>& roles )
{
  if ( tt.n_in < 1 || tt.n_in > 24 )
  {
    throw ShapeError( "encode_condition: unsupported input count" );
  }
  int const n = static_cast<int>( roles.size() );
  int const rows = tt.rows();

  /* fixed 256-row resampling of the table's row index space */
  auto src_row = [&]( int r ) {
    if ( tt.n_in >= 8 )
    {
      return r << ( tt.n_in - 8 );
    }
    return r & ( rows - 1 );
  };

  Tensor out( n, kConditionDim );
  for ( int node = 0; node < n; ++node )
  {
    const NodeRole& role = roles[node];
    if ( role.kind == kNodeAnd )
    {
      continue;
    }
    const std::vector<uint8_t>* col = nullptr;
    if ( role.kind == kNodeOutput )
    {
      if ( role.index < 0 || role.index >= tt.n_out() )
      {
        throw ShapeError( "encode_condition: output slot out of range" );
      }
      col = &tt.outputs[role.index];
    }
    else if ( role.index < 0 || role.index >= tt.n_in )
    {
      throw ShapeError( "encode_condition: input slot out of range" );
    }
    for ( int b = 0; b < kConditionDim; ++b )
    {
      int byte = 0;
      for ( int j = 0; j < 8; ++j )
      {
        int const r = src_row( b * 8 + j );
        uint8_t const bit = col ? ( *col )[r] : input_bit( role.index, r );
        byte = ( byte << 1 ) | bit;
      }
      out.at( node, b ) = static_cast<double>( byte ) / 256.0;
    }
  }
  return out;
}

} // namespace seadag
