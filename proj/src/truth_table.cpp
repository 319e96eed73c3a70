/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/truth_table.hpp"

#include "seadag/error.hpp"

namespace seadag
{

namespace
{
int hex_value( char c )
{
  if ( c >= '0' && c <= '9' )
  {
    return c - '0';
  }
  if ( c >= 'a' && c <= 'f' )
  {
    return c - 'a' + 10;
  }
  if ( c >= 'A' && c <= 'F' )
  {
    return c - 'A' + 10;
  }
  return -1;
}
} // namespace

std::string column_to_hex( const std::vector<uint8_t>& bits )
{
  static const char* digits = "0123456789abcdef";
  std::string out;
  size_t const n = bits.size();
  out.reserve( ( n + 3 ) / 4 );
  for ( size_t g = 0; g < n; g += 4 )
  {
    int v = 0;
    for ( size_t j = 0; j < 4; ++j )
    {
      v <<= 1;
      if ( g + j < n && bits[g + j] )
      {
        v |= 1;
      }
    }
    out.push_back( digits[v] );
  }
  return out;
}

std::vector<uint8_t> column_from_hex( const std::string& hex, int n_in )
{
  if ( n_in < 0 || n_in > 24 )
  {
    throw ShapeError( "column_from_hex: unsupported input count " + std::to_string( n_in ) );
  }
  size_t const rows = static_cast<size_t>( 1 ) << n_in;
  size_t const want = ( rows + 3 ) / 4;
  if ( hex.size() != want )
  {
    throw ShapeError( "column_from_hex: expected " + std::to_string( want ) +
                      " hex digits for " + std::to_string( rows ) + " rows, got " +
                      std::to_string( hex.size() ) );
  }
  std::vector<uint8_t> bits( rows, 0 );
  for ( size_t d = 0; d < hex.size(); ++d )
  {
    int const v = hex_value( hex[d] );
    if ( v < 0 )
    {
      throw ShapeError( std::string( "column_from_hex: invalid hex digit '" ) + hex[d] + "'" );
    }
    for ( size_t j = 0; j < 4; ++j )
    {
      size_t const r = d * 4 + j;
      uint8_t const bit = static_cast<uint8_t>( ( v >> ( 3 - j ) ) & 1 );
      if ( r < rows )
      {
        bits[r] = bit;
      }
      else if ( bit )
      {
        throw ShapeError( "column_from_hex: nonzero padding bit" );
      }
    }
  }
  return bits;
}

double function_accuracy( const TruthTable& predicted, const TruthTable& condition )
{
  if ( predicted.n_in != condition.n_in || predicted.n_out() != condition.n_out() )
  {
    throw ShapeError( "function_accuracy: table shapes differ" );
  }
  long total = 0;
  long match = 0;
  for ( int o = 0; o < condition.n_out(); ++o )
  {
    if ( predicted.outputs[o].size() != condition.outputs[o].size() )
    {
      throw ShapeError( "function_accuracy: column lengths differ" );
    }
    for ( size_t r = 0; r < condition.outputs[o].size(); ++r )
    {
      ++total;
      if ( predicted.outputs[o][r] == condition.outputs[o][r] )
      {
        ++match;
      }
    }
  }
  if ( total == 0 )
  {
    throw ShapeError( "function_accuracy: empty tables" );
  }
  return static_cast<double>( match ) / static_cast<double>( total );
}

} // namespace seadag
