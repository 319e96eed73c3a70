/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace seadag
{

namespace
{
inline uint64_t splitmix64( uint64_t& x )
{
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
  z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebULL;
  return z ^ ( z >> 31 );
}
} // namespace

uint64_t split_seed( uint64_t base, uint64_t index )
{
  uint64_t x = base ^ ( 0xd1342543de82ef95ULL * ( index + 1 ) );
  return splitmix64( x );
}

uint64_t Rng::next_u64()
{
  return splitmix64( state_ );
}

double Rng::uniform()
{
  return static_cast<double>( next_u64() >> 11 ) * 0x1.0p-53;
}

double Rng::uniform_pos()
{
  double u = uniform();
  while ( u <= 0.0 )
  {
    u = uniform();
  }
  return u;
}

double Rng::normal()
{
  if ( have_cached_normal_ )
  {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double const u1 = uniform_pos();
  double const u2 = uniform();
  double const r = std::sqrt( -2.0 * std::log( u1 ) );
  double const a = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin( a );
  have_cached_normal_ = true;
  return r * std::cos( a );
}

double Rng::gumbel()
{
  return -std::log( -std::log( uniform_pos() ) );
}

int Rng::uniform_int( int n )
{
  if ( n <= 0 )
  {
    throw std::invalid_argument( "Rng::uniform_int: n must be positive" );
  }
  /* multiply-shift bounded sampling; bias below 2^-32 is irrelevant here but
   * rejection keeps it exact */
  uint64_t const bound = static_cast<uint64_t>( n );
  uint64_t const limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v = next_u64();
  while ( v >= limit )
  {
    v = next_u64();
  }
  return static_cast<int>( v % bound );
}

bool Rng::bernoulli( double p )
{
  return uniform() < p;
}

int Rng::categorical( const double* w, int k )
{
  double total = 0.0;
  for ( int i = 0; i < k; ++i )
  {
    if ( w[i] < 0.0 )
    {
      throw std::invalid_argument( "Rng::categorical: negative weight" );
    }
    total += w[i];
  }
  if ( !( total > 0.0 ) )
  {
    throw std::invalid_argument( "Rng::categorical: zero total weight" );
  }
  double const u = uniform() * total;
  double acc = 0.0;
  for ( int i = 0; i < k; ++i )
  {
    acc += w[i];
    if ( u < acc )
    {
      return i;
    }
  }
  /* numerical slack: fall back to the last category with nonzero weight */
  for ( int i = k - 1; i >= 0; --i )
  {
    if ( w[i] > 0.0 )
    {
      return i;
    }
  }
  return k - 1;
}

int Rng::categorical( const std::vector<double>& w )
{
  return categorical( w.data(), static_cast<int>( w.size() ) );
}

std::vector<int> Rng::sample_without_replacement( int n, int k )
{
  if ( k > n )
  {
    throw std::invalid_argument( "sample_without_replacement: k > n" );
  }
  /* partial Fisher-Yates over an index pool */
  std::vector<int> pool( n );
  for ( int i = 0; i < n; ++i )
  {
    pool[i] = i;
  }
  std::vector<int> out;
  out.reserve( k );
  for ( int i = 0; i < k; ++i )
  {
    int const j = i + uniform_int( n - i );
    std::swap( pool[i], pool[j] );
    out.push_back( pool[i] );
  }
  return out;
}

} // namespace seadag
