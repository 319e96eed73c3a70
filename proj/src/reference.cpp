/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/reference.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>

namespace seadag
{
namespace ref
{

TruthTable simulate( const Aig& aig )
{
  int const n = aig.num_nodes();
  int const rows = 1 << aig.n_in;
  TruthTable tt;
  tt.n_in = aig.n_in;
  tt.outputs.assign( aig.n_out, std::vector<uint8_t>( rows, 0 ) );
  for ( int r = 0; r < rows; ++r )
  {
    std::vector<std::optional<bool>> memo( n );
    std::vector<bool> visiting( n, false );
    std::function<bool( int )> value = [&]( int id ) -> bool {
      if ( id < 0 || id >= n || aig.is_output_id( id ) )
      {
        throw ShapeError( "reference simulate: bad child id" );
      }
      if ( memo[id] )
      {
        return *memo[id];
      }
      if ( visiting[id] )
      {
        throw ShapeError( "reference simulate: cyclic wiring" );
      }
      if ( id < aig.n_in )
      {
        memo[id] = ( ( r >> id ) & 1 ) != 0;
        return *memo[id];
      }
      if ( aig.has_const_zero && id == aig.const_zero_id() )
      {
        memo[id] = false;
        return false;
      }
      visiting[id] = true;
      const AndGate& g = aig.and_gates[id - aig.num_inputs_total()];
      bool const a = value( g.child_a ) != g.neg_a;
      bool const b = value( g.child_b ) != g.neg_b;
      visiting[id] = false;
      memo[id] = a && b;
      return *memo[id];
    };
    for ( int o = 0; o < aig.n_out; ++o )
    {
      const OutputWire& w = aig.outputs[o];
      tt.outputs[o][r] = ( value( w.child ) != w.neg ) ? 1 : 0;
    }
  }
  return tt;
}

std::vector<double> cumulative_transition_by_product( int t, const NoiseModel& nm,
                                                      Alphabet a )
{
  int const k = static_cast<int>( nm.m( a ).size() );
  std::vector<double> prod( static_cast<size_t>( k ) * k, 0.0 );
  for ( int i = 0; i < k; ++i )
  {
    prod[static_cast<size_t>( i ) * k + i] = 1.0;
  }
  for ( int step = 1; step <= t; ++step )
  {
    std::vector<double> const q = transition_matrix( nm.alpha( step ), nm.m( a ) );
    std::vector<double> next( static_cast<size_t>( k ) * k, 0.0 );
    for ( int i = 0; i < k; ++i )
    {
      for ( int j = 0; j < k; ++j )
      {
        double acc = 0.0;
        for ( int l = 0; l < k; ++l )
        {
          acc += prod[static_cast<size_t>( i ) * k + l] * q[static_cast<size_t>( l ) * k + j];
        }
        next[static_cast<size_t>( i ) * k + j] = acc;
      }
    }
    prod = std::move( next );
  }
  return prod;
}

std::vector<double> posterior_by_enumeration( const std::vector<double>& pred_dist,
                                              int current_cat, int tau_t, int tau_prev,
                                              const NoiseModel& nm, Alphabet a )
{
  int const k = static_cast<int>( nm.m( a ).size() );
  if ( tau_prev == tau_t )
  {
    std::vector<double> point( k, 0.0 );
    point[current_cat] = 1.0;
    return point;
  }

  /* one-step matrices for every step along the chain */
  std::vector<std::vector<double>> q( tau_t + 1 );
  for ( int step = 1; step <= tau_t; ++step )
  {
    q[step] = transition_matrix( nm.alpha( step ), nm.m( a ) );
  }

  std::vector<double> result( k, 0.0 );
  for ( int x0 = 0; x0 < k; ++x0 )
  {
    std::vector<double> at_prev( k, 0.0 );
    double total = 0.0;
    /* walk every trajectory x^0 = x0 ... x^{tau_t} = current_cat */
    std::vector<int> path( tau_t + 1 );
    path[0] = x0;
    path[tau_t] = current_cat;
    std::function<void( int, double )> walk = [&]( int step, double p ) {
      if ( p == 0.0 )
      {
        return;
      }
      if ( step == tau_t )
      {
        total += p;
        at_prev[path[tau_prev]] += p;
        return;
      }
      if ( step + 1 == tau_t )
      {
        double const pp =
            p * q[step + 1][static_cast<size_t>( path[step] ) * k + current_cat];
        total += pp;
        if ( pp > 0.0 )
        {
          at_prev[path[tau_prev]] += pp;
        }
        return;
      }
      for ( int s = 0; s < k; ++s )
      {
        path[step + 1] = s;
        walk( step + 1, p * q[step + 1][static_cast<size_t>( path[step] ) * k + s] );
      }
    };
    walk( 0, 1.0 );
    if ( total <= 0.0 )
    {
      continue;
    }
    for ( int r = 0; r < k; ++r )
    {
      result[r] += pred_dist[x0] * at_prev[r] / total;
    }
  }
  double norm = 0.0;
  for ( double v : result )
  {
    norm += v;
  }
  if ( norm > 0.0 )
  {
    for ( double& v : result )
    {
      v /= norm;
    }
  }
  return result;
}

std::vector<int> node_levels( const std::vector<int>& edge_cats, int n )
{
  std::vector<int> level( n, 0 );
  /* relax until stable; n passes suffice for any DAG, one more detects cycles */
  for ( int pass = 0; pass <= n; ++pass )
  {
    bool changed = false;
    for ( int j = 0; j < n; ++j )
    {
      int want = 0;
      for ( int i = 0; i < n; ++i )
      {
        if ( i != j && edge_cats[static_cast<size_t>( i ) * n + j] != 0 )
        {
          want = std::max( want, level[i] + 1 );
        }
      }
      if ( want != level[j] )
      {
        level[j] = want;
        changed = true;
      }
    }
    if ( !changed )
    {
      return level;
    }
  }
  throw CyclicGraphError( {} );
}

double chi2_critical_99( int df )
{
  static const double table[10] = { 6.635, 9.210, 11.345, 13.277, 15.086,
                                    16.812, 18.475, 20.090, 21.666, 23.209 };
  if ( df < 1 || df > 10 )
  {
    throw ConfigError( "chi2 table covers 1 <= df <= 10" );
  }
  return table[df - 1];
}

} // namespace ref
} // namespace seadag
