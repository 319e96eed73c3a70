/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/dag.hpp"

#include <algorithm>
#include <sstream>

namespace seadag
{

namespace
{
std::string cycle_message( const std::vector<int>& cycle )
{
  std::ostringstream os;
  os << "graph contains a directed cycle:";
  for ( int v : cycle )
  {
    os << " " << v;
  }
  return os.str();
}
} // namespace

CyclicGraphError::CyclicGraphError( std::vector<int> c )
    : std::runtime_error( cycle_message( c ) ), cycle( std::move( c ) )
{
}

Permutation Permutation::identity( int n )
{
  Permutation p;
  p.map.resize( n );
  for ( int i = 0; i < n; ++i )
  {
    p.map[i] = i;
  }
  return p;
}

bool Permutation::is_valid() const
{
  int const n = static_cast<int>( map.size() );
  std::vector<char> seen( n, 0 );
  for ( int v : map )
  {
    if ( v < 0 || v >= n || seen[v] )
    {
      return false;
    }
    seen[v] = 1;
  }
  return true;
}

Permutation Permutation::inverse() const
{
  Permutation inv;
  inv.map.resize( map.size() );
  for ( int i = 0; i < static_cast<int>( map.size() ); ++i )
  {
    inv.map[map[i]] = i;
  }
  return inv;
}

Permutation Permutation::then( const Permutation& second ) const
{
  if ( second.map.size() != map.size() )
  {
    throw ShapeError( "Permutation::then: size mismatch" );
  }
  Permutation out;
  out.map.resize( map.size() );
  for ( int i = 0; i < static_cast<int>( map.size() ); ++i )
  {
    out.map[i] = second.map[map[i]];
  }
  return out;
}

Permutation random_permutation( int n, Rng& rng )
{
  Permutation p = Permutation::identity( n );
  for ( int i = n - 1; i > 0; --i )
  {
    std::swap( p.map[i], p.map[rng.uniform_int( i + 1 )] );
  }
  return p;
}

Dag Dag::from_categories( int k_x, int k_e, const std::vector<int>& node_cats,
                          const std::vector<int>& edge_cats,
                          const std::vector<int>* levels )
{
  int const n = static_cast<int>( node_cats.size() );
  if ( k_x < 1 || k_e < 1 )
  {
    throw ShapeError( "Dag: category counts must be positive" );
  }
  if ( static_cast<int>( edge_cats.size() ) != n * n )
  {
    throw ShapeError( "Dag: edge category matrix must be n*n" );
  }
  for ( int i = 0; i < n; ++i )
  {
    if ( node_cats[i] < 0 || node_cats[i] >= k_x )
    {
      throw ShapeError( "Dag: node category out of range at node " + std::to_string( i ) );
    }
  }
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      int const c = edge_cats[i * n + j];
      if ( c < 0 || c >= k_e )
      {
        throw ShapeError( "Dag: edge category out of range at (" + std::to_string( i ) + "," +
                          std::to_string( j ) + ")" );
      }
      if ( i == j && c != 0 )
      {
        throw ShapeError( "Dag: self-edge at node " + std::to_string( i ) );
      }
    }
  }

  Dag g;
  g.n_ = n;
  g.k_x_ = k_x;
  g.k_e_ = k_e;
  g.node_onehot_.assign( static_cast<size_t>( n ) * k_x, 0 );
  g.edge_onehot_.assign( static_cast<size_t>( n ) * n * k_e, 0 );
  for ( int i = 0; i < n; ++i )
  {
    g.node_onehot_[static_cast<size_t>( i ) * k_x + node_cats[i]] = 1;
  }
  for ( int ij = 0; ij < n * n; ++ij )
  {
    g.edge_onehot_[static_cast<size_t>( ij ) * k_e + edge_cats[ij]] = 1;
  }
  if ( levels )
  {
    if ( static_cast<int>( levels->size() ) != n )
    {
      throw ShapeError( "Dag: level vector must have one entry per node" );
    }
    g.levels_ = *levels;
  }
  else
  {
    g.levels_ = node_levels( edge_cats, n );
  }
  g.max_level_ = 0;
  for ( int l : g.levels_ )
  {
    g.max_level_ = std::max( g.max_level_, l );
  }
  return g;
}

Dag Dag::from_raw( int n, int k_x, int k_e, std::vector<uint8_t> node_onehot,
                   std::vector<uint8_t> edge_onehot, std::vector<int> levels )
{
  if ( static_cast<int>( node_onehot.size() ) != n * k_x ||
       static_cast<int>( edge_onehot.size() ) != n * n * k_e ||
       static_cast<int>( levels.size() ) != n )
  {
    throw ShapeError( "Dag::from_raw: storage sizes do not match n/k_x/k_e" );
  }
  Dag g;
  g.n_ = n;
  g.k_x_ = k_x;
  g.k_e_ = k_e;
  g.node_onehot_ = std::move( node_onehot );
  g.edge_onehot_ = std::move( edge_onehot );
  g.levels_ = std::move( levels );
  g.max_level_ = 0;
  for ( int l : g.levels_ )
  {
    g.max_level_ = std::max( g.max_level_, l );
  }
  return g;
}

int Dag::node_cat( int i ) const
{
  int best = 0;
  uint8_t best_v = node_onehot_[static_cast<size_t>( i ) * k_x_];
  for ( int c = 1; c < k_x_; ++c )
  {
    uint8_t const v = node_onehot_[static_cast<size_t>( i ) * k_x_ + c];
    if ( v > best_v )
    {
      best = c;
      best_v = v;
    }
  }
  return best;
}

int Dag::edge_cat( int i, int j ) const
{
  size_t const base = ( static_cast<size_t>( i ) * n_ + j ) * k_e_;
  int best = 0;
  uint8_t best_v = edge_onehot_[base];
  for ( int c = 1; c < k_e_; ++c )
  {
    if ( edge_onehot_[base + c] > best_v )
    {
      best = c;
      best_v = edge_onehot_[base + c];
    }
  }
  return best;
}

std::vector<int> Dag::node_cats() const
{
  std::vector<int> out( n_ );
  for ( int i = 0; i < n_; ++i )
  {
    out[i] = node_cat( i );
  }
  return out;
}

std::vector<int> Dag::edge_cats() const
{
  std::vector<int> out( static_cast<size_t>( n_ ) * n_ );
  for ( int i = 0; i < n_; ++i )
  {
    for ( int j = 0; j < n_; ++j )
    {
      out[static_cast<size_t>( i ) * n_ + j] = edge_cat( i, j );
    }
  }
  return out;
}

std::vector<int> node_levels( const std::vector<int>& edge_cats, int n )
{
  if ( static_cast<int>( edge_cats.size() ) != n * n )
  {
    throw ShapeError( "node_levels: edge category matrix must be n*n" );
  }

  /* Kahn-style elimination from the leaves up: a node is ready once all of
   * its children (incoming feeds) are leveled. */
  std::vector<int> remaining( n, 0 ); /* unresolved children of each node */
  std::vector<std::vector<int>> parents_of( n );
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      if ( i != j && edge_cats[static_cast<size_t>( i ) * n + j] != 0 )
      {
        ++remaining[j];
        parents_of[i].push_back( j );
      }
    }
  }

  std::vector<int> levels( n, 0 );
  std::vector<int> queue;
  queue.reserve( n );
  for ( int v = 0; v < n; ++v )
  {
    if ( remaining[v] == 0 )
    {
      queue.push_back( v );
    }
  }
  int processed = 0;
  for ( size_t qi = 0; qi < queue.size(); ++qi )
  {
    int const v = queue[qi];
    ++processed;
    for ( int p : parents_of[v] )
    {
      levels[p] = std::max( levels[p], levels[v] + 1 );
      if ( --remaining[p] == 0 )
      {
        queue.push_back( p );
      }
    }
  }

  if ( processed != n )
  {
    /* extract one concrete cycle by walking child pointers among the
     * unresolved nodes */
    std::vector<char> resolved( n, 1 );
    for ( int v = 0; v < n; ++v )
    {
      resolved[v] = 0;
    }
    for ( int v : queue )
    {
      resolved[v] = 1;
    }
    int start = -1;
    for ( int v = 0; v < n; ++v )
    {
      if ( !resolved[v] )
      {
        start = v;
        break;
      }
    }
    std::vector<int> order;
    std::vector<int> pos( n, -1 );
    int cur = start;
    while ( pos[cur] < 0 )
    {
      pos[cur] = static_cast<int>( order.size() );
      order.push_back( cur );
      int next = -1;
      for ( int i = 0; i < n; ++i )
      {
        if ( i != cur && !resolved[i] && edge_cats[static_cast<size_t>( i ) * n + cur] != 0 )
        {
          next = i;
          break;
        }
      }
      cur = next;
    }
    std::vector<int> cycle( order.begin() + pos[cur], order.end() );
    std::reverse( cycle.begin(), cycle.end() ); /* child -> parent order */
    throw CyclicGraphError( std::move( cycle ) );
  }

  return levels;
}

std::vector<int> node_levels( const Dag& g )
{
  return node_levels( g.edge_cats(), g.n() );
}

Dag permute( const Dag& g, const Permutation& p )
{
  if ( !p.is_valid() || p.n() != g.n() )
  {
    throw ShapeError( "permute: invalid permutation" );
  }
  int const n = g.n();
  int const kx = g.k_x();
  int const ke = g.k_e();
  std::vector<uint8_t> nx( static_cast<size_t>( n ) * kx );
  std::vector<uint8_t> ne( static_cast<size_t>( n ) * n * ke );
  std::vector<int> lv( n );
  for ( int i = 0; i < n; ++i )
  {
    int const ni = p.map[i];
    std::copy_n( g.node_onehot().begin() + static_cast<size_t>( i ) * kx, kx,
                 nx.begin() + static_cast<size_t>( ni ) * kx );
    lv[ni] = g.level( i );
  }
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      size_t const src = ( static_cast<size_t>( i ) * n + j ) * ke;
      size_t const dst = ( static_cast<size_t>( p.map[i] ) * n + p.map[j] ) * ke;
      std::copy_n( g.edge_onehot().begin() + src, ke, ne.begin() + dst );
    }
  }
  return Dag::from_raw( n, kx, ke, std::move( nx ), std::move( ne ), std::move( lv ) );
}

std::vector<OnehotViolation> check_onehot( const Dag& g )
{
  std::vector<OnehotViolation> out;
  int const n = g.n();
  for ( int i = 0; i < n; ++i )
  {
    int sum = 0;
    bool binary = true;
    for ( int c = 0; c < g.k_x(); ++c )
    {
      uint8_t const v = g.node_onehot()[static_cast<size_t>( i ) * g.k_x() + c];
      if ( v > 1 )
      {
        binary = false;
      }
      sum += v;
    }
    if ( sum != 1 || !binary )
    {
      out.push_back( { false, i, -1 } );
    }
  }
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      size_t const base = ( static_cast<size_t>( i ) * n + j ) * g.k_e();
      int sum = 0;
      bool binary = true;
      for ( int c = 0; c < g.k_e(); ++c )
      {
        uint8_t const v = g.edge_onehot()[base + c];
        if ( v > 1 )
        {
          binary = false;
        }
        sum += v;
      }
      if ( sum != 1 || !binary )
      {
        out.push_back( { true, i, j } );
      }
    }
  }
  return out;
}

bool edges_respect_levels( const Dag& g )
{
  for ( int i = 0; i < g.n(); ++i )
  {
    for ( int j = 0; j < g.n(); ++j )
    {
      if ( i != j && g.edge_cat( i, j ) != 0 && !( g.level( i ) < g.level( j ) ) )
      {
        return false;
      }
    }
  }
  return true;
}

std::string to_dot( const Dag& g, const std::vector<std::string>& type_labels )
{
  std::ostringstream os;
  os << "digraph seadag {\n";
  os << "  rankdir=BT;\n";
  for ( int i = 0; i < g.n(); ++i )
  {
    int const c = g.node_cat( i );
    std::string const name =
        c < static_cast<int>( type_labels.size() ) ? type_labels[c] : std::to_string( c );
    os << "  n" << i << " [label=\"" << i << ":" << name << " L" << g.level( i ) << "\"];\n";
  }
  for ( int i = 0; i < g.n(); ++i )
  {
    for ( int j = 0; j < g.n(); ++j )
    {
      if ( i == j )
      {
        continue;
      }
      int const c = g.edge_cat( i, j );
      if ( c == 0 )
      {
        continue;
      }
      os << "  n" << i << " -> n" << j;
      if ( c == 2 )
      {
        os << " [style=dashed]";
      }
      else if ( c > 2 )
      {
        os << " [label=\"" << c << "\"]";
      }
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

} // namespace seadag
