/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/aig.hpp"

#include <algorithm>
#include <numeric>

#include "seadag/error.hpp"

namespace seadag
{

namespace
{

/* children of node id, as (child, negated) pairs; empty for inputs */
std::vector<std::pair<int, bool>> children_of( const Aig& a, int id )
{
  int const in_total = a.num_inputs_total();
  if ( id < in_total )
  {
    return {};
  }
  if ( id < in_total + a.n_and() )
  {
    const AndGate& g = a.and_gates[id - in_total];
    return { { g.child_a, g.neg_a }, { g.child_b, g.neg_b } };
  }
  const OutputWire& w = a.outputs[id - in_total - a.n_and()];
  return { { w.child, w.neg } };
}

void check_child( const Aig& a, int id, int child )
{
  if ( child < 0 || child >= a.num_nodes() )
  {
    throw ShapeError( "aig: dangling child id " + std::to_string( child ) + " at node " +
                      std::to_string( id ) );
  }
  if ( a.is_output_id( child ) )
  {
    throw ShapeError( "aig: node " + std::to_string( id ) + " uses output node " +
                      std::to_string( child ) + " as a child" );
  }
}

/* topological order over gate nodes (Kahn from the inputs up) */
std::vector<int> topo_order( const Aig& a )
{
  int const n = a.num_nodes();
  std::vector<int> remaining( n, 0 );
  std::vector<std::vector<int>> parents( n );
  for ( int id = 0; id < n; ++id )
  {
    for ( auto [c, neg] : children_of( a, id ) )
    {
      (void)neg;
      check_child( a, id, c );
      ++remaining[id];
      parents[c].push_back( id );
    }
  }
  std::vector<int> order;
  order.reserve( n );
  for ( int id = 0; id < n; ++id )
  {
    if ( remaining[id] == 0 )
    {
      order.push_back( id );
    }
  }
  for ( size_t qi = 0; qi < order.size(); ++qi )
  {
    for ( int p : parents[order[qi]] )
    {
      if ( --remaining[p] == 0 )
      {
        order.push_back( p );
      }
    }
  }
  if ( static_cast<int>( order.size() ) != n )
  {
    throw ShapeError( "aig: cyclic wiring" );
  }
  return order;
}

} // namespace

std::vector<int> Aig::levels() const
{
  int const n = num_nodes();
  std::vector<int> lv( n, 0 );
  for ( int id : topo_order( *this ) )
  {
    for ( auto [c, neg] : children_of( *this, id ) )
    {
      (void)neg;
      lv[id] = std::max( lv[id], lv[c] + 1 );
    }
  }
  return lv;
}

Dag Aig::to_dag() const
{
  int const n = num_nodes();
  std::vector<int> node_cats( n, kNodeAnd );
  for ( int i = 0; i < num_inputs_total(); ++i )
  {
    node_cats[i] = kNodeInput;
  }
  for ( int k = 0; k < n_out; ++k )
  {
    node_cats[output_id( k )] = kNodeOutput;
  }
  std::vector<int> edge_cats( static_cast<size_t>( n ) * n, kEdgeAbsent );
  auto set_edge = [&]( int child, int parent, bool neg ) {
    edge_cats[static_cast<size_t>( child ) * n + parent] = neg ? kEdgeNegated : kEdgeNormal;
  };
  for ( int k = 0; k < n_and(); ++k )
  {
    const AndGate& g = and_gates[k];
    set_edge( g.child_a, and_id( k ), g.neg_a );
    set_edge( g.child_b, and_id( k ), g.neg_b );
  }
  for ( int k = 0; k < n_out; ++k )
  {
    set_edge( outputs[k].child, output_id( k ), outputs[k].neg );
  }
  std::vector<int> lv = levels();
  return Dag::from_categories( kNodeTypes, kEdgeTypes, node_cats, edge_cats, &lv );
}

TruthTable simulate( const Aig& aig )
{
  if ( aig.n_in < 0 || aig.n_in > 20 )
  {
    throw ShapeError( "simulate: unsupported input count " + std::to_string( aig.n_in ) );
  }
  int const rows = 1 << aig.n_in;
  int const words = ( rows + 63 ) / 64;
  uint64_t const tail_mask =
      ( rows % 64 == 0 ) ? ~0ULL : ( ( 1ULL << ( rows % 64 ) ) - 1ULL );

  int const n = aig.num_nodes();
  std::vector<std::vector<uint64_t>> sig( n, std::vector<uint64_t>( words, 0 ) );

  /* input i: bit pattern over rows r = ((r >> i) & 1) */
  for ( int i = 0; i < aig.n_in; ++i )
  {
    for ( int w = 0; w < words; ++w )
    {
      uint64_t word = 0;
      for ( int b = 0; b < 64; ++b )
      {
        int const r = w * 64 + b;
        if ( r < rows && input_bit( i, r ) )
        {
          word |= 1ULL << b;
        }
      }
      sig[i][w] = word;
    }
  }
  /* constant-zero input (if present) stays all zero */

  for ( int id : topo_order( aig ) )
  {
    auto ch = children_of( aig, id );
    if ( ch.empty() )
    {
      continue;
    }
    auto fetch = [&]( std::pair<int, bool> c, int w ) {
      uint64_t v = sig[c.first][w];
      return c.second ? ~v : v;
    };
    if ( ch.size() == 2 )
    {
      for ( int w = 0; w < words; ++w )
      {
        sig[id][w] = fetch( ch[0], w ) & fetch( ch[1], w );
      }
    }
    else
    {
      for ( int w = 0; w < words; ++w )
      {
        sig[id][w] = fetch( ch[0], w );
      }
    }
    sig[id][words - 1] &= tail_mask;
  }

  TruthTable tt;
  tt.n_in = aig.n_in;
  tt.outputs.resize( aig.n_out );
  for ( int k = 0; k < aig.n_out; ++k )
  {
    auto& col = tt.outputs[k];
    col.resize( rows );
    const auto& s = sig[aig.output_id( k )];
    for ( int r = 0; r < rows; ++r )
    {
      col[r] = static_cast<uint8_t>( ( s[r / 64] >> ( r % 64 ) ) & 1 );
    }
  }
  return tt;
}

ValidityCount aig_validity_counts( const Dag& g )
{
  int const n = g.n();
  ValidityCount c;
  for ( int j = 0; j < n; ++j )
  {
    int const cat = g.node_cat( j );
    if ( cat != kNodeAnd && cat != kNodeOutput )
    {
      continue;
    }
    int indeg = 0;
    for ( int i = 0; i < n; ++i )
    {
      if ( i != j && g.edge_cat( i, j ) != kEdgeAbsent )
      {
        ++indeg;
      }
    }
    ++c.gates;
    if ( indeg == ( cat == kNodeAnd ? 2 : 1 ) )
    {
      ++c.valid;
    }
  }
  return c;
}

double aig_validity( const Dag& g )
{
  ValidityCount const c = aig_validity_counts( g );
  if ( c.gates == 0 )
  {
    return 1.0;
  }
  return static_cast<double>( c.valid ) / static_cast<double>( c.gates );
}

Aig parse_dag_to_aig( const Dag& g, Rng& rng )
{
  int const n = g.n();
  std::vector<int> input_ids, and_ids, output_ids;
  for ( int i = 0; i < n; ++i )
  {
    switch ( g.node_cat( i ) )
    {
    case kNodeInput:
      input_ids.push_back( i );
      break;
    case kNodeAnd:
      and_ids.push_back( i );
      break;
    default:
      output_ids.push_back( i );
      break;
    }
  }

  /* process AND gates from the bottom level up so level filtering is enough
   * to keep the result acyclic; order ties by original id */
  std::vector<int> and_sorted = and_ids;
  std::stable_sort( and_sorted.begin(), and_sorted.end(),
                    [&]( int a, int b ) { return g.level( a ) < g.level( b ); } );

  Aig out;
  out.n_in = static_cast<int>( input_ids.size() );
  out.n_out = static_cast<int>( output_ids.size() );

  /* map from graph node id to (provisional) aig node id; inputs keep their
   * roster order, AND ids are assigned in emission order after an optional
   * constant-zero slot whose need is only known at the end, so we assign ids
   * assuming it is present and compact afterwards if unused.
   *
   * A gate with missing children is stuck at 0 (the constant-zero node
   * supplies the missing slot, and 0 AND anything = 0).  The raw Dag form
   * holds at most one edge per ordered pair, so the stuck gate must not read
   * the constant twice; the second slot reads any other preceding node
   * instead, which leaves the value unchanged.  Gates that cannot even do
   * that fold away entirely: references to them are redirected to the
   * constant-zero node, with `flip` carrying a constant-one fold's negation. */
  std::vector<int> to_aig( n, -1 );
  std::vector<char> flip( n, 0 );
  for ( size_t i = 0; i < input_ids.size(); ++i )
  {
    to_aig[input_ids[i]] = static_cast<int>( i );
  }
  int const cz = out.n_in; /* provisional constant-zero id */

  bool used_cz = false;
  auto candidates = [&]( int j ) {
    std::vector<int> cand;
    for ( int i = 0; i < n; ++i )
    {
      if ( i != j && g.edge_cat( i, j ) != kEdgeAbsent && g.level( i ) < g.level( j ) &&
           g.node_cat( i ) != kNodeOutput )
      {
        cand.push_back( i );
      }
    }
    return cand;
  };
  auto mapped_neg = [&]( int c, int j ) {
    return ( g.edge_cat( c, j ) == kEdgeNegated ) != ( flip[c] != 0 );
  };

  int next_gate = cz + 1;
  for ( int gid : and_sorted )
  {
    auto cand = candidates( gid );
    int a = cz;
    int b = cz;
    bool na = false;
    bool nb = false;
    if ( cand.size() >= 2 )
    {
      auto pick = rng.sample_without_replacement( static_cast<int>( cand.size() ), 2 );
      int const ga = cand[pick[0]];
      int const gb = cand[pick[1]];
      a = to_aig[ga];
      na = mapped_neg( ga, gid );
      b = to_aig[gb];
      nb = mapped_neg( gb, gid );
    }
    else if ( cand.size() == 1 )
    {
      a = to_aig[cand[0]];
      na = mapped_neg( cand[0], gid );
    }
    else
    {
      /* no children at all: read the constant plus any preceding node */
      b = out.n_in > 0 ? 0 : ( next_gate > cz + 1 ? cz + 1 : -1 );
    }

    if ( a == b )
    {
      if ( a == cz )
      {
        /* both slots constant: the gate is itself a constant signal */
        to_aig[gid] = cz;
        flip[gid] = na && nb ? 1 : 0;
        continue;
      }
      if ( na == nb )
      {
        b = cz; /* x AND 1 = x */
        nb = true;
      }
      else
      {
        a = cz; /* x AND not-x = 0 */
        na = false;
        nb = false;
      }
    }
    if ( b == -1 )
    {
      /* inputless graph with nothing emitted yet: fold to constant zero */
      to_aig[gid] = cz;
      flip[gid] = 0;
      continue;
    }

    AndGate gate;
    gate.child_a = a;
    gate.neg_a = na;
    gate.child_b = b;
    gate.neg_b = nb;
    used_cz = used_cz || a == cz || b == cz;
    out.and_gates.push_back( gate );
    to_aig[gid] = next_gate++;
  }

  for ( int oid : output_ids )
  {
    auto cand = candidates( oid );
    OutputWire w;
    if ( !cand.empty() )
    {
      int const c = cand[rng.uniform_int( static_cast<int>( cand.size() ) )];
      w.child = to_aig[c];
      w.neg = mapped_neg( c, oid );
    }
    else
    {
      w.child = cz;
    }
    used_cz = used_cz || w.child == cz;
    out.outputs.push_back( w );
  }

  out.has_const_zero = used_cz;

  /* drop AND gates outside every output cone */
  {
    int const in_total = out.n_in + 1; /* provisional ids include the cz slot */
    int const n_and = out.n_and();
    std::vector<char> live( n_and, 0 );
    std::vector<int> stack;
    auto visit = [&]( int id ) {
      if ( id >= in_total && id < in_total + n_and && !live[id - in_total] )
      {
        live[id - in_total] = 1;
        stack.push_back( id - in_total );
      }
    };
    for ( const auto& w : out.outputs )
    {
      visit( w.child );
    }
    while ( !stack.empty() )
    {
      int const k = stack.back();
      stack.pop_back();
      visit( out.and_gates[k].child_a );
      visit( out.and_gates[k].child_b );
    }

    std::vector<int> new_id( in_total + n_and, -1 );
    for ( int i = 0; i < out.n_in; ++i )
    {
      new_id[i] = i;
    }
    new_id[cz] = used_cz ? cz : -1;
    int next = out.n_in + ( used_cz ? 1 : 0 );
    std::vector<AndGate> kept;
    for ( int k = 0; k < n_and; ++k )
    {
      if ( live[k] )
      {
        new_id[in_total + k] = next++;
        kept.push_back( out.and_gates[k] );
      }
    }
    for ( auto& gate : kept )
    {
      gate.child_a = new_id[gate.child_a];
      gate.child_b = new_id[gate.child_b];
    }
    for ( auto& w : out.outputs )
    {
      w.child = new_id[w.child];
    }
    out.and_gates = std::move( kept );
  }

  return out;
}

std::pair<Aig, TruthTable> random_aig( int n_in, int n_out, int max_gates, Rng& rng )
{
  if ( n_in < 1 || n_out < 1 )
  {
    throw ShapeError( "random_aig: need at least one input and one output" );
  }
  if ( max_gates < n_in + n_out )
  {
    throw ShapeError( "random_aig: max_gates below n_in + n_out" );
  }

  /* grow to the full budget; the size spread comes from cone trimming */
  int const n_and = max_gates - n_in - n_out;

  Aig a;
  a.n_in = n_in;
  a.n_out = n_out;
  for ( int k = 0; k < n_and; ++k )
  {
    int const existing = n_in + a.n_and();
    if ( existing < 2 )
    {
      /* only reachable for n_in == 1: an AND needs two distinct children */
      break;
    }
    AndGate g;
    /* usually chain one child to the newest node; pure uniform attachment
     * leaves nearly every gate outside the output cones and the surviving
     * graphs far smaller than the intended size spread */
    if ( existing > 2 && rng.bernoulli( 0.75 ) )
    {
      g.child_a = existing - 1;
      g.child_b = rng.uniform_int( existing - 1 );
    }
    else
    {
      auto pick = rng.sample_without_replacement( existing, 2 );
      g.child_a = pick[0];
      g.child_b = pick[1];
    }
    g.neg_a = rng.bernoulli( 0.5 );
    g.neg_b = rng.bernoulli( 0.5 );
    a.and_gates.push_back( g );
  }
  int const n_and_built = a.n_and();
  for ( int k = 0; k < n_out; ++k )
  {
    OutputWire w;
    w.child = rng.uniform_int( n_in + n_and_built );
    w.neg = rng.bernoulli( 0.5 );
    a.outputs.push_back( w );
  }

  /* drop AND gates outside every output cone */
  {
    std::vector<char> live( n_and_built, 0 );
    std::vector<int> stack;
    auto visit = [&]( int id ) {
      if ( id >= n_in && !live[id - n_in] )
      {
        live[id - n_in] = 1;
        stack.push_back( id - n_in );
      }
    };
    for ( const auto& w : a.outputs )
    {
      visit( w.child );
    }
    while ( !stack.empty() )
    {
      int const k = stack.back();
      stack.pop_back();
      visit( a.and_gates[k].child_a );
      visit( a.and_gates[k].child_b );
    }
    std::vector<int> new_id( n_in + n_and_built, -1 );
    for ( int i = 0; i < n_in; ++i )
    {
      new_id[i] = i;
    }
    int next = n_in;
    std::vector<AndGate> kept;
    for ( int k = 0; k < n_and_built; ++k )
    {
      if ( live[k] )
      {
        new_id[n_in + k] = next++;
        kept.push_back( a.and_gates[k] );
      }
    }
    for ( auto& g : kept )
    {
      g.child_a = new_id[g.child_a];
      g.child_b = new_id[g.child_b];
    }
    for ( auto& w : a.outputs )
    {
      w.child = new_id[w.child];
    }
    a.and_gates = std::move( kept );
  }

  return { a, simulate( a ) };
}

} // namespace seadag
