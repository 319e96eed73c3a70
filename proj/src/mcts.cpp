/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/mcts.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <vector>

namespace seadag
{

EditAction sample_action( const Aig& state, Rng& rng )
{
  int const editable = state.n_and() + state.n_out;
  if ( editable < 1 )
  {
    throw ConfigError( "sample_action: no editable gates" );
  }
  std::vector<int> const levels = state.levels();
  int const pick = rng.uniform_int( editable );
  bool const is_and = pick < state.n_and();
  int const gate = is_and ? state.and_id( pick ) : state.output_id( pick - state.n_and() );

  std::vector<int> cands;
  int const non_output = state.num_inputs_total() + state.n_and();
  for ( int c = 0; c < non_output; ++c )
  {
    if ( c != gate && levels[c] < levels[gate] )
    {
      cands.push_back( c );
    }
  }
  if ( cands.empty() )
  {
    throw ConfigError( "sample_action: gate has no lower-level candidates" );
  }

  EditAction a;
  a.gate = gate;
  a.n_children = is_and ? 2 : 1;
  if ( is_and )
  {
    if ( cands.size() >= 2 )
    {
      std::vector<int> const pickers =
          rng.sample_without_replacement( static_cast<int>( cands.size() ), 2 );
      a.children[0] = cands[pickers[0]];
      a.children[1] = cands[pickers[1]];
    }
    else
    {
      a.children[0] = cands[0];
      a.children[1] = cands[0];
    }
    a.negated[0] = rng.bernoulli( 0.5 );
    a.negated[1] = rng.bernoulli( 0.5 );
  }
  else
  {
    a.children[0] = cands[rng.uniform_int( static_cast<int>( cands.size() ) )];
    a.negated[0] = rng.bernoulli( 0.5 );
  }
  return a;
}

Aig apply_action( const Aig& state, const EditAction& action )
{
  Aig next = state;
  int const base = next.num_inputs_total();
  if ( action.gate >= base + next.n_and() )
  {
    OutputWire& w = next.outputs[action.gate - base - next.n_and()];
    w.child = action.children[0];
    w.neg = action.negated[0];
  }
  else
  {
    AndGate& g = next.and_gates[action.gate - base];
    g.child_a = action.children[0];
    g.neg_a = action.negated[0];
    g.child_b = action.children[1];
    g.neg_b = action.negated[1];
  }

  /* restore the topological id order: ANDs sorted by level, stably */
  std::vector<int> const levels = next.levels();
  std::vector<int> order( next.n_and() );
  std::iota( order.begin(), order.end(), 0 );
  std::stable_sort( order.begin(), order.end(), [&]( int a, int b ) {
    return levels[next.and_id( a )] < levels[next.and_id( b )];
  } );
  std::vector<int> remap( next.num_nodes() );
  std::iota( remap.begin(), remap.end(), 0 );
  for ( int k = 0; k < next.n_and(); ++k )
  {
    remap[next.and_id( order[k] )] = next.and_id( k );
  }
  Aig sorted = next;
  for ( int k = 0; k < next.n_and(); ++k )
  {
    AndGate g = next.and_gates[order[k]];
    g.child_a = remap[g.child_a];
    g.child_b = remap[g.child_b];
    sorted.and_gates[k] = g;
  }
  for ( OutputWire& w : sorted.outputs )
  {
    w.child = remap[w.child];
  }
  return sorted;
}

double reward( const Aig& state, const TruthTable& cond )
{
  return function_accuracy( simulate( state ), cond );
}

namespace
{

struct Node
{
  Aig state;
  long n = 0;
  double total = 0.0;
  std::vector<std::unique_ptr<Node>> children;

  explicit Node( Aig s ) : state( std::move( s ) ) {}
};

void audit_tree( const Node& node, TreeAudit& audit )
{
  ++audit.node_count;
  long child_sum = 0;
  for ( const auto& c : node.children )
  {
    child_sum += c->n;
    audit_tree( *c, audit );
  }
  if ( node.n != 1 + child_sum )
  {
    audit.visit_counts_consistent = false;
  }
}

} // namespace

StepResult mcts_decision_step( const Aig& state, const TruthTable& cond,
                               const MctsConfig& cfg, Rng& rng, TreeAudit* audit )
{
  Node root( state );
  StepResult result;
  result.best_state = state;
  result.best_reward = -1.0;

  std::vector<Node*> path;
  for ( int sim = 0; sim < cfg.simulations; ++sim )
  {
    path.clear();
    Node* node = &root;
    path.push_back( node );
    while ( node->n > 0 )
    {
      size_t const allowed = static_cast<size_t>( std::ceil(
          cfg.pw_c * std::pow( static_cast<double>( node->n ), cfg.pw_alpha ) ) );
      if ( node->children.size() < allowed )
      {
        node->children.push_back( std::make_unique<Node>(
            apply_action( node->state, sample_action( node->state, rng ) ) ) );
        node = node->children.back().get();
        path.push_back( node );
        break;
      }
      Node* best = nullptr;
      double best_u = -1e300;
      for ( const auto& c : node->children )
      {
        double const u = c->total / static_cast<double>( c->n ) +
                         cfg.ucb_c * std::sqrt( std::log( static_cast<double>( node->n ) ) /
                                                static_cast<double>( c->n ) );
        if ( u > best_u )
        {
          best_u = u;
          best = c.get();
        }
      }
      node = best;
      path.push_back( node );
    }

    Aig terminal = node->state;
    for ( int d = 0; d < cfg.rollout_depth; ++d )
    {
      terminal = apply_action( terminal, sample_action( terminal, rng ) );
    }
    double const r = reward( terminal, cond );
    if ( r > result.best_reward )
    {
      result.best_reward = r;
      result.best_state = std::move( terminal );
    }
    for ( Node* p : path )
    {
      p->n += 1;
      p->total += r;
    }
  }

  if ( audit != nullptr )
  {
    *audit = TreeAudit{};
    audit_tree( root, *audit );
  }

  Node* advance = nullptr;
  for ( const auto& c : root.children )
  {
    if ( advance == nullptr || c->n > advance->n )
    {
      advance = c.get();
    }
  }
  result.next_state = advance != nullptr ? advance->state : state;
  return result;
}

Aig mcts_refine( const Aig& start, const TruthTable& cond, const MctsConfig& cfg,
                 Rng& rng, double* reward_before, double* reward_after )
{
  double const r_start = reward( start, cond );
  if ( reward_before != nullptr )
  {
    *reward_before = r_start;
  }
  Aig best = start;
  double best_r = r_start;
  Aig state = start;
  for ( int step = 0; step < cfg.steps; ++step )
  {
    StepResult sr = mcts_decision_step( state, cond, cfg, rng );
    if ( sr.best_reward > best_r )
    {
      best_r = sr.best_reward;
      best = sr.best_state;
    }
    state = std::move( sr.next_state );
    double const r_chain = reward( state, cond );
    if ( r_chain > best_r )
    {
      best_r = r_chain;
      best = state;
    }
  }
  if ( reward_after != nullptr )
  {
    *reward_after = best_r;
  }
  return best;
}

} // namespace seadag
