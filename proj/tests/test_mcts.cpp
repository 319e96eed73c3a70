/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seadag/mcts.hpp"

using namespace seadag;

namespace
{

MctsConfig small_budget()
{
  MctsConfig cfg;
  cfg.simulations = 60;
  cfg.steps = 8;
  return cfg;
}

/* one random legal edit away from a perfect circuit */
std::pair<Aig, TruthTable> perturbed_case( uint64_t seed )
{
  Rng rng( seed );
  for ( ;; )
  {
    auto [aig, tt] = random_aig( 3, 1, 10, rng );
    if ( aig.n_and() < 1 )
    {
      continue;
    }
    EditAction const act = sample_action( aig, rng );
    Aig const hurt = apply_action( aig, act );
    if ( reward( hurt, tt ) < 1.0 )
    {
      return { hurt, tt };
    }
  }
}

} // namespace

TEST_CASE( "actions: children always sit strictly below the edited gate" )
{
  Rng rng( 3 );
  for ( int trial = 0; trial < 200; ++trial )
  {
    auto [aig, tt] = random_aig( 3, 2, 12, rng );
    EditAction const act = sample_action( aig, rng );
    auto const lv = aig.levels();
    bool const is_and = !aig.is_output_id( act.gate );
    CHECK( act.n_children == ( is_and ? 2 : 1 ) );
    for ( int c = 0; c < act.n_children; ++c )
    {
      CHECK( act.children[c] < aig.num_inputs_total() + aig.n_and() );
      CHECK( lv[act.children[c]] < lv[act.gate] );
    }
  }
}

TEST_CASE( "actions: inputs-only circuit still offers output rewires" )
{
  Aig a;
  a.n_in = 2;
  a.n_out = 1;
  a.outputs.push_back( { 0, false } );
  Rng rng( 5 );
  EditAction const act = sample_action( a, rng );
  CHECK( act.gate == a.output_id( 0 ) );
  CHECK( act.n_children == 1 );
  CHECK( act.children[0] < 2 );
}

TEST_CASE( "apply: keeps id-order topology and acyclicity" )
{
  Rng rng( 7 );
  for ( int trial = 0; trial < 300; ++trial )
  {
    auto [aig, tt] = random_aig( 3, 1, 10, rng );
    Aig state = aig;
    for ( int edit = 0; edit < 5; ++edit )
    {
      EditAction const act = sample_action( state, rng );
      state = apply_action( state, act );
      /* canonical form: AND ids ascend with level */
      auto const lv = state.levels();
      for ( int k = 0; k + 1 < state.n_and(); ++k )
      {
        CHECK( lv[state.and_id( k )] <= lv[state.and_id( k + 1 )] );
      }
      for ( int k = 0; k < state.n_and(); ++k )
      {
        const AndGate& g = state.and_gates[k];
        CHECK( lv[g.child_a] < lv[state.and_id( k )] );
        CHECK( lv[g.child_b] < lv[state.and_id( k )] );
      }
      CHECK_NOTHROW( simulate( state ) ); /* acyclic by construction */
    }
  }
}

TEST_CASE( "reward: exact-match accuracy in [0, 1]" )
{
  Rng rng( 11 );
  auto [aig, tt] = random_aig( 3, 1, 10, rng );
  CHECK( reward( aig, tt ) == doctest::Approx( 1.0 ) );
  TruthTable flipped = tt;
  for ( auto& bit : flipped.outputs[0] )
  {
    bit ^= 1;
  }
  CHECK( reward( aig, flipped ) == doctest::Approx( 0.0 ) );
}

TEST_CASE( "tree: visit counts stay consistent" )
{
  auto [start, tt] = perturbed_case( 13 );
  Rng rng( 17 );
  TreeAudit audit;
  StepResult const step = mcts_decision_step( start, tt, small_budget(), rng, &audit );
  CHECK( audit.node_count > 1 );
  CHECK( audit.visit_counts_consistent );
  CHECK( step.best_reward >= 0.0 );
  CHECK( step.best_reward <= 1.0 );
}

TEST_CASE( "refine: never returns something worse than the start" )
{
  MctsConfig const cfg = small_budget();
  for ( uint64_t seed = 0; seed < 10; ++seed )
  {
    auto [start, tt] = perturbed_case( 100 + seed );
    Rng rng( 200 + seed );
    double before = 0.0, after = 0.0;
    Aig const refined = mcts_refine( start, tt, cfg, rng, &before, &after );
    CHECK( before == doctest::Approx( reward( start, tt ) ) );
    CHECK( after >= before );
    CHECK( after == doctest::Approx( reward( refined, tt ) ) );
  }
}

TEST_CASE( "refine: a perfect start comes back untouched" )
{
  Rng rng( 23 );
  auto [aig, tt] = random_aig( 3, 1, 10, rng );
  REQUIRE( reward( aig, tt ) == doctest::Approx( 1.0 ) );
  double before = 0.0, after = 0.0;
  Aig const refined = mcts_refine( aig, tt, small_budget(), rng, &before, &after );
  CHECK( before == doctest::Approx( 1.0 ) );
  CHECK( after == doctest::Approx( 1.0 ) );
  CHECK( refined.n_and() == aig.n_and() );
}

TEST_CASE( "refine: recovers most single-edit perturbations" )
{
  MctsConfig cfg;
  cfg.simulations = 150;
  cfg.steps = 15;
  int improved = 0, total = 0;
  double gain = 0.0;
  for ( uint64_t seed = 0; seed < 12; ++seed )
  {
    auto [start, tt] = perturbed_case( 300 + seed );
    Rng rng( 400 + seed );
    double before = 0.0, after = 0.0;
    mcts_refine( start, tt, cfg, rng, &before, &after );
    CHECK( after >= before );
    gain += after - before;
    improved += after > before ? 1 : 0;
    ++total;
  }
  CHECK( improved >= total / 2 );
  CHECK( gain / total > 0.0 );
}
