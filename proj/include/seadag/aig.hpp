/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <utility>
#include <vector>

#include "seadag/dag.hpp"
#include "seadag/rng.hpp"
#include "seadag/truth_table.hpp"

namespace seadag
{

/* categorical alphabets used throughout the AIG task */
inline constexpr int kNodeInput = 0;
inline constexpr int kNodeAnd = 1;
inline constexpr int kNodeOutput = 2;
inline constexpr int kNodeTypes = 3;

inline constexpr int kEdgeAbsent = 0;
inline constexpr int kEdgeNormal = 1;
inline constexpr int kEdgeNegated = 2;
inline constexpr int kEdgeTypes = 3;

struct AndGate
{
  int child_a = 0;
  bool neg_a = false;
  int child_b = 0;
  bool neg_b = false;
};

struct OutputWire
{
  int child = 0;
  bool neg = false;
};

/*! \brief Structural and-inverter graph.
 *
 * Node ids are laid out as: primary inputs [0, n_in), then (if present) one
 * constant-zero input at id n_in, then AND gates, then outputs.  AND gates
 * reference strictly earlier-leveled nodes; outputs reference one non-output
 * node.  The id order of AND gates is topological at construction time; edit
 * operations may break id-order topology but must preserve acyclicity
 * (simulation orders gates internally).
 */
struct Aig
{
  int n_in = 0;
  int n_out = 0;
  bool has_const_zero = false;
  std::vector<AndGate> and_gates;
  std::vector<OutputWire> outputs;

  int n_and() const { return static_cast<int>( and_gates.size() ); }
  int num_inputs_total() const { return n_in + ( has_const_zero ? 1 : 0 ); }
  int const_zero_id() const { return n_in; }
  int and_id( int k ) const { return num_inputs_total() + k; }
  int output_id( int k ) const { return num_inputs_total() + n_and() + k; }
  int num_nodes() const { return num_inputs_total() + n_and() + n_out; }
  bool is_output_id( int id ) const { return id >= num_inputs_total() + n_and(); }

  /*! Longest-path levels recomputed from the current wiring. */
  std::vector<int> levels() const;

  /*! Categorical graph form (the constant-zero node, if present, appears as
   * one more input-typed node). */
  Dag to_dag() const;
};

/*! \brief Exact simulation over all 2^n_in input rows.  Throws ShapeError on
 * dangling child ids, references to output nodes, or cyclic wiring. */
TruthTable simulate( const Aig& aig );

/*! \brief Fraction of AND / output gates in a categorical graph whose
 * incoming edge count is exactly 2 / exactly 1.  Counts raw in-edges, with no
 * level filtering; a graph without any such gates scores 1 (vacuous). */
struct ValidityCount
{
  long valid = 0;
  long gates = 0;
};

/*! \brief Raw wiring counts behind aig_validity, for pooled aggregation. */
ValidityCount aig_validity_counts( const Dag& g );

double aig_validity( const Dag& g );

/*! \brief Total repair-style decoding of an arbitrary categorical graph into
 * a well-formed Aig.
 *
 * Node types and level labels are taken from the graph.  Each AND draws two
 * children without replacement from its existing lower-level non-output
 * in-edges (edge category 2 means negation), each output draws one; missing
 * children are filled with a shared constant-zero input.  AND gates outside
 * every output cone are dropped.
 */
Aig parse_dag_to_aig( const Dag& g, Rng& rng );

/*! \brief Random AIG generator used for dataset synthesis.
 *
 * Grows AND gates one at a time, each wired to two distinct existing
 * non-output nodes with coin-flip polarities; outputs wire to random
 * non-output nodes.  AND gates outside every output cone are dropped, so the
 * total node count is at most max_gates.  Returns the structure together
 * with its exact simulated truth table.
 */
std::pair<Aig, TruthTable> random_aig( int n_in, int n_out, int max_gates, Rng& rng );

} // namespace seadag
