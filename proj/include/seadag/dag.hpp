/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seadag/error.hpp"
#include "seadag/rng.hpp"

namespace seadag
{

/*! \brief Node relabeling i -> map[i]. */
struct Permutation
{
  std::vector<int> map;

  static Permutation identity( int n );
  Permutation inverse() const;
  /* composition: apply *this first, then `second` */
  Permutation then( const Permutation& second ) const;
  bool is_valid() const;
  int n() const { return static_cast<int>( map.size() ); }
};

Permutation random_permutation( int n, Rng& rng );

/*! \brief Directed graph with categorical node and edge attributes.
 *
 * Nodes carry a one-hot type row (k_x categories); every ordered pair (i, j)
 * carries a one-hot edge row (k_e categories, category 0 = no edge).  An
 * existing edge (i, j) points from child i to parent j: row i of the edge
 * tensor lists where node i feeds into, column j lists what feeds node j.
 * Each node also stores a level label; for clean graphs these are the
 * longest-path levels (leaves at 0), for corrupted graphs they stay frozen at
 * the clean graph's labels.
 *
 * Treat instances as immutable values: building blocks below return new
 * graphs instead of mutating.
 */
class Dag
{
public:
  Dag() = default;

  /*! Builds from category indices; levels are computed from the edges (the
   * graph must be acyclic) unless explicitly provided. */
  static Dag from_categories( int k_x, int k_e,
                              const std::vector<int>& node_cats,
                              const std::vector<int>& edge_cats,
                              const std::vector<int>* levels = nullptr );

  /*! Builds from raw one-hot storage without validating one-hotness; used by
   * tests and by loaders that validate separately via check_onehot. */
  static Dag from_raw( int n, int k_x, int k_e,
                       std::vector<uint8_t> node_onehot,
                       std::vector<uint8_t> edge_onehot,
                       std::vector<int> levels );

  int n() const { return n_; }
  int k_x() const { return k_x_; }
  int k_e() const { return k_e_; }

  /* argmax of the stored rows; first maximum wins on malformed rows */
  int node_cat( int i ) const;
  int edge_cat( int i, int j ) const;

  const std::vector<uint8_t>& node_onehot() const { return node_onehot_; }
  const std::vector<uint8_t>& edge_onehot() const { return edge_onehot_; }
  const std::vector<int>& levels() const { return levels_; }
  int level( int i ) const { return levels_[i]; }
  int max_level() const { return max_level_; }

  std::vector<int> node_cats() const;
  std::vector<int> edge_cats() const;

private:
  int n_ = 0;
  int k_x_ = 0;
  int k_e_ = 0;
  std::vector<uint8_t> node_onehot_; /* n * k_x */
  std::vector<uint8_t> edge_onehot_; /* n * n * k_e */
  std::vector<int> levels_;
  int max_level_ = 0;
};

/*! \brief Longest-path levels: leaves (no children) at 0, otherwise
 * 1 + max over children.  `edge_cats` is the flattened n*n category matrix
 * (entry i*n+j is the category of pair (i, j); nonzero means i feeds j).
 *
 * Throws CyclicGraphError carrying a concrete cycle when no topological
 * elimination order exists.
 */
std::vector<int> node_levels( const std::vector<int>& edge_cats, int n );
std::vector<int> node_levels( const Dag& g );

/*! \brief Applies a node relabeling to types, edges and level labels. */
Dag permute( const Dag& g, const Permutation& p );

struct OnehotViolation
{
  bool is_edge = false;
  int i = 0;
  int j = 0; /* meaningful only for edges */
};

/*! \brief Lists every node row / edge entry that is not exactly one-hot. */
std::vector<OnehotViolation> check_onehot( const Dag& g );

/*! \brief True iff every existing edge goes from a strictly lower level to a
 * higher one (the clean-graph property). */
bool edges_respect_levels( const Dag& g );

/*! \brief GraphViz export.  `type_labels` names the node categories; edge
 * category 2 renders dashed (negation in the AIG reading). */
std::string to_dot( const Dag& g, const std::vector<std::string>& type_labels );

} // namespace seadag
