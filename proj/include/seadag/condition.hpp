/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <vector>

#include "seadag/tensor.hpp"
#include "seadag/truth_table.hpp"

namespace seadag
{

/*! \brief Functional role of a node in the condition encoding: inputs and
 * outputs are tied to truth-table columns by their slot index. */
struct NodeRole
{
  int kind = 0;  /* kNodeInput / kNodeAnd / kNodeOutput */
  int index = 0; /* slot among nodes of this kind; unused for AND */
};

/*! \brief Roles for the canonical id layout: inputs first, outputs last. */
std::vector<NodeRole> canonical_roles( int n, int n_in, int n_out );

inline constexpr int kConditionDim = 32;

/*! \brief Per-node condition features (n x 32).
 *
 * Input node i carries its enumeration column, output node j its target
 * column, AND nodes all zeros.  Columns are resampled to a fixed 256 rows
 * (cyclic repetition below 8 inputs, strided subsampling above) and packed
 * 8 rows per entry, earliest row most significant, scaled by 1/256.  The
 * encoding is deterministic and equivariant under node relabeling when fed
 * the relabeled roles.
 */
Tensor encode_condition( const TruthTable& tt, const std::vector<NodeRole>& roles );

} // namespace seadag
