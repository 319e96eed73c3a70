/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seadag
{

/*! \brief Output columns of a boolean function over n_in inputs.
 *
 * Row r assigns input i the value bit i of r (least significant bit first),
 * so row 0 is all-zero inputs and row 2^n_in - 1 is all-one inputs.  Each
 * output column stores one bit per row.
 */
struct TruthTable
{
  int n_in = 0;
  std::vector<std::vector<uint8_t>> outputs;

  int n_out() const { return static_cast<int>( outputs.size() ); }
  int rows() const { return 1 << n_in; }
};

inline uint8_t input_bit( int input_index, int row )
{
  return static_cast<uint8_t>( ( row >> input_index ) & 1 );
}

/*! \brief Hex encoding of a bit column: bits are packed into nibbles with the
 * first row as the most significant bit, digits emitted most significant
 * group first.  A trailing partial nibble (only possible for fewer than 4
 * rows) is zero-padded at the low end.
 */
std::string column_to_hex( const std::vector<uint8_t>& bits );

/*! \brief Inverse of column_to_hex for a column of 2^n_in rows.  Rejects
 * strings of the wrong length and nonzero padding bits. */
std::vector<uint8_t> column_from_hex( const std::string& hex, int n_in );

/*! \brief Element-wise agreement between two tables of identical shape, in
 * [0, 1].  Throws ShapeError on shape mismatch. */
double function_accuracy( const TruthTable& predicted, const TruthTable& condition );

} // namespace seadag
