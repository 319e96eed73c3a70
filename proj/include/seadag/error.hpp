/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace seadag
{

/*! \brief Raised when a graph that must be acyclic contains a directed cycle.
 *
 * Carries one concrete offending cycle (node ids, in traversal order).
 */
struct CyclicGraphError : std::runtime_error
{
  std::vector<int> cycle;
  explicit CyclicGraphError( std::vector<int> c );
};

struct ShapeError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

} // namespace seadag
