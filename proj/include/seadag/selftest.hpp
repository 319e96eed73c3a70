/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <string>
#include <vector>

namespace seadag
{

struct SelftestResult
{
  std::string suite;
  bool passed = false;
  std::string detail;
};

/*! \brief Fast built-in consistency checks (schedule laws, reverse-kernel
 * sanity, parser totality, simulator agreement, a gradient spot check).
 * `filter` restricts to suites whose name contains it; empty runs all. */
std::vector<SelftestResult> run_selftests( const std::string& filter = "" );

} // namespace seadag
