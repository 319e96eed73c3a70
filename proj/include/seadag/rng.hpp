/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <cstdint>
#include <vector>

namespace seadag
{

/*! \brief Derives an independent stream seed from a base seed and an index.
 *
 * Used so that per-record / per-case work is reproducible regardless of
 * scheduling order.
 */
uint64_t split_seed( uint64_t base, uint64_t index );

/*! \brief Small deterministic random generator (splitmix64 core).
 *
 * All sampling transforms are implemented explicitly so that byte-identical
 * output under a fixed seed does not depend on the standard library's
 * distribution implementations.
 */
class Rng
{
public:
  explicit Rng( uint64_t seed ) : state_( seed ) {}

  uint64_t next_u64();

  /* uniform in [0,1) */
  double uniform();

  /* uniform in (0,1); never returns 0 */
  double uniform_pos();

  /* standard normal, Box-Muller */
  double normal();

  /* standard Gumbel: -log(-log(u)) */
  double gumbel();

  /* uniform integer in [0, n) */
  int uniform_int( int n );

  bool bernoulli( double p );

  /* index sampled from an unnormalized nonnegative weight vector */
  int categorical( const double* w, int k );
  int categorical( const std::vector<double>& w );

  /* k distinct values from [0, n), in draw order */
  std::vector<int> sample_without_replacement( int n, int k );

private:
  uint64_t state_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

} // namespace seadag
