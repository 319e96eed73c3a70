/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "seadag/aig.hpp"

namespace seadag
{

namespace
{

/* sample from row `cat` of the cumulative transition at local step tau:
 * keep the category with probability alpha_bar, otherwise draw from m */
int corrupt_element( int cat, int tau, const NoiseModel& nm, const std::vector<double>& m,
                     Rng& rng )
{
  double const ab = nm.alpha_bar( tau );
  if ( rng.uniform() < ab )
  {
    return cat;
  }
  return rng.categorical( m );
}

} // namespace

Dag corrupt( const Dag& clean, int t, const NoiseModel& nm, Rng& rng,
             bool freeze_node_types )
{
  if ( t < 0 || t > nm.T() )
  {
    throw ConfigError( "corrupt: t out of range" );
  }
  int const n = clean.n();
  int const ml = clean.max_level();
  std::vector<int> node_cats = clean.node_cats();
  std::vector<int> edge_cats = clean.edge_cats();

  if ( !freeze_node_types )
  {
    for ( int i = 0; i < n; ++i )
    {
      int const tau = local_timestep( t, normalized_level( clean.level( i ), ml ), nm );
      node_cats[i] = corrupt_element( node_cats[i], tau, nm, nm.m_x(), rng );
    }
  }
  for ( int j = 0; j < n; ++j )
  {
    /* the pair (i, j) follows the parent j's local clock */
    int const tau = local_timestep( t, normalized_level( clean.level( j ), ml ), nm );
    for ( int i = 0; i < n; ++i )
    {
      if ( i == j )
      {
        continue;
      }
      size_t const idx = static_cast<size_t>( i ) * n + j;
      edge_cats[idx] = corrupt_element( edge_cats[idx], tau, nm, nm.m_e(), rng );
    }
  }
  std::vector<int> levels = clean.levels();
  return Dag::from_categories( clean.k_x(), clean.k_e(), node_cats, edge_cats, &levels );
}

std::vector<double> posterior_step( const std::vector<double>& pred_dist, int current_cat,
                                    int tau_t, int tau_prev, const NoiseModel& nm,
                                    Alphabet a )
{
  const std::vector<double>& m = nm.m( a );
  int const k = static_cast<int>( m.size() );
  if ( static_cast<int>( pred_dist.size() ) != k )
  {
    throw ShapeError( "posterior_step: prediction size mismatch" );
  }
  if ( current_cat < 0 || current_cat >= k )
  {
    throw ShapeError( "posterior_step: current category out of range" );
  }
  if ( tau_prev > tau_t || tau_prev < 0 || tau_t > nm.T() )
  {
    throw ConfigError( "posterior_step: need 0 <= tau_prev <= tau_t <= T" );
  }

  std::vector<double> out( k, 0.0 );
  if ( tau_prev == tau_t )
  {
    out[current_cat] = 1.0;
    return out;
  }

  double const ab_t = nm.alpha_bar( tau_t );
  double const ab_p = nm.alpha_bar( tau_prev );
  double const ab_step = ab_t / ab_p; /* multi-step retention tau_prev -> tau_t */
  int const s = current_cat;

  for ( int cls = 0; cls < k; ++cls )
  {
    double const w = pred_dist[cls];
    if ( w == 0.0 )
    {
      continue;
    }
    /* q(x_{tau_t} = s | x = cls) */
    double const denom = ( 1.0 - ab_t ) * m[s] + ( cls == s ? ab_t : 0.0 );
    if ( denom <= 0.0 )
    {
      throw NumericalError( "posterior_step: zero-probability conditioning state" );
    }
    for ( int r = 0; r < k; ++r )
    {
      /* q(x_{tau_t} = s | x_{tau_prev} = r) * q(x_{tau_prev} = r | x = cls) */
      double const step = ( 1.0 - ab_step ) * m[s] + ( r == s ? ab_step : 0.0 );
      double const prior = ( 1.0 - ab_p ) * m[r] + ( cls == r ? ab_p : 0.0 );
      out[r] += w * step * prior / denom;
    }
  }

  double sum = 0.0;
  for ( double x : out )
  {
    if ( x < 0.0 || !std::isfinite( x ) )
    {
      throw NumericalError( "posterior_step: invalid posterior entry" );
    }
    sum += x;
  }
  if ( std::abs( sum - 1.0 ) > 1e-9 )
  {
    throw NumericalError( "posterior_step: posterior mass deviates from 1 by " +
                          std::to_string( std::abs( sum - 1.0 ) ) );
  }
  for ( double& x : out )
  {
    x /= sum;
  }
  return out;
}

std::vector<int> sample_level_structure( const LevelStructureStats& stats, int n_in,
                                         int n_out, Rng& rng )
{
  if ( n_in < 1 || n_out < 1 )
  {
    throw ConfigError( "sample_level_structure: need n_in >= 1 and n_out >= 1" );
  }
  if ( stats.p_levels.empty() )
  {
    throw ConfigError( "sample_level_structure: empty level distribution" );
  }

  std::vector<int> n_values;
  std::vector<double> n_weights;
  for ( auto [k, p] : stats.p_levels )
  {
    n_values.push_back( k );
    n_weights.push_back( p );
  }

  int levels_total = 0;
  bool ok = false;
  for ( int attempt = 0; attempt < 32; ++attempt )
  {
    levels_total = n_values[rng.categorical( n_weights )];
    if ( levels_total >= 2 )
    {
      ok = true;
      break;
    }
  }
  if ( !ok )
  {
    throw NumericalError( "sample_level_structure: no usable level count in 32 draws" );
  }

  std::vector<int> out;
  for ( int i = 0; i < n_in; ++i )
  {
    out.push_back( 0 );
  }
  for ( int idx = 1; idx <= levels_total - 2; ++idx )
  {
    auto it = stats.p_size.find( idx );
    if ( it == stats.p_size.end() || it->second.empty() )
    {
      throw ConfigError( "sample_level_structure: no size distribution for level " +
                         std::to_string( idx ) );
    }
    std::vector<int> sizes;
    std::vector<double> weights;
    for ( auto [sz, p] : it->second )
    {
      sizes.push_back( sz );
      weights.push_back( p );
    }
    int const m = sizes[rng.categorical( weights )];
    for ( int i = 0; i < m; ++i )
    {
      out.push_back( idx );
    }
  }
  for ( int i = 0; i < n_out; ++i )
  {
    out.push_back( levels_total - 1 );
  }
  return out;
}

Dag reverse_sample_with_levels( const DenoiseFn& denoise, const std::vector<int>& levels,
                                const NoiseModel& nm, Rng& rng, const ReverseOptions& opt )
{
  int const n = static_cast<int>( levels.size() );
  if ( n < 1 )
  {
    throw ShapeError( "reverse_sample: empty scaffold" );
  }
  int ml = 0;
  for ( int l : levels )
  {
    ml = std::max( ml, l );
  }

  bool const fixed_nodes = !opt.fixed_node_cats.empty();
  if ( fixed_nodes && static_cast<int>( opt.fixed_node_cats.size() ) != n )
  {
    throw ShapeError( "reverse_sample: roster size mismatch" );
  }
  if ( !fixed_nodes && static_cast<int>( nm.m_x().size() ) != opt.k_x )
  {
    throw ShapeError( "reverse_sample: k_x mismatch with marginals" );
  }
  if ( static_cast<int>( nm.m_e().size() ) != opt.k_e )
  {
    throw ShapeError( "reverse_sample: k_e mismatch with marginals" );
  }

  /* initial state at t = T: full-noise draw from the marginals */
  std::vector<int> node_cats( n );
  if ( fixed_nodes )
  {
    node_cats = opt.fixed_node_cats;
  }
  else
  {
    for ( int i = 0; i < n; ++i )
    {
      node_cats[i] = rng.categorical( nm.m_x() );
    }
  }
  std::vector<int> edge_cats( static_cast<size_t>( n ) * n, 0 );
  for ( int i = 0; i < n; ++i )
  {
    for ( int j = 0; j < n; ++j )
    {
      if ( i != j )
      {
        edge_cats[static_cast<size_t>( i ) * n + j] = rng.categorical( nm.m_e() );
      }
    }
  }

  std::vector<int> lv = levels;
  Tensor pX, pE;
  for ( int t = nm.T(); t >= 1; --t )
  {
    Dag cur = Dag::from_categories( opt.k_x, opt.k_e, node_cats, edge_cats, &lv );
    denoise( cur, t, pX, pE );
    if ( !fixed_nodes )
    {
      if ( pX.rows != n || pX.cols != opt.k_x )
      {
        throw ShapeError( "reverse_sample: denoiser pX shape mismatch" );
      }
      for ( int i = 0; i < n; ++i )
      {
        int const tau_t = local_timestep( t, normalized_level( lv[i], ml ), nm );
        int const tau_p = local_timestep( t - 1, normalized_level( lv[i], ml ), nm );
        if ( tau_p == tau_t )
        {
          continue;
        }
        std::vector<double> pred( pX.v.begin() + static_cast<size_t>( i ) * opt.k_x,
                                  pX.v.begin() + static_cast<size_t>( i + 1 ) * opt.k_x );
        auto post = posterior_step( pred, node_cats[i], tau_t, tau_p, nm, Alphabet::Node );
        node_cats[i] = rng.categorical( post );
      }
    }
    if ( pE.rows != n * n || pE.cols != opt.k_e )
    {
      throw ShapeError( "reverse_sample: denoiser pE shape mismatch" );
    }
    for ( int j = 0; j < n; ++j )
    {
      int const tau_t = local_timestep( t, normalized_level( lv[j], ml ), nm );
      int const tau_p = local_timestep( t - 1, normalized_level( lv[j], ml ), nm );
      if ( tau_p == tau_t )
      {
        continue;
      }
      for ( int i = 0; i < n; ++i )
      {
        if ( i == j )
        {
          continue;
        }
        size_t const idx = static_cast<size_t>( i ) * n + j;
        std::vector<double> pred( pE.v.begin() + idx * opt.k_e,
                                  pE.v.begin() + ( idx + 1 ) * opt.k_e );
        auto post = posterior_step( pred, edge_cats[idx], tau_t, tau_p, nm, Alphabet::Edge );
        edge_cats[idx] = rng.categorical( post );
      }
    }
  }
  return Dag::from_categories( opt.k_x, opt.k_e, node_cats, edge_cats, &lv );
}

Dag reverse_sample( const DenoiseFn& denoise, const LevelStructureStats& stats,
                    const NoiseModel& nm, int n_in, int n_out, Rng& rng,
                    const ReverseOptions& opt )
{
  std::vector<int> levels = sample_level_structure( stats, n_in, n_out, rng );
  ReverseOptions local = opt;
  if ( local.fixed_node_cats.empty() )
  {
    /* the AIG roster: inputs at level 0, outputs on top, ANDs between */
    int const n = static_cast<int>( levels.size() );
    local.fixed_node_cats.assign( n, kNodeAnd );
    for ( int i = 0; i < n_in; ++i )
    {
      local.fixed_node_cats[i] = kNodeInput;
    }
    for ( int i = n - n_out; i < n; ++i )
    {
      local.fixed_node_cats[i] = kNodeOutput;
    }
  }
  return reverse_sample_with_levels( denoise, levels, nm, rng, local );
}

} // namespace seadag
