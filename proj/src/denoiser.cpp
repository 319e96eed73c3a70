/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/denoiser.hpp"

#include <cmath>

#include "seadag/aig.hpp"

namespace seadag
{

void DenoiserConfig::validate() const
{
  if ( layers < 1 || hidden < 1 || heads < 1 || k_x < 2 || k_e < 2 || cond_cols < 0 )
  {
    throw ConfigError( "denoiser config: sizes must be positive" );
  }
  if ( hidden % heads != 0 )
  {
    throw ConfigError( "denoiser config: hidden must be divisible by heads" );
  }
}

namespace
{

void visit_lin( const std::string& name, Lin& l,
                const std::function<void( const std::string&, Tensor& )>& fn )
{
  fn( name + ".w", l.w );
  fn( name + ".b", l.b );
}

void visit_mlp( const std::string& name, Mlp& m,
                const std::function<void( const std::string&, Tensor& )>& fn )
{
  visit_lin( name + ".in", m.in, fn );
  visit_lin( name + ".out", m.out, fn );
}

void visit_norm( const std::string& name, Norm& nrm,
                 const std::function<void( const std::string&, Tensor& )>& fn )
{
  fn( name + ".g", nrm.gamma );
  fn( name + ".b", nrm.beta );
}

} // namespace

void for_each_tensor( DenoiserParams& p,
                      const std::function<void( const std::string&, Tensor& )>& fn )
{
  visit_mlp( "embed_x", p.embed_x, fn );
  visit_mlp( "embed_e", p.embed_e, fn );
  visit_mlp( "embed_y", p.embed_y, fn );
  for ( size_t i = 0; i < p.layers.size(); ++i )
  {
    std::string const pre = "layer" + std::to_string( i ) + ".";
    DenoiserLayer& L = p.layers[i];
    visit_lin( pre + "wq", L.wq, fn );
    visit_lin( pre + "wk", L.wk, fn );
    visit_lin( pre + "wv", L.wv, fn );
    visit_lin( pre + "e_mul", L.e_mul, fn );
    visit_lin( pre + "e_add", L.e_add, fn );
    visit_lin( pre + "yx_mul", L.yx_mul, fn );
    visit_lin( pre + "yx_add", L.yx_add, fn );
    visit_lin( pre + "ye_mul", L.ye_mul, fn );
    visit_lin( pre + "ye_add", L.ye_add, fn );
    visit_lin( pre + "x_out", L.x_out, fn );
    visit_lin( pre + "e_out", L.e_out, fn );
    visit_lin( pre + "y_from_x", L.y_from_x, fn );
    visit_lin( pre + "y_from_e", L.y_from_e, fn );
    visit_lin( pre + "y_from_y", L.y_from_y, fn );
    visit_lin( pre + "y_out", L.y_out, fn );
    visit_norm( pre + "ln_x", L.ln_x, fn );
    visit_norm( pre + "ln_e", L.ln_e, fn );
    visit_norm( pre + "ln_y", L.ln_y, fn );
  }
  visit_mlp( "head_x", p.head_x, fn );
  visit_mlp( "head_e", p.head_e, fn );
}

void for_each_tensor( const DenoiserParams& p,
                      const std::function<void( const std::string&, const Tensor& )>& fn )
{
  for_each_tensor( const_cast<DenoiserParams&>( p ),
                   [&fn]( const std::string& name, Tensor& t ) { fn( name, t ); } );
}

namespace
{

Lin make_lin( int in, int out )
{
  Lin l;
  l.w = Tensor( in, out );
  l.b = Tensor( 1, out );
  return l;
}

Mlp make_mlp( int in, int mid, int out )
{
  Mlp m;
  m.in = make_lin( in, mid );
  m.out = make_lin( mid, out );
  return m;
}

Norm make_norm( int d )
{
  Norm nrm;
  nrm.gamma = Tensor( 1, d, 1.0 );
  nrm.beta = Tensor( 1, d );
  return nrm;
}

DenoiserParams make_shell( const DenoiserConfig& cfg )
{
  cfg.validate();
  DenoiserParams p;
  p.config = cfg;
  int const dx = cfg.d_x();
  int const de = cfg.d_e();
  int const dy = cfg.d_y();
  int const h = cfg.heads;
  p.embed_x = make_mlp( cfg.raw_x(), dx, dx );
  p.embed_e = make_mlp( cfg.raw_e(), de, de );
  p.embed_y = make_mlp( cfg.raw_y(), dy, dy );
  p.layers.resize( cfg.layers );
  for ( DenoiserLayer& L : p.layers )
  {
    L.wq = make_lin( dx, dx );
    L.wk = make_lin( dx, dx );
    L.wv = make_lin( dx, dx );
    L.e_mul = make_lin( de, h );
    L.e_add = make_lin( de, h );
    L.yx_mul = make_lin( dy, dx );
    L.yx_add = make_lin( dy, dx );
    L.ye_mul = make_lin( dy, h );
    L.ye_add = make_lin( dy, de );
    L.x_out = make_lin( dx, dx );
    L.e_out = make_lin( h, de );
    L.y_from_x = make_lin( dx, dy );
    L.y_from_e = make_lin( de, dy );
    L.y_from_y = make_lin( dy, dy );
    L.y_out = make_lin( dy, dy );
    L.ln_x = make_norm( dx );
    L.ln_e = make_norm( de );
    L.ln_y = make_norm( dy );
  }
  p.head_x = make_mlp( dx, dx, cfg.k_x );
  p.head_e = make_mlp( de, de, cfg.k_e );
  return p;
}

} // namespace

DenoiserParams init_params( const DenoiserConfig& cfg, uint64_t seed )
{
  DenoiserParams p = make_shell( cfg );
  Rng rng( split_seed( seed, 0x9e1f ) );
  for_each_tensor( p, [&rng]( const std::string& name, Tensor& t ) {
    bool const is_weight = name.size() >= 2 && name.compare( name.size() - 2, 2, ".w" ) == 0;
    if ( !is_weight )
    {
      return; /* biases stay zero, norms stay at their identity init */
    }
    double const bound = 1.0 / std::sqrt( static_cast<double>( t.rows ) );
    for ( double& x : t.v )
    {
      x = ( 2.0 * rng.uniform() - 1.0 ) * bound;
    }
  } );
  return p;
}

VarMap bind_params( ad::Tape& tape, const DenoiserParams& p )
{
  VarMap vm;
  for_each_tensor( p, [&]( const std::string& name, const Tensor& t ) {
    vm.emplace( name, tape.leaf( t ) );
  } );
  return vm;
}

namespace
{

struct LayerCtx
{
  ad::Tape& tape;
  const VarMap& vm;
  const DenoiserConfig& cfg;

  ad::Var v( const std::string& name ) const
  {
    auto it = vm.find( name );
    if ( it == vm.end() )
    {
      throw ShapeError( "denoiser: missing parameter " + name );
    }
    return it->second;
  }

  ad::Var lin( ad::Var x, const std::string& name ) const
  {
    return tape.add_rowvec( tape.matmul( x, v( name + ".w" ) ), v( name + ".b" ) );
  }

  ad::Var mlp( ad::Var x, const std::string& name ) const
  {
    return lin( tape.relu( lin( x, name + ".in" ) ), name + ".out" );
  }

  ad::Var norm( ad::Var x, const std::string& name ) const
  {
    return tape.layer_norm_rows( x, v( name + ".g" ), v( name + ".b" ) );
  }
};

} // namespace

ForwardVars forward_on_tape( ad::Tape& tape, const VarMap& vm, const DenoiserConfig& cfg,
                             const GraphFeatures& gf )
{
  cfg.validate();
  int const n = gf.n;
  if ( gf.fx.rows != n || gf.fx.cols != cfg.raw_x() || gf.fe.rows != n * n ||
       gf.fe.cols != cfg.raw_e() || gf.y.rows != 1 || gf.y.cols != cfg.raw_y() )
  {
    throw ShapeError( "denoiser forward: feature shapes inconsistent with config" );
  }
  LayerCtx ctx{ tape, vm, cfg };
  int const heads = cfg.heads;
  int const dh = cfg.head_dim();
  double const inv_sqrt_dh = 1.0 / std::sqrt( static_cast<double>( dh ) );

  ad::Var X = ctx.mlp( tape.leaf( gf.fx ), "embed_x" );
  ad::Var E = ctx.mlp( tape.leaf( gf.fe ), "embed_e" );
  ad::Var Y = ctx.mlp( tape.leaf( gf.y ), "embed_y" );

  for ( int li = 0; li < cfg.layers; ++li )
  {
    std::string const pre = "layer" + std::to_string( li ) + ".";
    ad::Var q = ctx.lin( X, pre + "wq" );
    ad::Var k = ctx.lin( X, pre + "wk" );
    ad::Var v = ctx.lin( X, pre + "wv" );

    /* per-head scaled dot-product logits, flattened to one pair per row */
    std::vector<ad::Var> head_logits;
    head_logits.reserve( heads );
    for ( int h = 0; h < heads; ++h )
    {
      ad::Var qh = tape.slice_cols( q, h * dh, dh );
      ad::Var kh = tape.slice_cols( k, h * dh, dh );
      ad::Var raw = tape.scale( tape.matmul( qh, tape.transpose( kh ) ), inv_sqrt_dh );
      head_logits.push_back( tape.reshape( raw, n * n, 1 ) );
    }
    ad::Var logits = tape.concat_cols( head_logits ); /* n^2 x heads */

    ad::Var se = tape.add_scalar( ctx.lin( E, pre + "e_mul" ), 1.0 );
    ad::Var be = ctx.lin( E, pre + "e_add" );
    ad::Var atten = tape.add( tape.mul( logits, se ), be ); /* n^2 x heads */

    /* node update: per-head softmax over keys, values gathered and re-fused */
    std::vector<ad::Var> head_outs;
    head_outs.reserve( heads );
    for ( int h = 0; h < heads; ++h )
    {
      ad::Var ah = tape.reshape( tape.slice_cols( atten, h, 1 ), n, n );
      ad::Var weights = tape.softmax_rows( ah );
      ad::Var vh = tape.slice_cols( v, h * dh, dh );
      head_outs.push_back( tape.matmul( weights, vh ) );
    }
    ad::Var attn_v = tape.concat_cols( head_outs ); /* n x d_x */

    ad::Var syx = tape.add_scalar( ctx.lin( Y, pre + "yx_mul" ), 1.0 );
    ad::Var byx = ctx.lin( Y, pre + "yx_add" );
    ad::Var xu = ctx.lin( tape.add_rowvec( tape.mul_rowvec( attn_v, syx ), byx ),
                          pre + "x_out" );

    ad::Var sye = tape.add_scalar( ctx.lin( Y, pre + "ye_mul" ), 1.0 );
    ad::Var eu = tape.add_rowvec( ctx.lin( tape.mul_rowvec( atten, sye ), pre + "e_out" ),
                                  ctx.lin( Y, pre + "ye_add" ) );

    ad::Var yu = ctx.lin(
        tape.add( tape.add( ctx.lin( tape.mean_rows( X ), pre + "y_from_x" ),
                            ctx.lin( tape.mean_rows( E ), pre + "y_from_e" ) ),
                  ctx.lin( Y, pre + "y_from_y" ) ),
        pre + "y_out" );

    X = ctx.norm( tape.add( X, xu ), pre + "ln_x" );
    E = ctx.norm( tape.add( E, eu ), pre + "ln_e" );
    Y = ctx.norm( tape.add( Y, yu ), pre + "ln_y" );

    if ( !all_finite( tape.value( X ) ) || !all_finite( tape.value( E ) ) ||
         !all_finite( tape.value( Y ) ) )
    {
      throw NumericalError( "denoiser layer " + std::to_string( li ) +
                            " produced a non-finite activation" );
    }
  }

  ForwardVars out;
  out.px = tape.softmax_rows( ctx.mlp( X, "head_x" ) );
  out.pe = tape.softmax_rows( ctx.mlp( E, "head_e" ) );
  return out;
}

ForwardOut forward_infer( const DenoiserParams& p, const GraphFeatures& gf )
{
  ad::Tape tape;
  VarMap vm = bind_params( tape, p );
  ForwardVars fv = forward_on_tape( tape, vm, p.config, gf );
  ForwardOut out;
  out.px = tape.value( fv.px );
  out.pe = tape.value( fv.pe );
  return out;
}

std::vector<NodeRole> roles_from_types( const std::vector<int>& node_cats )
{
  std::vector<NodeRole> roles( node_cats.size() );
  int in_slot = 0;
  int out_slot = 0;
  for ( size_t i = 0; i < node_cats.size(); ++i )
  {
    roles[i].kind = node_cats[i];
    if ( node_cats[i] == kNodeInput )
    {
      roles[i].index = in_slot++;
    }
    else if ( node_cats[i] == kNodeOutput )
    {
      roles[i].index = out_slot++;
    }
  }
  return roles;
}

DenoiseFn make_denoiser( const DenoiserParams& p, const NoiseModel& nm,
                         const TruthTable& tt )
{
  return [&p, &nm, tt]( const Dag& noisy, int t, Tensor& px, Tensor& pe ) {
    Tensor const cond = encode_condition( tt, roles_from_types( noisy.node_cats() ) );
    GraphFeatures const gf = extract_features( noisy, t, nm, cond );
    ForwardOut out = forward_infer( p, gf );
    px = std::move( out.px );
    pe = std::move( out.pe );
  };
}

} // namespace seadag
