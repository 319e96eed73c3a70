/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace seadag
{

namespace
{

constexpr char kMagic[8] = { 'S', 'E', 'A', 'D', 'A', 'G', 'C', 'K' };
constexpr uint32_t kVersion = 1;

void put_u32( std::ostream& os, uint32_t x )
{
  unsigned char b[4];
  for ( int i = 0; i < 4; ++i )
  {
    b[i] = static_cast<unsigned char>( ( x >> ( 8 * i ) ) & 0xff );
  }
  os.write( reinterpret_cast<const char*>( b ), 4 );
}

void put_u64( std::ostream& os, uint64_t x )
{
  unsigned char b[8];
  for ( int i = 0; i < 8; ++i )
  {
    b[i] = static_cast<unsigned char>( ( x >> ( 8 * i ) ) & 0xff );
  }
  os.write( reinterpret_cast<const char*>( b ), 8 );
}

uint32_t get_u32( std::istream& is )
{
  unsigned char b[4];
  if ( !is.read( reinterpret_cast<char*>( b ), 4 ) )
  {
    throw IoError( "checkpoint: truncated header" );
  }
  uint32_t x = 0;
  for ( int i = 0; i < 4; ++i )
  {
    x |= static_cast<uint32_t>( b[i] ) << ( 8 * i );
  }
  return x;
}

uint64_t get_u64( std::istream& is )
{
  unsigned char b[8];
  if ( !is.read( reinterpret_cast<char*>( b ), 8 ) )
  {
    throw IoError( "checkpoint: truncated header" );
  }
  uint64_t x = 0;
  for ( int i = 0; i < 8; ++i )
  {
    x |= static_cast<uint64_t>( b[i] ) << ( 8 * i );
  }
  return x;
}

void put_f32( std::ostream& os, float f )
{
  uint32_t bits;
  std::memcpy( &bits, &f, 4 );
  put_u32( os, bits );
}

float get_f32( const unsigned char* b )
{
  uint32_t bits = 0;
  for ( int i = 0; i < 4; ++i )
  {
    bits |= static_cast<uint32_t>( b[i] ) << ( 8 * i );
  }
  float f;
  std::memcpy( &f, &bits, 4 );
  return f;
}

} // namespace

void save_checkpoint( const Checkpoint& ck, const std::string& path )
{
  nlohmann::ordered_json manifest;
  manifest["config"] = { { "layers", ck.params.config.layers },
                         { "hidden", ck.params.config.hidden },
                         { "heads", ck.params.config.heads },
                         { "k_x", ck.params.config.k_x },
                         { "k_e", ck.params.config.k_e },
                         { "cond_cols", ck.params.config.cond_cols } };
  manifest["noise"] = { { "T", ck.T },
                        { "beta", ck.beta },
                        { "mode", schedule_mode_name( ck.mode ) },
                        { "m_x", ck.m_x },
                        { "m_e", ck.m_e } };
  manifest["task"] = { { "n_in", ck.n_in },
                       { "n_out", ck.n_out },
                       { "node_diffusion_enabled", ck.node_diffusion_enabled } };
  manifest["level_stats"] = nlohmann::ordered_json::parse( level_stats_to_json( ck.stats ) );

  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  uint64_t offset = 0;
  for_each_tensor( ck.params, [&]( const std::string& name, const Tensor& t ) {
    tensors.push_back( { { "name", name },
                         { "rows", t.rows },
                         { "cols", t.cols },
                         { "offset", offset } } );
    offset += static_cast<uint64_t>( t.size() ) * 4;
  } );
  manifest["tensors"] = std::move( tensors );

  std::string const text = manifest.dump();

  std::ofstream os( path, std::ios::binary | std::ios::trunc );
  if ( !os )
  {
    throw IoError( "checkpoint: cannot open for writing: " + path );
  }
  os.write( kMagic, 8 );
  put_u32( os, kVersion );
  put_u64( os, text.size() );
  os.write( text.data(), static_cast<std::streamsize>( text.size() ) );
  for_each_tensor( ck.params, [&]( const std::string&, const Tensor& t ) {
    for ( double x : t.v )
    {
      put_f32( os, static_cast<float>( x ) );
    }
  } );
  if ( !os )
  {
    throw IoError( "checkpoint: write failed: " + path );
  }
}

Checkpoint load_checkpoint( const std::string& path )
{
  std::ifstream is( path, std::ios::binary );
  if ( !is )
  {
    throw IoError( "checkpoint: cannot open: " + path );
  }
  char magic[8];
  if ( !is.read( magic, 8 ) || std::memcmp( magic, kMagic, 8 ) != 0 )
  {
    throw IoError( "checkpoint: bad magic (not a checkpoint file): " + path );
  }
  uint32_t const version = get_u32( is );
  if ( version != kVersion )
  {
    throw IoError( "checkpoint: unsupported version " + std::to_string( version ) );
  }
  uint64_t const manifest_len = get_u64( is );
  std::string text( manifest_len, '\0' );
  if ( !is.read( text.data(), static_cast<std::streamsize>( manifest_len ) ) )
  {
    throw IoError( "checkpoint: truncated manifest" );
  }
  nlohmann::json manifest;
  try
  {
    manifest = nlohmann::json::parse( text );
  }
  catch ( const nlohmann::json::exception& e )
  {
    throw IoError( std::string( "checkpoint: malformed manifest: " ) + e.what() );
  }

  Checkpoint ck;
  try
  {
    const auto& cfg = manifest.at( "config" );
    ck.params.config.layers = cfg.at( "layers" ).get<int>();
    ck.params.config.hidden = cfg.at( "hidden" ).get<int>();
    ck.params.config.heads = cfg.at( "heads" ).get<int>();
    ck.params.config.k_x = cfg.at( "k_x" ).get<int>();
    ck.params.config.k_e = cfg.at( "k_e" ).get<int>();
    ck.params.config.cond_cols = cfg.at( "cond_cols" ).get<int>();
    const auto& noise = manifest.at( "noise" );
    ck.T = noise.at( "T" ).get<int>();
    ck.beta = noise.at( "beta" ).get<double>();
    ck.mode = schedule_mode_from_name( noise.at( "mode" ).get<std::string>() );
    ck.m_x = noise.at( "m_x" ).get<std::vector<double>>();
    ck.m_e = noise.at( "m_e" ).get<std::vector<double>>();
    const auto& task = manifest.at( "task" );
    ck.n_in = task.at( "n_in" ).get<int>();
    ck.n_out = task.at( "n_out" ).get<int>();
    ck.node_diffusion_enabled = task.at( "node_diffusion_enabled" ).get<bool>();
    ck.stats = level_stats_from_json( manifest.at( "level_stats" ).dump() );
  }
  catch ( const nlohmann::json::exception& e )
  {
    throw IoError( std::string( "checkpoint: manifest missing fields: " ) + e.what() );
  }

  DenoiserParams shell = init_params( ck.params.config, 0 );
  shell.config = ck.params.config;

  const auto& tensors = manifest.at( "tensors" );
  size_t idx = 0;
  uint64_t expect_offset = 0;
  std::vector<std::pair<std::string, Tensor*>> slots;
  for_each_tensor( shell, [&slots]( const std::string& name, Tensor& t ) {
    slots.emplace_back( name, &t );
  } );
  if ( tensors.size() != slots.size() )
  {
    throw ShapeError( "checkpoint: tensor count does not match the config" );
  }
  std::vector<unsigned char> buf;
  for ( const auto& entry : tensors )
  {
    auto& [name, tensor] = slots[idx++];
    if ( entry.at( "name" ).get<std::string>() != name )
    {
      throw ShapeError( "checkpoint: unexpected tensor name " +
                        entry.at( "name" ).get<std::string>() + ", expected " + name );
    }
    int const rows = entry.at( "rows" ).get<int>();
    int const cols = entry.at( "cols" ).get<int>();
    if ( rows != tensor->rows || cols != tensor->cols )
    {
      throw ShapeError( "checkpoint: shape mismatch for tensor " + name );
    }
    if ( entry.at( "offset" ).get<uint64_t>() != expect_offset )
    {
      throw IoError( "checkpoint: non-contiguous tensor data for " + name );
    }
    size_t const bytes = static_cast<size_t>( tensor->size() ) * 4;
    buf.resize( bytes );
    if ( !is.read( reinterpret_cast<char*>( buf.data() ),
                   static_cast<std::streamsize>( bytes ) ) )
    {
      throw IoError( "checkpoint: truncated tensor data at " + name );
    }
    for ( int i = 0; i < tensor->size(); ++i )
    {
      tensor->v[i] = static_cast<double>( get_f32( buf.data() + 4 * i ) );
    }
    expect_offset += bytes;
  }
  ck.params = std::move( shell );
  return ck;
}

} // namespace seadag
