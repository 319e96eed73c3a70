/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#include "seadag/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seadag/aig.hpp"
#include "seadag/error.hpp"

namespace seadag
{

using ordered_json = nlohmann::ordered_json;

std::string record_to_json_line( const DatasetRecord& rec )
{
  ordered_json j;
  j["n_in"] = rec.n_in;
  j["n_out"] = rec.n_out;
  j["node_types"] = rec.dag.node_cats();
  ordered_json edges = ordered_json::array();
  int const n = rec.dag.n();
  for ( int i = 0; i < n; ++i )
  {
    for ( int jj = 0; jj < n; ++jj )
    {
      int const c = rec.dag.edge_cat( i, jj );
      if ( c != kEdgeAbsent )
      {
        edges.push_back( ordered_json::array( { i, jj, c } ) );
      }
    }
  }
  j["edges"] = std::move( edges );
  ordered_json tt = ordered_json::array();
  for ( const auto& col : rec.tt.outputs )
  {
    tt.push_back( column_to_hex( col ) );
  }
  j["tt"] = std::move( tt );
  return j.dump();
}

DatasetRecord record_from_json_line( const std::string& line )
{
  ordered_json j;
  try
  {
    j = ordered_json::parse( line );
  }
  catch ( const std::exception& e )
  {
    throw IoError( std::string( "invalid JSON: " ) + e.what() );
  }

  auto require = [&]( const char* key ) -> const ordered_json& {
    if ( !j.contains( key ) )
    {
      throw IoError( std::string( "missing field '" ) + key + "'" );
    }
    return j.at( key );
  };

  DatasetRecord rec;
  rec.n_in = require( "n_in" ).get<int>();
  rec.n_out = require( "n_out" ).get<int>();
  std::vector<int> node_cats = require( "node_types" ).get<std::vector<int>>();
  int const n = static_cast<int>( node_cats.size() );
  if ( rec.n_in < 1 || rec.n_out < 1 || rec.n_in + rec.n_out > n )
  {
    throw IoError( "inconsistent n_in/n_out/node count" );
  }
  for ( int i = 0; i < rec.n_in; ++i )
  {
    if ( node_cats[i] != kNodeInput )
    {
      throw IoError( "first n_in nodes must be inputs" );
    }
  }
  for ( int k = 0; k < rec.n_out; ++k )
  {
    if ( node_cats[n - 1 - k] != kNodeOutput )
    {
      throw IoError( "last n_out nodes must be outputs" );
    }
  }

  std::vector<int> edge_cats( static_cast<size_t>( n ) * n, kEdgeAbsent );
  for ( const auto& e : require( "edges" ) )
  {
    if ( !e.is_array() || e.size() != 3 )
    {
      throw IoError( "edge entries must be [child,parent,category]" );
    }
    int const c = e[0].get<int>();
    int const p = e[1].get<int>();
    int const cat = e[2].get<int>();
    if ( c < 0 || c >= n || p < 0 || p >= n || c == p )
    {
      throw IoError( "edge endpoint out of range" );
    }
    if ( cat <= 0 || cat >= kEdgeTypes )
    {
      throw IoError( "edge category out of range" );
    }
    edge_cats[static_cast<size_t>( c ) * n + p] = cat;
  }

  try
  {
    rec.dag = Dag::from_categories( kNodeTypes, kEdgeTypes, node_cats, edge_cats );
  }
  catch ( const CyclicGraphError& e )
  {
    throw IoError( std::string( "record graph is cyclic: " ) + e.what() );
  }

  rec.tt.n_in = rec.n_in;
  const auto& tt = require( "tt" );
  if ( static_cast<int>( tt.size() ) != rec.n_out )
  {
    throw IoError( "tt column count must equal n_out" );
  }
  for ( const auto& hex : tt )
  {
    try
    {
      rec.tt.outputs.push_back( column_from_hex( hex.get<std::string>(), rec.n_in ) );
    }
    catch ( const ShapeError& e )
    {
      throw IoError( std::string( "bad tt column: " ) + e.what() );
    }
  }
  return rec;
}

void write_dataset( const std::string& path, const std::vector<DatasetRecord>& records )
{
  std::ofstream os( path, std::ios::binary );
  if ( !os )
  {
    throw IoError( "cannot open for writing: " + path );
  }
  for ( const auto& rec : records )
  {
    os << record_to_json_line( rec ) << "\n";
  }
  if ( !os )
  {
    throw IoError( "write failed: " + path );
  }
}

std::vector<DatasetRecord> read_dataset( const std::string& path )
{
  std::ifstream is( path, std::ios::binary );
  if ( !is )
  {
    throw IoError( "cannot open: " + path );
  }
  std::vector<DatasetRecord> out;
  std::string line;
  long line_no = 0;
  while ( std::getline( is, line ) )
  {
    ++line_no;
    if ( line.empty() )
    {
      continue;
    }
    try
    {
      out.push_back( record_from_json_line( line ) );
    }
    catch ( const IoError& e )
    {
      throw IoError( path + ":" + std::to_string( line_no ) + ": " + e.what() );
    }
  }
  return out;
}

LevelStructureStats harvest_level_stats( const std::vector<DatasetRecord>& records )
{
  if ( records.empty() )
  {
    throw ShapeError( "harvest_level_stats: empty dataset" );
  }
  LevelStructureStats s;
  std::map<int, long> n_counts;
  std::map<int, std::map<int, long>> size_counts;
  for ( const auto& rec : records )
  {
    int const levels = rec.dag.max_level() + 1;
    ++n_counts[levels];
    std::map<int, int> sizes;
    for ( int i = 0; i < rec.dag.n(); ++i )
    {
      ++sizes[rec.dag.level( i )];
    }
    for ( auto [idx, cnt] : sizes )
    {
      ++size_counts[idx][cnt];
    }
  }
  long total = 0;
  for ( auto [k, c] : n_counts )
  {
    total += c;
  }
  for ( auto [k, c] : n_counts )
  {
    s.p_levels[k] = static_cast<double>( c ) / total;
  }
  for ( auto& [idx, hist] : size_counts )
  {
    long t = 0;
    for ( auto [sz, c] : hist )
    {
      t += c;
    }
    for ( auto [sz, c] : hist )
    {
      s.p_size[idx][sz] = static_cast<double>( c ) / t;
    }
  }
  return s;
}

std::string level_stats_to_json( const LevelStructureStats& s )
{
  ordered_json j;
  ordered_json pl = ordered_json::object();
  for ( auto [k, p] : s.p_levels )
  {
    pl[std::to_string( k )] = p;
  }
  j["p_levels"] = std::move( pl );
  ordered_json ps = ordered_json::object();
  for ( const auto& [idx, hist] : s.p_size )
  {
    ordered_json h = ordered_json::object();
    for ( auto [sz, p] : hist )
    {
      h[std::to_string( sz )] = p;
    }
    ps[std::to_string( idx )] = std::move( h );
  }
  j["p_size"] = std::move( ps );
  return j.dump( 2 );
}

LevelStructureStats level_stats_from_json( const std::string& text )
{
  ordered_json j;
  try
  {
    j = ordered_json::parse( text );
  }
  catch ( const std::exception& e )
  {
    throw IoError( std::string( "invalid stats JSON: " ) + e.what() );
  }
  LevelStructureStats s;
  if ( !j.contains( "p_levels" ) || !j.contains( "p_size" ) )
  {
    throw IoError( "stats JSON must contain p_levels and p_size" );
  }
  double sum = 0.0;
  for ( auto it = j["p_levels"].begin(); it != j["p_levels"].end(); ++it )
  {
    double const p = it.value().get<double>();
    s.p_levels[std::stoi( it.key() )] = p;
    sum += p;
  }
  if ( s.p_levels.empty() || std::abs( sum - 1.0 ) > 1e-6 )
  {
    throw IoError( "p_levels must be a nonempty distribution" );
  }
  for ( auto it = j["p_size"].begin(); it != j["p_size"].end(); ++it )
  {
    auto& hist = s.p_size[std::stoi( it.key() )];
    double hs = 0.0;
    for ( auto h = it.value().begin(); h != it.value().end(); ++h )
    {
      double const p = h.value().get<double>();
      hist[std::stoi( h.key() )] = p;
      hs += p;
    }
    if ( hist.empty() || std::abs( hs - 1.0 ) > 1e-6 )
    {
      throw IoError( "p_size entry must be a nonempty distribution" );
    }
  }
  return s;
}

void write_level_stats( const std::string& path, const LevelStructureStats& s )
{
  std::ofstream os( path, std::ios::binary );
  if ( !os )
  {
    throw IoError( "cannot open for writing: " + path );
  }
  os << level_stats_to_json( s ) << "\n";
}

LevelStructureStats read_level_stats( const std::string& path )
{
  std::ifstream is( path, std::ios::binary );
  if ( !is )
  {
    throw IoError( "cannot open: " + path );
  }
  std::stringstream ss;
  ss << is.rdbuf();
  return level_stats_from_json( ss.str() );
}

void harvest_marginals( const std::vector<DatasetRecord>& records, std::vector<double>& m_x,
                        std::vector<double>& m_e )
{
  if ( records.empty() )
  {
    throw ShapeError( "harvest_marginals: empty dataset" );
  }
  m_x.assign( kNodeTypes, 0.0 );
  m_e.assign( kEdgeTypes, 0.0 );
  long nodes = 0;
  long pairs = 0;
  for ( const auto& rec : records )
  {
    int const n = rec.dag.n();
    for ( int i = 0; i < n; ++i )
    {
      m_x[rec.dag.node_cat( i )] += 1.0;
      ++nodes;
    }
    for ( int i = 0; i < n; ++i )
    {
      for ( int j = 0; j < n; ++j )
      {
        if ( i != j )
        {
          m_e[rec.dag.edge_cat( i, j )] += 1.0;
          ++pairs;
        }
      }
    }
  }
  for ( auto& x : m_x )
  {
    x /= nodes;
  }
  for ( auto& x : m_e )
  {
    x /= pairs;
  }
}

} // namespace seadag
