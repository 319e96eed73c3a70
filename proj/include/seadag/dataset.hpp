/* seadag: conditional AIG synthesis via semi-autoregressive graph diffusion */

#pragma once

#include <map>
#include <string>
#include <vector>

#include "seadag/dag.hpp"
#include "seadag/truth_table.hpp"

namespace seadag
{

/*! \brief One conditional generation example: a clean graph plus the truth
 * table it realizes. */
struct DatasetRecord
{
  int n_in = 0;
  int n_out = 0;
  Dag dag;
  TruthTable tt;
};

/*! \brief JSONL round trip.  One record per line:
 * {"n_in":..,"n_out":..,"node_types":[..],"edges":[[child,parent,cat],..],
 *  "tt":["hex",..]}
 * Absent edges are omitted; levels are recomputed on read (records must be
 * acyclic).  Field order and edge order are fixed, so writes are
 * deterministic.  Malformed lines are rejected with their line number.
 */
void write_dataset( const std::string& path, const std::vector<DatasetRecord>& records );
std::vector<DatasetRecord> read_dataset( const std::string& path );

std::string record_to_json_line( const DatasetRecord& rec );
DatasetRecord record_from_json_line( const std::string& line );

/*! \brief Empirical level-structure distributions harvested from clean
 * graphs: p_levels over the number of levels N (= max level + 1) and, per
 * level index, the distribution of that level's node count. */
struct LevelStructureStats
{
  std::map<int, double> p_levels;
  std::map<int, std::map<int, double>> p_size;
};

LevelStructureStats harvest_level_stats( const std::vector<DatasetRecord>& records );

std::string level_stats_to_json( const LevelStructureStats& s );
LevelStructureStats level_stats_from_json( const std::string& text );
void write_level_stats( const std::string& path, const LevelStructureStats& s );
LevelStructureStats read_level_stats( const std::string& path );

/*! \brief Empirical node / edge category proportions (the diffusion prior). */
void harvest_marginals( const std::vector<DatasetRecord>& records,
                        std::vector<double>& m_x, std::vector<double>& m_e );

} // namespace seadag
