#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace csma {

// Comparisons against the link/sensing/interference radii use this slack so
// that randomly placed nodes get deterministic tie behaviour.
inline constexpr double kDistanceSlack = 1e-12;

struct TopoNode {
  int id = 0;  // stable label used in files and CSV output
  double x = 0;
  double y = 0;
  bool transmits = true;
};

struct Torus {
  double width = 0;
  double height = 0;
};

struct Topology {
  std::string name;  // topology_id used in result CSVs
  std::vector<TopoNode> nodes;
  double link_range = 1.0;
  std::optional<Torus> wrap;
  std::vector<std::vector<int>> out_links;  // node indices within link_range, ascending

  // Torus distance when wrap is set, otherwise Euclidean. Indices, not labels.
  double distance(int u, int v) const;
  int transmitter_count() const;
  int index_of_label(int label) const;  // throws when the label is unknown
  void rebuild_links();                 // from coordinates and link_range
  void validate() const;                // symmetry + every transmitter has out-degree >= 1
};

// Euclidean conflict sets for the given sensing and interference ranges.
// blockers(v) excludes v itself; interferers(v) includes it.
struct ConflictSets {
  double beta = 0;
  double eta = 0;
  std::vector<std::vector<int>> blockers;
  std::vector<std::vector<int>> interferers;
};

ConflictSets conflict_sets(const Topology& top, double beta, double eta);

// Transmitters at integer positions -n..n plus receive-only endpoints at
// +-(n+1); unit link range.
Topology line_topology(int n);

// rows x cols torus at the given spacing; link range equals the spacing, so
// every node has exactly four links.
Topology wrapped_grid(int rows = 4, int cols = 4, double spacing = 1.0);

// count nodes uniform on [0, side]^2, links within link_range. Redraws until
// the instance is connected (bounded retries); deterministic under seed.
Topology random_topology(int count, double side, double link_range, std::uint64_t seed);

// Plain-text format:
//   nodes <count> m <m> wrap <none|w|wx,wy>
//   node <id> <x> <y> <tx|rx>
//   link <u> <v>
// Writing then reading is lossless; parse failures name the line.
void write_topology(std::ostream& out, const Topology& top);
Topology read_topology(std::istream& in);
void save_topology(const std::string& path, const Topology& top);
Topology load_topology(const std::string& path);

}  // namespace csma
