#include "csma/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "csma/csv.hpp"
#include "csma/rng.hpp"

namespace csma {

double Topology::distance(int u, int v) const {
  const TopoNode& a = nodes[static_cast<std::size_t>(u)];
  const TopoNode& b = nodes[static_cast<std::size_t>(v)];
  double dx = std::fabs(a.x - b.x);
  double dy = std::fabs(a.y - b.y);
  if (wrap) {
    dx = std::min(dx, wrap->width - dx);
    dy = std::min(dy, wrap->height - dy);
  }
  return std::hypot(dx, dy);
}

int Topology::transmitter_count() const {
  int count = 0;
  for (const TopoNode& node : nodes) count += node.transmits ? 1 : 0;
  return count;
}

int Topology::index_of_label(int label) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == label) return static_cast<int>(i);
  }
  throw std::invalid_argument("topology: unknown node label " + std::to_string(label));
}

void Topology::rebuild_links() {
  const int count = static_cast<int>(nodes.size());
  out_links.assign(nodes.size(), {});
  for (int u = 0; u < count; ++u) {
    for (int v = 0; v < count; ++v) {
      if (u == v) continue;
      if (distance(u, v) <= link_range + kDistanceSlack)
        out_links[static_cast<std::size_t>(u)].push_back(v);
    }
  }
}

void Topology::validate() const {
  if (nodes.empty()) throw std::invalid_argument("topology: no nodes");
  if (out_links.size() != nodes.size()) throw std::invalid_argument("topology: links not built");
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    for (int v : out_links[u]) {
      const auto& back = out_links[static_cast<std::size_t>(v)];
      if (!std::count(back.begin(), back.end(), static_cast<int>(u)))
        throw std::invalid_argument("topology: asymmetric link support");
    }
    if (nodes[u].transmits && out_links[u].empty())
      throw std::invalid_argument("topology: transmitter " + std::to_string(nodes[u].id) +
                                  " has no outgoing link");
  }
}

ConflictSets conflict_sets(const Topology& top, double beta, double eta) {
  if (beta < 0 || eta < 0) throw std::domain_error("conflict_sets: ranges must be >= 0");
  const int count = static_cast<int>(top.nodes.size());
  ConflictSets sets;
  sets.beta = beta;
  sets.eta = eta;
  sets.blockers.resize(top.nodes.size());
  sets.interferers.resize(top.nodes.size());
  for (int v = 0; v < count; ++v) {
    for (int w = 0; w < count; ++w) {
      const double d = (v == w) ? 0.0 : top.distance(v, w);
      if (w != v && d <= beta + kDistanceSlack)
        sets.blockers[static_cast<std::size_t>(v)].push_back(w);
      if (d <= eta + kDistanceSlack) sets.interferers[static_cast<std::size_t>(v)].push_back(w);
    }
  }
  return sets;
}

Topology line_topology(int n) {
  if (n < 1) throw std::domain_error("line_topology: n must be >= 1");
  Topology top;
  top.name = "line_n" + std::to_string(n);
  top.link_range = 1.0;
  for (int pos = -(n + 1); pos <= n + 1; ++pos) {
    TopoNode node;
    node.id = pos;
    node.x = pos;
    node.y = 0;
    node.transmits = std::abs(pos) <= n;
    top.nodes.push_back(node);
  }
  top.rebuild_links();
  top.validate();
  return top;
}

Topology wrapped_grid(int rows, int cols, double spacing) {
  if (rows < 2 || cols < 2) throw std::domain_error("wrapped_grid: need at least a 2x2 grid");
  if (!(spacing > 0)) throw std::domain_error("wrapped_grid: spacing must be > 0");
  Topology top;
  top.name = "grid_" + std::to_string(rows) + "x" + std::to_string(cols);
  top.link_range = spacing;
  top.wrap = Torus{cols * spacing, rows * spacing};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      TopoNode node;
      node.id = r * cols + c;
      node.x = c * spacing;
      node.y = r * spacing;
      top.nodes.push_back(node);
    }
  }
  top.rebuild_links();
  top.validate();
  return top;
}

namespace {

bool connected(const Topology& top) {
  if (top.nodes.empty()) return false;
  std::vector<char> seen(top.nodes.size(), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : top.out_links[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == top.nodes.size();
}

}  // namespace

Topology random_topology(int count, double side, double link_range, std::uint64_t seed) {
  if (count < 2) throw std::domain_error("random_topology: need at least 2 nodes");
  if (!(side > 0)) throw std::domain_error("random_topology: side must be > 0");
  if (!(link_range > 0)) throw std::domain_error("random_topology: link range must be > 0");

  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(attempt)));
    Topology top;
    top.name = "random_c" + std::to_string(count) + "_s" + std::to_string(seed);
    top.link_range = link_range;
    for (int i = 0; i < count; ++i) {
      TopoNode node;
      node.id = i;
      node.x = rng.uniform01() * side;
      node.y = rng.uniform01() * side;
      top.nodes.push_back(node);
    }
    top.rebuild_links();
    const bool degrees_ok = std::all_of(top.out_links.begin(), top.out_links.end(),
                                        [](const auto& links) { return !links.empty(); });
    if (degrees_ok && connected(top)) {
      top.validate();
      return top;
    }
  }
  throw std::runtime_error(
      "random_topology: no connected instance found; increase the link range or shrink the side");
}

void write_topology(std::ostream& out, const Topology& top) {
  out << "nodes " << top.nodes.size() << " m " << format_double(top.link_range) << " wrap ";
  if (!top.wrap) {
    out << "none";
  } else if (top.wrap->width == top.wrap->height) {
    out << format_double(top.wrap->width);
  } else {
    out << format_double(top.wrap->width) << ',' << format_double(top.wrap->height);
  }
  out << '\n';

  std::vector<std::size_t> order(top.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return top.nodes[a].id < top.nodes[b].id;
  });

  for (std::size_t i : order) {
    const TopoNode& node = top.nodes[i];
    out << "node " << node.id << ' ' << format_double(node.x) << ' ' << format_double(node.y)
        << ' ' << (node.transmits ? "tx" : "rx") << '\n';
  }

  std::vector<std::pair<int, int>> links;
  for (std::size_t u = 0; u < top.out_links.size(); ++u) {
    for (int v : top.out_links[u]) {
      links.emplace_back(top.nodes[u].id, top.nodes[static_cast<std::size_t>(v)].id);
    }
  }
  std::sort(links.begin(), links.end());
  for (const auto& [u, v] : links) out << "link " << u << ' ' << v << '\n';
}

Topology read_topology(std::istream& in) {
  Topology top;
  std::string line;
  int line_no = 0;
  std::size_t expected_nodes = 0;
  bool saw_header = false;
  auto fail = [&](const std::string& message) {
    throw std::runtime_error("topology line " + std::to_string(line_no) + ": " + message);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "nodes") {
      std::string m_key, wrap_key, wrap_value;
      double m = 0;
      if (!(fields >> expected_nodes >> m_key >> m >> wrap_key >> wrap_value) ||
          m_key != "m" || wrap_key != "wrap")
        fail("expected 'nodes <count> m <m> wrap <none|w|wx,wy>'");
      top.link_range = m;
      if (wrap_value != "none") {
        const auto comma = wrap_value.find(',');
        try {
          if (comma == std::string::npos) {
            const double w = std::stod(wrap_value);
            top.wrap = Torus{w, w};
          } else {
            top.wrap = Torus{std::stod(wrap_value.substr(0, comma)),
                             std::stod(wrap_value.substr(comma + 1))};
          }
        } catch (const std::exception&) {
          fail("bad wrap value '" + wrap_value + "'");
        }
      }
      saw_header = true;
    } else if (tag == "node") {
      if (!saw_header) fail("node before header");
      TopoNode node;
      std::string mode;
      if (!(fields >> node.id >> node.x >> node.y >> mode) || (mode != "tx" && mode != "rx"))
        fail("expected 'node <id> <x> <y> <tx|rx>'");
      node.transmits = (mode == "tx");
      top.nodes.push_back(node);
    } else if (tag == "link") {
      if (top.nodes.size() != expected_nodes) fail("link lines must follow all node lines");
      if (top.out_links.empty()) top.out_links.assign(top.nodes.size(), {});
      int u = 0, v = 0;
      if (!(fields >> u >> v)) fail("expected 'link <u> <v>'");
      top.out_links[static_cast<std::size_t>(top.index_of_label(u))].push_back(
          top.index_of_label(v));
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!saw_header) throw std::runtime_error("topology: missing header line");
  if (top.nodes.size() != expected_nodes)
    throw std::runtime_error("topology: node count does not match header");
  if (top.out_links.empty()) top.out_links.assign(top.nodes.size(), {});
  for (auto& links : top.out_links) std::sort(links.begin(), links.end());
  top.name = "file";
  top.validate();
  return top;
}

void save_topology(const std::string& path, const Topology& top) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_topology(out, top);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  Topology top = read_topology(in);
  top.name = path;
  return top;
}

}  // namespace csma
