#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "csma/throughput.hpp"
#include "csma/topology.hpp"

using namespace csma;

TEST_CASE("line topology layout") {
  const Topology top = line_topology(1);
  CHECK(top.nodes.size() == 5u);
  CHECK(top.transmitter_count() == 3);

  const Topology line2 = line_topology(2);
  const int center = line2.index_of_label(0);
  const auto& links = line2.out_links[static_cast<std::size_t>(center)];
  REQUIRE(links.size() == 2u);
  CHECK(line2.nodes[static_cast<std::size_t>(links[0])].id == -1);
  CHECK(line2.nodes[static_cast<std::size_t>(links[1])].id == 1);

  // endpoints receive only
  CHECK_FALSE(line2.nodes[static_cast<std::size_t>(line2.index_of_label(3))].transmits);
  CHECK_FALSE(line2.nodes[static_cast<std::size_t>(line2.index_of_label(-3))].transmits);

  const ConflictSets sets = conflict_sets(line2, 1.0, 1.0);
  const auto& blockers = sets.blockers[static_cast<std::size_t>(center)];
  REQUIRE(blockers.size() == 2u);
  CHECK(line2.nodes[static_cast<std::size_t>(blockers[0])].id == -1);
  CHECK(line2.nodes[static_cast<std::size_t>(blockers[1])].id == 1);
}

TEST_CASE("line conflict sets coincide with the index-distance sets") {
  const int n = 6;
  const Topology top = line_topology(n);
  for (int beta : {1, 2, 3}) {
    for (int eta : {0, 2, 4}) {
      const ConflictSets sets = conflict_sets(top, beta, eta);
      const NodeSets idx = hidden_exposed_sets(beta, eta, n, Direction::right);
      const int center = top.index_of_label(0);
      const int receiver = top.index_of_label(1);

      // geometric blockers of node 0 = positions within index distance beta
      std::vector<int> blocker_labels;
      for (int w : sets.blockers[static_cast<std::size_t>(center)])
        blocker_labels.push_back(top.nodes[static_cast<std::size_t>(w)].id);
      for (int v = -(n + 1); v <= n + 1; ++v) {
        const bool expected = v != 0 && std::abs(v) <= beta;
        CHECK(std::count(blocker_labels.begin(), blocker_labels.end(), v) == (expected ? 1 : 0));
      }

      // hidden nodes = interferers of the receiver that escape the sender's sensing set
      std::vector<int> hidden_labels;
      for (int w : sets.interferers[static_cast<std::size_t>(receiver)]) {
        const int label = top.nodes[static_cast<std::size_t>(w)].id;
        if (std::abs(label) > beta && std::abs(label) <= n) hidden_labels.push_back(label);
      }
      std::sort(hidden_labels.begin(), hidden_labels.end());
      CHECK(hidden_labels == idx.hidden);
    }
  }
}

TEST_CASE("wrapped grid degrees and conflict set sizes") {
  const Topology grid = wrapped_grid(4, 4, 1.0);
  CHECK(grid.nodes.size() == 16u);
  for (const auto& links : grid.out_links) CHECK(links.size() == 4u);

  const ConflictSets narrow = conflict_sets(grid, 1.5, 1.0);
  for (const auto& blockers : narrow.blockers) CHECK(blockers.size() == 8u);

  // beta=2 adds the axis nodes at distance 2; on a 4-wide torus the +2 and -2
  // neighbours coincide, so only two distinct nodes join: 8 + 2 = 10, leaving
  // exactly the five distance->2 partners outside.
  const ConflictSets wide = conflict_sets(grid, 2.0, 1.0);
  for (const auto& blockers : wide.blockers) CHECK(blockers.size() == 10u);

  // torus distance never exceeds the planar one
  Topology flat = grid;
  flat.wrap.reset();
  for (int u = 0; u < 16; ++u) {
    for (int v = 0; v < 16; ++v) CHECK(grid.distance(u, v) <= flat.distance(u, v) + 1e-12);
  }
}

TEST_CASE("conflict sets nest as the range grows") {
  const Topology top = random_topology(12, 3.0, 1.2, 5);
  const ConflictSets small = conflict_sets(top, 0.8, 1.0);
  const ConflictSets big = conflict_sets(top, 1.4, 1.0);
  for (std::size_t v = 0; v < top.nodes.size(); ++v) {
    for (int w : small.blockers[v]) {
      CHECK(std::count(big.blockers[v].begin(), big.blockers[v].end(), w) == 1);
    }
  }
}

TEST_CASE("random topology determinism and failure modes") {
  const Topology a = random_topology(16, 3.0, 1.0, 7);
  const Topology b = random_topology(16, 3.0, 1.0, 7);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].x == b.nodes[i].x);
    CHECK(a.nodes[i].y == b.nodes[i].y);
  }
  CHECK(a.out_links == b.out_links);

  const Topology c = random_topology(16, 3.0, 1.0, 8);
  bool moved = false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) moved |= a.nodes[i].x != c.nodes[i].x;
  CHECK(moved);

  // two nodes in a tiny box are always connected
  CHECK_NOTHROW(random_topology(2, 0.5, 1.0, 1));
  // hopelessly sparse instances are rejected with advice
  CHECK_THROWS_AS(random_topology(16, 100.0, 1.0, 1), std::runtime_error);
}

TEST_CASE("distance symmetry") {
  const Topology top = random_topology(10, 3.0, 1.5, 3);
  for (int u = 0; u < 10; ++u) {
    for (int v = 0; v < 10; ++v) CHECK(top.distance(u, v) == top.distance(v, u));
  }
}

TEST_CASE("file format round-trips losslessly") {
  for (const Topology& top :
       {line_topology(3), wrapped_grid(4, 4, 1.0), wrapped_grid(3, 5, 0.75),
        random_topology(16, 3.0, 1.0, 7)}) {
    std::ostringstream first;
    write_topology(first, top);
    std::istringstream in(first.str());
    const Topology reread = read_topology(in);
    std::ostringstream second;
    write_topology(second, reread);
    CHECK(first.str() == second.str());
    CHECK(reread.nodes.size() == top.nodes.size());
    CHECK(reread.transmitter_count() == top.transmitter_count());
  }
}

TEST_CASE("malformed topology files fail with the line number") {
  std::istringstream missing_header("node 0 0 0 tx\n");
  CHECK_THROWS_WITH_AS(read_topology(missing_header), doctest::Contains("line 1"),
                       std::runtime_error);

  std::istringstream bad_mode("nodes 1 m 1 wrap none\nnode 0 0 0 maybe\n");
  CHECK_THROWS_WITH_AS(read_topology(bad_mode), doctest::Contains("line 2"), std::runtime_error);

  std::istringstream bad_count("nodes 2 m 1 wrap none\nnode 0 0 0 tx\n");
  CHECK_THROWS_AS(read_topology(bad_count), std::runtime_error);
}

TEST_CASE("generator validation") {
  CHECK_THROWS_AS(line_topology(0), std::domain_error);
  CHECK_THROWS_AS(wrapped_grid(1, 4, 1.0), std::domain_error);
  CHECK_THROWS_AS(random_topology(1, 1.0, 1.0, 1), std::domain_error);
}
