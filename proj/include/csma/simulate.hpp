#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "csma/topology.hpp"

namespace csma {

struct SimConfig {
  double beta = 1.0;   // Euclidean sensing range
  double eta = 1.0;    // Euclidean interference range
  double sigma = 1.0;  // activation rate: backoff is exponential with mean 1/sigma
  double psi = 0.5;    // directed mode: probability of the right-hand neighbour

  // true: destination drawn uniformly from the out-links (general topologies);
  // false: right/left neighbour by psi (line topologies, out-degree 2).
  bool uniform_destination = true;

  double horizon = 1e5;
  double warmup_fraction = 0.1;  // in [0, 1)
  std::uint64_t seed = 1;
  int batches = 20;  // >= 2 so the batch-means variance is defined

  // > 0: record the active-transmitter bitmask every sample_interval time
  // units after warmup (at most 64 transmitters).
  double sample_interval = 0;

  // Re-verify the pairwise sensing constraint at every activation.
  bool check_hardcore = false;

  void validate(const Topology& top) const;
};

struct NodeStats {
  int node_id = -1;  // -1 marks the aggregate row
  std::uint64_t attempts = 0;
  std::uint64_t blocked = 0;
  std::uint64_t collided = 0;
  std::uint64_t success = 0;
  double throughput_mean = 0;
  double throughput_stderr = 0;
};

struct SimStats {
  std::vector<NodeStats> per_node;  // one entry per transmitter, ascending label
  NodeStats aggregate;              // counters summed; throughput = per-transmitter average
  double observed_time = 0;
  std::uint64_t occupancy_samples = 0;
  std::map<std::uint64_t, std::uint64_t> occupancy;  // bitmask (transmitter order) -> samples
};

// Event-driven execution of the sensing dynamics: an idle transmitter holds
// an exponential(sigma) timer; an expiry with an active node within beta is a
// blocked attempt (fresh timer), otherwise the node transmits for an
// exponential(1) duration. The transmission fails iff some other node within
// eta of the receiver is active at its start; it occupies the channel either
// way. Counters accumulate after warmup; throughput uses batch means.
SimStats simulate(const Topology& top, const SimConfig& cfg);

struct ThresholdEstimateRow {
  double sigma = 0;
  double best_beta = 0;
  double best_throughput = 0;
  double best_stderr = 0;
  double runner_up_beta = 0;
  bool significant = false;  // best beats runner-up by 2 combined standard errors
};

// For each sigma, simulates every beta in the grid and reports the empirical
// argmax with a significance flag.
std::vector<ThresholdEstimateRow> estimate_threshold_empirical(
    const Topology& top, double eta, const std::vector<double>& sigma_grid,
    const std::vector<double>& beta_grid, const SimConfig& base_cfg);

// Results CSV: header plus one row per transmitter and an ALL aggregate row.
void write_results_header(std::ostream& out);
void write_results_rows(std::ostream& out, const std::string& topology_id, const SimConfig& cfg,
                        const SimStats& stats);

}  // namespace csma
