#include "csma/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "csma/csv.hpp"
#include "csma/rng.hpp"
#include "csma/stats.hpp"

namespace csma {

void SimConfig::validate(const Topology& top) const {
  if (beta < 0 || eta < 0) throw std::domain_error("sim: ranges must be >= 0");
  if (!(sigma > 0)) throw std::domain_error("sim: sigma must be > 0");
  if (psi < 0 || psi > 1) throw std::domain_error("sim: psi must lie in [0, 1]");
  if (!(horizon > 0)) throw std::domain_error("sim: horizon must be > 0");
  if (warmup_fraction < 0 || warmup_fraction >= 1)
    throw std::domain_error("sim: warmup_fraction must lie in [0, 1)");
  if (batches < 2) throw std::domain_error("sim: need at least 2 batches for a variance estimate");
  if (sample_interval < 0) throw std::domain_error("sim: sample_interval must be >= 0");
  if (sample_interval > 0 && top.transmitter_count() > 64)
    throw std::domain_error("sim: occupancy sampling supports at most 64 transmitters");
  if (!uniform_destination) {
    for (std::size_t v = 0; v < top.nodes.size(); ++v) {
      if (top.nodes[v].transmits && top.out_links[v].size() != 2)
        throw std::domain_error(
            "sim: directed (psi) destination mode requires out-degree 2 transmitters");
    }
  }
}

namespace {

enum EventKind : int { kAttempt = 0, kEndTx = 1 };

struct Event {
  double time;
  int node;
  int kind;
};

// Min-heap order with a total tie-break so event order is reproducible.
struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.node != b.node) return a.node > b.node;
    return a.kind > b.kind;
  }
};

}  // namespace

SimStats simulate(const Topology& top, const SimConfig& cfg) {
  top.validate();
  cfg.validate(top);

  const int node_count = static_cast<int>(top.nodes.size());
  const ConflictSets sets = conflict_sets(top, cfg.beta, cfg.eta);

  // Transmitters in ascending label order; they own the stats rows and the
  // occupancy bitmask bits.
  std::vector<int> tx_indices;
  for (int v = 0; v < node_count; ++v) {
    if (top.nodes[static_cast<std::size_t>(v)].transmits) tx_indices.push_back(v);
  }
  std::sort(tx_indices.begin(), tx_indices.end(), [&](int a, int b) {
    return top.nodes[static_cast<std::size_t>(a)].id < top.nodes[static_cast<std::size_t>(b)].id;
  });
  std::vector<int> tx_slot(static_cast<std::size_t>(node_count), -1);
  for (std::size_t s = 0; s < tx_indices.size(); ++s)
    tx_slot[static_cast<std::size_t>(tx_indices[s])] = static_cast<int>(s);
  const std::size_t tx_count = tx_indices.size();

  std::vector<SplitMix64> rng;
  rng.reserve(top.nodes.size());
  for (const TopoNode& node : top.nodes)
    rng.emplace_back(derive_stream(cfg.seed, static_cast<std::uint64_t>(
                                                 static_cast<std::int64_t>(node.id))));

  const double warmup = cfg.horizon * cfg.warmup_fraction;
  const double measured = cfg.horizon - warmup;
  const double batch_len = measured / cfg.batches;

  std::vector<char> active(static_cast<std::size_t>(node_count), 0);
  std::vector<std::uint64_t> attempts(tx_count, 0), blocked(tx_count, 0), collided(tx_count, 0),
      success(tx_count, 0);
  std::vector<std::vector<std::uint64_t>> batch_success(
      tx_count, std::vector<std::uint64_t>(static_cast<std::size_t>(cfg.batches), 0));

  SimStats stats;
  const bool sampling = cfg.sample_interval > 0;
  double next_sample = warmup + cfg.sample_interval;

  auto record_sample = [&]() {
    std::uint64_t mask = 0;
    for (std::size_t s = 0; s < tx_count; ++s) {
      if (active[static_cast<std::size_t>(tx_indices[s])]) mask |= (std::uint64_t{1} << s);
    }
    ++stats.occupancy[mask];
    ++stats.occupancy_samples;
  };

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  for (int v : tx_indices)
    queue.push({rng[static_cast<std::size_t>(v)].exponential(cfg.sigma), v, kAttempt});

  while (!queue.empty()) {
    const Event ev = queue.top();
    if (ev.time > cfg.horizon) break;
    while (sampling && next_sample < ev.time && next_sample <= cfg.horizon) {
      record_sample();
      next_sample += cfg.sample_interval;
    }
    queue.pop();

    const int v = ev.node;
    auto& gen = rng[static_cast<std::size_t>(v)];

    if (ev.kind == kEndTx) {
      active[static_cast<std::size_t>(v)] = 0;
      queue.push({ev.time + gen.exponential(cfg.sigma), v, kAttempt});
      continue;
    }

    const bool counted = ev.time >= warmup;
    const int slot = tx_slot[static_cast<std::size_t>(v)];
    if (counted) ++attempts[static_cast<std::size_t>(slot)];

    bool is_blocked = false;
    for (int w : sets.blockers[static_cast<std::size_t>(v)]) {
      if (active[static_cast<std::size_t>(w)]) {
        is_blocked = true;
        break;
      }
    }
    if (is_blocked) {
      if (counted) ++blocked[static_cast<std::size_t>(slot)];
      queue.push({ev.time + gen.exponential(cfg.sigma), v, kAttempt});
      continue;
    }

    // Destination, then duration: a fixed draw order per activation.
    const auto& links = top.out_links[static_cast<std::size_t>(v)];
    int dst;
    if (cfg.uniform_destination) {
      const auto pick = static_cast<std::size_t>(gen.uniform01() * links.size());
      dst = links[std::min(pick, links.size() - 1)];
    } else {
      const int a = links[0];
      const int b = links[1];
      const bool a_is_right = top.nodes[static_cast<std::size_t>(a)].x >
                              top.nodes[static_cast<std::size_t>(b)].x;
      const int right = a_is_right ? a : b;
      const int left = a_is_right ? b : a;
      dst = (gen.uniform01() < cfg.psi) ? right : left;
    }
    const double duration = gen.exponential(1.0);

    // Perfect capture: success is decided once, now, by the interferers of
    // the receiver (the transmitter itself does not count).
    bool fails = false;
    for (int w : sets.interferers[static_cast<std::size_t>(dst)]) {
      if (w != v && active[static_cast<std::size_t>(w)]) {
        fails = true;
        break;
      }
    }

    active[static_cast<std::size_t>(v)] = 1;
    queue.push({ev.time + duration, v, kEndTx});

    if (cfg.check_hardcore) {
      for (int w : sets.blockers[static_cast<std::size_t>(v)]) {
        if (active[static_cast<std::size_t>(w)])
          throw std::runtime_error("sim: hard-core constraint violated");
      }
    }

    if (counted) {
      if (fails) {
        ++collided[static_cast<std::size_t>(slot)];
      } else {
        ++success[static_cast<std::size_t>(slot)];
        const auto batch = std::min<std::size_t>(
            static_cast<std::size_t>((ev.time - warmup) / batch_len),
            static_cast<std::size_t>(cfg.batches - 1));
        ++batch_success[static_cast<std::size_t>(slot)][batch];
      }
    }
  }

  while (sampling && next_sample <= cfg.horizon) {
    record_sample();
    next_sample += cfg.sample_interval;
  }

  stats.observed_time = measured;
  stats.per_node.resize(tx_count);
  std::vector<double> node_batches(static_cast<std::size_t>(cfg.batches));
  std::vector<double> all_batches(static_cast<std::size_t>(cfg.batches), 0.0);
  for (std::size_t s = 0; s < tx_count; ++s) {
    NodeStats& row = stats.per_node[s];
    row.node_id = top.nodes[static_cast<std::size_t>(tx_indices[s])].id;
    row.attempts = attempts[s];
    row.blocked = blocked[s];
    row.collided = collided[s];
    row.success = success[s];
    for (int b = 0; b < cfg.batches; ++b) {
      const double rate = static_cast<double>(batch_success[s][static_cast<std::size_t>(b)]) / batch_len;
      node_batches[static_cast<std::size_t>(b)] = rate;
      all_batches[static_cast<std::size_t>(b)] += rate / static_cast<double>(tx_count);
    }
    row.throughput_mean = mean(node_batches);
    row.throughput_stderr = batch_stderr(node_batches);

    stats.aggregate.attempts += row.attempts;
    stats.aggregate.blocked += row.blocked;
    stats.aggregate.collided += row.collided;
    stats.aggregate.success += row.success;
  }
  stats.aggregate.node_id = -1;
  stats.aggregate.throughput_mean = mean(all_batches);
  stats.aggregate.throughput_stderr = batch_stderr(all_batches);
  return stats;
}

std::vector<ThresholdEstimateRow> estimate_threshold_empirical(
    const Topology& top, double eta, const std::vector<double>& sigma_grid,
    const std::vector<double>& beta_grid, const SimConfig& base_cfg) {
  if (sigma_grid.empty() || beta_grid.empty())
    throw std::invalid_argument("estimate_threshold_empirical: empty grid");

  std::vector<ThresholdEstimateRow> rows;
  rows.reserve(sigma_grid.size());
  for (std::size_t si = 0; si < sigma_grid.size(); ++si) {
    ThresholdEstimateRow row;
    row.sigma = sigma_grid[si];
    double best = -1, best_err = 0, second = -1, second_err = 0;
    for (std::size_t bi = 0; bi < beta_grid.size(); ++bi) {
      SimConfig cfg = base_cfg;
      cfg.eta = eta;
      cfg.sigma = sigma_grid[si];
      cfg.beta = beta_grid[bi];
      cfg.seed = derive_stream(base_cfg.seed, si * beta_grid.size() + bi);
      const SimStats stats = simulate(top, cfg);
      const double value = stats.aggregate.throughput_mean;
      const double err = stats.aggregate.throughput_stderr;
      if (value > best) {
        second = best;
        second_err = best_err;
        row.runner_up_beta = row.best_beta;
        best = value;
        best_err = err;
        row.best_beta = beta_grid[bi];
      } else if (value > second) {
        second = value;
        second_err = err;
        row.runner_up_beta = beta_grid[bi];
      }
    }
    row.best_throughput = best;
    row.best_stderr = best_err;
    row.significant = beta_grid.size() < 2 ||
                      (best - second) > 2.0 * std::sqrt(best_err * best_err + second_err * second_err);
    rows.push_back(row);
  }
  return rows;
}

void write_results_header(std::ostream& out) {
  out << "topology_id,beta,eta,sigma,seed,node_id,attempts,blocked,collided,success,"
         "throughput,stderr\n";
}

void write_results_rows(std::ostream& out, const std::string& topology_id, const SimConfig& cfg,
                        const SimStats& stats) {
  auto emit = [&](const NodeStats& row, const std::string& node_label) {
    out << topology_id << ',' << format_double(cfg.beta) << ',' << format_double(cfg.eta) << ','
        << format_double(cfg.sigma) << ',' << cfg.seed << ',' << node_label << ',' << row.attempts
        << ',' << row.blocked << ',' << row.collided << ',' << row.success << ','
        << format_double(row.throughput_mean) << ',' << format_double(row.throughput_stderr)
        << '\n';
  };
  for (const NodeStats& row : stats.per_node) emit(row, std::to_string(row.node_id));
  emit(stats.aggregate, "ALL");
}

}  // namespace csma
