// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each check pins its tolerance here, in code.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "csma/optimize.hpp"
#include "csma/partition.hpp"
#include "csma/roots.hpp"
#include "csma/rng.hpp"
#include "csma/simulate.hpp"
#include "csma/stats.hpp"
#include "csma/throughput.hpp"
#include "csma/topology.hpp"

namespace fs = std::filesystem;
using namespace csma;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool condition, const std::string& label) {
    if (!condition) {
      ok = false;
      notes.push_back("failed: " + label);
    }
  }
  void note(const std::string& text) { notes.push_back(text); }
};

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("csma_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

int run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string command =
      env_prefix + " " + std::string(CSMA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return std::system(command.c_str());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// --------------------------------------------------------------------------

void criterion_1_partition(Check& check) {
  for (int beta = 0; beta <= 5; ++beta) {
    for (double sigma : {0.1, 0.5, 1.0, 5.0}) {
      const PartitionTable table = partition_recursive(beta, sigma, 16);
      for (int nodes = 1; nodes <= 16; ++nodes) {
        if (rel_diff(table.z(nodes), partition_bruteforce(nodes, beta, sigma)) >= 1e-12) {
          check.require(false, "recursion vs brute force at beta=" + std::to_string(beta));
          return;
        }
      }
    }
  }
  double worst = 0;
  for (int beta = 0; beta <= 20; ++beta) {
    for (double sigma : {0.1, 1.0, 10.0}) {
      const RootSet roots = all_roots(beta, sigma);
      const PartitionTable table = partition_recursive(beta, sigma, 200);
      for (int i = 0; i <= 200; ++i) {
        const double err = rel_diff(partition_spectral(roots, i), std::exp(table.log_z(i)));
        worst = std::max(worst, err);
      }
    }
  }
  check.note("worst spectral-vs-recursion relative error " + fmt(worst));
  check.require(worst < 1e-9, "spectral form within 1e-9 of the recursion");
}

void criterion_2_roots(Check& check) {
  double worst_series = 0;
  for (int beta = 1; beta <= 8; ++beta) {
    const double xi = convergence_radius(beta);
    for (double factor : {0.1, 0.5, 0.99, 1.01, 2.0, 10.0}) {
      const double sigma = factor * xi;
      const RootSet rs = all_roots(beta, sigma);

      std::complex<double> sum(0, 0);
      for (std::size_t j = 0; j < rs.roots.size(); ++j) {
        const Complex z = rs.roots[j];
        Complex zb(1, 0);
        for (int k = 0; k < beta; ++k) zb *= z;
        check.require(std::abs(zb * (z - 1.0) - sigma) <= 1e-10 * (1 + sigma),
                      "residual at beta=" + std::to_string(beta) + " factor=" + fmt(factor));
        if (j > 0) {
          check.require(std::abs(z) < rs.roots[0].real(), "dominance");
          for (std::size_t k = j + 1; k < rs.roots.size(); ++k)
            check.require(std::abs(rs.roots[j] - rs.roots[k]) >= 1e-8, "distinctness");
        }
        sum += z;
      }
      check.require(std::abs(sum - std::complex<double>(1, 0)) <= 1e-9, "Vieta sum");

      for (int j = 0; j <= beta; ++j) {
        const SeriesResult sr = (sigma <= xi) ? series_small_sigma(beta, sigma, j)
                                              : series_large_sigma(beta, sigma, j);
        worst_series =
            std::max(worst_series, std::abs(sr.value - rs.roots[static_cast<std::size_t>(j)]));
      }
    }
  }
  check.note("worst series-vs-polished distance " + fmt(worst_series));
  check.require(worst_series < 1e-8, "series within 1e-8 of polished roots");
}

void criterion_3_throughput(Check& check) {
  // rational cross-check from exact integer partition values
  const double z4 = partition_bruteforce(4, 1, 1.0);
  const double z11 = partition_bruteforce(11, 1, 1.0);
  check.require(z4 == 8.0 && z11 == 233.0, "integer partition values 8 and 233");
  ModelParams params{1, 0, 1.0, 0.5, 5};
  const double theta5 = throughput_finite(params).value;
  check.note("theta_5 = " + fmt(theta5) + ", 64/233 = " + fmt(64.0 / 233.0));
  check.require(rel_diff(theta5, z4 * z4 / z11) < 1e-12, "theta_5 equals 64/233");

  const double phi = 0.5 * (1 + std::sqrt(5.0));
  check.require(std::fabs(throughput_infinite(1, 0, 1.0).value - (phi - 1) / (2 * phi - 1)) < 1e-12,
                "golden-ratio closed form");

  double worst = 0;
  for (int eta : {1, 3, 5, 8}) {
    for (double sigma : {0.05, 0.3, 1.0, 4.0, 20.0}) {
      for (double beta = eta - 1.0; beta <= eta + 1.0 + 1e-12; beta += 0.01) {
        worst = std::max(worst, rel_diff(throughput_infinite(beta, eta, sigma).value,
                                         throughput_infinite_middle_form(beta, eta, sigma)));
      }
    }
  }
  check.note("worst middle-branch identity error " + fmt(worst));
  check.require(worst < 1e-12, "alternative middle form agrees to 1e-12");
}

void criterion_4_shape(Check& check) {
  for (int eta : {3, 5, 8}) {
    for (double sigma : {0.1, 1.0, 10.0}) {
      double prev = throughput_infinite(0.01, eta, sigma).value;
      for (double beta = 0.02; beta <= eta - 1.0 + 1e-12; beta += 0.01) {
        const double cur = throughput_infinite(beta, eta, sigma).value;
        if (!(cur > prev)) {
          check.require(false, "increasing on (0, eta-1] at eta=" + std::to_string(eta) +
                                   " sigma=" + fmt(sigma) + " beta=" + fmt(beta));
          return;
        }
        prev = cur;
      }
      prev = throughput_infinite(eta + 1.0, eta, sigma).value;
      for (double beta = eta + 1.01; beta <= eta + 11.0; beta += 0.01) {
        const double cur = throughput_infinite(beta, eta, sigma).value;
        if (!(cur < prev)) {
          check.require(false, "decreasing on [eta+1, inf) at eta=" + std::to_string(eta) +
                                   " sigma=" + fmt(sigma) + " beta=" + fmt(beta));
          return;
        }
        prev = cur;
      }
    }
  }
}

void criterion_5_threshold(Check& check) {
  const ThresholdResult th = threshold_interval(5, 0);
  check.note("[sigma_min, sigma_max] = [" + fmt(th.sigma_min) + ", " + fmt(th.sigma_max) + "]");
  check.require(th.bound_low <= th.sigma_min && th.sigma_max <= th.bound_high,
                "contained in the analytic enclosure");
  check.require(std::fabs(th.bound_low - 0.15246) < 5e-5 && std::fabs(th.bound_high - 0.18548) < 5e-5,
                "enclosure endpoints near 0.15246 and 0.18548");
  check.require(0.15 < th.sigma_min && th.sigma_max < 0.19, "inside the 0.15..0.19 window");

  check.require(optimal_beta_continuous(5, th.sigma_min * 0.9) == 4.0, "beta* = 4 below the band");
  check.require(optimal_beta_continuous(5, th.sigma_max * 1.1) == 6.0, "beta* = 6 above the band");
  double prev = 0;
  for (int k = 0; k <= 20; ++k) {
    const double sigma = th.sigma_min + (th.sigma_max - th.sigma_min) * k / 20.0;
    const double beta_star = optimal_beta_continuous(5, sigma);
    check.require(beta_star >= prev - 1e-9, "beta* non-decreasing in the band");
    prev = beta_star;
  }

  const double err5_min = rel_diff(th.approx_min, th.sigma_min);
  const double err5_max = rel_diff(th.approx_max, th.sigma_max);
  check.note("estimate errors at eta=5: " + fmt(err5_min * 100) + "% / " + fmt(err5_max * 100) + "%");
  check.require(err5_min < 0.02 && err5_max < 0.02, "estimates within 2% at eta=5");

  const ThresholdResult th20 = threshold_interval(20, 0);
  const double err20_min = rel_diff(th20.approx_min, th20.sigma_min);
  const double err20_max = rel_diff(th20.approx_max, th20.sigma_max);
  check.note("estimate errors at eta=20: " + fmt(err20_min * 100) + "% / " + fmt(err20_max * 100) +
             "%");
  check.require(err20_min < 0.005 && err20_max < 0.005, "estimates within 0.5% at eta=20");
}

void criterion_6_width(Check& check) {
  const double tau = golden_ratio_conjugate();
  const double limit = 2.0 * std::exp(tau) / (7.0 + 4.0 * tau);
  const ThresholdResult th = threshold_interval(200, 0);
  const double scaled = (th.sigma_max - th.sigma_min) * 201.0 * 201.0;
  check.note("width*(eta+1)^2 = " + fmt(scaled) + ", 2e^tau/(7+4tau) = " + fmt(limit));
  check.require(std::fabs(scaled - limit) <= 0.1 * limit, "within 10% of the limit constant");
}

void criterion_7_max_throughput(Check& check) {
  auto scaled_max = [&](int eta) {
    const double beta_star = optimal_beta_continuous(eta, 1.0);
    double best = throughput_infinite(beta_star, eta, 1.0).value;
    // coarse sweep to confirm beta* really is the global argmax
    for (double beta = 1.0; beta <= eta + 50.0; beta += 1.0)
      best = std::max(best, throughput_infinite(beta, eta, 1.0).value);
    return best * (eta + 2.0);
  };
  const double v100 = scaled_max(100);
  const double v1000 = scaled_max(1000);
  check.note("max theta * (eta+2): eta=100 -> " + fmt(v100) + ", eta=1000 -> " + fmt(v1000));
  check.require(v1000 >= 0.85 && v1000 <= 1.0,
                "value in [0.85, 1.0] at eta=1000 (exact model value is 0.8404; see README)");
  check.require(std::fabs(1.0 - v1000) < std::fabs(1.0 - v100), "closer to 1 than at eta=100");
}

void criterion_8_fig3(Check& check) {
  const fs::path out = scratch_dir() / "fig3.csv";
  check.require(run_cli("figure fig3 --out " + out.string()) == 0, "fig3 CSV production");

  std::map<int, std::vector<std::pair<double, double>>> curves;  // beta -> (sigma, theta)
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string beta_s, sigma_s, theta_s;
    std::getline(fields, beta_s, ',');
    std::getline(fields, sigma_s, ',');
    std::getline(fields, theta_s, ',');
    curves[std::stoi(beta_s)].emplace_back(std::stod(sigma_s), std::stod(theta_s));
  }
  check.require(curves.count(6) && curves.count(7) && curves.count(8), "beta 6, 7, 8 present");

  const auto& c8 = curves[8];
  bool monotone = true;
  for (std::size_t i = 1; i < c8.size(); ++i) monotone &= c8[i].second > c8[i - 1].second;
  check.require(monotone, "beta=8 curve monotone increasing in sigma");
  check.require(std::fabs(c8.back().first - 1e4) < 1e-6, "grid ends at sigma = 1e4");
  const double gap = std::fabs(c8.back().second - 1.0 / 9.0);
  check.note("beta=8 at sigma=1e4: theta=" + fmt(c8.back().second) + ", |theta-1/9|=" + fmt(gap) +
             " (relative " + fmt(gap * 9 * 100) + "%)");
  check.require(gap <= 0.02, "beta=8 within 0.02 of 1/9 at sigma=1e4");

  for (int beta : {6, 7}) {
    const auto& curve = curves[beta];
    const double at_end = curve.back().second;
    check.note("beta=" + std::to_string(beta) + " at sigma=1e4: theta=" + fmt(at_end));
    check.require(at_end < 0.05 && at_end < 0.5 * c8.back().second,
                  "beta=" + std::to_string(beta) + " falls away from the beta=8 plateau");
    // decaying toward 0 over the last decade of the grid
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (curve[i].first > 1e3)
        check.require(curve[i].second < curve[i - 1].second,
                      "beta=" + std::to_string(beta) + " decreasing tail");
    }
  }
}

void criterion_9_fig5_fig7(Check& check) {
  // finite vs infinite error near the optimum (eta=4, n=100)
  double worst = 0;
  for (double sigma : {0.25, 5.0}) {
    for (int beta : {3, 4, 5}) {
      ModelParams params{beta, 4, sigma, 0.5, 100};
      worst = std::max(worst, rel_diff(throughput_finite(params).value,
                                       throughput_infinite(beta, 4, sigma).value));
    }
  }
  check.note("worst |theta_100-theta|/theta near the optimum: " + fmt(worst));
  check.require(worst < 1e-4, "finite size error small near the optimum");

  // n=30 jump bracketed by the closed-form estimates
  const ThresholdResult th = threshold_interval(5, 0);
  int prev = 4;
  bool monotone = true;
  for (int k = 0; k <= 80; ++k) {
    const double sigma = 0.15 + 0.0005 * k;
    const int beta = optimal_beta_finite(30, 5, sigma, 24);
    monotone &= beta >= prev;
    if (sigma <= th.approx_min)
      check.require(beta == 4, "beta*_30 = 4 at sigma=" + fmt(sigma) + " (below approx_min)");
    if (sigma >= th.approx_max)
      check.require(beta == 6, "beta*_30 = 6 at sigma=" + fmt(sigma) + " (above approx_max)");
    prev = beta;
  }
  check.require(monotone, "beta*_30 non-decreasing across the window");
  check.require(optimal_beta_finite(30, 5, 0.15, 24) == 4, "beta*_30(0.15) = 4");
  check.require(optimal_beta_finite(30, 5, 0.19, 24) == 6, "beta*_30(0.19) = 6");
}

void criterion_10_sim_vs_theory(Check& check) {
  struct Case {
    int n;
    int beta;
    int eta;
    bool collision_free;
  };
  for (const Case& c : {Case{3, 1, 0, true}, Case{5, 1, 2, false}}) {
    const Topology top = line_topology(c.n);
    ModelParams params{c.beta, c.eta, 1.0, 0.5, c.n};
    const double theory = throughput_finite(params).value;
    for (std::uint64_t seed : {1, 2, 3}) {
      SimConfig cfg;
      cfg.beta = c.beta;
      cfg.eta = c.eta;
      cfg.sigma = 1.0;
      cfg.uniform_destination = false;
      cfg.horizon = 1e6;
      cfg.batches = 20;
      cfg.seed = seed;
      const SimStats stats = simulate(top, cfg);
      const NodeStats* center = nullptr;
      for (const NodeStats& row : stats.per_node)
        if (row.node_id == 0) center = &row;
      const double dev = std::fabs(center->throughput_mean - theory);
      check.note("n=" + std::to_string(c.n) + " seed=" + std::to_string(seed) + ": sim=" +
                 fmt(center->throughput_mean) + " theory=" + fmt(theory) + " (" +
                 fmt(dev / center->throughput_stderr) + " se)");
      check.require(dev < 3 * center->throughput_stderr, "within 3 standard errors");
      if (c.collision_free)
        check.require(stats.aggregate.collided == 0, "exact zero collisions for beta >= eta+1");
      else
        check.require(stats.aggregate.collided > 0, "collisions occur for beta < eta");
    }
  }
}

void criterion_11_occupancy(Check& check) {
  struct Case {
    int beta;
    double sigma;
  };
  for (const Case& c : {Case{1, 0.5}, Case{2, 2.0}}) {
    // expected distribution by direct enumeration over the 5 transmitters
    std::vector<double> weight(32, 0.0);
    double z_total = 0;
    for (int mask = 0; mask < 32; ++mask) {
      bool feasible = true;
      for (int d = 1; d <= c.beta; ++d)
        if (mask & (mask << d) & 31) feasible = false;
      if (!feasible) continue;
      weight[static_cast<std::size_t>(mask)] = std::pow(c.sigma, __builtin_popcount(mask));
      z_total += weight[static_cast<std::size_t>(mask)];
    }

    for (std::uint64_t seed : {1, 2, 3}) {
      SimConfig cfg;
      cfg.beta = c.beta;
      cfg.eta = 0;
      cfg.sigma = c.sigma;
      cfg.uniform_destination = false;
      cfg.horizon = 3e5;
      cfg.sample_interval = 10;
      cfg.seed = seed;
      const SimStats stats = simulate(line_topology(2), cfg);

      std::vector<double> observed, expected;
      for (int mask = 0; mask < 32; ++mask) {
        if (weight[static_cast<std::size_t>(mask)] == 0) continue;
        const auto it = stats.occupancy.find(static_cast<std::uint64_t>(mask));
        observed.push_back(it == stats.occupancy.end() ? 0.0 : static_cast<double>(it->second));
        expected.push_back(static_cast<double>(stats.occupancy_samples) *
                           weight[static_cast<std::size_t>(mask)] / z_total);
      }
      const double stat = chi_square_statistic(observed, expected);
      const double bound = chi_square_quantile(static_cast<int>(observed.size()) - 1, 0.999);
      check.note("beta=" + std::to_string(c.beta) + " sigma=" + fmt(c.sigma) + " seed=" +
                 std::to_string(seed) + ": chi2=" + fmt(stat) + " < " + fmt(bound));
      check.require(stat < bound, "chi-square below the 0.999 quantile");
    }
  }
}

void criterion_12_grid(Check& check) {
  const Topology grid = wrapped_grid(4, 4, 1.0);
  SimConfig base;
  base.horizon = 4e4;
  base.seed = 2024;

  const auto rows =
      estimate_threshold_empirical(grid, 1.0, {0.05, 20.0}, {0.0, 1.0, 1.5, 2.0}, base);
  check.note("sigma=0.05: argmax beta=" + fmt(rows[0].best_beta) +
             (rows[0].significant ? " (significant)" : " (not significant)"));
  check.note("sigma=20: argmax beta=" + fmt(rows[1].best_beta) +
             (rows[1].significant ? " (significant)" : " (not significant)"));
  check.require(rows[0].best_beta == 0.0 && rows[0].significant,
                "beta=0 optimal at sigma=0.05, significant at 2 combined se");
  check.require(rows[1].best_beta == 2.0 && rows[1].significant,
                "beta=2 optimal at sigma=20, significant at 2 combined se");

  double prev = -1;
  for (double sigma : {5.0, 10.0, 20.0}) {
    SimConfig cfg = base;
    cfg.beta = 2.0;
    cfg.eta = 1.0;
    cfg.sigma = sigma;
    cfg.horizon = 1.5e5;
    cfg.seed = derive_stream(base.seed, static_cast<std::uint64_t>(sigma));
    const SimStats stats = simulate(grid, cfg);
    check.note("beta=2 sigma=" + fmt(sigma) + ": throughput=" +
               fmt(stats.aggregate.throughput_mean) + " +- " +
               fmt(stats.aggregate.throughput_stderr));
    check.require(stats.aggregate.throughput_mean >= prev,
                  "beta=2 throughput non-decreasing at sigma=" + fmt(sigma));
    prev = stats.aggregate.throughput_mean;
  }
  check.require(prev > 0.1, "beta=2 approaches a positive limit");
}

void criterion_13_determinism(Check& check) {
  const fs::path dir = scratch_dir();
  const fs::path a = dir / "det_a.csv";
  const fs::path b = dir / "det_b.csv";

  check.require(run_cli("figure fig8 --horizon 2000 --seed 5 --out " + a.string(),
                        "CSMA_WORKERS=3") == 0,
                "fig8 run 1");
  check.require(run_cli("figure fig8 --horizon 2000 --seed 5 --out " + b.string(),
                        "CSMA_WORKERS=3") == 0,
                "fig8 run 2");
  check.require(slurp(a) == slurp(b), "parallel fig8 byte-identical across runs");

  const fs::path c = dir / "det_c.csv";
  check.require(run_cli("figure fig8 --horizon 2000 --seed 5 --out " + c.string(),
                        "CSMA_WORKERS=1") == 0,
                "fig8 run 3 (serial)");
  check.require(slurp(a) == slurp(c), "serial and parallel runs byte-identical");

  const fs::path cfg_path = dir / "det.cfg";
  const fs::path d = dir / "det_d.csv";
  const fs::path e = dir / "det_e.csv";
  for (const fs::path* out : {&d, &e}) {
    std::ofstream cfg(cfg_path);
    cfg << "[topology]\nkind=grid\nrows=4\ncols=4\n\n[sim]\neta=1\nhorizon=5000\nseed=9\n"
        << "[grid]\nbeta=0,2\nsigma=0.5,5\nseeds=1,2\n\n[output]\npath=" << out->string() << "\n";
    cfg.close();
    check.require(run_cli("simulate --config " + cfg_path.string(), "CSMA_WORKERS=2") == 0,
                  "simulate grid run");
  }
  check.require(slurp(d) == slurp(e), "simulate CSV byte-identical");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<void(Check&)> run;
    double budget_seconds;  // 0 = untimed
  };
  const std::vector<Criterion> criteria = {
      {1, "partition oracle equivalence", criterion_1_partition, 10},
      {2, "root correctness and series agreement", criterion_2_roots, 0},
      {3, "throughput closed forms", criterion_3_throughput, 0},
      {4, "unimodal throughput shape", criterion_4_shape, 0},
      {5, "threshold interval at eta=5/20", criterion_5_threshold, 5},
      {6, "threshold width asymptotics", criterion_6_width, 0},
      {7, "scaled maximum throughput", criterion_7_max_throughput, 0},
      {8, "fig3 reproduction", criterion_8_fig3, 5},
      {9, "fig5/fig7 reproduction", criterion_9_fig5_fig7, 0},
      {10, "simulator vs exact line theory", criterion_10_sim_vs_theory, 60},
      {11, "small-chain occupancy", criterion_11_occupancy, 0},
      {12, "wrapped-grid experiment", criterion_12_grid, 300},
      {13, "seeded determinism", criterion_13_determinism, 0},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Check check;
    const auto start = Clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (criterion.budget_seconds > 0 && elapsed > criterion.budget_seconds) {
      check.require(false, "runtime " + fmt(elapsed) + "s exceeds " +
                               fmt(criterion.budget_seconds) + "s");
    }
    std::printf("%s criterion %2d: %s [%.1fs]\n", check.ok ? "PASS" : "FAIL", criterion.id,
                criterion.name.c_str(), elapsed);
    for (const std::string& note : check.notes) std::printf("       - %s\n", note.c_str());
    if (!check.ok) ++failures;
  }

  std::error_code ec;
  fs::remove_all(scratch_dir(), ec);

  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
