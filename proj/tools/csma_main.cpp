#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csma/csv.hpp"
#include "csma/optimize.hpp"
#include "csma/parallel.hpp"
#include "csma/partition.hpp"
#include "csma/roots.hpp"
#include "csma/rng.hpp"
#include "csma/simulate.hpp"
#include "csma/stats.hpp"
#include "csma/throughput.hpp"
#include "csma/topology.hpp"

namespace {

using namespace csma;

// Writes to the file when a path is given, otherwise to stdout.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(open_output(path));
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish(const std::string& path) {
    if (file_ && !*file_) throw std::runtime_error("write failed for '" + path + "'");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  const double llo = std::log10(lo);
  const double lhi = std::log10(hi);
  for (int i = 0; i < points; ++i)
    grid.push_back(std::pow(10.0, llo + (lhi - llo) * i / (points - 1.0)));
  return grid;
}

// ---------------------------------------------------------------------------
// simulate: line-oriented key=value config with [section] headers.

struct SimJob {
  Topology topology;
  SimConfig base;
  std::vector<double> betas{};
  std::vector<double> sigmas{};
  std::vector<std::uint64_t> seeds{};
  std::string output_path;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) parts.push_back(item);
  return parts;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

SimJob parse_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");

  std::map<std::string, std::map<std::string, std::pair<int, std::string>>> sections;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[' && text.back() == ']') {
      section = text.substr(1, text.size() - 2);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos || section.empty())
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": expected '[section]' or 'key=value'");
    sections[section][trim(text.substr(0, eq))] = {line_no, trim(text.substr(eq + 1))};
  }

  auto fail = [&](int at, const std::string& message) {
    throw std::runtime_error(path + " line " + std::to_string(at) + ": " + message);
  };
  auto take = [&](const std::string& sec, const std::string& key,
                  const std::string& fallback) -> std::pair<int, std::string> {
    auto s = sections.find(sec);
    if (s == sections.end()) return {0, fallback};
    auto k = s->second.find(key);
    if (k == s->second.end()) return {0, fallback};
    auto value = k->second;
    s->second.erase(k);
    return value;
  };
  auto to_double = [&](const std::pair<int, std::string>& v) {
    try {
      return std::stod(v.second);
    } catch (const std::exception&) {
      fail(v.first, "bad number '" + v.second + "'");
      return 0.0;
    }
  };
  auto to_int = [&](const std::pair<int, std::string>& v) {
    return static_cast<int>(std::llround(to_double(v)));
  };

  SimJob job;
  const auto kind = take("topology", "kind", "");
  if (kind.second == "line") {
    job.topology = line_topology(to_int(take("topology", "n", "3")));
  } else if (kind.second == "grid") {
    job.topology = wrapped_grid(to_int(take("topology", "rows", "4")),
                                to_int(take("topology", "cols", "4")),
                                to_double(take("topology", "spacing", "1")));
  } else if (kind.second == "random") {
    job.topology = random_topology(to_int(take("topology", "count", "16")),
                                   to_double(take("topology", "side", "3")),
                                   to_double(take("topology", "m", "1")),
                                   static_cast<std::uint64_t>(to_int(take("topology", "seed", "7"))));
  } else if (kind.second == "file") {
    const auto file = take("topology", "path", "");
    if (file.second.empty()) fail(kind.first, "topology kind=file needs path=");
    job.topology = load_topology(file.second);
  } else {
    fail(kind.first, "topology kind must be line, grid, random or file");
  }

  job.base.beta = to_double(take("sim", "beta", "1"));
  job.base.eta = to_double(take("sim", "eta", "1"));
  job.base.sigma = to_double(take("sim", "sigma", "1"));
  job.base.psi = to_double(take("sim", "psi", "0.5"));
  job.base.horizon = to_double(take("sim", "horizon", "100000"));
  job.base.warmup_fraction = to_double(take("sim", "warmup_fraction", "0.1"));
  job.base.batches = to_int(take("sim", "batches", "20"));
  job.base.seed = static_cast<std::uint64_t>(std::stoll(take("sim", "seed", "1").second));
  const auto destination = take("sim", "destination", kind.second == "line" ? "psi" : "uniform");
  if (destination.second == "psi") {
    job.base.uniform_destination = false;
  } else if (destination.second == "uniform") {
    job.base.uniform_destination = true;
  } else {
    fail(destination.first, "destination must be psi or uniform");
  }

  auto parse_grid = [&](const std::string& key, std::vector<double>& out, double fallback) {
    const auto v = take("grid", key, "");
    if (v.second.empty()) {
      out = {fallback};
      return;
    }
    for (const std::string& item : split_list(v.second)) out.push_back(to_double({v.first, item}));
    if (out.empty()) fail(v.first, "empty grid for " + key);
  };
  parse_grid("beta", job.betas, job.base.beta);
  parse_grid("sigma", job.sigmas, job.base.sigma);
  const auto seeds = take("grid", "seeds", "");
  if (seeds.second.empty()) {
    job.seeds = {job.base.seed};
  } else {
    for (const std::string& item : split_list(seeds.second))
      job.seeds.push_back(static_cast<std::uint64_t>(std::stoll(item)));
  }

  job.output_path = take("output", "path", "").second;

  for (const auto& [sec, keys] : sections) {
    for (const auto& [key, value] : keys)
      fail(value.first, "unknown key '" + key + "' in section [" + sec + "]");
  }

  std::sort(job.betas.begin(), job.betas.end());
  std::sort(job.sigmas.begin(), job.sigmas.end());
  std::sort(job.seeds.begin(), job.seeds.end());
  job.base.validate(job.topology);
  return job;
}

void run_sim_grid(const SimJob& job) {
  struct Point {
    SimConfig cfg;
    SimStats stats;
  };
  std::vector<Point> points;
  for (double beta : job.betas) {
    for (double sigma : job.sigmas) {
      for (std::uint64_t seed : job.seeds) {
        Point point;
        point.cfg = job.base;
        point.cfg.beta = beta;
        point.cfg.sigma = sigma;
        point.cfg.seed = seed;
        points.push_back(std::move(point));
      }
    }
  }

  parallel_for(points.size(), [&](std::size_t i) {
    points[i].stats = simulate(job.topology, points[i].cfg);
  });

  OutputTarget out(job.output_path);
  write_results_header(out.stream());
  for (const Point& point : points)
    write_results_rows(out.stream(), job.topology.name, point.cfg, point.stats);
  out.finish(job.output_path);

  for (const Point& point : points) {
    std::cout << "beta=" << format_double(point.cfg.beta)
              << " sigma=" << format_double(point.cfg.sigma) << " seed=" << point.cfg.seed
              << " throughput=" << format_double(point.stats.aggregate.throughput_mean)
              << " stderr=" << format_double(point.stats.aggregate.throughput_stderr) << '\n';
  }
  if (!job.output_path.empty())
    std::cout << points.size() << " run(s) written to " << job.output_path << '\n';
}

// ---------------------------------------------------------------------------
// figure: canned parameter grids behind the named datasets.

struct FigureOptions {
  std::string out;
  int n = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double horizon = -1;
};

void emit_theta_sweep(std::ostream& out, int eta, const std::vector<int>& betas,
                      const std::vector<double>& sigmas) {
  out << "beta,sigma,theta\n";
  for (int beta : betas) {
    for (double sigma : sigmas) {
      out << beta << ',' << format_double(sigma) << ','
          << format_double(throughput_infinite(beta, eta, sigma).value) << '\n';
    }
  }
}

void emit_root_portrait(std::ostream& out, int beta, const std::vector<double>& sigmas) {
  out << "beta,sigma,j,re_lambda,im_lambda,method\n";
  for (double sigma : sigmas) {
    const RootSet rs = all_roots(beta, sigma);
    for (std::size_t j = 0; j < rs.roots.size(); ++j) {
      out << beta << ',' << format_double(sigma) << ',' << j << ','
          << format_double(rs.roots[j].real()) << ',' << format_double(rs.roots[j].imag()) << ','
          << to_string(rs.method[j]) << '\n';
    }
  }
}

void run_figure(const std::string& name, const FigureOptions& opt) {
  const std::set<std::string> known = {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig10"};
  if (!known.count(name))
    throw std::runtime_error("unknown figure '" + name +
                             "' (expected fig3, fig4, fig5, fig6, fig7, fig8 or fig10)");

  const std::string out_path = opt.out.empty() ? name + ".csv" : opt.out;
  OutputTarget target(out_path);
  std::ostream& out = target.stream();

  if (name == "fig3") {
    emit_theta_sweep(out, 7, {6, 7, 8, 9, 10}, log_grid(1e-2, 1e4, 49));
  } else if (name == "fig4") {
    std::vector<double> sigmas = log_grid(1e-3, 1e2, 121);
    sigmas.push_back(convergence_radius(4));
    std::sort(sigmas.begin(), sigmas.end());
    emit_root_portrait(out, 4, sigmas);
  } else if (name == "fig5" || name == "fig6") {
    const int eta = 4;
    out << "sigma," << (name == "fig5" ? "beta" : "n") << ",theta_n,theta_infinite\n";
    for (double sigma : {0.25, 5.0}) {
      if (name == "fig5") {
        const int n = opt.n > 0 ? opt.n : 100;
        for (int beta = 1; beta <= n; ++beta) {
          ModelParams params{beta, eta, sigma, 0.5, n};
          out << format_double(sigma) << ',' << beta << ','
              << format_double(throughput_finite(params).value) << ','
              << format_double(throughput_infinite(beta, eta, sigma).value) << '\n';
        }
      } else {
        const int beta = 16;
        for (int n = 16; n <= 150; ++n) {
          ModelParams params{beta, eta, sigma, 0.5, n};
          out << format_double(sigma) << ',' << n << ','
              << format_double(throughput_finite(params).value) << ','
              << format_double(throughput_infinite(beta, eta, sigma).value) << '\n';
        }
      }
    }
  } else if (name == "fig7") {
    const int eta = 5;
    const ThresholdResult th = threshold_interval(eta, 0);
    std::vector<int> ns = {15, 20, 25, 30};
    if (opt.n > 0) ns = {opt.n};
    out << "n,sigma,beta_star_finite,beta_star_infinite,approx_min,approx_max\n";
    for (int n : ns) {
      for (int k = 0; k <= 80; ++k) {
        const double sigma = 0.15 + 0.0005 * k;
        double beta_star = optimal_beta_continuous(eta, sigma);
        out << n << ',' << format_double(sigma) << ','
            << optimal_beta_finite(n, eta, sigma, n - eta - 1) << ','
            << format_double(beta_star) << ',' << format_double(th.approx_min) << ','
            << format_double(th.approx_max) << '\n';
      }
    }
  } else if (name == "fig8" || name == "fig10") {
    Topology top;
    SimConfig base;
    std::vector<double> betas;
    if (name == "fig8") {
      top = wrapped_grid(4, 4, 1.0);
      base.eta = 1.0;
      betas = {0, 1, 1.5, 2};
    } else {
      top = random_topology(16, 3.0, 1.0, opt.seed_set ? opt.seed : 7);
      base.eta = 1.6;
      betas = {0.2, 0.3, 1, 1.3, 1.5};
    }
    base.horizon = opt.horizon > 0 ? opt.horizon : 2e4;
    base.uniform_destination = true;
    const std::uint64_t base_seed = opt.seed_set ? opt.seed : 1;
    const std::vector<double> sigmas = log_grid(1e-2, 1e2, 17);

    struct Point {
      SimConfig cfg;
      SimStats stats;
    };
    std::vector<Point> points;
    for (double beta : betas) {
      for (double sigma : sigmas) {
        Point point;
        point.cfg = base;
        point.cfg.beta = beta;
        point.cfg.sigma = sigma;
        point.cfg.seed = base_seed + points.size();
        points.push_back(std::move(point));
      }
    }
    parallel_for(points.size(), [&](std::size_t i) {
      points[i].stats = simulate(top, points[i].cfg);
    });
    write_results_header(out);
    for (const Point& point : points) write_results_rows(out, top.name, point.cfg, point.stats);
  }

  target.finish(out_path);
  if (!out_path.empty()) std::cout << name << " data written to " << out_path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hard-core CSMA throughput toolkit: exact line-network formulas, "
               "sensing-range optimization, and an event-driven simulator"};
  app.require_subcommand(1);

  // partition
  auto* partition_cmd = app.add_subcommand("partition", "partition function table Z_0..Z_imax");
  int p_beta = 1;
  double p_sigma = 1;
  int p_imax = 10;
  std::string p_out;
  partition_cmd->add_option("--beta", p_beta, "sensing range")->required();
  partition_cmd->add_option("--sigma", p_sigma, "activation rate")->required();
  partition_cmd->add_option("--imax", p_imax, "largest index")->required();
  partition_cmd->add_option("--out", p_out, "output CSV path (default stdout)");
  partition_cmd->callback([&]() {
    const PartitionTable table = partition_recursive(p_beta, p_sigma, p_imax);
    OutputTarget target(p_out);
    std::ostream& out = target.stream();
    out << "i,log_Z,Z\n";
    for (int i = 0; i <= table.i_max(); ++i) {
      out << i << ',' << format_double(table.log_z(i)) << ',';
      const double z = table.z(i);
      if (std::isfinite(z)) out << format_double(z);
      out << '\n';
    }
    target.finish(p_out);
  });

  // roots
  auto* roots_cmd = app.add_subcommand("roots", "root portrait of lambda^(b+1)-lambda^b-sigma=0");
  int r_beta = 4;
  std::vector<double> r_sigmas;
  std::string r_out;
  roots_cmd->add_option("--beta", r_beta, "sensing range")->required();
  roots_cmd->add_option("--sigma", r_sigmas, "activation rate(s)")->required();
  roots_cmd->add_option("--out", r_out, "output CSV path (default stdout)");
  roots_cmd->callback([&]() {
    OutputTarget target(r_out);
    emit_root_portrait(target.stream(), r_beta, r_sigmas);
    target.finish(r_out);
  });

  // throughput
  auto* theta_cmd = app.add_subcommand("throughput", "finite and infinite line throughput");
  double t_beta = 1;
  int t_eta = 1, t_n = -1;
  double t_sigma = 1;
  theta_cmd->add_option("--beta", t_beta, "sensing range (real for the infinite network)")->required();
  theta_cmd->add_option("--eta", t_eta, "interference range")->required();
  theta_cmd->add_option("--sigma", t_sigma, "activation rate")->required();
  theta_cmd->add_option("--n", t_n, "half-size for the finite network (integer beta only)");
  theta_cmd->callback([&]() {
    std::cout << "theta_infinite=" << format_double(throughput_infinite(t_beta, t_eta, t_sigma).value)
              << '\n';
    if (t_beta >= t_eta + 1)
      std::cout << "theta_collision_free="
                << format_double(throughput_collision_free(t_beta, t_sigma).value) << '\n';
    if (t_n > 0) {
      if (t_beta != std::floor(t_beta))
        throw std::runtime_error("the finite network needs an integer --beta");
      ModelParams params{static_cast<int>(t_beta), t_eta, t_sigma, 0.5, t_n};
      std::cout << "theta_n=" << format_double(throughput_finite(params).value) << '\n';
    }
  });

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "throughput-optimal sensing range");
  int o_eta = 5, o_n = -1, o_beta_max = -1;
  double o_sigma = 1;
  opt_cmd->add_option("--eta", o_eta, "interference range")->required();
  opt_cmd->add_option("--sigma", o_sigma, "activation rate")->required();
  opt_cmd->add_option("--n", o_n, "also report the finite-network integer optimum for this n");
  opt_cmd->add_option("--beta-max", o_beta_max, "search cap for the finite optimum");
  opt_cmd->callback([&]() {
    std::cout << "beta_star=" << format_double(optimal_beta_continuous(o_eta, o_sigma)) << '\n';
    if (o_n > 0) {
      const int cap = o_beta_max >= 0 ? o_beta_max : o_n - o_eta - 1;
      std::cout << "beta_star_finite=" << optimal_beta_finite(o_n, o_eta, o_sigma, cap) << '\n';
    }
  });

  // threshold
  auto* th_cmd = app.add_subcommand("threshold", "threshold interval and beta*(sigma) sweep");
  int th_eta = 5, th_n = 30, th_samples = 41;
  std::string th_out;
  th_cmd->add_option("--eta", th_eta, "interference range")->required();
  th_cmd->add_option("--n", th_n, "half-size for the finite-optimum column");
  th_cmd->add_option("--samples", th_samples, "number of sigma samples");
  th_cmd->add_option("--out", th_out, "output CSV path (default stdout)");
  th_cmd->callback([&]() {
    const ThresholdResult th = threshold_interval(th_eta, th_samples);
    std::cerr << "sigma_min=" << format_double(th.sigma_min)
              << " sigma_max=" << format_double(th.sigma_max)
              << " bound_low=" << format_double(th.bound_low)
              << " bound_high=" << format_double(th.bound_high)
              << " approx_min=" << format_double(th.approx_min)
              << " approx_max=" << format_double(th.approx_max) << '\n';
    OutputTarget target(th_out);
    std::ostream& out = target.stream();
    out << "eta,sigma,beta_star_continuous,beta_star_finite_n,n,sigma_min,sigma_max,"
           "bound_low,bound_high,approx_min,approx_max\n";
    for (const auto& [sigma, beta_star] : th.beta_star_samples) {
      out << th_eta << ',' << format_double(sigma) << ',' << format_double(beta_star) << ','
          << optimal_beta_finite(th_n, th_eta, sigma, th_n - th_eta - 1) << ',' << th_n << ','
          << format_double(th.sigma_min) << ',' << format_double(th.sigma_max) << ','
          << format_double(th.bound_low) << ',' << format_double(th.bound_high) << ','
          << format_double(th.approx_min) << ',' << format_double(th.approx_max) << '\n';
    }
    target.finish(th_out);
  });

  // topology
  auto* topo_cmd = app.add_subcommand("topology", "generate or re-serialize a topology file");
  std::string tp_kind = "line", tp_in, tp_out;
  int tp_n = 3, tp_rows = 4, tp_cols = 4, tp_count = 16;
  double tp_spacing = 1, tp_side = 3, tp_m = 1;
  std::uint64_t tp_seed = 7;
  topo_cmd->add_option("--kind", tp_kind, "line | grid | random");
  topo_cmd->add_option("--in", tp_in, "read an existing topology file instead of generating");
  topo_cmd->add_option("--n", tp_n, "line: half-size");
  topo_cmd->add_option("--rows", tp_rows, "grid rows");
  topo_cmd->add_option("--cols", tp_cols, "grid cols");
  topo_cmd->add_option("--spacing", tp_spacing, "grid spacing");
  topo_cmd->add_option("--count", tp_count, "random: node count");
  topo_cmd->add_option("--side", tp_side, "random: square side");
  topo_cmd->add_option("--m", tp_m, "random: link range");
  topo_cmd->add_option("--seed", tp_seed, "random: seed");
  topo_cmd->add_option("--out", tp_out, "output path (default stdout)");
  topo_cmd->callback([&]() {
    Topology top;
    if (!tp_in.empty()) {
      top = load_topology(tp_in);
    } else if (tp_kind == "line") {
      top = line_topology(tp_n);
    } else if (tp_kind == "grid") {
      top = wrapped_grid(tp_rows, tp_cols, tp_spacing);
    } else if (tp_kind == "random") {
      top = random_topology(tp_count, tp_side, tp_m, tp_seed);
    } else {
      throw std::runtime_error("unknown topology kind '" + tp_kind + "'");
    }
    OutputTarget target(tp_out);
    write_topology(target.stream(), top);
    target.finish(tp_out);
  });

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run the event-driven simulator from a config");
  std::string sim_config;
  sim_cmd->add_option("--config", sim_config, "key=value config file")->required();
  sim_cmd->callback([&]() { run_sim_grid(parse_sim_config(sim_config)); });

  // figure
  auto* fig_cmd = app.add_subcommand("figure", "emit a canned dataset by name");
  std::string fig_name;
  FigureOptions fig_opt;
  fig_cmd->add_option("name", fig_name, "fig3|fig4|fig5|fig6|fig7|fig8|fig10")->required();
  fig_cmd->add_option("--out", fig_opt.out, "output CSV path (default <name>.csv)");
  fig_cmd->add_option("--n", fig_opt.n, "half-size override (fig5, fig7)");
  auto* seed_opt = fig_cmd->add_option("--seed", fig_opt.seed, "base seed (fig8, fig10)");
  fig_cmd->add_option("--horizon", fig_opt.horizon, "simulated time per run (fig8, fig10)");
  fig_cmd->callback([&]() {
    fig_opt.seed_set = seed_opt->count() > 0;
    run_figure(fig_name, fig_opt);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "csma: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
