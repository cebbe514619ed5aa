#include "csma/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "csma/roots.hpp"

namespace csma {

NodeSets hidden_exposed_sets(int beta, int eta, int n, Direction dir) {
  if (beta < 0 || eta < 0) throw std::domain_error("hidden_exposed_sets: ranges must be >= 0");
  if (n < 1) throw std::domain_error("hidden_exposed_sets: n must be >= 1");

  const int receiver = (dir == Direction::right) ? 1 : -1;
  NodeSets sets;
  for (int v = -n; v <= n; ++v) {
    const bool sensed = std::abs(v) <= beta;
    const bool interferes = std::abs(v - receiver) <= eta;
    if (sensed && interferes) {
      sets.blocking.push_back(v);
    } else if (sensed) {
      sets.exposed.push_back(v);
    } else if (interferes) {
      sets.hidden.push_back(v);
    }
  }
  return sets;
}

ThroughputResult throughput_finite(const ModelParams& params) {
  params.validate();
  const int a = params.n - std::max(params.beta, params.eta - 1);
  const int b = params.n - std::max(params.beta, params.eta + 1);
  if (a < 0 || b < 0)
    throw std::domain_error("throughput_finite: n too small for the given beta, eta");

  const PartitionTable table = partition_recursive(params.beta, params.sigma, 2 * params.n + 1);
  const double log_theta = std::log(params.sigma) + table.log_z(a) + table.log_z(b) -
                           table.log_z(2 * params.n + 1);
  return {std::exp(log_theta), ThroughputKind::finite};
}

double throughput_exponent(double beta, double eta) {
  if (beta < 0 || eta < 0) throw std::domain_error("throughput_exponent: ranges must be >= 0");
  return std::max(beta, eta - 1.0) + std::max(beta, eta + 1.0);
}

ThroughputResult throughput_infinite(double beta, int eta, double sigma) {
  if (eta < 0) throw std::domain_error("throughput_infinite: eta must be >= 0");
  const double mu = dominant_root_excess(beta, sigma);
  const double log_lambda = std::log1p(mu);
  const double f = throughput_exponent(beta, static_cast<double>(eta));
  const double denom = 1.0 + (beta + 1.0) * mu;  // (beta+1) lambda_0 - beta
  const double value = sigma * std::exp((beta - f) * log_lambda) / denom;
  return {value, ThroughputKind::infinite};
}

double throughput_infinite_middle_form(double beta, int eta, double sigma) {
  if (eta < 0) throw std::domain_error("throughput_infinite_middle_form: eta must be >= 0");
  // small slack so grid sweeps can land on the knots themselves
  if (beta < eta - 1.0 - 1e-9 || beta > eta + 1.0 + 1e-9)
    throw std::domain_error("throughput_infinite_middle_form: beta outside [eta-1, eta+1]");
  const double mu = dominant_root_excess(beta, sigma);
  const double g = mu / (mu + 1.0 / (beta + 1.0));
  return g * std::exp((beta - eta - 1.0) * std::log1p(mu)) / (beta + 1.0);
}

ThroughputResult throughput_collision_free(double beta, double sigma) {
  const double mu = dominant_root_excess(beta, sigma);
  return {mu / (1.0 + (beta + 1.0) * mu), ThroughputKind::collision_free};
}

}  // namespace csma
