#include "csma/partition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "csma/roots.hpp"

namespace csma {

void ModelParams::validate() const {
  if (beta < 0) throw std::domain_error("model: sensing range beta must be >= 0");
  if (eta < 0) throw std::domain_error("model: interference range eta must be >= 0");
  if (!(sigma > 0)) throw std::domain_error("model: activation rate sigma must be > 0");
  if (psi < 0 || psi > 1) throw std::domain_error("model: psi must lie in [0, 1]");
  if (n < 1) throw std::domain_error("model: half-size n must be >= 1");
}

double PartitionTable::log_z(int i) const {
  if (i < 0 || i > i_max()) throw std::out_of_range("partition table: index " + std::to_string(i));
  return log_values[static_cast<std::size_t>(i)];
}

double PartitionTable::z(int i) const { return std::exp(log_z(i)); }

PartitionTable partition_recursive(int beta, double sigma, int i_max) {
  if (beta < 0) throw std::domain_error("partition: beta must be >= 0");
  if (!(sigma > 0)) throw std::domain_error("partition: sigma must be > 0");
  if (i_max < 0) throw std::domain_error("partition: i_max must be >= 0");

  PartitionTable table;
  table.beta = beta;
  table.sigma = sigma;
  table.log_values.reserve(static_cast<std::size_t>(i_max) + 1);

  const double log_sigma = std::log(sigma);
  for (int i = 0; i <= i_max; ++i) {
    if (i <= beta + 1) {
      table.log_values.push_back(std::log1p(i * sigma));
    } else {
      // log(Z_{i-1} + sigma Z_{i-beta-1}) via log-sum-exp
      const double a = table.log_values[static_cast<std::size_t>(i - 1)];
      const double b = log_sigma + table.log_values[static_cast<std::size_t>(i - beta - 1)];
      const double hi = std::max(a, b);
      table.log_values.push_back(hi + std::log(std::exp(a - hi) + std::exp(b - hi)));
    }
  }
  return table;
}

double partition_bruteforce(int num_nodes, int beta, double sigma) {
  if (num_nodes < 0 || num_nodes > 24)
    throw std::domain_error("partition_bruteforce: num_nodes must lie in [0, 24]");
  if (beta < 0) throw std::domain_error("partition_bruteforce: beta must be >= 0");
  if (!(sigma > 0)) throw std::domain_error("partition_bruteforce: sigma must be > 0");

  std::vector<double> sigma_pow(static_cast<std::size_t>(num_nodes) + 1, 1.0);
  for (int k = 1; k <= num_nodes; ++k)
    sigma_pow[static_cast<std::size_t>(k)] = sigma_pow[static_cast<std::size_t>(k - 1)] * sigma;

  double total = 0;
  const std::uint32_t limit = 1u << num_nodes;
  for (std::uint32_t state = 0; state < limit; ++state) {
    bool feasible = true;
    for (int d = 1; d <= beta && d < num_nodes; ++d) {
      if (state & (state << d)) {
        feasible = false;
        break;
      }
    }
    if (feasible) total += sigma_pow[static_cast<std::size_t>(__builtin_popcount(state))];
  }
  return total;
}

namespace {

Complex complex_ipow(Complex base, int exp) {
  Complex result(1.0, 0.0);
  while (exp > 0) {
    if (exp & 1) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

}  // namespace

double partition_spectral(const RootSet& rs, int i) {
  if (i < 0) throw std::domain_error("partition_spectral: index must be >= 0");
  const auto count = static_cast<std::size_t>(rs.beta) + 1;
  if (rs.roots.size() != count || rs.residues.size() != count)
    throw std::invalid_argument("partition_spectral: inconsistent root set");

  Complex sum(0.0, 0.0);
  for (std::size_t j = 0; j < count; ++j) sum += rs.residues[j] * complex_ipow(rs.roots[j], i);

  if (std::fabs(sum.imag()) > 1e-9 * std::abs(sum))
    throw std::runtime_error("partition_spectral: imaginary parts failed to cancel");
  return sum.real();
}

}  // namespace csma
