#pragma once

#include <vector>

namespace csma {

struct RootSet;

// Parameters of the line network: transmitters sit at integer positions
// -n..n, the sensing range beta and interference range eta are measured in
// node-index distance, sigma is the activation rate, and psi is the
// probability that a packet is addressed to the right-hand neighbour.
struct ModelParams {
  int beta = 1;
  int eta = 1;
  double sigma = 1.0;
  double psi = 0.5;
  int n = 1;

  void validate() const;  // throws std::domain_error on bad values
};

// log Z_0 .. log Z_imax for one (beta, sigma). Values are kept as logarithms
// because Z_i grows geometrically and overflows doubles near i ~ 700.
struct PartitionTable {
  int beta = 0;
  double sigma = 0;
  std::vector<double> log_values;

  int i_max() const { return static_cast<int>(log_values.size()) - 1; }
  double log_z(int i) const;
  double z(int i) const;  // exp(log_z), +inf when not representable
};

// Z_i = 1 + i sigma for i <= beta+1, Z_i = Z_{i-1} + sigma Z_{i-beta-1}
// afterwards, evaluated in log space.
PartitionTable partition_recursive(int beta, double sigma, int i_max);

// Exact Z by enumerating all activity vectors of num_nodes nodes with no two
// active nodes within index distance beta, summing sigma^(#active).
// Limited to num_nodes <= 24.
double partition_bruteforce(int num_nodes, int beta, double sigma);

// Z_i = sum_j c_j lambda_j^i from a computed root set. Throws if the
// imaginary parts fail to cancel, which indicates a root-finder failure.
double partition_spectral(const RootSet& roots, int i);

}  // namespace csma
