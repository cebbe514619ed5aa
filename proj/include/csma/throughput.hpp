#pragma once

#include <vector>

#include "csma/partition.hpp"

namespace csma {

enum class Direction { right, left };

// Index sets around node 0 for a transmission in the given direction,
// restricted to {-n..n}. A node is hidden when it escapes the sender's
// sensing range but sits inside the receiver's interference range; exposed
// when the opposite holds; blocking when it is inside both.
struct NodeSets {
  std::vector<int> hidden;
  std::vector<int> exposed;
  std::vector<int> blocking;
};

NodeSets hidden_exposed_sets(int beta, int eta, int n, Direction dir);

enum class ThroughputKind { finite, infinite, collision_free };

struct ThroughputResult {
  double value = 0;
  ThroughputKind kind = ThroughputKind::finite;
};

// theta_n = sigma Z_{n-max(beta,eta-1)} Z_{n-max(beta,eta+1)} / Z_{2n+1},
// evaluated in log space. Independent of psi.
ThroughputResult throughput_finite(const ModelParams& params);

// f = max(beta, eta-1) + max(beta, eta+1): the exponent drop in
// theta = sigma lambda_0^(beta - f) / ((beta+1) lambda_0 - beta).
// Piecewise linear and continuous in beta.
double throughput_exponent(double beta, double eta);

// Infinite-network throughput; beta may be real (the optimizer relies on it).
ThroughputResult throughput_infinite(double beta, int eta, double sigma);

// Equivalent evaluation of the infinite-network throughput for
// beta in [eta-1, eta+1], used as a redundant numerical cross-check:
// g(beta) lambda_0^(beta-eta-1) / (beta+1) with
// g = (lambda_0 - 1) / (lambda_0 - beta/(beta+1)).
double throughput_infinite_middle_form(double beta, int eta, double sigma);

// Collision-free closed form (lambda_0 - 1)/((beta+1) lambda_0 - beta);
// equals throughput_infinite whenever beta >= eta + 1.
ThroughputResult throughput_collision_free(double beta, double sigma);

}  // namespace csma
