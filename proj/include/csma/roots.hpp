#pragma once

#include <complex>
#include <string>
#include <vector>

namespace csma {

using Complex = std::complex<double>;

enum class RootMethod { series_small, series_large, newton, polish };

std::string to_string(RootMethod m);

// The beta+1 roots of lambda^(beta+1) - lambda^beta - sigma = 0 together
// with the residue coefficients of the partition-function expansion
// Z_i = sum_j c_j lambda_j^i. roots[0] is the real dominant root.
struct RootSet {
  int beta = 0;
  double sigma = 0;
  std::vector<Complex> roots;
  std::vector<Complex> residues;        // c_j = lambda_j^(beta+1) / ((beta+1) lambda_j - beta)
  std::vector<RootMethod> method;       // seed used for each root
};

struct SeriesResult {
  Complex value{};
  bool converged = false;
  int terms = 0;
};

// xi(beta) = beta^beta / (beta+1)^(beta+1); the boundary between the two
// series regimes. Defined as 1 for beta = 0 (limit convention of the same
// formula with 0^0 = 1).
double convergence_radius(int beta);

// The gap mu_0 = lambda_0 - 1 of the dominant root, i.e. the unique positive
// solution of mu (1+mu)^beta = sigma. Accepts real beta >= 0; relative
// residual below 1e-13.
double dominant_root_excess(double beta, double sigma);

// lambda_0 = 1 + dominant_root_excess.
double dominant_root(double beta, double sigma);

// All beta+1 roots: seeded from the series expansion that converges at this
// sigma, then polished with damped Newton. Verifies residuals, dominance,
// distinctness and the Vieta identities before returning.
RootSet all_roots(int beta, double sigma);

// Series expansion of root j valid for sigma <= xi(beta); throws a
// domain error outside that range. The convergence flag is false when the
// term cap (1e5) was hit before the relative tolerance was met.
SeriesResult series_small_sigma(int beta, double sigma, int j, double tol = 1e-14);

// Reciprocal series expansion of root j valid for sigma >= xi(beta).
SeriesResult series_large_sigma(int beta, double sigma, int j, double tol = 1e-14);

}  // namespace csma
