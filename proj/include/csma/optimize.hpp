#pragma once

#include <utility>
#include <vector>

namespace csma {

// (sqrt(5)-1)/2, computed at runtime rather than stored as a literal so the
// large-eta asymptotic checks do not accumulate a constant rounding bias.
double golden_ratio_conjugate();

// Monotonicity indicator for the infinite-network throughput:
// theta(beta) strictly increases at beta exactly when this value exceeds 1.
// Strictly increasing in sigma from 0 to infinity at fixed beta.
double threshold_indicator(double beta, int eta, double sigma);

// The unique activation rate at which the indicator equals 1 for this beta,
// found by bracketing and bisection. |indicator - 1| <= 1e-10 at the result.
double critical_sigma(double beta, int eta);

// The activation-rate band over which the optimal sensing range moves from
// eta-1 (maximal spatial reuse) to eta+1 (collision-free), together with its
// analytic enclosure and the closed-form estimates.
struct ThresholdResult {
  int eta = 0;
  double sigma_min = 0;
  double sigma_max = 0;
  double bound_low = 0;    // kappa (1+kappa)^(eta-1), kappa = tau/(eta+1)
  double bound_high = 0;   // kappa (1+kappa)^(eta+1)
  double approx_min = 0;   // mu_-(1+mu_-)^(eta-1), mu_- = tau/(eta+alpha_-)
  double approx_max = 0;   // mu_+(1+mu_+)^(eta+1), mu_+ = tau/(eta+alpha_+)
  std::vector<std::pair<double, double>> beta_star_samples;  // (sigma, beta*)
};

ThresholdResult threshold_interval(int eta, int beta_star_sample_count = 41);

// Optimal real-valued sensing range: eta-1 below the threshold band, eta+1
// above it, and the interior solution of indicator = 1 in between.
double optimal_beta_continuous(int eta, double sigma);

// Exhaustive integer argmax of the finite-network throughput over
// beta in {0..beta_max}; ties go to the smaller beta.
int optimal_beta_finite(int n, int eta, double sigma, int beta_max);

}  // namespace csma
