#include "csma/optimize.hpp"

#include <cmath>
#include <stdexcept>

#include "csma/partition.hpp"
#include "csma/roots.hpp"
#include "csma/throughput.hpp"

namespace csma {

double golden_ratio_conjugate() { return 0.5 * (std::sqrt(5.0) - 1.0); }

double threshold_indicator(double beta, int eta, double sigma) {
  if (beta < 0) throw std::domain_error("threshold_indicator: beta must be >= 0");
  if (eta < 1) throw std::domain_error("threshold_indicator: eta must be >= 1");
  const double mu = dominant_root_excess(beta, sigma);
  return (eta + 2.0 + beta / (1.0 + (beta + 1.0) * mu)) * std::log1p(mu);
}

double critical_sigma(double beta, int eta) {
  double lo = 1e-12;
  double hi = 1.0;
  int growth = 0;
  while (threshold_indicator(beta, eta, hi) < 1.0) {
    hi *= 2.0;
    if (++growth > 80) throw std::runtime_error("critical_sigma: bracket expansion failed");
  }
  while (threshold_indicator(beta, eta, lo) >= 1.0) {
    lo *= 0.5;
    if (lo < 1e-300) throw std::runtime_error("critical_sigma: bracket expansion failed");
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (threshold_indicator(beta, eta, mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double sigma = 0.5 * (lo + hi);
  if (std::fabs(threshold_indicator(beta, eta, sigma) - 1.0) > 1e-10)
    throw std::runtime_error("critical_sigma: bisection did not reach the target accuracy");
  return sigma;
}

namespace {

double optimal_beta_between(int eta, double sigma) {
  // indicator(eta-1) > 1 > indicator(eta+1) here; the crossing is unique.
  double lo = eta - 1.0;
  double hi = eta + 1.0;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (threshold_indicator(mid, eta, sigma) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double beta_star = 0.5 * (lo + hi);

  // The maximizer must dominate its immediate neighbourhood.
  const double center = throughput_infinite(beta_star, eta, sigma).value;
  for (const double side : {beta_star - 0.01, beta_star + 0.01}) {
    if (side < 0) continue;
    if (throughput_infinite(side, eta, sigma).value > center * (1.0 + 1e-12))
      throw std::runtime_error("optimal_beta_continuous: local maximality check failed");
  }
  return beta_star;
}

}  // namespace

ThresholdResult threshold_interval(int eta, int beta_star_sample_count) {
  if (eta < 1) throw std::domain_error("threshold_interval: eta must be >= 1");
  ThresholdResult result;
  result.eta = eta;
  result.sigma_min = critical_sigma(eta - 1.0, eta);
  result.sigma_max = critical_sigma(eta + 1.0, eta);

  const double tau = golden_ratio_conjugate();
  const double kappa = tau / (eta + 1.0);
  result.bound_low = kappa * std::exp((eta - 1.0) * std::log1p(kappa));
  result.bound_high = kappa * std::exp((eta + 1.0) * std::log1p(kappa));

  const double alpha_plus = (7.0 * tau + 1.0) / (2.0 * (2.0 * tau + 1.0));
  const double alpha_minus = (3.0 * tau + 1.0) / (2.0 * (2.0 * tau + 1.0));
  const double mu_minus = tau / (eta + alpha_minus);
  const double mu_plus = tau / (eta + alpha_plus);
  result.approx_min = mu_minus * std::exp((eta - 1.0) * std::log1p(mu_minus));
  result.approx_max = mu_plus * std::exp((eta + 1.0) * std::log1p(mu_plus));

  if (beta_star_sample_count > 1) {
    result.beta_star_samples.reserve(static_cast<std::size_t>(beta_star_sample_count));
    const double lo = result.bound_low;
    const double hi = result.bound_high;
    for (int k = 0; k < beta_star_sample_count; ++k) {
      const double sigma = lo + (hi - lo) * k / (beta_star_sample_count - 1.0);
      double beta_star;
      if (sigma <= result.sigma_min) {
        beta_star = eta - 1.0;
      } else if (sigma >= result.sigma_max) {
        beta_star = eta + 1.0;
      } else {
        beta_star = optimal_beta_between(eta, sigma);
      }
      result.beta_star_samples.emplace_back(sigma, beta_star);
    }
  }
  return result;
}

double optimal_beta_continuous(int eta, double sigma) {
  if (eta < 1) throw std::domain_error("optimal_beta_continuous: eta must be >= 1");
  if (!(sigma > 0)) throw std::domain_error("optimal_beta_continuous: sigma must be > 0");
  if (sigma <= critical_sigma(eta - 1.0, eta)) return eta - 1.0;
  if (sigma >= critical_sigma(eta + 1.0, eta)) return eta + 1.0;
  return optimal_beta_between(eta, sigma);
}

int optimal_beta_finite(int n, int eta, double sigma, int beta_max) {
  if (beta_max < 0) throw std::domain_error("optimal_beta_finite: beta_max must be >= 0");
  if (beta_max > n - eta - 1)
    throw std::domain_error("optimal_beta_finite: beta_max must be <= n - eta - 1");

  int best_beta = 0;
  double best_theta = -1.0;
  for (int beta = 0; beta <= beta_max; ++beta) {
    ModelParams params;
    params.beta = beta;
    params.eta = eta;
    params.sigma = sigma;
    params.n = n;
    const double theta = throughput_finite(params).value;
    if (theta > best_theta) {
      best_theta = theta;
      best_beta = beta;
    }
  }
  return best_beta;
}

}  // namespace csma
