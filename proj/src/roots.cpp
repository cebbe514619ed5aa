#include "csma/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csma {

std::string to_string(RootMethod m) {
  switch (m) {
    case RootMethod::series_small: return "series_small";
    case RootMethod::series_large: return "series_large";
    case RootMethod::newton: return "newton";
    case RootMethod::polish: return "polish";
  }
  return "unknown";
}

double convergence_radius(int beta) {
  if (beta < 0) throw std::domain_error("convergence_radius: beta must be >= 0");
  if (beta == 0) return 1.0;
  return std::exp(beta * std::log(static_cast<double>(beta)) -
                  (beta + 1) * std::log(static_cast<double>(beta + 1)));
}

double dominant_root_excess(double beta, double sigma) {
  if (!(sigma > 0)) throw std::domain_error("dominant_root: sigma must be > 0");
  if (beta < 0) throw std::domain_error("dominant_root: beta must be >= 0");
  if (beta == 0) return sigma;

  // Solve h(t) = t + beta log(1 + e^t) - log sigma = 0 for t = log mu.
  // Working in t keeps everything representable even when (1+sigma)^beta
  // overflows. h is increasing and convex, and h(log sigma) >= 0, so plain
  // Newton from t = log sigma descends monotonically onto the root.
  const double log_sigma = std::log(sigma);
  auto h = [&](double t) { return t + beta * std::log1p(std::exp(t)) - log_sigma; };

  double t = log_sigma;
  for (int i = 0; i < 200; ++i) {
    const double mu = std::exp(t);
    const double res = h(t);
    const double step = res / (1.0 + beta * mu / (1.0 + mu));
    t -= step;
    if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(t))) break;
  }
  const double mu = std::exp(t);
  // h is the log of the residual ratio, i.e. the relative residual.
  if (!(std::fabs(h(t)) < 1e-13))
    throw std::runtime_error("dominant_root: iteration failed to converge");
  return mu;
}

double dominant_root(double beta, double sigma) { return 1.0 + dominant_root_excess(beta, sigma); }

namespace {

constexpr long kSeriesCap = 100000;

struct LogSigned {
  double log_abs = 0;
  int sign = 1;  // 0 marks an exactly-zero value
};

// Gamma at negative non-integer arguments via the reflection formula.
LogSigned log_gamma_signed(double x) {
  if (x > 0) return {std::lgamma(x), 1};
  const double s = std::sin(std::numbers::pi * x);
  LogSigned out;
  out.log_abs = std::log(std::numbers::pi) - std::log(std::fabs(s)) - std::lgamma(1.0 - x);
  out.sign = (s > 0) ? 1 : -1;
  return out;
}

// Pochhammer (x)_n = Gamma(x+n)/Gamma(x) as a signed logarithm. Handles
// non-positive integer x, where the rising product is a finite product that
// may pass through zero.
LogSigned pochhammer_log(double x, long n) {
  if (n == 0) return {0.0, 1};
  if (x <= 0 && x == std::floor(x)) {
    const long m = std::lround(-x);
    if (n >= m + 1) return {0.0, 0};
    // (-m)(-m+1)...(-m+n-1) = (-1)^n m! / (m-n)!
    const double log_abs =
        std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(m - n) + 1.0);
    return {log_abs, (n % 2 == 0) ? 1 : -1};
  }
  const double xn = x + static_cast<double>(n);
  if (x > 0) return {std::lgamma(xn) - std::lgamma(x), 1};
  const LogSigned gx = log_gamma_signed(x);
  const LogSigned gxn = log_gamma_signed(xn);
  return {gxn.log_abs - gx.log_abs, gxn.sign * gx.sign};
}

// Shared accumulation loop: feeds terms until two consecutive terms fall
// below tol * |sum| (two, because individual terms can vanish exactly).
template <typename TermFn>
SeriesResult accumulate_series(double tol, TermFn term_at) {
  SeriesResult result;
  Complex sum(0.0, 0.0);
  int small_streak = 0;
  long l = 1;
  for (; l <= kSeriesCap; ++l) {
    const Complex term = term_at(l);
    sum += term;
    if (std::abs(term) <= tol * std::abs(sum)) {
      if (++small_streak >= 2 && l >= 3) {
        result.converged = true;
        break;
      }
    } else {
      small_streak = 0;
    }
  }
  result.value = sum;
  result.terms = static_cast<int>(std::min(l, kSeriesCap));
  return result;
}

void validate_series_args(int beta, double sigma, int j) {
  if (beta < 0) throw std::domain_error("root series: beta must be >= 0");
  if (sigma < 0) throw std::domain_error("root series: sigma must be >= 0");
  if (j < 0 || j > beta) throw std::domain_error("root series: root index out of range");
  if (j >= 1 && beta < 1) throw std::domain_error("root series: j >= 1 requires beta >= 1");
}

Complex poly_eval(int beta, double sigma, Complex z) {
  Complex zb(1.0, 0.0);
  for (int k = 0; k < beta; ++k) zb *= z;
  return zb * (z - 1.0) - sigma;
}

Complex poly_deriv(int beta, Complex z) {
  Complex zb(1.0, 0.0);
  for (int k = 0; k < beta - 1; ++k) zb *= z;
  return zb * (static_cast<double>(beta + 1) * z - static_cast<double>(beta));
}

// Damped Newton iteration on lambda^beta (lambda - 1) - sigma.
Complex newton_polish(int beta, double sigma, Complex z, bool force_real) {
  if (force_real) z = Complex(z.real(), 0.0);
  const double floor_resid = 1e-15 * (1.0 + sigma);
  Complex f = poly_eval(beta, sigma, z);
  for (int it = 0; it < 100 && std::abs(f) > floor_resid; ++it) {
    const Complex deriv = poly_deriv(beta, z);
    if (std::abs(deriv) == 0.0) break;
    Complex step = f / deriv;
    bool accepted = false;
    for (int halvings = 0; halvings < 40; ++halvings) {
      const Complex candidate = z - step;
      const Complex fc = poly_eval(beta, sigma, candidate);
      if (std::abs(fc) < std::abs(f)) {
        z = candidate;
        f = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (force_real) z = Complex(z.real(), 0.0);
  return z;
}

void check_root_set(const RootSet& rs) {
  const int beta = rs.beta;
  const double sigma = rs.sigma;
  const double resid_tol = 1e-10 * (1.0 + sigma);

  for (const Complex& z : rs.roots) {
    const double resid = std::abs(poly_eval(beta, sigma, z));
    if (!(resid <= resid_tol))
      throw std::runtime_error("all_roots: residual " + std::to_string(resid) + " above tolerance");
  }

  const Complex& lead = rs.roots[0];
  if (lead.imag() != 0.0 || !(lead.real() > 1.0))
    throw std::runtime_error("all_roots: leading root is not real > 1");
  for (std::size_t j = 1; j < rs.roots.size(); ++j) {
    if (!(std::abs(rs.roots[j]) < lead.real()))
      throw std::runtime_error("all_roots: dominance violated");
  }

  for (std::size_t a = 0; a < rs.roots.size(); ++a) {
    for (std::size_t b = a + 1; b < rs.roots.size(); ++b) {
      if (std::abs(rs.roots[a] - rs.roots[b]) < 1e-8)
        throw std::runtime_error("all_roots: two roots collided");
    }
  }

  // Vieta on the monic polynomial: sum = 1 and product = (-1)^beta sigma.
  // For beta = 0 the lambda^beta term merges into the constant, so the
  // identities take a different (trivial) form and are skipped.
  if (beta >= 1) {
    Complex sum(0.0, 0.0);
    Complex prod(1.0, 0.0);
    for (const Complex& z : rs.roots) {
      sum += z;
      prod *= z;
    }
    const double expected_prod = (beta % 2 == 0) ? sigma : -sigma;
    if (std::abs(sum - Complex(1.0, 0.0)) > 1e-9 * (1.0 + std::abs(sum)) * (beta + 1))
      throw std::runtime_error("all_roots: Vieta sum check failed");
    if (std::abs(prod - Complex(expected_prod, 0.0)) > 1e-8 * (1.0 + sigma))
      throw std::runtime_error("all_roots: Vieta product check failed");
  }
}

}  // namespace

SeriesResult series_small_sigma(int beta, double sigma, int j, double tol) {
  validate_series_args(beta, sigma, j);
  const double xi = convergence_radius(beta);
  if (sigma > xi * (1.0 + 1e-12))
    throw std::domain_error("series_small_sigma: diverges for sigma > xi(beta)");
  if (sigma == 0) return {Complex(j == 0 ? 1.0 : 0.0, 0.0), true, 0};

  const double log_sigma = std::log(sigma);

  if (j == 0) {
    // lambda_0 = 1 + sum_{l>=1} (-1)^(l-1) (beta l)_{l-1} / l! sigma^l
    SeriesResult r = accumulate_series(tol, [&](long l) {
      const LogSigned p = pochhammer_log(static_cast<double>(beta) * l, l - 1);
      if (p.sign == 0) return Complex(0.0, 0.0);
      const double log_term =
          p.log_abs - std::lgamma(static_cast<double>(l) + 1.0) + l * log_sigma;
      const double parity = (l % 2 == 1) ? 1.0 : -1.0;
      return Complex(p.sign * parity * std::exp(log_term), 0.0);
    });
    r.value += 1.0;
    return r;
  }

  // lambda_j = sum_{l>=1} (l/beta)_{l-1} / l! w^l, w = sigma^(1/beta) e^(2 pi i (j-1/2)/beta)
  const double log_w_abs = log_sigma / beta;
  const double phase = 2.0 * std::numbers::pi * (j - 0.5) / beta;
  return accumulate_series(tol, [&](long l) {
    const LogSigned p = pochhammer_log(static_cast<double>(l) / beta, l - 1);
    const double log_term = p.log_abs - std::lgamma(static_cast<double>(l) + 1.0) + l * log_w_abs;
    const double mag = p.sign * std::exp(log_term);
    return Complex(mag * std::cos(l * phase), mag * std::sin(l * phase));
  });
}

SeriesResult series_large_sigma(int beta, double sigma, int j, double tol) {
  validate_series_args(beta, sigma, j);
  if (!(sigma > 0)) throw std::domain_error("series_large_sigma: sigma must be > 0");
  const double xi = convergence_radius(beta);
  if (sigma < xi * (1.0 - 1e-12))
    throw std::domain_error("series_large_sigma: diverges for sigma < xi(beta)");

  // 1/lambda_j = sum_{l>=1} (-l/(beta+1))_{l-1} / l! v^-l,
  // v = sigma^(1/(beta+1)) e^(2 pi i j/(beta+1))
  const double log_v_abs = std::log(sigma) / (beta + 1);
  const double phase = -2.0 * std::numbers::pi * j / (beta + 1);
  SeriesResult r = accumulate_series(tol, [&](long l) {
    const LogSigned p = pochhammer_log(-static_cast<double>(l) / (beta + 1), l - 1);
    if (p.sign == 0) return Complex(0.0, 0.0);
    const double log_term = p.log_abs - std::lgamma(static_cast<double>(l) + 1.0) - l * log_v_abs;
    const double mag = p.sign * std::exp(log_term);
    return Complex(mag * std::cos(l * phase), mag * std::sin(l * phase));
  });
  r.value = 1.0 / r.value;
  return r;
}

RootSet all_roots(int beta, double sigma) {
  if (beta < 0) throw std::domain_error("all_roots: beta must be >= 0");
  if (!(sigma > 0)) throw std::domain_error("all_roots: sigma must be > 0");

  RootSet rs;
  rs.beta = beta;
  rs.sigma = sigma;
  const auto count = static_cast<std::size_t>(beta) + 1;
  rs.roots.resize(count);
  rs.residues.resize(count);
  rs.method.resize(count);

  if (beta == 0) {
    rs.roots[0] = Complex(1.0 + sigma, 0.0);
    rs.method[0] = RootMethod::polish;
  } else {
    const double xi = convergence_radius(beta);
    const bool use_small = sigma <= xi;
    for (int j = 0; j <= beta; ++j) {
      const int partner = (j == 0) ? 0 : beta + 1 - j;
      if (j > 0 && j > partner) {
        rs.roots[static_cast<std::size_t>(j)] = std::conj(rs.roots[static_cast<std::size_t>(partner)]);
        rs.method[static_cast<std::size_t>(j)] = rs.method[static_cast<std::size_t>(partner)];
        continue;
      }
      const SeriesResult seed = use_small ? series_small_sigma(beta, sigma, j)
                                          : series_large_sigma(beta, sigma, j);
      const bool real_root = (j == 0) || (j == partner);
      rs.roots[static_cast<std::size_t>(j)] = newton_polish(beta, sigma, seed.value, real_root);
      rs.method[static_cast<std::size_t>(j)] =
          seed.converged ? (use_small ? RootMethod::series_small : RootMethod::series_large)
                         : RootMethod::newton;
    }
  }

  for (std::size_t j = 0; j < count; ++j) {
    const Complex z = rs.roots[j];
    const Complex denom = static_cast<double>(beta + 1) * z - static_cast<double>(beta);
    if (std::abs(denom) < 1e-10 * (beta + 1))
      throw std::runtime_error("all_roots: residue denominator vanished");
    Complex zpow(1.0, 0.0);
    for (int k = 0; k <= beta; ++k) zpow *= z;
    rs.residues[j] = zpow / denom;
  }

  check_root_set(rs);
  return rs;
}

}  // namespace csma
