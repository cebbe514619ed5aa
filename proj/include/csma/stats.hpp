#pragma once

#include <vector>

namespace csma {

double mean(const std::vector<double>& xs);

// Unbiased sample standard deviation (n-1 denominator).
double sample_stddev(const std::vector<double>& xs);

// Standard error of the mean of a batch-means sample.
double batch_stderr(const std::vector<double>& batch_means);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// Quantile of the chi-square distribution with dof degrees of freedom.
double chi_square_quantile(int dof, double p);

// Pearson statistic sum (O-E)^2 / E over all cells.
double chi_square_statistic(const std::vector<double>& observed,
                            const std::vector<double>& expected);

}  // namespace csma
