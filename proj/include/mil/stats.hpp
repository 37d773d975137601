#pragma once

#include <span>
#include <vector>

namespace mil {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

MeanSe mean_se(std::span<const double> xs);

/// sqrt(p (1 - p) / n).
double binomial_se(double p, long n);

/// Median; NaN for an empty input.
double median(std::vector<double> xs);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> xs, double q);

}  // namespace mil
