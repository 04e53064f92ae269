#ifndef SPARSEHCR_GOODNESS_OF_FIT_HPP
#define SPARSEHCR_GOODNESS_OF_FIT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sparsehcr/error.hpp"

namespace sparsehcr {

/// Survival function of the Kolmogorov distribution,
/// Pr(K > lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series converges slowly for small lambda; use the
  // theta-function dual form there.
  if (lambda < 1.18) {
    constexpr double pi = 3.14159265358979323846;
    const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
    double cdf = 0.0;
    for (int j = 1; j < 50; j += 2) cdf += std::pow(y, j * j);
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Asymptotic critical value of sqrt(n) * D_n at significance `level`.
inline double kolmogorov_critical_value(double level) {
  require(level > 0.0 && level < 1.0, ErrorCode::InvalidArgument, "level must be in (0, 1)");
  double lo = 0.1;
  double hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_survival(mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct KsResult {
  double statistic = 0.0;       // D_n
  double scaled_statistic = 0.0;  // sqrt(n) * D_n
  double p_value = 1.0;
  double critical_value = 0.0;  // for sqrt(n) * D_n
  double level = 0.01;
  bool passed = true;
};

/// One-sample two-sided Kolmogorov-Smirnov test against a continuous CDF.
inline KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                        double level = 0.01) {
  require(!samples.empty(), ErrorCode::InvalidArgument, "KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double i_d = static_cast<double>(i);
    d = std::max({d, (i_d + 1.0) / n - f, f - i_d / n});
  }
  KsResult result;
  result.statistic = d;
  result.scaled_statistic = std::sqrt(n) * d;
  result.p_value = kolmogorov_survival(result.scaled_statistic);
  result.level = level;
  result.critical_value = kolmogorov_critical_value(level);
  result.passed = result.scaled_statistic < result.critical_value;
  return result;
}

}  // namespace sparsehcr

#endif  // SPARSEHCR_GOODNESS_OF_FIT_HPP
