#ifndef SPARSEHCR_NUMERICS_HPP
#define SPARSEHCR_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "sparsehcr/error.hpp"

namespace sparsehcr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace detail {

inline void require_finite(const Mat& a, const char* name) {
  require(a.allFinite(), ErrorCode::InvalidArgument, std::string(name) + " has non-finite entries");
}

}  // namespace detail

/// Orthonormal basis of the column span of `a` via column-pivoted
/// Householder QR. A column counts as independent when its pivot exceeds
/// max(rows, cols) * eps * (largest column norm).
inline Mat orthonormal_basis(const Mat& a) {
  require(a.rows() >= 1 && a.cols() >= 1, ErrorCode::DimensionMismatch, "empty matrix");
  require(a.rows() >= a.cols(), ErrorCode::RankDeficient,
          "matrix has more columns (" + std::to_string(a.cols()) + ") than rows (" +
              std::to_string(a.rows()) + ")");
  detail::require_finite(a, "matrix");

  Eigen::ColPivHouseholderQR<Mat> qr(a);
  qr.setThreshold(static_cast<double>(std::max(a.rows(), a.cols())) *
                  std::numeric_limits<double>::epsilon());
  const auto rank = qr.rank();
  if (rank < a.cols() || qr.maxPivot() == 0.0) {
    throw Error(ErrorCode::RankDeficient, "numerical rank " + std::to_string(rank) + " < " +
                                              std::to_string(a.cols()) + " columns");
  }
  return qr.householderQ() * Mat::Identity(a.rows(), a.cols());
}

/// Projection of v onto span(Q) for a matrix with orthonormal columns.
inline Vec project_onto_basis(const Mat& q, const Vec& v) { return q * (q.transpose() * v); }

/// ||v - Q Q^T v||^2 for a matrix with orthonormal columns.
inline double residual_norm_sq_basis(const Mat& q, const Vec& v) {
  return (v - project_onto_basis(q, v)).squaredNorm();
}

inline Vec project(const Mat& a, const Vec& v) {
  require(v.size() == a.rows(), ErrorCode::DimensionMismatch,
          "vector length " + std::to_string(v.size()) + " != rows " + std::to_string(a.rows()));
  return project_onto_basis(orthonormal_basis(a), v);
}

/// Squared distance from v to the column span of a.
inline double residual_norm_sq(const Mat& a, const Vec& v) {
  require(v.size() == a.rows(), ErrorCode::DimensionMismatch,
          "vector length " + std::to_string(v.size()) + " != rows " + std::to_string(a.rows()));
  return residual_norm_sq_basis(orthonormal_basis(a), v);
}

// ---------------------------------------------------------------------------
// Chi-square and Gaussian distribution functions

namespace detail {

// Series for P(a, x), used for x < a.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), used for x >= a.
inline double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double regularized_gamma_p(double a, double x) {
  require(a > 0.0, ErrorCode::InvalidArgument, "shape must be positive");
  require(x >= 0.0, ErrorCode::InvalidArgument, "argument must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  // Split at x = a, i.e. at chi-square argument = dof.
  if (x < a) return std::min(1.0, detail::gamma_p_series(a, x));
  return std::max(0.0, 1.0 - detail::gamma_q_continued_fraction(a, x));
}

/// CDF of the chi-square distribution with `dof` degrees of freedom.
inline double chi_square_cdf(int dof, double x) {
  require(dof >= 1, ErrorCode::InvalidArgument, "dof must be >= 1");
  require(x >= 0.0, ErrorCode::InvalidArgument, "x must be nonnegative");
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

/// Finite-sum form of the chi-square CDF, exact for even degrees of freedom:
/// 1 - exp(-x/2) * sum_{t < dof/2} (x/2)^t / t!.
inline double chi_square_cdf_even_sum(int dof, double x) {
  require(dof >= 2, ErrorCode::InvalidArgument, "dof must be >= 2");
  require(dof % 2 == 0, ErrorCode::OddDof,
          "finite-sum identity requires even dof, got " + std::to_string(dof));
  require(x >= 0.0, ErrorCode::InvalidArgument, "x must be nonnegative");
  const double half = 0.5 * x;
  double term = 1.0;
  double sum = 1.0;
  for (int t = 1; t < dof / 2; ++t) {
    term *= half / t;
    sum += term;
  }
  return std::clamp(1.0 - std::exp(-half) * sum, 0.0, 1.0);
}

/// exp(-t), the tail level for Z ~ chi-square(m). It bounds
/// Pr(Z >= chi_square_tail_threshold_strict(m, t)) for every t; with the
/// shorter chi_square_tail_threshold it only holds for moderate t (it fails
/// at m = 10, t = 5).
inline double chi_square_tail_bound(int m, double t) {
  require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
  require(t >= 0.0, ErrorCode::InvalidArgument, "t must be nonnegative");
  return std::exp(-t);
}

/// Threshold m + 2 sqrt(m t) matching chi_square_tail_bound(m, t).
inline double chi_square_tail_threshold(int m, double t) {
  return m + 2.0 * std::sqrt(static_cast<double>(m) * t);
}

/// Laurent-Massart threshold m + 2 sqrt(m t) + 2t.
inline double chi_square_tail_threshold_strict(int m, double t) { return chi_square_tail_threshold(m, t) + 2.0 * t; }

/// Standard Gaussian tail Q(x) = Pr(N(0,1) > x).
inline double gaussian_q(double x) {
  require(!std::isnan(x), ErrorCode::InvalidArgument, "x must not be NaN");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

}  // namespace sparsehcr

#endif  // SPARSEHCR_NUMERICS_HPP
