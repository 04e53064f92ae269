#ifndef SPARSEHCR_DECODERS_HPP
#define SPARSEHCR_DECODERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sparsehcr/error.hpp"
#include "sparsehcr/model.hpp"
#include "sparsehcr/numerics.hpp"

namespace sparsehcr {

/// Residuals closer than this fraction of ||y||^2 are treated as ties.
inline constexpr double kResidualTieTolerance = 1e-12;

enum class DecoderKind { Mle, Mce };

inline std::string to_string(DecoderKind kind) { return kind == DecoderKind::Mle ? "mle" : "mce"; }

inline DecoderKind parse_decoder(const std::string& name) {
  if (name == "mle") return DecoderKind::Mle;
  if (name == "mce") return DecoderKind::Mce;
  throw Error(ErrorCode::InvalidArgument, "unknown decoder '" + name + "' (expected mle or mce)");
}

struct DecodeResult {
  Support support;
  double residual_norm_sq = 0.0;
  std::vector<double> coefficients;  // least-squares fit on `support`
  std::string method;
};

namespace detail {

inline void require_measurement_length(const MeasurementSetup& setup, const Vec& y) {
  require(static_cast<std::size_t>(y.size()) == setup.m(), ErrorCode::DimensionMismatch,
          "measurement length " + std::to_string(y.size()) + " != m = " +
              std::to_string(setup.m()));
}

inline Mat support_basis(const MeasurementSetup& setup, const Support& s) {
  try {
    return orthonormal_basis(setup.columns(s));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) {
      throw Error(ErrorCode::RankDeficient, "Phi_s is rank deficient for support " + s.to_string());
    }
    throw;
  }
}

inline std::vector<double> least_squares(const MeasurementSetup& setup, const Support& s,
                                         const Vec& y) {
  const Vec c = setup.columns(s).colPivHouseholderQr().solve(y);
  return {c.data(), c.data() + c.size()};
}

/// Running argmin with the lexicographic tie rule; supports arrive in order.
class ResidualArgmin {
 public:
  explicit ResidualArgmin(double y_norm_sq) : tolerance_(kResidualTieTolerance * y_norm_sq) {}

  bool offer(double residual) {
    if (!have_ || residual < best_ - tolerance_) {
      best_ = residual;
      have_ = true;
      return true;
    }
    return false;
  }

  double best() const { return best_; }

 private:
  double tolerance_;
  double best_ = std::numeric_limits<double>::infinity();
  bool have_ = false;
};

}  // namespace detail

/// Exhaustive maximum-likelihood decoder: the k-column subspace closest to y.
/// Supports are streamed, so memory stays O(m k).
inline DecodeResult mle_decode(const MeasurementSetup& setup, const Vec& y, std::size_t k,
                               std::uint64_t cap = kDefaultEnumerationCap) {
  detail::require_measurement_length(setup, y);
  detail::ResidualArgmin argmin(y.squaredNorm());
  DecodeResult result;
  for (const Support& s : SupportEnumeration(setup.p(), k, cap)) {
    const double r = residual_norm_sq_basis(detail::support_basis(setup, s), y);
    if (argmin.offer(r)) result.support = s;
  }
  result.residual_norm_sq = argmin.best();
  result.coefficients = detail::least_squares(setup, result.support, y);
  result.method = "mle";
  return result;
}

/// Orthonormal bases of every k-column subspace of a fixed matrix, for
/// repeated decoding against the same Phi.
class SubspaceBank {
 public:
  SubspaceBank(const MeasurementSetup& setup, std::size_t k,
               std::uint64_t cap = kDefaultEnumerationCap)
      : setup_(setup), k_(k) {
    for (const Support& s : SupportEnumeration(setup.p(), k, cap)) {
      supports_.push_back(s);
      bases_.push_back(detail::support_basis(setup, s));
    }
  }

  std::size_t k() const { return k_; }
  std::size_t size() const { return supports_.size(); }
  const std::vector<Support>& supports() const { return supports_; }
  const Mat& basis(std::size_t i) const { return bases_[i]; }

  /// Index of the support closest to y, with the same tie rule as mle_decode.
  std::size_t argmin(const Vec& y, double* residual = nullptr) const {
    detail::ResidualArgmin best(y.squaredNorm());
    std::size_t index = 0;
    for (std::size_t i = 0; i < bases_.size(); ++i) {
      if (best.offer(residual_norm_sq_basis(bases_[i], y))) index = i;
    }
    if (residual) *residual = best.best();
    return index;
  }

  DecodeResult decode(const Vec& y) const {
    detail::require_measurement_length(setup_, y);
    double residual = 0.0;
    const std::size_t i = argmin(y, &residual);
    return {supports_[i], residual, detail::least_squares(setup_, supports_[i], y), "mle"};
  }

 private:
  MeasurementSetup setup_;
  std::size_t k_;
  std::vector<Support> supports_;
  std::vector<Mat> bases_;
};

/// Indices of the k columns with the largest |<phi_i, y>| (optionally
/// divided by ||phi_i||), ties toward the smaller index.
inline Support mce_select(const MeasurementSetup& setup, const Vec& y, std::size_t k,
                          bool normalized = false) {
  detail::require_measurement_length(setup, y);
  require(k >= 1 && k <= setup.p(), ErrorCode::DimensionMismatch,
          "k must satisfy 1 <= k <= p");
  const Vec corr = setup.phi().transpose() * y;
  std::vector<double> score(setup.p());
  for (std::size_t i = 0; i < setup.p(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    score[i] = std::abs(corr(c));
    if (normalized) {
      const double norm = setup.phi().col(c).norm();
      score[i] = norm > 0.0 ? score[i] / norm : 0.0;
    }
  }
  std::vector<std::size_t> order(setup.p());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < k; ++i) chosen.push_back(order[i] + 1);
  std::sort(chosen.begin(), chosen.end());
  return Support(setup.p(), std::move(chosen));
}

/// Maximum-correlation estimator with a least-squares fit on its support.
inline DecodeResult mce_decode(const MeasurementSetup& setup, const Vec& y, std::size_t k,
                               bool normalized = false) {
  DecodeResult result;
  result.support = mce_select(setup, y, k, normalized);
  const Mat cols = setup.columns(result.support);
  const Vec c = cols.colPivHouseholderQr().solve(y);
  result.coefficients.assign(c.data(), c.data() + c.size());
  result.residual_norm_sq = (y - cols * c).squaredNorm();
  result.method = "mce";
  return result;
}

/// True iff the MLE prefers s_prime over the true support for this y.
inline bool pairwise_ml_error_event(const MeasurementSetup& setup, const SparseSignal& signal,
                                    const Support& s_prime, const Vec& y) {
  require(s_prime != signal.support(), ErrorCode::SameSupport,
          "alternative support equals the true support " + s_prime.to_string());
  detail::require_measurement_length(setup, y);
  const double alt = residual_norm_sq_basis(detail::support_basis(setup, s_prime), y);
  const double truth = residual_norm_sq_basis(detail::support_basis(setup, signal.support()), y);
  return alt < truth;
}

}  // namespace sparsehcr

#endif  // SPARSEHCR_DECODERS_HPP
