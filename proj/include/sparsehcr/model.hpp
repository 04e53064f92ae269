#ifndef SPARSEHCR_MODEL_HPP
#define SPARSEHCR_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "sparsehcr/error.hpp"
#include "sparsehcr/numerics.hpp"
#include "sparsehcr/random.hpp"

namespace sparsehcr {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Binomial coefficient, saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto max = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result == C(n - k + i - 1, i - 1), so the division is exact.
    result = result * (n - k + i) / i;
    if (result > max) return max;
  }
  return static_cast<std::uint64_t>(result);
}

/// Sorted k-tuple of 1-based positions in {1, ..., p}.
class Support {
 public:
  Support() = default;

  Support(std::size_t p, std::vector<std::size_t> indices) : p_(p), indices_(std::move(indices)) {
    require(p_ >= 1, ErrorCode::InvalidArgument, "support dimension p must be >= 1");
    require(!indices_.empty() && indices_.size() <= p_, ErrorCode::InvalidArgument,
            "support size k must satisfy 1 <= k <= p");
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      require(indices_[i] >= 1 && indices_[i] <= p_, ErrorCode::InvalidArgument,
              "support index " + std::to_string(indices_[i]) + " outside [1, " +
                  std::to_string(p_) + "]");
      require(i == 0 || indices_[i - 1] < indices_[i], ErrorCode::InvalidArgument,
              "support indices must be strictly increasing");
    }
  }

  /// The support (1, ..., k).
  static Support leading(std::size_t p, std::size_t k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i + 1;
    return Support(p, std::move(idx));
  }

  std::size_t p() const { return p_; }
  std::size_t k() const { return indices_.size(); }
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t operator[](std::size_t i) const { return indices_[i]; }

  bool contains(std::size_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(indices_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Support&, const Support&) = default;
  friend auto operator<=>(const Support& a, const Support& b) {
    return a.indices_ <=> b.indices_;
  }

 private:
  std::size_t p_ = 0;
  std::vector<std::size_t> indices_;
};

namespace detail {

inline void require_comparable(const Support& a, const Support& b) {
  require(a.p() == b.p() && a.k() == b.k(), ErrorCode::DimensionMismatch,
          "supports differ in p or k: " + a.to_string() + " vs " + b.to_string());
}

}  // namespace detail

inline int rho1(const Support& s, const Support& s_prime) {
  detail::require_comparable(s, s_prime);
  return s == s_prime ? 0 : 1;
}

/// Squared Euclidean distance between index tuples.
inline double rho2(const Support& s, const Support& s_prime) {
  detail::require_comparable(s, s_prime);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < s.k(); ++i) {
    const auto d = static_cast<std::int64_t>(s[i]) - static_cast<std::int64_t>(s_prime[i]);
    sum += d * d;
  }
  return static_cast<double>(sum);
}

/// k-sparse vector in R^p with every nonzero magnitude >= theta_min.
class SparseSignal {
 public:
  SparseSignal(Support support, std::vector<double> coefficients, double theta_min)
      : support_(std::move(support)), coefficients_(std::move(coefficients)), theta_min_(theta_min) {
    require(theta_min_ > 0.0 && std::isfinite(theta_min_), ErrorCode::InvalidArgument,
            "theta_min must be positive and finite");
    require(coefficients_.size() == support_.k(), ErrorCode::DimensionMismatch,
            "need exactly k coefficients");
    for (double c : coefficients_) {
      require(std::isfinite(c) && std::abs(c) >= theta_min_, ErrorCode::InvalidArgument,
              "coefficient " + std::to_string(c) + " violates |theta_i| >= theta_min");
    }
  }

  /// All coefficients equal to theta_min on (1, ..., k).
  static SparseSignal constant(std::size_t p, std::size_t k, double theta_min) {
    return SparseSignal(Support::leading(p, k), std::vector<double>(k, theta_min), theta_min);
  }

  std::size_t p() const { return support_.p(); }
  std::size_t k() const { return support_.k(); }
  const Support& support() const { return support_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double theta_min() const { return theta_min_; }

  Vec dense() const {
    Vec v = Vec::Zero(static_cast<Eigen::Index>(p()));
    for (std::size_t i = 0; i < k(); ++i) v(static_cast<Eigen::Index>(support_[i] - 1)) = coefficients_[i];
    return v;
  }

  /// The same signal with every coefficient and theta_min multiplied by c > 0.
  SparseSignal scaled(double c) const {
    std::vector<double> coeffs = coefficients_;
    for (double& x : coeffs) x *= c;
    return SparseSignal(support_, std::move(coeffs), theta_min_ * c);
  }

 private:
  Support support_;
  std::vector<double> coefficients_;
  double theta_min_;
};

/// Measurement matrix with the noise variance it is used under.
class MeasurementSetup {
 public:
  MeasurementSetup(Mat phi, double sigma_sq, std::size_t k = 1)
      : phi_(std::move(phi)), sigma_sq_(sigma_sq), k_(k) {
    require(phi_.rows() >= 1 && phi_.cols() >= 1, ErrorCode::InvalidArgument,
            "measurement matrix must be at least 1x1");
    require(phi_.allFinite(), ErrorCode::InvalidArgument, "measurement matrix has non-finite entries");
    require(sigma_sq_ >= 0.0 && std::isfinite(sigma_sq_), ErrorCode::InvalidArgument,
            "sigma_sq must be nonnegative and finite");
  }

  const Mat& phi() const { return phi_; }
  double sigma_sq() const { return sigma_sq_; }
  std::size_t k() const { return k_; }
  std::size_t m() const { return static_cast<std::size_t>(phi_.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(phi_.cols()); }

  MeasurementSetup with_sigma_sq(double sigma_sq) const { return {phi_, sigma_sq, k_}; }

  /// Column submatrix Phi_s.
  Mat columns(const Support& s) const {
    require(s.p() == p(), ErrorCode::DimensionMismatch, "support dimension differs from matrix columns");
    Mat out(phi_.rows(), static_cast<Eigen::Index>(s.k()));
    for (std::size_t j = 0; j < s.k(); ++j) {
      out.col(static_cast<Eigen::Index>(j)) = phi_.col(static_cast<Eigen::Index>(s[j] - 1));
    }
    return out;
  }

  /// Noiseless image x = Phi_s theta_s.
  Vec noiseless(const SparseSignal& signal) const {
    require(signal.p() == p(), ErrorCode::DimensionMismatch,
            "signal dimension " + std::to_string(signal.p()) + " != matrix columns " +
                std::to_string(p()));
    const Mat cols = columns(signal.support());
    const Eigen::Map<const Vec> coeffs(signal.coefficients().data(),
                                       static_cast<Eigen::Index>(signal.k()));
    return cols * coeffs;
  }

 private:
  Mat phi_;
  double sigma_sq_;
  std::size_t k_;
};

// ---------------------------------------------------------------------------
// Support enumeration

/// Lexicographic successor of a k-subset of {1..p}; false past the last one.
inline bool next_support_indices(std::vector<std::size_t>& idx, std::size_t p) {
  const std::size_t k = idx.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (idx[i] < p - (k - 1 - i)) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

/// All C(p, k) supports in lexicographic order, produced lazily.
class SupportEnumeration {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Support;
    using difference_type = std::ptrdiff_t;
    using pointer = const Support*;
    using reference = const Support&;

    iterator() = default;
    iterator(std::size_t p, std::size_t k) : current_(Support::leading(p, k)), done_(false) {}

    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }

    iterator& operator++() {
      auto idx = current_.indices();
      if (next_support_indices(idx, current_.p())) {
        current_ = Support(current_.p(), std::move(idx));
      } else {
        done_ = true;
      }
      return *this;
    }
    void operator++(int) { ++*this; }

    friend bool operator==(const iterator& a, const iterator& b) {
      if (a.done_ || b.done_) return a.done_ == b.done_;
      return a.current_ == b.current_;
    }

   private:
    Support current_;
    bool done_ = true;
  };

  SupportEnumeration(std::size_t p, std::size_t k, std::uint64_t cap = kDefaultEnumerationCap)
      : p_(p), k_(k), count_(binomial(p, k)) {
    require(k >= 1 && k <= p, ErrorCode::InvalidArgument,
            "enumeration needs 1 <= k <= p (k=" + std::to_string(k) + ", p=" + std::to_string(p) + ")");
    require(count_ <= cap, ErrorCode::CapExceeded,
            "C(" + std::to_string(p) + "," + std::to_string(k) + ") = " + std::to_string(count_) +
                " exceeds enumeration cap " + std::to_string(cap));
  }

  iterator begin() const { return iterator(p_, k_); }
  iterator end() const { return iterator(); }
  std::uint64_t size() const { return count_; }

 private:
  std::size_t p_;
  std::size_t k_;
  std::uint64_t count_;
};

inline SupportEnumeration enumerate_supports(std::size_t p, std::size_t k,
                                             std::uint64_t cap = kDefaultEnumerationCap) {
  return SupportEnumeration(p, k, cap);
}

// ---------------------------------------------------------------------------
// Ensembles and measurements

/// m x p matrix of i.i.d. N(0, 1) entries, filled row-major from the
/// matrix stream of `seed`.
inline Mat sample_gaussian_ensemble(std::size_t m, std::size_t p, std::uint64_t seed) {
  require(m >= 1 && p >= 1, ErrorCode::InvalidArgument, "m and p must be >= 1");
  RandomStream rng(seed, StreamPurpose::Matrix, 0);
  Mat phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
  for (Eigen::Index r = 0; r < phi.rows(); ++r) {
    for (Eigen::Index c = 0; c < phi.cols(); ++c) phi(r, c) = rng.normal();
  }
  return phi;
}

/// N(0, sigma_sq I_m) noise vector drawn from `rng`.
inline Vec sample_noise(std::size_t m, double sigma_sq, RandomStream& rng) {
  Vec eps(static_cast<Eigen::Index>(m));
  const double sigma = std::sqrt(sigma_sq);
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = sigma * rng.normal();
  return eps;
}

/// y = Phi theta + eps with eps ~ N(0, sigma^2 I) from the noise stream of `seed`.
inline Vec measure(const MeasurementSetup& setup, const SparseSignal& signal, std::uint64_t seed) {
  const Vec x = setup.noiseless(signal);
  if (setup.sigma_sq() == 0.0) return x;
  RandomStream rng(seed, StreamPurpose::Noise, 0);
  return x + sample_noise(setup.m(), setup.sigma_sq(), rng);
}

struct IndependenceReport {
  std::size_t subset_size = 0;
  bool exhaustive = false;
  std::uint64_t checked = 0;
  std::vector<Support> failures;  // column subsets found rank deficient

  bool passed() const { return failures.empty(); }
};

/// Rank-tests 2k-column submatrices of Phi: every subset when C(p, 2k) <=
/// max_checks, otherwise max_checks uniformly sampled subsets.
inline IndependenceReport verify_2k_independence(const MeasurementSetup& setup, std::size_t k,
                                                 std::uint64_t max_checks, std::uint64_t seed) {
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  require(max_checks >= 1, ErrorCode::InvalidArgument, "max_checks must be >= 1");
  const std::size_t width = 2 * k;
  require(width <= setup.m(), ErrorCode::Infeasible,
          "2k = " + std::to_string(width) + " columns cannot be independent in m = " +
              std::to_string(setup.m()) + " dimensions");
  require(width <= setup.p(), ErrorCode::Infeasible,
          "2k = " + std::to_string(width) + " exceeds p = " + std::to_string(setup.p()));

  IndependenceReport report;
  report.subset_size = width;
  auto test = [&](const Support& cols) {
    ++report.checked;
    try {
      (void)orthonormal_basis(setup.columns(cols));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
      report.failures.push_back(cols);
    }
  };

  const std::uint64_t total = binomial(setup.p(), width);
  if (total <= max_checks) {
    report.exhaustive = true;
    for (const Support& cols : SupportEnumeration(setup.p(), width, total)) test(cols);
    return report;
  }

  RandomStream rng(seed, StreamPurpose::Sampling, 0);
  std::vector<std::size_t> pool(setup.p());
  for (std::uint64_t c = 0; c < max_checks; ++c) {
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i + 1;
    for (std::size_t i = 0; i < width; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(width));
    std::sort(chosen.begin(), chosen.end());
    test(Support(setup.p(), std::move(chosen)));
  }
  return report;
}

}  // namespace sparsehcr

#endif  // SPARSEHCR_MODEL_HPP
