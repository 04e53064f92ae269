#ifndef SPARSEHCR_BOUNDS_HPP
#define SPARSEHCR_BOUNDS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparsehcr/error.hpp"
#include "sparsehcr/model.hpp"
#include "sparsehcr/numerics.hpp"

namespace sparsehcr {

/// Exponents above this are reported as an explicit zero term.
inline constexpr double kHcrExponentLimit = 700.0;

/// Relative tolerance under which a residual counts as x lying in the subspace.
inline constexpr double kIndistinguishableTolerance = 1e-20;

struct HcrTerm {
  double value = 0.0;
  double log_value = 0.0;
  bool underflow = false;
};

/// numerator / (exp(exponent) - 1) with the exponential handled in log space.
inline HcrTerm hcr_term(double numerator, double exponent) {
  require(numerator >= 0.0, ErrorCode::InvalidArgument, "HCR numerator must be nonnegative");
  require(exponent > 0.0, ErrorCode::DegenerateSubspace,
          "HCR denominator exponent is zero: x lies in the alternative subspace");
  HcrTerm t;
  const double log_denominator = exponent > 40.0 ? exponent + std::log1p(-std::exp(-exponent))
                                                 : std::log(std::expm1(exponent));
  t.log_value = numerator > 0.0 ? std::log(numerator) - log_denominator
                                : -std::numeric_limits<double>::infinity();
  if (exponent > kHcrExponentLimit) {
    t.underflow = true;
    t.value = 0.0;
  } else {
    t.value = numerator / std::expm1(exponent);
  }
  return t;
}

struct SupportTerm {
  Support support;
  double numerator = 0.0;  // ||s - s_i||^2
  double exponent = 0.0;   // ||x - p_{s_i} x||^2 / sigma^2
  double value = 0.0;
  bool underflow = false;
};

struct HcrReport {
  double value = 0.0;  // bound on tr[cov(s_hat)]; +inf when indistinguishable
  double log_value = 0.0;
  Support argmax_support;
  double d_min = 0.0;
  Support d_min_support;
  bool indistinguishable = false;
  std::uint64_t underflow_count = 0;
  std::uint64_t alternatives = 0;
  std::optional<std::vector<SupportTerm>> per_support_terms;
};

struct BoundReport {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> parameters;
  std::map<std::string, bool> flags;
};

namespace detail {

inline void require_hcr_inputs(const MeasurementSetup& setup, const SparseSignal& signal) {
  require(setup.sigma_sq() > 0.0, ErrorCode::InvalidArgument, "HCR bound requires sigma_sq > 0");
  require(signal.p() == setup.p(), ErrorCode::DimensionMismatch,
          "signal dimension differs from matrix columns");
}

inline double alternative_residual(const MeasurementSetup& setup, const Support& s, const Vec& x) {
  try {
    return residual_norm_sq(setup.columns(s), x);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) {
      throw Error(ErrorCode::RankDeficient, "Phi_s is rank deficient for support " + s.to_string());
    }
    throw;
  }
}

inline bool lies_in_subspace(double residual_sq, double x_norm_sq) {
  return residual_sq <= kIndistinguishableTolerance * x_norm_sq;
}

}  // namespace detail

/// Single-subspace HCR term ||s - s_i||^2 / (exp(||x - p_{s_i} x||^2 / sigma^2) - 1).
inline double hcr_single_term(const MeasurementSetup& setup, const SparseSignal& signal,
                              const Support& s_i) {
  detail::require_hcr_inputs(setup, signal);
  require(s_i != signal.support(), ErrorCode::SameSupport,
          "alternative support equals the true support " + s_i.to_string());
  const Vec x = setup.noiseless(signal);
  const double residual = detail::alternative_residual(setup, s_i, x);
  require(!detail::lies_in_subspace(residual, x.squaredNorm()), ErrorCode::DegenerateSubspace,
          "x lies in the span of " + s_i.to_string());
  return hcr_term(rho2(signal.support(), s_i), residual / setup.sigma_sq()).value;
}

/// HCR lower bound: maximum single-subspace term over every alternative
/// support, together with d_min over the same enumeration. Ties resolve to
/// the lexicographically first support.
inline HcrReport hcr_support_bound(const MeasurementSetup& setup, const SparseSignal& signal,
                                   bool keep_terms = false,
                                   std::uint64_t cap = kDefaultEnumerationCap) {
  detail::require_hcr_inputs(setup, signal);
  const std::size_t p = signal.p();
  const std::size_t k = signal.k();
  const SupportEnumeration supports(p, k, cap);
  require(supports.size() >= 2, ErrorCode::NoAlternativeSupport,
          "p = k leaves no alternative support");

  const Vec x = setup.noiseless(signal);
  const double x_norm_sq = x.squaredNorm();
  HcrReport report;
  if (keep_terms) report.per_support_terms.emplace();
  double best_residual = std::numeric_limits<double>::infinity();
  double best_log = -std::numeric_limits<double>::infinity();
  bool have_argmax = false;

  for (const Support& s : supports) {
    if (s == signal.support()) continue;
    ++report.alternatives;
    const double residual = detail::alternative_residual(setup, s, x);
    if (residual < best_residual) {
      best_residual = residual;
      report.d_min_support = s;
    }
    const double numerator = rho2(signal.support(), s);
    const double exponent = residual / setup.sigma_sq();
    if (detail::lies_in_subspace(residual, x_norm_sq)) {
      if (!report.indistinguishable) {
        report.indistinguishable = true;
        report.argmax_support = s;
      }
      if (keep_terms) {
        report.per_support_terms->push_back(
            {s, numerator, exponent, std::numeric_limits<double>::infinity(), false});
      }
      continue;
    }
    const HcrTerm term = hcr_term(numerator, exponent);
    if (term.underflow) ++report.underflow_count;
    if (keep_terms) {
      report.per_support_terms->push_back({s, numerator, exponent, term.value, term.underflow});
    }
    if (!have_argmax || term.log_value > best_log) {
      best_log = term.log_value;
      have_argmax = true;
      if (!report.indistinguishable) {
        report.argmax_support = s;
        report.value = term.value;
        report.log_value = term.log_value;
      }
    }
  }
  report.d_min = std::sqrt(best_residual);
  if (report.indistinguishable) {
    report.d_min = 0.0;
    report.value = std::numeric_limits<double>::infinity();
    report.log_value = std::numeric_limits<double>::infinity();
  }
  return report;
}

struct DminResult {
  double value = 0.0;
  Support argmin_support;
  bool indistinguishable = false;
};

/// Minimum distance from x = Phi theta to its projections onto every
/// alternative k-column subspace.
inline DminResult d_min(const MeasurementSetup& setup, const SparseSignal& signal,
                        std::uint64_t cap = kDefaultEnumerationCap) {
  require(signal.p() == setup.p(), ErrorCode::DimensionMismatch,
          "signal dimension differs from matrix columns");
  const SupportEnumeration supports(signal.p(), signal.k(), cap);
  require(supports.size() >= 2, ErrorCode::NoAlternativeSupport,
          "p = k leaves no alternative support");
  const Vec x = setup.noiseless(signal);
  double best = std::numeric_limits<double>::infinity();
  DminResult result;
  for (const Support& s : supports) {
    if (s == signal.support()) continue;
    const double residual = detail::alternative_residual(setup, s, x);
    if (residual < best) {
      best = residual;
      result.argmin_support = s;
    }
  }
  if (detail::lies_in_subspace(best, x.squaredNorm())) {
    result.indistinguishable = true;
    result.value = 0.0;
  } else {
    result.value = std::sqrt(best);
  }
  return result;
}

/// beta = d_min^2 / (4 m sigma^2).
inline double distinguishability(double d_min_value, std::size_t m, double sigma_sq) {
  require(d_min_value >= 0.0, ErrorCode::InvalidArgument, "d_min must be nonnegative");
  require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
  require(sigma_sq > 0.0, ErrorCode::InvalidArgument, "sigma_sq must be positive");
  return d_min_value * d_min_value / (4.0 * static_cast<double>(m) * sigma_sq);
}

inline double log_c_beta(double beta) {
  require(beta > 1.0, ErrorCode::BetaOutOfRange,
          "beta must exceed 1, got " + std::to_string(beta));
  return (beta - 1.0) / (2.0 * beta) - std::log(beta) / (2.0 * beta);
}

/// c(beta) = exp((beta - 1) / (2 beta)) / beta^(1 / (2 beta)).
inline double c_beta(double beta) { return std::exp(log_c_beta(beta)); }

namespace detail {

inline void require_even_m(std::size_t m) {
  require(m >= 2 && m % 2 == 0, ErrorCode::OddM,
          "the MLE error bound requires an even number of measurements m, got " +
              std::to_string(m));
}

}  // namespace detail

/// (m/2) c(beta)^(-beta m), evaluated in log space.
inline double mle_error_upper_bound(std::size_t m, double beta) {
  detail::require_even_m(m);
  const double md = static_cast<double>(m);
  return std::exp(std::log(md / 2.0) - beta * md * log_c_beta(beta));
}

/// (k m p^2 / 2) c(beta)^(-beta m).
inline double mle_cov_trace_bound(std::size_t k, std::size_t m, std::size_t p, double beta) {
  const double kp2 = static_cast<double>(k) * static_cast<double>(p) * static_cast<double>(p);
  return kp2 * mle_error_upper_bound(m, beta);
}

/// (1 + epsilon) ln(p) / (beta ln c(beta)).
inline double unbiasedness_threshold(std::size_t p, double beta, double epsilon) {
  require(p >= 2, ErrorCode::InvalidArgument, "p must be >= 2");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  return (1.0 + epsilon) * std::log(static_cast<double>(p)) / (beta * log_c_beta(beta));
}

/// Ratio of the HCR denominator exponent at the d_min subspace, d_min^2/sigma^2
/// = 4 beta m, to the MLE bound exponent beta m ln c(beta). Tends to 8 (about
/// 9 dB) as beta grows.
inline double gap_exponent_ratio(double beta) { return 4.0 / log_c_beta(beta); }

inline double to_decibels(double ratio) { return 10.0 * std::log10(ratio); }

/// max{k, sigma^2 ln(p - k) / theta_min^2}.
inline double necessary_m_lower(std::size_t p, std::size_t k, double theta_min, double sigma_sq) {
  require(k >= 1 && p > k, ErrorCode::InvalidDims,
          "necessary condition needs p > k >= 1 (p=" + std::to_string(p) +
              ", k=" + std::to_string(k) + ")");
  require(theta_min > 0.0 && sigma_sq > 0.0, ErrorCode::InvalidArgument,
          "theta_min and sigma_sq must be positive");
  const double second =
      sigma_sq * std::log(static_cast<double>(p - k)) / (theta_min * theta_min);
  return std::max(static_cast<double>(k), second);
}

/// SNR floor theta_min^2 / sigma^2 > 8 under which the sufficient condition holds.
inline constexpr double kSufficientSnrFloor = 8.0;

struct MsuffResult {
  double value = 0.0;
  std::size_t argmax_ell = 0;
  bool snr_ok = true;  // false when theta_min^2 / sigma^2 <= 8
  std::vector<double> terms;  // per ell = 1..k, without the leading k
};

/// k + max_{1<=ell<=k} { ln k + ell ln(k/ell) + ell ln((p-k)/ell) }.
inline MsuffResult sufficient_m_suff(std::size_t p, std::size_t k, double theta_min,
                                     double sigma_sq) {
  require(k >= 1 && p > k, ErrorCode::InvalidDims,
          "sufficient condition needs p > k >= 1 (p=" + std::to_string(p) +
              ", k=" + std::to_string(k) + ")");
  require(theta_min > 0.0 && sigma_sq > 0.0, ErrorCode::InvalidArgument,
          "theta_min and sigma_sq must be positive");
  MsuffResult r;
  r.snr_ok = theta_min * theta_min / sigma_sq > kSufficientSnrFloor;
  const double kd = static_cast<double>(k);
  const double rest = static_cast<double>(p - k);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t ell = 1; ell <= k; ++ell) {
    const double l = static_cast<double>(ell);
    const double term = std::log(kd) + l * std::log(kd / l) + l * std::log(rest / l);
    r.terms.push_back(term);
    if (term > best) {
      best = term;
      r.argmax_ell = ell;
    }
  }
  r.value = kd + best;
  return r;
}

struct IntegerMeanBounds {
  double cr = 0.0;   // sigma^2 / m
  double hcr = 0.0;  // 1 / (exp(m / sigma^2) - 1)
};

/// alpha^2 / (exp(m alpha^2 / sigma^2) - 1) for an integer offset alpha != 0.
inline double integer_mean_hcr_term(int alpha, std::size_t m, double sigma_sq) {
  require(alpha != 0, ErrorCode::InvalidArgument, "alpha must be nonzero");
  const double a2 = static_cast<double>(alpha) * alpha;
  return hcr_term(a2, static_cast<double>(m) * a2 / sigma_sq).value;
}

inline IntegerMeanBounds integer_mean_hcr(std::size_t m, double sigma_sq) {
  require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
  require(sigma_sq > 0.0, ErrorCode::InvalidArgument, "sigma_sq must be positive");
  return {sigma_sq / static_cast<double>(m), integer_mean_hcr_term(1, m, sigma_sq)};
}

/// MLE pairwise error for direct sqrt(k)-gain sampling of two signals that
/// differ in one position: Q(sqrt(2 k theta_min^2) / (2 sigma)).
inline double direct_measurement_error(std::size_t k, double theta_min, double sigma) {
  require(k >= 1 && theta_min > 0.0 && sigma > 0.0, ErrorCode::InvalidArgument,
          "k, theta_min and sigma must be positive");
  return gaussian_q(std::sqrt(2.0 * static_cast<double>(k) * theta_min * theta_min) / (2.0 * sigma));
}

// ---------------------------------------------------------------------------
// Scaling regimes

enum class SparsityScaling { Linear, Sublinear };
enum class AmplitudeScaling { InverseK, Constant };

/// A (k, theta_min) scaling rule as a function of p.
///
/// Linear sparsity uses k = ceil(p * linear_fraction); sublinear uses
/// k = ceil(sqrt(p)). Amplitudes use theta_min^2 = amplitude_scale / k or
/// theta_min^2 = amplitude_scale.
struct Regime {
  SparsityScaling sparsity = SparsityScaling::Sublinear;
  AmplitudeScaling amplitude = AmplitudeScaling::Constant;
  double linear_fraction = 0.25;
  double amplitude_scale = 1.0;

  std::string name() const {
    return std::string(sparsity == SparsityScaling::Linear ? "linear" : "sublinear") + "-" +
           (amplitude == AmplitudeScaling::InverseK ? "invk" : "const");
  }

  std::size_t k_for(std::size_t p) const {
    const double pd = static_cast<double>(p);
    const double k = sparsity == SparsityScaling::Linear ? std::ceil(pd * linear_fraction)
                                                         : std::ceil(std::sqrt(pd));
    return std::max<std::size_t>(1, static_cast<std::size_t>(k));
  }

  double theta_min_for(std::size_t k) const {
    const double sq = amplitude == AmplitudeScaling::InverseK
                          ? amplitude_scale / static_cast<double>(k)
                          : amplitude_scale;
    return std::sqrt(sq);
  }

  /// Whether the sufficient-condition cell exists for this regime.
  bool has_sufficient_formula() const { return amplitude == AmplitudeScaling::Constant; }

  /// Asymptotic necessary scaling from the regime table.
  std::string necessary_scaling() const {
    if (sparsity == SparsityScaling::Linear) {
      return amplitude == AmplitudeScaling::InverseK ? "Theta(p log p)" : "Theta(p)";
    }
    return amplitude == AmplitudeScaling::InverseK ? "Theta(k log(p-k))"
                                                   : "max{Theta(k), Theta(log(p-k))}";
  }

  std::string sufficient_scaling() const {
    if (!has_sufficient_formula()) return "unavailable";
    return sparsity == SparsityScaling::Linear ? "Theta(p)" : "Theta(k log(p/k))";
  }
};

/// Parses "linear-invk", "linear-const", "sublinear-invk" or "sublinear-const".
inline Regime parse_regime(const std::string& name) {
  Regime r;
  if (name == "linear-invk") {
    r.sparsity = SparsityScaling::Linear;
    r.amplitude = AmplitudeScaling::InverseK;
  } else if (name == "linear-const") {
    r.sparsity = SparsityScaling::Linear;
    r.amplitude = AmplitudeScaling::Constant;
  } else if (name == "sublinear-invk") {
    r.sparsity = SparsityScaling::Sublinear;
    r.amplitude = AmplitudeScaling::InverseK;
  } else if (name == "sublinear-const") {
    r.sparsity = SparsityScaling::Sublinear;
    r.amplitude = AmplitudeScaling::Constant;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown regime '" + name + "'");
  }
  return r;
}

inline std::vector<Regime> table_regimes() {
  return {parse_regime("linear-invk"), parse_regime("linear-const"),
          parse_regime("sublinear-invk"), parse_regime("sublinear-const")};
}

struct RegimeRow {
  Regime regime;
  std::size_t p = 0;
  std::size_t k = 0;
  double theta_min = 0.0;
  double necessary = 0.0;
  std::optional<MsuffResult> sufficient;  // empty where the table has no formula
};

/// Instantiates each scaling regime at dimension p and evaluates the
/// necessary and sufficient measurement counts.
inline std::vector<RegimeRow> regime_table(std::size_t p, double sigma_sq = 1.0) {
  std::vector<RegimeRow> rows;
  for (const Regime& regime : table_regimes()) {
    RegimeRow row;
    row.regime = regime;
    row.p = p;
    row.k = regime.k_for(p);
    require(row.k < p, ErrorCode::InvalidDims,
            "p = " + std::to_string(p) + " too small for regime " + regime.name());
    row.theta_min = regime.theta_min_for(row.k);
    row.necessary = necessary_m_lower(p, row.k, row.theta_min, sigma_sq);
    if (regime.has_sufficient_formula()) {
      row.sufficient = sufficient_m_suff(p, row.k, row.theta_min, sigma_sq);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sparsehcr

#endif  // SPARSEHCR_BOUNDS_HPP
