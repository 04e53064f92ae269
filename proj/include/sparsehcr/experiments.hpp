#ifndef SPARSEHCR_EXPERIMENTS_HPP
#define SPARSEHCR_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sparsehcr/bounds.hpp"
#include "sparsehcr/decoders.hpp"
#include "sparsehcr/error.hpp"
#include "sparsehcr/goodness_of_fit.hpp"
#include "sparsehcr/model.hpp"
#include "sparsehcr/numerics.hpp"
#include "sparsehcr/random.hpp"

namespace sparsehcr {

/// Slack, in standard errors, for every statistical comparison.
inline constexpr double kStandardErrorSlack = 3.0;

/// Significance level of the Kolmogorov-Smirnov checks.
inline constexpr double kKsLevel = 0.01;

/// Number of times Phi is redrawn (with phi_seed + 1) after a rank failure.
inline constexpr int kPhiResamples = 3;

struct ExecutionOptions {
  unsigned workers = 1;  // never affects results
};

/// Runs fn(i) for i in [0, n). Each index is handled exactly once and
/// results are written by index, so the output is independent of `workers`.
template <typename Fn>
void parallel_for(std::uint64_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::uint64_t count = std::min<std::uint64_t>(workers, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(count);
  for (std::uint64_t w = 0; w < count; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::uint64_t lo = n * w / count;
        const std::uint64_t hi = n * (w + 1) / count;
        for (std::uint64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

struct TrialConfig {
  std::size_t p = 10;
  std::size_t k = 2;
  std::size_t m = 12;
  double theta_min = 1.0;
  double sigma_sq = 1.0;
  std::vector<double> coefficients;  // empty: theta_min on every entry of (1, ..., k)
  std::uint64_t trials = 1000;
  std::uint64_t base_seed = 1;
  DecoderKind decoder = DecoderKind::Mle;
  bool normalized_mce = false;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;

  SparseSignal signal() const {
    if (coefficients.empty()) return SparseSignal::constant(p, k, theta_min);
    return SparseSignal(Support::leading(p, k), coefficients, theta_min);
  }

  void validate() const {
    require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
    require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
    require(k >= 1 && p > k, ErrorCode::InvalidDims,
            "need p > k >= 1 (p=" + std::to_string(p) + ", k=" + std::to_string(k) + ")");
    require(theta_min > 0.0, ErrorCode::InvalidArgument, "theta_min must be positive");
    require(sigma_sq >= 0.0 && std::isfinite(sigma_sq), ErrorCode::InvalidArgument,
            "sigma_sq must be nonnegative");
    (void)signal();
  }
};

struct ExperimentRecord {
  TrialConfig config;
  std::uint64_t phi_seed = 0;
  Support true_support;
  double empirical_p_err = 0.0;
  double se_p_err = 0.0;
  double ci_half_width_p_err = 0.0;  // 95% normal approximation
  double mean_rho2 = 0.0;
  std::vector<double> empirical_bias;
  double bias_norm = 0.0;
  double empirical_cov_trace = 0.0;
  double se_cov_trace = 0.0;
  double d_min = 0.0;
  double beta = 0.0;  // +inf when sigma_sq == 0
  std::optional<double> hcr_bound;
  std::optional<double> lemma2_bound;
  std::optional<double> theorem4_bound;
  std::uint64_t lemma1_covered = 0;     // trials with ||eps|| < d_min / 2
  std::uint64_t lemma1_violations = 0;  // of those, trials decoded wrongly
};

namespace detail {

struct PreparedInstance {
  std::uint64_t phi_seed = 0;
  MeasurementSetup setup;
  std::optional<SubspaceBank> bank;
  HcrReport hcr;  // only meaningful when sigma_sq > 0
  double d_min = 0.0;
};

inline PreparedInstance prepare_instance(const TrialConfig& config) {
  const SparseSignal signal = config.signal();
  std::uint64_t phi_seed = config.base_seed;
  for (int attempt = 0;; ++attempt, ++phi_seed) {
    try {
      MeasurementSetup setup(sample_gaussian_ensemble(config.m, config.p, phi_seed),
                             config.sigma_sq, config.k);
      PreparedInstance inst{phi_seed, setup, std::nullopt, {}, 0.0};
      if (config.decoder == DecoderKind::Mle) inst.bank.emplace(setup, config.k, config.enumeration_cap);
      if (config.sigma_sq > 0.0) {
        inst.hcr = hcr_support_bound(setup, signal, false, config.enumeration_cap);
        inst.d_min = inst.hcr.d_min;
      } else {
        inst.d_min = d_min(setup, signal, config.enumeration_cap).value;
      }
      return inst;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient || attempt >= kPhiResamples) throw;
    }
  }
}

inline double standard_error_of_mean(const std::vector<double>& values, double mean) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace detail

/// Monte Carlo estimate of a decoder's error rate, bias and covariance trace
/// for one fixed Phi, with per-trial noise drawn from (base_seed, trial).
inline ExperimentRecord run_monte_carlo(const TrialConfig& config,
                                        const ExecutionOptions& exec = {}) {
  config.validate();
  const SparseSignal signal = config.signal();
  const detail::PreparedInstance inst = detail::prepare_instance(config);
  const Vec x = inst.setup.noiseless(signal);
  const std::size_t k = config.k;
  const std::uint64_t n = config.trials;

  std::vector<std::size_t> decoded(n * k);
  std::vector<double> noise_norm(n);
  parallel_for(n, exec.workers, [&](std::uint64_t t) {
    RandomStream rng(config.base_seed, StreamPurpose::Noise, t);
    const Vec eps = config.sigma_sq > 0.0 ? sample_noise(config.m, config.sigma_sq, rng)
                                          : Vec::Zero(static_cast<Eigen::Index>(config.m));
    const Vec y = x + eps;
    noise_norm[t] = eps.norm();
    Support s_hat = config.decoder == DecoderKind::Mle
                        ? inst.bank->supports()[inst.bank->argmin(y)]
                        : mce_select(inst.setup, y, k, config.normalized_mce);
    std::copy(s_hat.indices().begin(), s_hat.indices().end(), decoded.begin() + static_cast<std::ptrdiff_t>(t * k));
  });

  ExperimentRecord rec;
  rec.config = config;
  rec.phi_seed = inst.phi_seed;
  rec.true_support = signal.support();
  rec.d_min = inst.d_min;

  // Integer accumulators keep the sums exact and order-free.
  std::uint64_t errors = 0;
  std::int64_t rho2_sum = 0;
  std::vector<std::int64_t> index_sum(k, 0);
  for (std::uint64_t t = 0; t < n; ++t) {
    bool wrong = false;
    for (std::size_t j = 0; j < k; ++j) {
      const auto est = static_cast<std::int64_t>(decoded[t * k + j]);
      const auto truth = static_cast<std::int64_t>(signal.support()[j]);
      index_sum[j] += est;
      rho2_sum += (est - truth) * (est - truth);
      wrong = wrong || est != truth;
    }
    if (wrong) ++errors;
    if (noise_norm[t] < inst.d_min / 2.0) {
      ++rec.lemma1_covered;
      if (wrong && config.decoder == DecoderKind::Mle) ++rec.lemma1_violations;
    }
  }
  const auto nd = static_cast<double>(n);
  rec.empirical_p_err = static_cast<double>(errors) / nd;
  rec.se_p_err = std::sqrt(rec.empirical_p_err * (1.0 - rec.empirical_p_err) / nd);
  rec.ci_half_width_p_err = 1.96 * rec.se_p_err;
  rec.mean_rho2 = static_cast<double>(rho2_sum) / nd;

  std::vector<double> mean(k);
  double bias_sq = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    mean[j] = static_cast<double>(index_sum[j]) / nd;
    const auto offset = index_sum[j] - static_cast<std::int64_t>(n * signal.support()[j]);
    const double b = static_cast<double>(offset) / nd;
    rec.empirical_bias.push_back(b);
    bias_sq += b * b;
  }
  rec.bias_norm = std::sqrt(bias_sq);

  std::vector<double> spread(n);
  double spread_sum = 0.0;
  for (std::uint64_t t = 0; t < n; ++t) {
    double d = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double diff = static_cast<double>(decoded[t * k + j]) - mean[j];
      d += diff * diff;
    }
    spread[t] = d;
    spread_sum += d;
  }
  rec.empirical_cov_trace = spread_sum / nd;
  rec.se_cov_trace = detail::standard_error_of_mean(spread, rec.empirical_cov_trace);

  if (config.sigma_sq > 0.0) {
    rec.beta = distinguishability(inst.d_min, config.m, config.sigma_sq);
    rec.hcr_bound = inst.hcr.value;
    if (rec.beta > 1.0 && config.m % 2 == 0) {
      rec.lemma2_bound = mle_error_upper_bound(config.m, rec.beta);
      rec.theorem4_bound = mle_cov_trace_bound(config.k, config.m, config.p, rec.beta);
    }
  } else {
    rec.beta = std::numeric_limits<double>::infinity();
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Bound verification

struct Lemma2Check {
  ExperimentRecord record;
  bool applicable = false;
  std::string reason;  // why the check does not apply
  double beta = 0.0;
  double bound = 0.0;
  double bound_recomputed = 0.0;
  double slack = 0.0;  // 3 standard errors of the error rate
  bool passed = false;
};

/// (m/2) beta^(m/2) exp(-m (beta - 1) / 2): the MLE error bound written
/// without c(beta).
inline double mle_error_bound_expanded(std::size_t m, double beta) {
  const double md = static_cast<double>(m);
  return std::exp(std::log(md / 2.0) + 0.5 * md * std::log(beta) - 0.5 * md * (beta - 1.0));
}

/// Compares the empirical MLE error rate with (m/2) c(beta)^(-beta m).
inline Lemma2Check verify_lemma2(const TrialConfig& config, const ExecutionOptions& exec = {}) {
  Lemma2Check check;
  check.record = run_monte_carlo(config, exec);
  check.beta = check.record.beta;
  if (config.m % 2 != 0) {
    check.reason = "m is odd";
    return check;
  }
  if (!(config.sigma_sq > 0.0)) {
    check.reason = "sigma_sq is zero";
    return check;
  }
  if (!(check.beta > 1.0)) {
    check.reason = "beta <= 1";
    return check;
  }
  check.applicable = true;
  check.bound = mle_error_upper_bound(config.m, check.beta);
  check.bound_recomputed = mle_error_bound_expanded(config.m, check.beta);
  check.slack = kStandardErrorSlack * check.record.se_p_err;
  check.passed = check.record.empirical_p_err <= check.bound + check.slack;
  return check;
}

struct HcrCheck {
  ExperimentRecord record;
  bool applicable = false;
  std::string reason;
  double epsilon = 0.1;
  double threshold = 0.0;  // unbiasedness threshold on m
  double hcr_value = 0.0;
  double cov_trace = 0.0;
  double cov_slack = 0.0;
  double theorem4_bound = 0.0;
  double bias_norm = 0.0;
  double bias_tolerance = 0.0;
  bool bias_voided = false;
  bool lower_ok = false;
  bool upper_ok = false;
  bool passed = false;
  // Exponent comparison between the two bounds.
  double hcr_exponent = 0.0;  // d_min^2 / sigma^2
  double mle_exponent = 0.0;  // beta m ln c(beta)
  double exponent_ratio = 0.0;
  double gap_db = 0.0;
};

/// Checks HCR <= empirical tr cov <= (k m p^2 / 2) c(beta)^(-beta m) for an
/// instance above the unbiasedness threshold. A measurably biased estimate
/// voids the lower comparison, since the HCR bound covers unbiased
/// estimators only.
inline HcrCheck verify_hcr(const TrialConfig& config, const ExecutionOptions& exec = {},
                           double epsilon = 0.1) {
  HcrCheck check;
  check.epsilon = epsilon;
  check.record = run_monte_carlo(config, exec);
  const ExperimentRecord& rec = check.record;
  if (!(config.sigma_sq > 0.0)) {
    check.reason = "sigma_sq is zero";
    return check;
  }
  if (!(rec.beta > 1.0)) {
    check.reason = "beta <= 1";
    return check;
  }
  if (config.m % 2 != 0) {
    check.reason = "m is odd";
    return check;
  }
  check.threshold = unbiasedness_threshold(config.p, rec.beta, epsilon);
  check.hcr_exponent = rec.d_min * rec.d_min / config.sigma_sq;
  check.mle_exponent = rec.beta * static_cast<double>(config.m) * log_c_beta(rec.beta);
  check.exponent_ratio = check.hcr_exponent / check.mle_exponent;
  check.gap_db = to_decibels(check.exponent_ratio);
  if (static_cast<double>(config.m) < check.threshold) {
    check.reason = "m below unbiasedness threshold";
    return check;
  }
  check.applicable = true;
  const auto n = static_cast<double>(config.trials);
  check.hcr_value = *rec.hcr_bound;
  check.cov_trace = rec.empirical_cov_trace;
  // With no observed deviation the sample standard error is zero; one unit
  // deviation in n trials is the resolution of the estimate.
  check.cov_slack = kStandardErrorSlack * std::max(rec.se_cov_trace, 1.0 / n);
  check.theorem4_bound = *rec.theorem4_bound;
  check.bias_norm = rec.bias_norm;
  check.bias_tolerance = kStandardErrorSlack * std::sqrt(rec.empirical_cov_trace / n);
  check.bias_voided = check.bias_norm > check.bias_tolerance;
  check.upper_ok = check.cov_trace <= check.theorem4_bound + check.cov_slack;
  check.lower_ok = check.hcr_value <= check.cov_trace + check.cov_slack;
  check.passed = check.upper_ok && (check.lower_ok || check.bias_voided);
  return check;
}

// ---------------------------------------------------------------------------
// Necessary-condition witness

struct WitnessRecord {
  std::size_t p = 0, k = 0, m = 0;
  double theta_min = 0.0, sigma_sq = 0.0;
  std::uint64_t seed = 0, trials = 0;
  Support support;
  Support witness_support;
  double witness_rho2 = 0.0;
  KsResult ks;
  double mean_z = 0.0;
  // Tail of Z at T = sigma^2 ln(p - k) / theta_min^2.
  double threshold = 0.0;
  double condition_constant = 0.5;
  bool condition_holds = false;  // m < (1 - C) T
  double tail_bound = 0.0;       // exp(-(T - m)^2 / (4 m))
  double empirical_tail = 0.0;
  double se_tail = 0.0;
  bool tail_passed = false;
  double fraction_below_threshold = 0.0;
  double median_hcr_term = 0.0;  // median of (p-k)^2 / (exp(||x - x'||^2 / sigma^2) - 1)
};

/// Builds theta on (1..k) with theta_k = theta_min and the adjacent witness
/// theta' on (1..k-1, p), then samples Z = ||Phi (theta - theta')||^2 /
/// (2 theta_min^2) over independent Gaussian Phi. Only the columns where
/// theta and theta' differ enter x - x', so only those columns are drawn.
inline WitnessRecord theorem3_witness(std::size_t p, std::size_t k, double theta_min,
                                      double sigma_sq, std::size_t m, std::uint64_t seed,
                                      std::uint64_t trials, const ExecutionOptions& exec = {}) {
  require(k >= 1 && p > k, ErrorCode::InvalidDims,
          "witness needs p > k >= 1 (p=" + std::to_string(p) + ", k=" + std::to_string(k) + ")");
  require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
  require(trials >= 1000, ErrorCode::InvalidArgument, "witness needs at least 1000 trials");
  require(theta_min > 0.0 && sigma_sq > 0.0, ErrorCode::InvalidArgument,
          "theta_min and sigma_sq must be positive");

  const SparseSignal theta = SparseSignal::constant(p, k, theta_min);
  std::vector<std::size_t> alt = theta.support().indices();
  alt.back() = p;
  const SparseSignal theta_prime(Support(p, alt), theta.coefficients(), theta_min);

  // Columns where the two signals differ, with the coefficient difference.
  const Vec dense_diff = theta.dense() - theta_prime.dense();
  std::vector<std::size_t> diff_cols;
  std::vector<double> diff_coef;
  for (Eigen::Index i = 0; i < dense_diff.size(); ++i) {
    if (dense_diff(i) != 0.0) {
      diff_cols.push_back(static_cast<std::size_t>(i));
      diff_coef.push_back(dense_diff(i));
    }
  }

  WitnessRecord rec;
  rec.p = p;
  rec.k = k;
  rec.m = m;
  rec.theta_min = theta_min;
  rec.sigma_sq = sigma_sq;
  rec.seed = seed;
  rec.trials = trials;
  rec.support = theta.support();
  rec.witness_support = theta_prime.support();
  rec.witness_rho2 = rho2(rec.support, rec.witness_support);

  std::vector<double> z(trials);
  parallel_for(trials, exec.workers, [&](std::uint64_t t) {
    RandomStream rng(seed, StreamPurpose::Witness, t);
    Vec diff = Vec::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t c = 0; c < diff_cols.size(); ++c) {
      for (Eigen::Index r = 0; r < diff.size(); ++r) diff(r) += rng.normal() * diff_coef[c];
    }
    z[t] = diff.squaredNorm() / (2.0 * theta_min * theta_min);
  });

  const int dof = static_cast<int>(m);
  rec.ks = ks_test(z, [dof](double v) { return chi_square_cdf(dof, std::max(0.0, v)); }, kKsLevel);

  const auto nd = static_cast<double>(trials);
  double z_sum = 0.0;
  for (double v : z) z_sum += v;
  rec.mean_z = z_sum / nd;

  const double md = static_cast<double>(m);
  rec.threshold = sigma_sq * std::log(static_cast<double>(p - k)) / (theta_min * theta_min);
  rec.condition_holds = md < (1.0 - rec.condition_constant) * rec.threshold;
  rec.tail_bound = std::exp(-(rec.threshold - md) * (rec.threshold - md) / (4.0 * md));
  std::uint64_t exceed = 0;
  for (double v : z) exceed += v >= rec.threshold ? 1 : 0;
  rec.empirical_tail = static_cast<double>(exceed) / nd;
  rec.fraction_below_threshold = 1.0 - rec.empirical_tail;
  rec.se_tail = std::sqrt(rec.empirical_tail * (1.0 - rec.empirical_tail) / nd);
  rec.tail_passed =
      rec.condition_holds && rec.empirical_tail <= rec.tail_bound + kStandardErrorSlack * rec.se_tail;

  std::vector<double> terms(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double exponent = 2.0 * theta_min * theta_min * z[t] / sigma_sq;
    terms[t] = exponent > 0.0 ? hcr_term(rec.witness_rho2, exponent).value
                              : std::numeric_limits<double>::infinity();
  }
  std::nth_element(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(trials / 2), terms.end());
  rec.median_hcr_term = terms[trials / 2];
  return rec;
}

struct ResidualChiSquareRecord {
  std::size_t m = 0, k = 0, p = 0;
  Support support;
  Support alternative;
  std::uint64_t seed = 0, trials = 0;
  int dof = 0;
  KsResult ks;
};

/// Samples X = ||P_perp(s') Phi_{s \ s'} theta_{s \ s'}||^2 / ||theta_{s \ s'}||^2
/// over independent Gaussian Phi and tests it against chi-square(m - k).
inline ResidualChiSquareRecord residual_chi_square_check(std::size_t m, std::size_t k, std::size_t p,
                                                         const Support& alternative,
                                                         std::uint64_t seed, std::uint64_t trials,
                                                         const ExecutionOptions& exec = {}) {
  require(k >= 1 && p > k && m > k, ErrorCode::InvalidDims, "need m > k and p > k");
  const Support truth = Support::leading(p, k);
  require(alternative.p() == p && alternative.k() == k && alternative != truth,
          ErrorCode::InvalidArgument, "alternative must be a different support of the same size");
  std::vector<std::size_t> exclusive;
  for (std::size_t idx : truth.indices()) {
    if (!alternative.contains(idx)) exclusive.push_back(idx);
  }

  ResidualChiSquareRecord rec;
  rec.m = m;
  rec.k = k;
  rec.p = p;
  rec.support = truth;
  rec.alternative = alternative;
  rec.seed = seed;
  rec.trials = trials;
  rec.dof = static_cast<int>(m - k);

  std::vector<double> x(trials);
  parallel_for(trials, exec.workers, [&](std::uint64_t t) {
    RandomStream rng(seed, StreamPurpose::Matrix, t + 1);
    Mat phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
    for (Eigen::Index r = 0; r < phi.rows(); ++r) {
      for (Eigen::Index c = 0; c < phi.cols(); ++c) phi(r, c) = rng.normal();
    }
    const MeasurementSetup setup(phi, 1.0, k);
    Vec v = Vec::Zero(static_cast<Eigen::Index>(m));
    double theta_sq = 0.0;
    for (std::size_t idx : exclusive) {
      const double coef = 1.0 + static_cast<double>(idx);  // any nonzero amplitudes
      v += coef * phi.col(static_cast<Eigen::Index>(idx - 1));
      theta_sq += coef * coef;
    }
    x[t] = residual_norm_sq(setup.columns(alternative), v) / theta_sq;
  });
  const int dof = rec.dof;
  rec.ks = ks_test(x, [dof](double v) { return chi_square_cdf(dof, std::max(0.0, v)); }, kKsLevel);
  return rec;
}

// ---------------------------------------------------------------------------
// Regime sweeps

enum class SweepBase { Sufficient, Necessary };

inline std::string to_string(SweepBase base) {
  return base == SweepBase::Sufficient ? "sufficient" : "necessary";
}

struct SweepPoint {
  std::size_t p = 0;
  std::size_t k = 0;
  double theta_min = 0.0;
  SweepBase base = SweepBase::Sufficient;
  double formula_value = 0.0;
  bool snr_ok = true;  // sufficient formula's SNR precondition
  double multiplier = 1.0;
  std::size_t m = 0;
  bool m_clamped = false;  // raised to k + 1 so the true subspace is not all of R^m
  std::optional<ExperimentRecord> record;
  std::optional<std::string> error;
};

/// Measurement count ceil(multiplier * formula), raised to k + 1 when needed.
inline std::size_t sweep_measurements(double formula, double multiplier, std::size_t k,
                                      bool* clamped = nullptr) {
  const auto raw = static_cast<std::size_t>(std::ceil(multiplier * formula - 1e-9));
  const std::size_t m = std::max(raw, k + 1);
  if (clamped) *clamped = m != raw;
  return m;
}

/// Instantiates (k, theta_min) per the regime at each p, sets m at each
/// multiple of the chosen formula, and runs the MLE Monte Carlo.
inline std::vector<SweepPoint> regime_sweep(const Regime& regime,
                                            const std::vector<std::size_t>& p_grid,
                                            std::uint64_t trials,
                                            const std::vector<double>& multipliers,
                                            SweepBase base, std::uint64_t base_seed,
                                            double sigma_sq = 1.0,
                                            std::uint64_t cap = kDefaultEnumerationCap,
                                            const ExecutionOptions& exec = {}) {
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
  std::vector<SweepPoint> out;
  for (std::size_t p : p_grid) {
    for (double mult : multipliers) {
      SweepPoint pt;
      pt.p = p;
      pt.base = base;
      pt.multiplier = mult;
      try {
        pt.k = regime.k_for(p);
        pt.theta_min = regime.theta_min_for(pt.k);
        if (base == SweepBase::Sufficient) {
          const MsuffResult suff = sufficient_m_suff(p, pt.k, pt.theta_min, sigma_sq);
          pt.formula_value = suff.value;
          pt.snr_ok = suff.snr_ok;
        } else {
          pt.formula_value = necessary_m_lower(p, pt.k, pt.theta_min, sigma_sq);
        }
        pt.m = sweep_measurements(pt.formula_value, mult, pt.k, &pt.m_clamped);
        TrialConfig cfg;
        cfg.p = p;
        cfg.k = pt.k;
        cfg.m = pt.m;
        cfg.theta_min = pt.theta_min;
        cfg.sigma_sq = sigma_sq;
        cfg.trials = trials;
        cfg.base_seed = base_seed;
        cfg.enumeration_cap = cap;
        pt.record = run_monte_carlo(cfg, exec);
      } catch (const Error& e) {
        pt.error = e.what();
      }
      out.push_back(std::move(pt));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integer-mean example

struct IntegerMeanRecord {
  std::size_t m = 0;
  double sigma_sq = 0.0;
  std::uint64_t trials = 0, seed = 0;
  double mean_estimate = 0.0;  // equals the bias, since the truth is 0
  double variance = 0.0;
  double se_variance = 0.0;
  double cr = 0.0;
  double hcr = 0.0;
  bool below_cr = false;
  bool passed = false;  // variance >= hcr - 3 se
};

/// Estimates an integer mean (truth 0) by rounding the sample mean of m
/// N(0, sigma^2) draws, and compares the estimator's variance with the
/// restricted-parameter bound 1/(exp(m/sigma^2) - 1) and sigma^2/m.
inline IntegerMeanRecord integer_mean_experiment(std::size_t m, double sigma_sq,
                                                 std::uint64_t trials, std::uint64_t seed,
                                                 const ExecutionOptions& exec = {}) {
  require(m >= 1, ErrorCode::InvalidArgument, "m must be >= 1");
  require(sigma_sq >= 0.0, ErrorCode::InvalidArgument, "sigma_sq must be nonnegative");
  require(trials >= 1000, ErrorCode::InvalidArgument, "integer-mean experiment needs at least 1000 trials");
  std::vector<std::int64_t> est(trials);
  const double sigma = std::sqrt(sigma_sq);
  parallel_for(trials, exec.workers, [&](std::uint64_t t) {
    RandomStream rng(seed, StreamPurpose::Noise, t);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += sigma * rng.normal();
    est[t] = static_cast<std::int64_t>(std::round(sum / static_cast<double>(m)));
  });

  IntegerMeanRecord rec;
  rec.m = m;
  rec.sigma_sq = sigma_sq;
  rec.trials = trials;
  rec.seed = seed;
  const auto nd = static_cast<double>(trials);
  std::int64_t total = 0;
  for (auto v : est) total += v;
  rec.mean_estimate = static_cast<double>(total) / nd;
  double m2 = 0.0;
  double m4 = 0.0;
  for (auto v : est) {
    const double d = static_cast<double>(v) - rec.mean_estimate;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  rec.variance = m2 / nd;
  m4 /= nd;
  rec.se_variance = std::sqrt(std::max(0.0, m4 - rec.variance * rec.variance) / nd);
  if (sigma_sq > 0.0) {
    const IntegerMeanBounds b = integer_mean_hcr(m, sigma_sq);
    rec.cr = b.cr;
    rec.hcr = b.hcr;
  }
  rec.below_cr = rec.variance < rec.cr;
  rec.passed = rec.variance >= rec.hcr - kStandardErrorSlack * rec.se_variance;
  return rec;
}

}  // namespace sparsehcr

#endif  // SPARSEHCR_EXPERIMENTS_HPP
