#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "sparsehcr/bounds.hpp"

namespace {

using namespace sparsehcr;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sparsehcr::Error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(HcrTerm, MatchesDirectFormula) {
  EXPECT_NEAR(hcr_term(1.0, 1.0).value, 1.0 / (std::exp(1.0) - 1.0), 1e-15);
  // 4 / (x + x^2/2 + ...) = 4/x - 2 + O(x) at x = 1e-8.
  EXPECT_NEAR(hcr_term(4.0, 1e-8).value, 4.0 / 1e-8 - 2.0, 1e-3);
  EXPECT_NEAR(hcr_term(3.0, 50.0).log_value, std::log(3.0) - 50.0, 1e-12);
}

TEST(HcrTerm, FlagsUnderflowAboveExponentLimit) {
  const HcrTerm t = hcr_term(81.0, 750.0);
  EXPECT_TRUE(t.underflow);
  EXPECT_EQ(t.value, 0.0);
  EXPECT_NEAR(t.log_value, std::log(81.0) - 750.0, 1e-9);
  EXPECT_FALSE(hcr_term(81.0, 699.0).underflow);
  EXPECT_EQ(code_of([] { hcr_term(1.0, 0.0); }), ErrorCode::DegenerateSubspace);
}

TEST(HcrSupportBound, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MeasurementSetup setup(sample_gaussian_ensemble(10, 8, seed), 1.0, 2);
    const SparseSignal signal(Support(8, {2, 5}), {1.0, -1.3}, 1.0);
    const HcrReport r = hcr_support_bound(setup, signal, true);
    const auto o = oracle::hcr(setup.phi(), {2, 5}, {1.0, -1.3}, 1.0);
    EXPECT_NEAR(r.value, o.value, 1e-10 * o.value);
    EXPECT_EQ(r.argmax_support.indices(), o.argmax);
    EXPECT_NEAR(r.d_min, o.d_min, 1e-10 * o.d_min);
    EXPECT_EQ(r.alternatives, 27u);
    ASSERT_TRUE(r.per_support_terms.has_value());
    for (const SupportTerm& t : *r.per_support_terms) EXPECT_LE(t.value, r.value);
  }
}

TEST(HcrSupportBound, SingleTermAgreesWithReportedTerms) {
  const MeasurementSetup setup(sample_gaussian_ensemble(9, 7, 3), 0.5, 2);
  const SparseSignal signal = SparseSignal::constant(7, 2, 0.8);
  const HcrReport r = hcr_support_bound(setup, signal, true);
  for (const SupportTerm& t : *r.per_support_terms) {
    EXPECT_NEAR(hcr_single_term(setup, signal, t.support), t.value, 1e-14 + 1e-12 * t.value);
  }
  EXPECT_EQ(code_of([&] { hcr_single_term(setup, signal, signal.support()); }), ErrorCode::SameSupport);
}

TEST(HcrSupportBound, TiesGoToFirstLexicographicSupport) {
  // Identity sampling with k = 1: (1) and (3) are symmetric alternatives to (2).
  const MeasurementSetup setup(Mat::Identity(3, 3), 1.0, 1);
  const SparseSignal signal(Support(3, {2}), {1.0}, 1.0);
  const HcrReport r = hcr_support_bound(setup, signal);
  EXPECT_EQ(r.argmax_support.to_string(), "(1)");
  EXPECT_NEAR(r.value, 1.0 / (std::exp(1.0) - 1.0), 1e-15);
}

TEST(HcrSupportBound, IndistinguishableSupportGivesInfiniteBound) {
  Mat phi = sample_gaussian_ensemble(5, 4, 2);
  phi.col(3) = phi.col(0);
  const SparseSignal signal(Support(4, {1}), {1.0}, 1.0);
  const HcrReport r = hcr_support_bound(MeasurementSetup(phi, 1.0, 1), signal);
  EXPECT_TRUE(r.indistinguishable);
  EXPECT_TRUE(std::isinf(r.value));
  EXPECT_EQ(r.d_min, 0.0);
  EXPECT_EQ(r.argmax_support.to_string(), "(4)");
  const DminResult d = d_min(MeasurementSetup(phi, 1.0, 1), signal);
  EXPECT_TRUE(d.indistinguishable);
}

TEST(HcrSupportBound, Preconditions) {
  const MeasurementSetup setup(sample_gaussian_ensemble(4, 3, 1), 0.0, 1);
  const SparseSignal signal = SparseSignal::constant(3, 1, 1.0);
  EXPECT_EQ(code_of([&] { hcr_support_bound(setup, signal); }), ErrorCode::InvalidArgument);
  const MeasurementSetup square(sample_gaussian_ensemble(4, 2, 1), 1.0, 2);
  EXPECT_EQ(code_of([&] { hcr_support_bound(square, SparseSignal::constant(2, 2, 1.0)); }),
            ErrorCode::NoAlternativeSupport);
  const MeasurementSetup thin(sample_gaussian_ensemble(2, 5, 1), 1.0, 3);
  EXPECT_EQ(code_of([&] { hcr_support_bound(thin, SparseSignal::constant(5, 3, 1.0)); }), ErrorCode::RankDeficient);
}

TEST(HcrSupportBound, ShrinksAsNoiseVanishes) {
  const MeasurementSetup setup(sample_gaussian_ensemble(10, 8, 4), 1.0, 2);
  const SparseSignal signal = SparseSignal::constant(8, 2, 1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double s2 : {1.0, 0.3, 0.1, 0.03, 0.01}) {
    const double v = hcr_support_bound(setup.with_sigma_sq(s2), signal).value;
    EXPECT_LT(v, previous);
    previous = v;
  }
  EXPECT_LT(previous, 1e-20);
}

TEST(Dmin, MatchesBruteForce) {
  const MeasurementSetup setup(sample_gaussian_ensemble(10, 8, 6), 1.0, 3);
  const SparseSignal signal(Support(8, {1, 4, 6}), {2.0, 1.0, -1.0}, 1.0);
  const auto o = oracle::hcr(setup.phi(), {1, 4, 6}, {2.0, 1.0, -1.0}, 1.0);
  EXPECT_NEAR(d_min(setup, signal).value, o.d_min, 1e-10 * o.d_min);
}

TEST(Beta, DistinguishabilityAndC) {
  EXPECT_DOUBLE_EQ(distinguishability(4.0, 2, 1.0), 2.0);
  EXPECT_NEAR(c_beta(2.0), 1.0797324, 1e-7);
  EXPECT_NEAR(log_c_beta(2.0), 0.25 - std::log(2.0) / 4.0, 1e-15);
  EXPECT_NEAR(c_beta(1e8), std::sqrt(std::exp(1.0)), 1e-6);
  EXPECT_EQ(code_of([] { c_beta(1.0); }), ErrorCode::BetaOutOfRange);
  EXPECT_EQ(code_of([] { c_beta(0.5); }), ErrorCode::BetaOutOfRange);
}

TEST(MleErrorBound, KnownValuesAndExpandedForm) {
  EXPECT_NEAR(mle_error_upper_bound(8, 2.0), 1.1722, 1e-4);
  EXPECT_NEAR(mle_error_upper_bound(40, 4.0), 1.92557708e-13, 1e-20);
  for (std::size_t m = 2; m <= 60; m += 2) {
    for (double beta : {1.01, 1.5, 2.0, 4.0, 10.0, 100.0}) {
      const double md = static_cast<double>(m);
      const double expanded = md / 2.0 * std::pow(beta, md / 2.0) * std::exp(-md * (beta - 1.0) / 2.0);
      EXPECT_NEAR(mle_error_upper_bound(m, beta), expanded, 1e-12 * expanded);
    }
  }
}

TEST(MleErrorBound, DecreasesInMPastItsPeak) {
  // (m/2) c^{-beta m} peaks at m = 1 / (beta ln c); about 6.5 for beta = 2.
  for (double beta : {2.0, 5.0}) {
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t m = 10; m <= 40; m += 2) {
      const double v = mle_error_upper_bound(m, beta);
      EXPECT_LT(v, previous) << "beta " << beta << " m " << m;
      previous = v;
    }
  }
}

TEST(MleErrorBound, RejectsOddM) {
  EXPECT_EQ(code_of([] { mle_error_upper_bound(9, 2.0); }), ErrorCode::OddM);
  EXPECT_EQ(code_of([] { mle_error_upper_bound(0, 2.0); }), ErrorCode::OddM);
  EXPECT_EQ(code_of([] { mle_error_upper_bound(8, 1.0); }), ErrorCode::BetaOutOfRange);
}

TEST(CovarianceBound, ScalesErrorBoundByKPSquared) {
  EXPECT_NEAR(mle_cov_trace_bound(2, 12, 10, 3.0), 200.0 * mle_error_upper_bound(12, 3.0), 1e-12);
}

TEST(UnbiasednessThreshold, KnownValue) {
  EXPECT_NEAR(unbiasedness_threshold(1024, 2.0, 0.1), 49.70, 0.01);
  EXPECT_EQ(code_of([] { unbiasedness_threshold(1024, 0.9, 0.1); }), ErrorCode::BetaOutOfRange);
}

TEST(GapRatio, ApproachesEightFromAbove) {
  const double r10 = gap_exponent_ratio(10.0);
  const double r100 = gap_exponent_ratio(100.0);
  const double r1000 = gap_exponent_ratio(1000.0);
  EXPECT_NEAR(r1000, 8.0638, 1e-3);
  EXPECT_NEAR(r100, 8.47, 1e-2);
  EXPECT_NEAR(r10, 11.94, 1e-2);
  EXPECT_GT(r10, r100);
  EXPECT_GT(r100, r1000);
  EXPECT_GE(r1000, 8.0);
  EXPECT_NEAR(to_decibels(8.0), 9.0309, 1e-4);
}

TEST(Necessary, KnownValues) {
  EXPECT_EQ(necessary_m_lower(1024, 10, 1.0, 1.0), 10.0);
  EXPECT_NEAR(necessary_m_lower(1024, 2, 0.1, 1.0), 100.0 * std::log(1022.0), 1e-9);
  EXPECT_NEAR(necessary_m_lower(1024, 2, 0.1, 1.0), 692.95, 0.01);
  EXPECT_EQ(code_of([] { necessary_m_lower(5, 5, 1.0, 1.0); }), ErrorCode::InvalidDims);
}

TEST(Sufficient, KnownValue) {
  const MsuffResult r = sufficient_m_suff(100, 4, 3.0, 1.0);
  EXPECT_NEAR(r.value, 18.10, 0.01);
  EXPECT_EQ(r.argmax_ell, 4u);
  EXPECT_TRUE(r.snr_ok);
  EXPECT_EQ(r.terms.size(), 4u);
  double direct = 0.0;
  for (double ell = 1; ell <= 4; ++ell) {
    direct = std::max(direct, std::log(4.0) + ell * std::log(4.0 / ell) + ell * std::log(96.0 / ell));
  }
  EXPECT_NEAR(r.value, 4.0 + direct, 1e-12);
}

TEST(Sufficient, SnrFlagBelowFloor) {
  EXPECT_FALSE(sufficient_m_suff(100, 4, 2.0, 1.0).snr_ok);
  EXPECT_FALSE(sufficient_m_suff(100, 4, 2.0, 0.5).snr_ok);  // exactly at the floor
  EXPECT_TRUE(sufficient_m_suff(100, 4, 3.0, 1.0).snr_ok);
}

TEST(Sufficient, ArgmaxIsKOnlyAboveOnePlusESquaredTimesK) {
  // The maximand is concave in ell with slope ln(k (p-k) / ell^2) - 2, so
  // ell = k maximizes exactly when p >= (1 + e^2) k.
  for (std::size_t k = 1; k <= 8; ++k) {
    const auto first = static_cast<std::size_t>(std::ceil((1.0 + std::exp(2.0)) * static_cast<double>(k)));
    for (std::size_t p = first; p <= first + 200; ++p) {
      EXPECT_EQ(sufficient_m_suff(p, k, 3.0, 1.0).argmax_ell, k) << "p=" << p << " k=" << k;
    }
  }
  EXPECT_EQ(sufficient_m_suff(16, 4, 3.0, 1.0).argmax_ell, 3u);
}

TEST(IntegerMean, KnownValues) {
  const IntegerMeanBounds b11 = integer_mean_hcr(1, 1.0);
  EXPECT_NEAR(b11.hcr, 0.58198, 1e-5);
  EXPECT_DOUBLE_EQ(b11.cr, 1.0);
  EXPECT_NEAR(integer_mean_hcr(4, 1.0).hcr, 1.0 / (std::exp(4.0) - 1.0), 1e-15);
  for (std::size_t m = 1; m <= 50; ++m) {
    for (double s2 : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      const IntegerMeanBounds b = integer_mean_hcr(m, s2);
      EXPECT_LT(b.hcr, b.cr) << m << " " << s2;
    }
  }
}

TEST(IntegerMean, LargerOffsetsGiveSmallerTerms) {
  for (int alpha = 2; alpha <= 5; ++alpha) {
    EXPECT_LT(integer_mean_hcr_term(alpha, 2, 1.0), integer_mean_hcr_term(1, 2, 1.0));
  }
}

TEST(DirectMeasurement, GaussianTailValue) {
  EXPECT_NEAR(direct_measurement_error(2, 1.0, 1.0), 0.15865525393145707, 1e-15);
  EXPECT_LT(direct_measurement_error(8, 1.0, 1.0), direct_measurement_error(2, 1.0, 1.0));
}

TEST(Regime, InstantiationRules) {
  const Regime lin = parse_regime("linear-invk");
  EXPECT_EQ(lin.k_for(200), 50u);
  EXPECT_NEAR(lin.theta_min_for(50), std::sqrt(1.0 / 50.0), 1e-15);
  const Regime sub = parse_regime("sublinear-const");
  EXPECT_EQ(sub.k_for(10), 4u);
  EXPECT_EQ(sub.k_for(9), 3u);
  EXPECT_EQ(sub.theta_min_for(4), 1.0);
  EXPECT_EQ(sub.name(), "sublinear-const");
  EXPECT_THROW(parse_regime("dense"), Error);
}

TEST(RegimeTable, HasFourRowsWithTwoUnavailableCells) {
  const auto rows = regime_table(200);
  ASSERT_EQ(rows.size(), 4u);
  int unavailable = 0;
  for (const RegimeRow& r : rows) {
    unavailable += r.sufficient ? 0 : 1;
    EXPECT_GE(r.necessary, static_cast<double>(r.k));
  }
  EXPECT_EQ(unavailable, 2);
  EXPECT_EQ(rows[0].regime.sufficient_scaling(), "unavailable");
  EXPECT_EQ(rows[3].regime.sufficient_scaling(), "Theta(k log(p/k))");
}

}  // namespace
