#include <gtest/gtest.h>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "sparsehcr/goodness_of_fit.hpp"
#include "sparsehcr/model.hpp"

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

TEST(Support, ValidatesIndices) {
  EXPECT_NO_THROW(Support(5, {1, 3, 5}));
  EXPECT_EQ(code_of([] { Support(5, {3, 1}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { Support(5, {1, 1}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { Support(5, {0, 2}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { Support(5, {2, 6}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { Support(5, {}); }), ErrorCode::InvalidArgument);
}

TEST(Support, AccessorsAndOrdering) {
  const Support s(6, {2, 4, 6});
  EXPECT_EQ(s.to_string(), "(2,4,6)");
  EXPECT_TRUE(s.contains(4));
  EXPECT_FALSE(s.contains(3));
  EXPECT_EQ(Support::leading(6, 3).to_string(), "(1,2,3)");
  EXPECT_LT(Support(6, {1, 5}), Support(6, {2, 3}));
}

TEST(Metrics, Rho1IsExactMatchIndicator) {
  EXPECT_EQ(rho1(Support(5, {1, 2}), Support(5, {1, 2})), 0);
  EXPECT_EQ(rho1(Support(5, {1, 2}), Support(5, {1, 3})), 1);
}

TEST(Metrics, Rho2IsSquaredIndexDistance) {
  EXPECT_EQ(rho2(Support(5, {1, 2}), Support(5, {1, 3})), 1.0);
  EXPECT_EQ(rho2(Support(5, {1, 2}), Support(5, {3, 4})), 8.0);
  // Witness pair (1..k) vs (1..k-1, p).
  EXPECT_EQ(rho2(Support(100, {1, 2, 3}), Support(100, {1, 2, 100})), 97.0 * 97.0);
}

TEST(Metrics, RejectMismatchedSupports) {
  EXPECT_EQ(code_of([] { rho1(Support(5, {1, 2}), Support(6, {1, 2})); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { rho2(Support(5, {1, 2}), Support(5, {1, 2, 3})); }), ErrorCode::DimensionMismatch);
}

TEST(SparseSignal, EnforcesAmplitudeClass) {
  EXPECT_NO_THROW(SparseSignal(Support(4, {1, 3}), {2.0, -1.5}, 1.5));
  EXPECT_THROW(SparseSignal(Support(4, {1, 3}), {2.0, 1.0}, 1.5), Error);
  EXPECT_THROW(SparseSignal(Support(4, {1, 3}), {2.0}, 1.0), Error);
  EXPECT_THROW(SparseSignal(Support(4, {1, 3}), {2.0, 2.0}, 0.0), Error);
}

TEST(SparseSignal, DenseVectorPlacesCoefficients) {
  const SparseSignal s(Support(5, {2, 5}), {3.0, -4.0}, 1.0);
  const Vec d = s.dense();
  ASSERT_EQ(d.size(), 5);
  EXPECT_EQ(d(0), 0.0);
  EXPECT_EQ(d(1), 3.0);
  EXPECT_EQ(d(4), -4.0);
}

TEST(Binomial, MatchesBoostAndSaturates) {
  for (unsigned n = 0; n <= 60; ++n) {
    for (unsigned k = 0; k <= n; ++k) {
      const double expected = boost::math::binomial_coefficient<double>(n, k);
      if (expected < 1e15) {
        EXPECT_EQ(binomial(n, k), static_cast<std::uint64_t>(expected)) << n << " " << k;
      }
    }
  }
  EXPECT_EQ(binomial(60, 30), 118264581564861424ULL);
  EXPECT_EQ(binomial(3, 5), 0u);
  EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(SupportEnumeration, IsLexicographicAndComplete) {
  std::vector<std::string> seen;
  for (const Support& s : enumerate_supports(5, 2)) seen.push_back(s.to_string());
  const std::vector<std::string> expected{"(1,2)", "(1,3)", "(1,4)", "(1,5)", "(2,3)",
                                          "(2,4)", "(2,5)", "(3,4)", "(3,5)", "(4,5)"};
  EXPECT_EQ(seen, expected);
  EXPECT_EQ(enumerate_supports(10, 3).size(), 120u);
  std::uint64_t count = 0;
  for (const Support& s : enumerate_supports(10, 10)) {
    (void)s;
    ++count;
  }
  EXPECT_EQ(count, 1u);
}

TEST(SupportEnumeration, EnforcesCap) {
  EXPECT_EQ(code_of([] { enumerate_supports(30, 15); }), ErrorCode::CapExceeded);
  EXPECT_EQ(code_of([] { enumerate_supports(10, 3, 119); }), ErrorCode::CapExceeded);
  EXPECT_NO_THROW(enumerate_supports(10, 3, 120));
  EXPECT_EQ(code_of([] { enumerate_supports(3, 4); }), ErrorCode::InvalidArgument);
}

TEST(MeasurementSetup, ColumnsAndNoiselessImage) {
  Mat phi(2, 3);
  phi << 1, 2, 3, 4, 5, 6;
  const MeasurementSetup setup(phi, 1.0, 2);
  const SparseSignal s(Support(3, {1, 3}), {1.0, -1.0}, 1.0);
  const Vec x = setup.noiseless(s);
  EXPECT_EQ(x(0), -2.0);
  EXPECT_EQ(x(1), -2.0);
  EXPECT_EQ(setup.columns(Support(3, {2})).col(0)(1), 5.0);
  EXPECT_THROW(setup.noiseless(SparseSignal::constant(4, 1, 1.0)), Error);
  EXPECT_THROW(MeasurementSetup(phi, -1.0), Error);
}

TEST(GaussianEnsemble, IsSeededAndStandardNormal) {
  const Mat a = sample_gaussian_ensemble(40, 50, 3);
  EXPECT_EQ(a, sample_gaussian_ensemble(40, 50, 3));
  EXPECT_NE(a, sample_gaussian_ensemble(40, 50, 4));
  std::vector<double> entries(a.data(), a.data() + a.size());
  const auto phi = [](double x) { return 0.5 * boost::math::erfc(-x / std::sqrt(2.0)); };
  EXPECT_TRUE(ks_test(entries, phi).passed);
}

TEST(Measure, NoiselessWhenSigmaIsZero) {
  const MeasurementSetup setup(sample_gaussian_ensemble(6, 8, 1), 0.0, 2);
  const SparseSignal s = SparseSignal::constant(8, 2, 1.5);
  EXPECT_EQ(measure(setup, s, 9), setup.noiseless(s));
}

TEST(Measure, NoiseHasRequestedVariance) {
  const MeasurementSetup setup(sample_gaussian_ensemble(4000, 2, 1), 2.5, 1);
  const SparseSignal s = SparseSignal::constant(2, 1, 1.0);
  const Vec eps = measure(setup, s, 11) - setup.noiseless(s);
  const double var = eps.squaredNorm() / static_cast<double>(eps.size());
  EXPECT_NEAR(var, 2.5, 4.0 * 2.5 * std::sqrt(2.0 / 4000.0));
  EXPECT_EQ(measure(setup, s, 11), measure(setup, s, 11));
}

TEST(Independence, GaussianMatrixPassesExhaustively) {
  const MeasurementSetup setup(sample_gaussian_ensemble(6, 8, 2), 1.0, 2);
  const IndependenceReport r = verify_2k_independence(setup, 2, 1000, 1);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.checked, binomial(8, 4));
  EXPECT_TRUE(r.passed());
}

TEST(Independence, DetectsRepeatedColumn) {
  Mat phi = sample_gaussian_ensemble(6, 8, 2);
  phi.col(7) = phi.col(0);
  const IndependenceReport r = verify_2k_independence(MeasurementSetup(phi, 1.0, 2), 2, 1000, 1);
  EXPECT_FALSE(r.passed());
  for (const Support& s : r.failures) EXPECT_TRUE(s.contains(1) && s.contains(8));
  EXPECT_EQ(r.failures.size(), binomial(6, 2));
}

TEST(Independence, SamplesWhenExhaustiveIsTooExpensive) {
  const MeasurementSetup setup(sample_gaussian_ensemble(8, 20, 2), 1.0, 2);
  const IndependenceReport r = verify_2k_independence(setup, 2, 50, 3);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_EQ(r.checked, 50u);
  EXPECT_TRUE(r.passed());
}

TEST(Independence, InfeasibleWhenTwoKExceedsM) {
  const MeasurementSetup setup(sample_gaussian_ensemble(3, 8, 2), 1.0, 2);
  EXPECT_EQ(code_of([&] { verify_2k_independence(setup, 2, 10, 1); }), ErrorCode::Infeasible);
}

}  // namespace
