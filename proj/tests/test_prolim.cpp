#include "oracles.hpp"

#include "thetaforge/error.hpp"
#include "thetaforge/lattice.hpp"
#include "thetaforge/prolim.hpp"
#include "thetaforge/random_lattice.hpp"
#include "thetaforge/special.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace tf = thetaforge;

namespace {

std::vector<double> powers(double base, int count, double scale = 1.0) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(scale * std::pow(base, i));
  return out;
}

tf::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const tf::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return tf::ErrorKind::DomainError;
}

}  // namespace

TEST(ProjectiveSystem, DiagonalStructure) {
  const tf::ProjectiveSystem sys = tf::diagonal_system({1.0, 4.0, 16.0});
  EXPECT_EQ(sys.depth(), 3);
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(sys.levels()[k].rank(), k);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(sys.kernels()[k].rank(), 1);
    EXPECT_NEAR(sys.kernels()[k].gram()(0, 0), std::pow(4.0, k), 1e-12);
  }
  EXPECT_EQ(sys.composite(1, 3).rows(), 1);
  EXPECT_EQ(sys.composite(1, 3).cols(), 3);
  EXPECT_EQ(sys.truncated(1).depth(), 1);
}

TEST(ProjectiveSystem, RejectsNonSurjectiveMaps) {
  std::vector<tf::EuclideanLattice> levels{tf::identity_lattice(1), tf::identity_lattice(2)};
  tf::IntMatrix doubled(1, 2);
  doubled << 2, 0;
  EXPECT_EQ(kind_of([&] { tf::ProjectiveSystem(levels, {doubled}); }), tf::ErrorKind::NotSaturated);
}

TEST(ProjectiveSystem, RejectsWrongQuotientMetric) {
  std::vector<tf::EuclideanLattice> levels{tf::line_bundle(0.5), tf::identity_lattice(2)};
  tf::IntMatrix proj(1, 2);
  proj << 1, 0;
  EXPECT_EQ(kind_of([&] { tf::ProjectiveSystem(levels, {proj}); }), tf::ErrorKind::DomainError);
}

TEST(ProjectiveSystem, JsonRoundTrip) {
  const tf::ProjectiveSystem sys = tf::hardy_system(2.0, 0.5, 4);
  const tf::ProjectiveSystem back = tf::projective_system_from_json(tf::projective_system_to_json(sys));
  ASSERT_EQ(back.depth(), sys.depth());
  for (int k = 0; k <= sys.depth(); ++k) EXPECT_EQ(back.levels()[k].gram(), sys.levels()[k].gram());
  EXPECT_EQ(kind_of([] { tf::projective_system_from_json(nlohmann::json::parse(R"({"levels": [{"gram": []}, {"gram": [[1]]}]})")); }),
            tf::ErrorKind::ParseError);
}

TEST(MinimalPreimage, MatchesBoxSearch) {
  for (int trial = 0; trial < 20; ++trial) {
    tf::SplitMix64 rng = tf::SplitMix64::stream(61, static_cast<std::uint64_t>(trial));
    const auto l = tf::random_lattice(rng, 3);
    const tf::IntMatrix u = tf::random_unimodular(rng, 3);
    const tf::IntMatrix map = u.topRows(2);
    tf::IntVector target(2);
    target << static_cast<std::int64_t>(rng() % 5) - 2, static_cast<std::int64_t>(rng() % 5) - 2;
    const tf::IntVector x = tf::minimal_preimage(l, map, target);
    EXPECT_EQ(map * x, target);
    double best = std::numeric_limits<double>::infinity();
    oracle::for_box(3, 12, [&](const std::vector<long>& v) {
      tf::IntVector c(3);
      for (int i = 0; i < 3; ++i) c(i) = v[i];
      if (map * c == target) best = std::min(best, oracle::quad(l.gram(), v));
    });
    EXPECT_NEAR(l.norm2(x), best, 1e-10 * (1.0 + best)) << "trial " << trial;
  }
}

TEST(Summability, HardyKernels) {
  const double eps = 0.3;
  const tf::SummabilityReport r = tf::summability_report(tf::hardy_system(2.0, 0.0, 10), eps);
  ASSERT_EQ(r.kernel_h0.size(), 10u);
  for (int i = 0; i < 10; ++i) {
    const double expected = oracle::log_theta_1d(std::pow(4.0, i) * std::exp(-2.0 * eps));
    EXPECT_NEAR(r.kernel_h0[i], expected, 1e-10);
  }
  EXPECT_EQ(r.status, "certified-for-this-filtration");
  EXPECT_NEAR(r.partial_sums[8], r.partial_sums[9], 1e-15);
}

TEST(Summability, ConstantSystemDiverges) {
  const tf::SummabilityReport r = tf::summability_report(tf::diagonal_system(std::vector<double>(6, 1.0)), 0.0);
  EXPECT_EQ(r.status, "divergent-at-depth");
  EXPECT_FALSE(r.tail.summable);
  EXPECT_NEAR(r.partial_sums.back(), 6.0 * tf::eta0(), 1e-9);
  EXPECT_EQ(kind_of([] { tf::limit_h0(tf::diagonal_system(std::vector<double>(6, 1.0))); }),
            tf::ErrorKind::NotSummableAtDepth);
  EXPECT_EQ(kind_of([] { tf::limit_measure_truncation(tf::diagonal_system(std::vector<double>(6, 1.0)), 6); }),
            tf::ErrorKind::NotSummableAtDepth);
}

TEST(Summability, FiniteSystemStabilizes) {
  std::vector<tf::EuclideanLattice> levels{tf::EuclideanLattice(), tf::identity_lattice(1), tf::identity_lattice(1),
                                           tf::identity_lattice(1)};
  std::vector<tf::IntMatrix> maps{tf::IntMatrix::Zero(0, 1), tf::IntMatrix::Identity(1, 1),
                                  tf::IntMatrix::Identity(1, 1)};
  const tf::ProjectiveSystem sys(levels, maps);
  const tf::SummabilityReport r = tf::summability_report(sys, 0.0);
  EXPECT_EQ(r.status, "certified-for-this-filtration");
  EXPECT_NEAR(r.partial_sums.back(), r.partial_sums.front(), 1e-15);
  const tf::LimitH0 lim = tf::limit_h0(sys);
  EXPECT_NEAR(lim.estimate, tf::eta0(), 2e-10);
  EXPECT_NEAR(lim.upper, lim.estimate, 1e-9);
}

TEST(LimitH0, DiagonalClosedForm) {
  const std::vector<double> lambdas = powers(4.0, 8);
  double closed = 0.0;
  for (double v : lambdas) closed += oracle::log_theta_1d(v);
  const tf::LimitH0 lim = tf::limit_h0(tf::diagonal_system(lambdas));
  EXPECT_NEAR(lim.estimate, closed, 1e-10);
  EXPECT_LE(lim.lower, lim.estimate + 4e-10);
  EXPECT_LE(lim.estimate, lim.upper + 4e-10);
  EXPECT_TRUE(lim.monotone);
  EXPECT_TRUE(lim.subadditive);
}

TEST(LimitH0, HardyTruncationApproachesSeries) {
  const double delta = 3.0;
  const tf::LimitH0 lim = tf::limit_h0(tf::hardy_system(2.0, delta, 12));
  double direct = 0.0;
  for (int n = 0; n < 40; ++n) direct += oracle::log_theta_1d(std::pow(4.0, n) * std::exp(-2.0 * delta));
  EXPECT_NEAR(tf::hardy_invariant(2.0, delta), direct, 1e-12 * direct);
  EXPECT_NEAR(lim.estimate, direct, 1e-9 * direct);
  EXPECT_LE(lim.lower, direct + 1e-9);
  EXPECT_GE(lim.upper, direct - 1e-9);
}

TEST(Hardy, FinitenessAndSlope) {
  EXPECT_TRUE(std::isinf(tf::hardy_invariant(1.0, 2.0)));
  EXPECT_TRUE(std::isinf(tf::hardy_invariant(0.5, -1.0)));
  double first_terms = 0.0;
  for (int n = 0; n < 30; ++n) first_terms += oracle::log_theta_1d(std::pow(4.0, n));
  EXPECT_NEAR(tf::hardy_invariant(2.0, 0.0), first_terms, 1e-15);
  EXPECT_NEAR(tf::hardy_invariant(2.0, 0.0) - tf::eta0(), oracle::log_theta_1d(4.0), 1e-12);
  const tf::HardySlope s = tf::hardy_slope(std::exp(1.0), 20.0, 40.0, 21);
  EXPECT_NEAR(s.target, 0.5, 1e-15);
  EXPECT_LE(s.relative_error(), 0.05);
}

TEST(LimitMeasure, HardyBracketContainsGaussianMass) {
  const tf::LimitMeasureReport r = tf::limit_measure_truncation(tf::hardy_system(4.0, 0.0, 4), 4);
  EXPECT_TRUE(r.passed());
  bool saw_origin = false;
  for (const auto& a : r.atoms) {
    EXPECT_TRUE(a.in_bracket) << "level " << a.level;
    EXPECT_LE(a.lower, a.pushforward * (1.0 + 1e-12));
    EXPECT_LE(std::log(a.pushforward), a.log_upper + 1e-12);
    if (a.level == 0) {
      saw_origin = true;
      EXPECT_EQ(a.lower, 1.0);
      EXPECT_GE(a.log_upper, 0.0);
    }
  }
  EXPECT_TRUE(saw_origin);
}

TEST(LimitMeasure, LiftedVectorConverges) {
  const tf::LimitMeasureReport r = tf::limit_measure_truncation(tf::hardy_system(4.0, 0.0, 6), 6);
  bool found = false;
  for (const auto& a : r.atoms) {
    if (a.level != 1 || a.atom.size() != 1 || a.atom(0) != 1) continue;
    found = true;
    EXPECT_NEAR(a.gamma, std::exp(-M_PI), 1e-15);
    EXPECT_NEAR(a.pushforward / a.gamma, std::exp(tf::hardy_invariant(4.0, 0.0) - tf::eta0()), 1e-9);
  }
  EXPECT_TRUE(found);
}
