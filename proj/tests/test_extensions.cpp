#include "oracles.hpp"

#include "thetaforge/admissible.hpp"
#include "thetaforge/extensions.hpp"
#include "thetaforge/lattice.hpp"
#include "thetaforge/random_lattice.hpp"
#include "thetaforge/special.hpp"
#include "thetaforge/theta.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace tf = thetaforge;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// Σ_{(a,b)∈Z²} e^{-π((a - T b)² e + b² g)}, summed directly.
double gext_direct(double e, double g, double twist) {
  long double sum = 0.0L;
  for (long b = -40; b <= 40; ++b) {
    for (long a = -60; a <= 60; ++a) {
      const double d = static_cast<double>(a) - twist * static_cast<double>(b);
      sum += std::exp(-M_PI * (d * d * e + static_cast<double>(b * b) * g));
    }
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST(Defect, OrthogonalSplitVanishes) {
  tf::IntMatrix e1(2, 1);
  e1 << 1, 0;
  const tf::DefectReport r = tf::h_theta_defect(tf::admissible_sequence(tf::identity_lattice(2), e1));
  EXPECT_NEAR(r.defect, 0.0, 2e-9);
  EXPECT_TRUE(r.split);
}

TEST(Defect, PerturbedHexagonalIsNotSplit) {
  Eigen::MatrixXd g(2, 2);
  g << 2.0, -1.0, -1.0, 1.0;
  tf::IntMatrix e1(2, 1);
  e1 << 1, 0;
  const tf::DefectReport r = tf::h_theta_defect(tf::admissible_sequence(tf::EuclideanLattice::from_gram(g), e1));
  const double expected = oracle::log_theta(Eigen::MatrixXd::Constant(1, 1, 2.0), 1.0) +
                          oracle::log_theta(Eigen::MatrixXd::Constant(1, 1, 0.5), 1.0) -
                          oracle::log_theta(g, 1.0);
  EXPECT_NEAR(r.defect, expected, 1e-9);
  EXPECT_GT(r.defect, r.error_bound);
  EXPECT_FALSE(r.split);
}

TEST(Defect, NonnegativeOnRandomSequences) {
  for (int trial = 0; trial < 100; ++trial) {
    tf::SplitMix64 rng = tf::SplitMix64::stream(41, static_cast<std::uint64_t>(trial));
    EXPECT_GE(tf::h_theta_defect(tf::random_admissible(rng, 3, 1)).defect, -2e-9) << "trial " << trial;
  }
}

TEST(Defect, AlternatingChainHolds) {
  for (int trial = 0; trial < 20; ++trial) {
    tf::SplitMix64 rng = tf::SplitMix64::stream(42, static_cast<std::uint64_t>(trial));
    const int n = 2 + trial % 3;
    for (const auto& c : tf::alternating_chain(tf::random_admissible(rng, n, 1 + trial % (n - 1)))) {
      EXPECT_TRUE(c.passed) << c.name << " " << c.lhs << " " << c.rhs;
    }
  }
}

TEST(Gext, UntwistedIsProductOfThetas) {
  const auto e = tf::line_bundle(0.3);
  const auto g = tf::line_bundle(-0.2);
  const tf::ThetaResult r = tf::gext(e, g, scalar(0.0));
  EXPECT_NEAR(r.log_value, tf::h0_theta(e) + tf::h0_theta(g), 3e-10);
}

TEST(Gext, IntegralTwistIsTrivial) {
  const auto z = tf::identity_lattice(1);
  EXPECT_NEAR(tf::gext(z, z, scalar(1.0)).value, tf::gext(z, z, scalar(0.0)).value, 1e-12);
}

TEST(Gext, HalfTwistAgainstBothSeries) {
  const auto z = tf::identity_lattice(1);
  const double twisted = tf::gext(z, z, scalar(0.5)).value;
  EXPECT_LT(twisted, tf::gext(z, z, scalar(0.0)).value);
  EXPECT_NEAR(twisted, tf::gext_dual_series(z, z, scalar(0.5)), 1e-9);
  EXPECT_NEAR(twisted, gext_direct(1.0, 1.0, 0.5), 1e-10);
  EXPECT_NEAR(tf::gext(tf::line_bundle(0.4), tf::line_bundle(-0.1), scalar(0.3)).value,
              gext_direct(std::exp(-0.8), std::exp(0.2), 0.3), 1e-9);
}

TEST(GextAverage, ClosedForms) {
  const auto z = tf::identity_lattice(1);
  const double eta0 = tf::eta0();
  EXPECT_NEAR(tf::gext_average(z, z, 256).average, 1.0 - std::pow(1.0 - std::exp(-eta0), 2.0), 1e-6);
  const auto o2 = tf::line_bundle(2.0);
  const double h1 = oracle::log_theta_1d(std::exp(4.0));
  EXPECT_NEAR(h1, tf::eta(2.0), 1e-15);
  EXPECT_NEAR(tf::gext_average(o2, z, 256).average, 1.0 - (1.0 - std::exp(-h1)) * (1.0 - std::exp(-eta0)), 1e-6);
  const auto o3 = tf::line_bundle(-3.0);
  EXPECT_NEAR(tf::gext_average(o3, o3, 256).average, 1.0, 1e-6);
  EXPECT_NEAR(tf::gext_average_target(o2, z), 1.0 - (1.0 - std::exp(-h1)) * (1.0 - std::exp(-eta0)), 1e-9);
}

TEST(GextAverage, Rank2Quotient) {
  const auto e = tf::line_bundle(0.2);
  const auto g = tf::identity_lattice(2);
  const tf::GextAverage avg = tf::gext_average(e, g, 32);
  EXPECT_NEAR(avg.average, avg.target, 1e-6);
  EXPECT_EQ(avg.grid_points, 32u * 32u);
}
