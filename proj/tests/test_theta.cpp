#include "oracles.hpp"

#include "thetaforge/enumerate.hpp"
#include "thetaforge/kernels.hpp"
#include "thetaforge/lattice.hpp"
#include "thetaforge/random_lattice.hpp"
#include "thetaforge/special.hpp"
#include "thetaforge/theta.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace tf = thetaforge;

namespace {

tf::EuclideanLattice a2() {
  Eigen::MatrixXd g(2, 2);
  g << 1.0, -0.5, -0.5, 1.0;
  return tf::EuclideanLattice::from_gram(g);
}

}  // namespace

TEST(Special, Constants) {
  EXPECT_NEAR(tf::omega(), std::pow(M_PI, 0.25) / std::tgamma(0.75), 1e-14);
  EXPECT_NEAR(tf::omega(), 1.0864348, 1e-7);
  EXPECT_NEAR(tf::eta0(), 0.0829015, 1e-7);
  EXPECT_NEAR(tf::eta0(), std::log(tf::omega()), 1e-15);
}

TEST(Special, TauMatchesDirectSum) {
  for (double x : {1e-3, 0.1, 0.5, 1.0, 2.0, 7.0, 50.0}) {
    const double direct = oracle::log_theta_1d(x);
    EXPECT_NEAR(tf::tau(x), direct, 1e-14 * std::max(1.0, direct)) << "x=" << x;
  }
  long double sum = 1.0L;
  for (int k = 1; k <= 50; ++k) sum += 2.0L * std::exp(-2.0L * static_cast<long double>(M_PI) * k * k);
  EXPECT_NEAR(tf::tau(2.0), static_cast<double>(std::log(sum)), 1e-17);
}

TEST(Special, TauFunctionalEquation) {
  for (int k = -10; k <= 10; ++k) {
    const double x = std::ldexp(1.0, k);
    EXPECT_NEAR(tf::tau(x) - tf::tau(1.0 / x), -0.5 * std::log(x), 1e-12);
  }
}

TEST(Special, EtaIsTheLineBundleExcess) {
  for (double t : {-3.0, -1.0, -0.2, 0.0, 0.4, 2.0, 5.0}) {
    const double direct = oracle::log_theta_1d(std::exp(-2.0 * t));
    EXPECT_NEAR(std::max(t, 0.0) + tf::eta(t), direct, 1e-13 * std::max(1.0, std::abs(direct))) << "t=" << t;
    EXPECT_NEAR(tf::h0_line(t), direct, 1e-13 * std::max(1.0, std::abs(direct)));
    EXPECT_GE(tf::eta(t), 0.0);
  }
}

TEST(Special, LineBundleBounds) {
  EXPECT_NEAR(tf::line_bound_constant(), 0.154180, 1e-6);
  const tf::LineBundleBounds zero = tf::line_bundle_bounds(0.0, 1);
  ASSERT_TRUE(zero.nonnegative && zero.negative);
  EXPECT_NEAR(*zero.nonnegative, 1.0, 1e-15);
  EXPECT_NEAR(*zero.negative, 1.0, 1e-15);
  const tf::LineBundleBounds neg = tf::line_bundle_bounds(-2.0, 1);
  ASSERT_TRUE(neg.negative_simple);
  EXPECT_NEAR(*neg.negative_simple, std::exp(-4.0 * M_PI), 1e-20);
  EXPECT_LE(tf::tau(std::exp(4.0)), *neg.negative_simple);
  EXPECT_LE(tf::tau(std::exp(4.0)), *neg.negative);
}

TEST(Special, GroenewegenBound) {
  const tf::GroenewegenBound one = tf::groenewegen_bound(1, 1.0);
  EXPECT_LE(tf::omega() - 1.0, one.value);
  const tf::GroenewegenBound two = tf::groenewegen_bound(2, 1.0);
  EXPECT_LE(std::exp(tf::h0_theta(a2())) - 1.0, two.value);
  for (int n : {1, 2, 4}) {
    const double lambda = 6.0;
    ASSERT_TRUE(tf::groenewegen_bound(n, lambda).closed);
    const double ratio = tf::groenewegen_bound(n, lambda).value / (std::pow(3.0, n) * std::exp(-M_PI * lambda * lambda));
    EXPECT_NEAR(ratio, 1.0, 0.05) << "n=" << n;
  }
}

TEST(Theta, ProductOverCoordinates) {
  EXPECT_NEAR(tf::theta(tf::identity_lattice(1), 1.0).value, tf::omega(), 1e-10 * tf::omega());
  EXPECT_NEAR(tf::theta(tf::identity_lattice(2), 1.0).value, tf::omega() * tf::omega(), 2e-10);
}

TEST(Theta, LargeTAsymptotics) {
  const auto l = a2();
  for (double t : {4.0, 6.0, 8.0}) {
    const double excess = tf::theta(l, t, 1e-13).value - 1.0;
    const double leading = 6.0 * std::exp(-M_PI * t);
    EXPECT_NEAR(excess / leading, 1.0, 7.0 * std::exp(-2.0 * M_PI * t) + 2e-13 / leading) << "t=" << t;
  }
}

TEST(Theta, AgreesWithBoxSummation) {
  for (int trial = 0; trial < 20; ++trial) {
    tf::SplitMix64 rng = tf::SplitMix64::stream(21, static_cast<std::uint64_t>(trial));
    const auto l = tf::random_lattice(rng, 1 + trial % 4);
    for (double t : {0.5, 1.0, 2.0}) {
      const tf::ThetaResult r = tf::theta(l, t, 1e-12);
      EXPECT_NEAR(r.log_value, oracle::log_theta(l.gram(), t), 3e-12) << "trial " << trial << " t=" << t;
    }
  }
}

TEST(Theta, CertifiedBracketContainsReference) {
  for (int trial = 0; trial < 15; ++trial) {
    tf::SplitMix64 rng = tf::SplitMix64::stream(22, static_cast<std::uint64_t>(trial));
    const auto l = tf::random_lattice(rng, 1 + trial % 5);
    const double reference = std::exp(oracle::log_theta(l.gram(), 1.0));
    const tf::ThetaResult r = tf::theta(l, 1.0, 1e-6);
    EXPECT_LE(r.value, reference * (1.0 + 1e-14));
    EXPECT_GE(r.upper(), reference * (1.0 - 1e-14));
  }
}

TEST(Theta, InvariantsOfZAndLineBundles) {
  const auto z = tf::identity_lattice(1);
  EXPECT_NEAR(tf::h0_theta(z), tf::eta0(), 2e-10);
  EXPECT_NEAR(tf::h1_theta(z), tf::eta0(), 2e-10);
  for (double delta : {-2.0, 0.5, 3.0}) {
    EXPECT_NEAR(tf::h0_theta(tf::line_bundle(delta)), std::max(delta, 0.0) + tf::eta(delta), 2e-10 * (1.0 + std::abs(delta)));
  }
}

TEST(Theta, PoissonRiemannRoch) {
  const auto l = a2();
  const double h0 = oracle::log_theta(l.gram(), 1.0);
  const double h1 = oracle::log_theta(l.gram().inverse(), 1.0);
  EXPECT_NEAR(h0 - h1, -std::log(std::sqrt(3.0) / 2.0), 1e-12);
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(tf::poisson_rr_check(tf::identity_lattice(n)).residual, 0.0, 1e-10);
  const auto o3 = tf::line_bundle(3.0);
  EXPECT_NEAR(tf::h0_theta(o3) - tf::h1_theta(o3) - 3.0, 0.0, 1e-9);
  EXPECT_NEAR(tf::h0_theta(o3), 3.0 + tf::eta(3.0), 1e-9);
  for (int trial = 0; trial < 30; ++trial) {
    tf::SplitMix64 rng = tf::SplitMix64::stream(23, static_cast<std::uint64_t>(trial));
    const tf::PoissonResidual pr = tf::poisson_rr_check(tf::random_lattice(rng, 1 + trial % 6));
    EXPECT_LE(std::abs(pr.residual), 1e-8);
    EXPECT_LE(std::abs(pr.residual), pr.error_bound + 1e-14);
  }
}

TEST(Theta, SerialAndParallelAgree) {
  tf::SplitMix64 rng(24);
  const auto l = tf::random_lattice(rng, 6);
  const double r2 = tf::tail_radius(6, 1.0, 1e-10).radius2;
  const tf::GaussianSum s = tf::gaussian_sum(l, 1.0, r2, tf::kDefaultCountCap, tf::Backend::serial);
  const tf::GaussianSum p = tf::gaussian_sum(l, 1.0, r2, tf::kDefaultCountCap, tf::Backend::parallel);
  EXPECT_EQ(s.points, p.points);
  EXPECT_NEAR(s.log_excess, p.log_excess, 1e-14);
}

TEST(Theta, TailRadiusGrowsWithPrecision) {
  double prev = 0.0;
  for (double tol : {1e-4, 1e-8, 1e-12}) {
    const tf::TailRadius tr = tf::tail_radius(3, 1.0, tol);
    EXPECT_GE(tr.radius_factor, 1.0);
    EXPECT_GT(tr.radius2, prev);
    EXPECT_LE(tr.q / (1.0 - tr.q), tol * (1.0 + 1e-12));
    prev = tr.radius2;
  }
}

TEST(Theta, NormShellsPartitionTheBall) {
  const auto shells = tf::norm_shells(a2(), 3.0);
  std::uint64_t total = 0;
  for (const auto& s : shells) total += s.multiplicity;
  EXPECT_EQ(total, oracle::count_ball(a2().gram(), 3.0));
  ASSERT_GE(shells.size(), 2u);
  EXPECT_EQ(shells[0].multiplicity, 1u);
  EXPECT_NEAR(shells[1].normsq, 1.0, 1e-15);
  EXPECT_EQ(shells[1].multiplicity, 6u);
}
