#include "thetaforge/profile.hpp"

#include "parallel.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/kernels.hpp"
#include "thetaforge/rng.hpp"
#include "thetaforge/theta.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace thetaforge {
namespace {

Check make_check(std::string name, double lhs, double rhs, bool passed, std::string witness = {}) {
  return Check{std::move(name), passed, lhs, rhs, std::move(witness)};
}

std::string coords_string(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << "]";
  return os.str();
}

double cvp_distance(const EuclideanLattice& l, const Eigen::VectorXd& target) {
  return std::sqrt(closest_vector(l, target).dist2);
}

Eigen::VectorXd uniform_target(SplitMix64& rng, int n) {
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = rng.uniform();
  return u;
}

}  // namespace

CountingProfile counting_profile(const EuclideanLattice& l, double r2, std::uint64_t cap) {
  CountingProfile p;
  std::uint64_t running = 0;
  for (const auto& shell : norm_shells(l, r2, cap)) {
    running += shell.multiplicity;
    p.thresholds.push_back(shell.normsq);
    p.counts.push_back(running);
  }
  return p;
}

FirstMinimum first_minimum(const EuclideanLattice& l) {
  if (l.rank() == 0) throw Error(ErrorKind::DomainError, "first minimum needs rank >= 1");
  const double r2 = l.reduction().reduced_gram.diagonal().minCoeff() * (1.0 + 1e-9);
  const auto points = enumerate(l, r2);
  FirstMinimum m;
  m.lambda1_sq = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.coords.isZero()) continue;
    if (p.normsq < m.lambda1_sq) {
      m.lambda1_sq = p.normsq;
      m.witness = p.coords;
    }
  }
  for (const auto& p : points) {
    if (!p.coords.isZero() && p.normsq <= m.lambda1_sq * (1.0 + 1e-12)) ++m.multiplicity;
  }
  m.lambda1 = std::sqrt(m.lambda1_sq);
  return m;
}

double h0_ar(const EuclideanLattice& l, double t, std::uint64_t cap) {
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "h0_ar requires t > 0");
  return std::log(static_cast<double>(count_points(l, t, false, cap)));
}

double h0_ar_open(const EuclideanLattice& l, double t, std::uint64_t cap) {
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "h0_ar_open requires t > 0");
  return std::log(static_cast<double>(count_points(l, t, true, cap)));
}

double transference_psi(double t) { return t * std::exp(-0.5 * (t * t - 1.0)); }

TransferenceConstants transference_constants(int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, "transference constants need n >= 1");
  const double target = std::pow(3.0, -1.0 / n);
  double lo = 1.0;
  double hi = 2.0;
  while (transference_psi(hi) > target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (transference_psi(mid) > target ? lo : hi) = mid;
  }
  const double tn = 0.5 * (lo + hi);
  return {n, tn, transference_psi(tn) - target, tn * tn * n / (2.0 * M_PI), 1.0 + std::sqrt(std::log(3.0) / n)};
}

std::optional<double> exact_covering_radius(const EuclideanLattice& l) {
  if (l.rank() == 1) return 0.5 * std::sqrt(l.gram()(0, 0));
  if (l.rank() != 2) return std::nullopt;
  // Lagrange reduction on the Gram entries (a, b, c) = (|b1|², <b1,b2>, |b2|²).
  double a = l.gram()(0, 0);
  double b = l.gram()(0, 1);
  double c = l.gram()(1, 1);
  for (int it = 0; it < 10000; ++it) {
    if (c < a) std::swap(a, c);
    const double q = std::nearbyint(b / a);
    if (q == 0.0) break;
    c = c - 2.0 * q * b + q * q * a;
    b = b - q * a;
  }
  if (b > 0.0) b = -b;
  const double diag = a + c + 2.0 * b;
  const double covol = l.covolume();
  return std::sqrt(a) * std::sqrt(c) * std::sqrt(diag) / (2.0 * covol);
}

CoveringRadiusInterval covering_radius_interval(const EuclideanLattice& l, int samples, std::uint64_t seed,
                                                int refine_steps) {
  const int n = l.rank();
  if (n == 0) throw Error(ErrorKind::DomainError, "covering radius needs rank >= 1");
  CoveringRadiusInterval out;
  const int count = std::max(samples, 1);
  std::vector<double> dist(count);
  std::vector<Eigen::VectorXd> targets(count);
  detail::parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    SplitMix64 rng = SplitMix64::stream(seed, i);
    targets[i] = uniform_target(rng, n);
    dist[i] = cvp_distance(l, targets[i]);
  }, 64);
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });
  out.lower = dist[order[0]];
  out.deepest = targets[order[0]];

  // Local random ascent from the best targets; any point's distance is a valid lower bound.
  const double cell = std::pow(l.covolume(), 1.0 / n);
  const int starts = std::min(count, 4);
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x = targets[order[s]];
    double best = dist[order[s]];
    double step = 0.1;
    int failures = 0;
    SplitMix64 rng = SplitMix64::stream(seed ^ 0x5ca1ab1eULL, static_cast<std::uint64_t>(s));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int it = 0; it < refine_steps && step > 1e-9; ++it) {
      Eigen::VectorXd dir(n);
      for (int i = 0; i < n; ++i) dir(i) = normal(rng);
      // Scale the step by the typical cell size measured in the lattice norm.
      const double len = std::sqrt(std::max(l.norm2(dir), 1e-300));
      const Eigen::VectorXd trial = x + (step * cell / len) * dir;
      const double d = cvp_distance(l, trial);
      if (d > best) {
        best = d;
        x = trial;
        failures = 0;
      } else if (++failures >= 12) {
        step *= 0.5;
        failures = 0;
      }
    }
    if (best > out.lower) {
      out.lower = best;
      out.deepest = x;
    }
  }

  const FirstMinimum dual_min = first_minimum(dual(l));
  const TransferenceConstants tc = transference_constants(n);
  out.transference_upper = tc.upper_constant / dual_min.lambda1;
  out.upper = out.transference_upper;
  out.exact = exact_covering_radius(l);
  if (out.exact) out.upper = std::min(out.upper, *out.exact);
  if (out.lower > out.upper * (1.0 + 1e-9)) {
    throw Error(ErrorKind::InconsistentBounds, "covering radius lower bound " + std::to_string(out.lower) +
                                                   " exceeds upper bound " + std::to_string(out.upper) +
                                                   " at target " + coords_string(out.deepest));
  }
  if (out.exact) out.lower = *out.exact;
  return out;
}

bool TransferenceReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

TransferenceReport transference_check(const EuclideanLattice& l, int samples, std::uint64_t seed) {
  const CoveringRadiusInterval rho = covering_radius_interval(l, samples, seed);
  const FirstMinimum dual_min = first_minimum(dual(l));
  const TransferenceConstants tc = transference_constants(l.rank());
  TransferenceReport r{rho.lower,      rho.upper, dual_min.lambda1, rho.lower * dual_min.lambda1,
                       tc.upper_constant, rho.exact.has_value(), {}};
  r.checks.push_back(make_check("rho_lower*lambda1_dual <= t_n^2 n/(2pi)", r.product_lower, tc.upper_constant,
                                r.product_lower <= tc.upper_constant, "target " + coords_string(rho.deepest)));
  if (r.exact) {
    r.checks.push_back(make_check("1/2 <= rho*lambda1_dual", 0.5, r.product_lower,
                                  0.5 <= r.product_lower * (1.0 + 1e-12)));
  }
  return r;
}

double comparison_constant(int n) {
  const double h = 0.5 * n;
  return std::log(h) + (1.0 + h) * std::log1p(2.0 / n);
}

bool ComparisonReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

ComparisonReport comparison_suite(const EuclideanLattice& l, const std::vector<double>& xs, int centers,
                                  std::uint64_t seed) {
  const int n = l.rank();
  if (n == 0) throw Error(ErrorKind::DomainError, "comparison suite needs rank >= 1");
  ComparisonReport r;
  const ThetaResult th = theta(l, 1.0);
  const double h0_lo = th.log_value;
  const double h0_hi = th.log_upper();
  const double count1 = h0_ar(l, 1.0);

  const double lower = h0_hi - 0.5 * n * std::log(static_cast<double>(n)) + std::log(1.0 - 1.0 / (2.0 * M_PI));
  r.checks.push_back(make_check("h0_theta - (n/2)log n + log(1-1/2pi) <= h0_ar(1)", lower, count1, lower <= count1));
  r.checks.push_back(make_check("h0_ar(1) <= h0_theta + pi", count1, h0_lo + M_PI, count1 <= h0_lo + M_PI));

  const double cn = comparison_constant(n);
  for (double x : xs) {
    const ThetaResult tx = theta(l, n / (2.0 * M_PI * x));
    const double rhs = h0_ar(l, x) + cn;
    r.checks.push_back(make_check("log theta(n/(2 pi x)) <= h0_ar(x) + C(n) at x=" + std::to_string(x),
                                  tx.log_upper(), rhs, tx.log_upper() <= rhs));
  }
  const double gap = cn - std::log(0.5 * n);
  r.checks.push_back(make_check("1 <= C(n) - log(n/2)", 1.0, gap, 1.0 <= gap));
  r.checks.push_back(make_check("C(n) - log(n/2) <= (3/2) log 3", gap, 1.5 * std::log(3.0), gap <= 1.5 * std::log(3.0)));

  for (int i = 0; i < centers; ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd x = uniform_target(rng, n);
    const auto near = enumerate_around(l, x, 1.0);
    const double lhs = near.empty() ? -std::numeric_limits<double>::infinity()
                                    : std::log(static_cast<double>(near.size()));
    r.checks.push_back(make_check("Blichfeldt log|{v: |v-x|<=1}| <= h0_theta + pi", lhs, h0_lo + M_PI,
                                  lhs <= h0_lo + M_PI, "center " + coords_string(x)));
  }
  return r;
}

std::optional<Check> first_minimum_theta_check(const EuclideanLattice& l) {
  const int n = l.rank();
  if (n == 0) return std::nullopt;
  const FirstMinimum m = first_minimum(l);
  const double scaled = m.lambda1 * std::sqrt(2.0 * M_PI / n);
  if (scaled < 1.0) return std::nullopt;
  const double q = std::exp(log_tail_ratio(n, scaled));
  const ThetaResult th = theta(l, 1.0);
  const double lhs = th.upper() - 1.0;
  const double rhs = q / (1.0 - q);
  return make_check("e^{h0_theta} - 1 <= q/(1-q)", lhs, rhs, lhs <= rhs);
}

}  // namespace thetaforge
