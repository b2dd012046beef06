#include "thetaforge/theta.hpp"

#include "thetaforge/error.hpp"
#include "thetaforge/kernels.hpp"

#include <cmath>

namespace thetaforge {

double ThetaResult::log_upper() const { return log_value + std::log1p(rel_error); }

double log_tail_ratio(int n, double radius_factor) {
  return n * (std::log(radius_factor) - 0.5 * (radius_factor * radius_factor - 1.0));
}

TailRadius tail_radius(int n, double t, double tol) {
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "theta requires t > 0");
  if (!(tol > 0.0 && tol < 0.5)) throw Error(ErrorKind::DomainError, "tolerance must lie in (0, 0.5)");
  if (n == 0) return {1.0, 0.0, 0.0};
  const double target = std::log(tol / (1.0 + tol));
  double lo = 1.0;
  double hi = 2.0;
  while (log_tail_ratio(n, hi) > target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_tail_ratio(n, mid) > target ? lo : hi) = mid;
  }
  return {hi, n * hi * hi / (2.0 * M_PI * t), std::exp(log_tail_ratio(n, hi))};
}

ThetaResult theta(const EuclideanLattice& l, double t, double tol, Backend backend) {
  const TailRadius tr = tail_radius(l.rank(), t, tol);
  ThetaResult out;
  if (l.rank() == 0) return out;
  // Always reach the shortest reduced basis vector so that log_excess is finite.
  const double shortest = l.reduction().reduced_gram.diagonal().minCoeff();
  const double r2 = std::max(tr.radius2, shortest * (1.0 + 1e-9));
  const GaussianSum sum = gaussian_sum(l, t, r2, kDefaultCountCap, backend);
  const double radius_factor = std::sqrt(r2 * 2.0 * M_PI * t / l.rank());
  const double q = std::exp(log_tail_ratio(l.rank(), radius_factor));
  out.log_excess = sum.log_excess;
  out.log_value = sum.log_total();
  out.value = std::exp(out.log_value);
  out.rel_error = q / (1.0 - q);
  out.truncation_radius2 = r2;
  out.points_used = sum.points;
  return out;
}

double h0_theta(const EuclideanLattice& l, double tol) { return theta(l, 1.0, tol).log_value; }

double h1_theta(const EuclideanLattice& l, double tol) { return h0_theta(dual(l), tol); }

PoissonResidual poisson_rr_check(const EuclideanLattice& l, double tol) {
  const ThetaResult a = theta(l, 1.0, tol);
  const ThetaResult b = theta(dual(l), 1.0, tol);
  const double residual = a.log_value - b.log_value - l.degree();
  const double scale = std::abs(a.log_value) + std::abs(b.log_value) + std::abs(l.degree());
  return {residual, std::log1p(a.rel_error) + std::log1p(b.rel_error) + 1e-14 * (1.0 + scale)};
}

}  // namespace thetaforge
