#include "thetaforge/special.hpp"

#include "thetaforge/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace thetaforge {
namespace {

// Σ_{n≥1} e^{-πx(n²-1)}, x ≥ 1; the leading term is 1.
double scaled_tail(double x) {
  double s = 0.0;
  for (int n = 1;; ++n) {
    const double term = std::exp(-M_PI * x * (static_cast<double>(n) * n - 1.0));
    s += term;
    if (term < 1e-18 * s) break;
  }
  return s;
}

double tau_convergent(double x) {
  // x ≥ 1: τ = log1p(2 e^{-πx} Σ e^{-πx(n²-1)})
  return std::log1p(2.0 * std::exp(-M_PI * x) * scaled_tail(x));
}

}  // namespace

double tau(double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::DomainError, "tau requires x > 0");
  if (x >= 1.0) return tau_convergent(x);
  return tau_convergent(1.0 / x) - 0.5 * std::log(x);
}

double log_tau(double x) {
  if (!(x >= 1.0)) return std::log(tau(x));
  const double log_y = std::log(2.0) - M_PI * x + std::log(scaled_tail(x));
  const double y = std::exp(log_y);
  if (y < 1e-8) return log_y + std::log1p(-0.5 * y + y * y / 3.0);
  return std::log(std::log1p(y));
}

double eta(double t) { return tau(std::exp(2.0 * std::abs(t))); }

double omega() { return std::pow(M_PI, 0.25) / std::tgamma(0.75); }

double eta0() { return std::log(omega()); }

double h0_line(double t) { return std::max(t, 0.0) + eta(t); }

double line_bound_constant() { return 3.0 * std::exp(-M_PI) / (1.0 - 1.0 / (2.0 * M_PI)); }

LineBundleBounds line_bundle_bounds(double degree, int field_degree) {
  if (field_degree < 1) throw Error(ErrorKind::DomainError, "field degree must be positive");
  const double d = field_degree;
  const double c = line_bound_constant();
  LineBundleBounds b{degree, field_degree, std::nullopt, std::nullopt, std::nullopt, 0.0, c};
  const double cd = std::pow(c, d);
  if (degree >= 0.0) {
    b.nonnegative = 1.0 + degree;
    b.refined = cd + degree;
  }
  if (degree <= 0.0) {
    const double expo = -M_PI * d * std::expm1(-2.0 * degree / d);
    b.negative = std::exp(expo);
    b.negative_simple = std::exp(2.0 * M_PI * degree);
    b.refined = cd * std::exp(expo);
  }
  return b;
}

GroenewegenBound groenewegen_bound(int n, double lambda1) {
  if (n < 1 || !(lambda1 > 0.0)) throw Error(ErrorKind::DomainError, "groenewegen_bound needs n >= 1, lambda1 > 0");
  const double a = M_PI * lambda1 * lambda1;
  const double half = 0.5 * n;
  constexpr double span = 40.0;
  if (half >= a + span) {
    throw Error(ErrorKind::DomainError, "rank too large for the fixed quadrature window");
  }
  // C = 3ⁿ e^{-a} ∫_0^∞ (1 + s/a)^{n/2} e^{-s} ds
  auto integrand = [&](double s) { return std::exp(half * std::log1p(s / a) - s); };
  double error = 0.0;
  const double body =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, span, 15, 1e-13, &error);
  const double tail = std::exp(half * std::log1p(span / a) - span) / (1.0 - half / (a + span));
  GroenewegenBound out;
  out.value = std::exp(n * std::log(3.0) - a) * (body + tail);
  out.quadrature_error = error / body;
  if (lambda1 * lambda1 > n / (2.0 * M_PI)) out.closed = groenewegen_closed(n, lambda1);
  return out;
}

double groenewegen_closed(int n, double lambda1) {
  const double l2 = lambda1 * lambda1;
  if (!(l2 > n / (2.0 * M_PI))) {
    throw Error(ErrorKind::DomainError, "closed Groenewegen form needs lambda1^2 > n/(2 pi)");
  }
  return std::pow(3.0, n) / (1.0 - n / (2.0 * M_PI * l2)) * std::exp(-M_PI * l2);
}

}  // namespace thetaforge
