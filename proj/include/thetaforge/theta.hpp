#pragma once

#include "thetaforge/enumerate.hpp"
#include "thetaforge/lattice.hpp"

#include <cstdint>

namespace thetaforge {

inline constexpr double kDefaultThetaTolerance = 1e-10;

// θ_E(t) = Σ_{v∈E} e^{-πt‖v‖²}. `value` is the ball sum, a lower bound;
// the true sum lies in [value, value/(1 - q)] with q/(1 - q) = rel_error.
struct ThetaResult {
  double value = 1.0;
  double log_value = 0.0;
  double log_excess = 0.0;  // log(value - 1), finite whenever rank > 0
  double rel_error = 0.0;
  double truncation_radius2 = 0.0;
  std::uint64_t points_used = 1;

  double upper() const { return value / (1.0 - rel_error / (1.0 + rel_error)); }
  double log_upper() const;
};

struct TailRadius {
  double radius_factor;  // r̃ ≥ 1
  double radius2;        // n r̃² / (2πt)
  double q;              // [r̃ e^{-(r̃²-1)/2}]ⁿ
};

// Smallest r̃ ≥ 1 with [r̃ e^{-(r̃²-1)/2}]ⁿ ≤ tol/(1 + tol).
TailRadius tail_radius(int n, double t, double tol);

// log of the Banaszczyk ratio q(r̃) = n(log r̃ - (r̃² - 1)/2).
double log_tail_ratio(int n, double radius_factor);

ThetaResult theta(const EuclideanLattice& l, double t, double tol = kDefaultThetaTolerance,
                  Backend backend = Backend::parallel);

double h0_theta(const EuclideanLattice& l, double tol = kDefaultThetaTolerance);
double h1_theta(const EuclideanLattice& l, double tol = kDefaultThetaTolerance);

// h⁰_θ(L) - h¹_θ(L) - deg(L), with the combined certified error bound.
struct PoissonResidual {
  double residual;
  double error_bound;
};
PoissonResidual poisson_rr_check(const EuclideanLattice& l, double tol = kDefaultThetaTolerance);

}  // namespace thetaforge
