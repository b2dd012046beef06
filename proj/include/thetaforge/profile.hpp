#pragma once

#include "thetaforge/enumerate.hpp"
#include "thetaforge/lattice.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace thetaforge {

// N_E(√x) at each distinct squared norm x ≤ r2.
struct CountingProfile {
  std::vector<double> thresholds;
  std::vector<std::uint64_t> counts;
};

CountingProfile counting_profile(const EuclideanLattice& l, double r2, std::uint64_t cap = kDefaultCountCap);

struct FirstMinimum {
  double lambda1 = 0.0;
  double lambda1_sq = 0.0;
  std::uint64_t multiplicity = 0;
  IntVector witness;
};

FirstMinimum first_minimum(const EuclideanLattice& l);

// log #{v : ‖v‖² ≤ t} and log #{v : ‖v‖² < t}.
double h0_ar(const EuclideanLattice& l, double t, std::uint64_t cap = kDefaultCountCap);
double h0_ar_open(const EuclideanLattice& l, double t, std::uint64_t cap = kDefaultCountCap);

// ψ(t) = t·e^{-(t²-1)/2} and its inverse at 3^{-1/n} on [1, ∞).
double transference_psi(double t);
struct TransferenceConstants {
  int n;
  double t_n;
  double psi_residual;     // ψ(t_n) - 3^{-1/n}
  double upper_constant;   // t_n²·n/(2π)
  double claimed_bound;    // 1 + √(log 3 / n), reported only
};
TransferenceConstants transference_constants(int n);

// Exact covering radius for rank ≤ 2 (Lagrange reduction, circumradius of
// the Delaunay triangle); empty otherwise.
std::optional<double> exact_covering_radius(const EuclideanLattice& l);

struct CoveringRadiusInterval {
  double lower = 0.0;
  double upper = 0.0;
  double transference_upper = 0.0;
  std::optional<double> exact;
  Eigen::VectorXd deepest;  // basis coordinates of the best target found
};

// lower: best exact CVP distance over uniform targets, then refined by local
// ascent from the best targets; upper: transference bound or exact value.
CoveringRadiusInterval covering_radius_interval(const EuclideanLattice& l, int samples, std::uint64_t seed,
                                                int refine_steps = 400);

struct Check {
  std::string name;
  bool passed = true;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string witness;
};

struct TransferenceReport {
  double rho_lower;
  double rho_upper;
  double dual_lambda1;
  double product_lower;
  double upper_constant;
  bool exact;
  std::vector<Check> checks;
  bool passed() const;
};

TransferenceReport transference_check(const EuclideanLattice& l, int samples = 2000, std::uint64_t seed = 0);

// C(n) = log(n/2) + (1 + n/2)·log(1 + 2/n).
double comparison_constant(int n);

struct ComparisonReport {
  std::vector<Check> checks;
  bool passed() const;
};

// Runs the naive comparison at t = 1, the θ/count bracket at the sampled x,
// the C(n) bracket, and the Blichfeldt bound at `centers` random points.
ComparisonReport comparison_suite(const EuclideanLattice& l, const std::vector<double>& xs, int centers,
                                  std::uint64_t seed);

// e^{h⁰_θ} - 1 ≤ q/(1 - q) with q = [λ̃e^{-(λ̃²-1)/2}]ⁿ, λ₁ = √(n/2π)·λ̃, when λ̃ ≥ 1.
std::optional<Check> first_minimum_theta_check(const EuclideanLattice& l);

}  // namespace thetaforge
