#pragma once

#include "thetaforge/admissible.hpp"
#include "thetaforge/lattice.hpp"
#include "thetaforge/profile.hpp"
#include "thetaforge/theta.hpp"

#include <vector>

namespace thetaforge {

struct DefectReport {
  double defect;       // h⁰_θ(E) - h⁰_θ(F) + h⁰_θ(G)
  double error_bound;  // combined certified error of the three theta sums
  bool split;          // |defect| within error_bound
};

DefectReport h_theta_defect(const AdmissibleSequence& seq, double tol = kDefaultThetaTolerance);

// Gram of E ⊕ G with ‖(e, g)‖² = ‖e - T g‖²_E + ‖g‖²_G; T is rank(E)×rank(G).
Eigen::MatrixXd extension_gram(const EuclideanLattice& e, const EuclideanLattice& g, const Eigen::MatrixXd& twist);

ThetaResult gext(const EuclideanLattice& e, const EuclideanLattice& g, const Eigen::MatrixXd& twist,
                 double tol = kDefaultThetaTolerance);

// Gext(T) through the Poisson-dual series
// covol(E)⁻¹ Σ_{e∨, g} e^{-π(‖e∨‖²_{E∨} + ‖g‖²_G)} cos(2π e∨ᵀ T g).
double gext_dual_series(const EuclideanLattice& e, const EuclideanLattice& g, const Eigen::MatrixXd& twist,
                        double tol = kDefaultThetaTolerance);

struct GextAverage {
  double average;  // trapezoidal mean of Gext(T)/Gext(0) over the torus
  double target;   // 1 - (1 - e^{-h¹_θ(E)})(1 - e^{-h⁰_θ(G)})
  std::size_t grid_points;
};

// Throws GridTooCoarse when grid < 8, GridOverflow when the product grid is
// not exhaustive-sized (rank(E)·rank(G) > 3).
GextAverage gext_average(const EuclideanLattice& e, const EuclideanLattice& g, int grid,
                         double tol = kDefaultThetaTolerance);

double gext_average_target(const EuclideanLattice& e, const EuclideanLattice& g, double tol = kDefaultThetaTolerance);

// The six alternating inequalities on an admissible sequence, each within `slack`.
std::vector<Check> alternating_chain(const AdmissibleSequence& seq, double slack = 5e-9,
                                     double tol = kDefaultThetaTolerance);

}  // namespace thetaforge
