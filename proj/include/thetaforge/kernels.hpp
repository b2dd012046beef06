#pragma once

#include "thetaforge/enumerate.hpp"
#include "thetaforge/lattice.hpp"

#include <cstdint>
#include <limits>

namespace thetaforge {

// Σ_{0 < ‖v‖² ≤ r2} e^{-π t ‖v‖²}, kept in log form so that sums far below
// the double range (very long kernels) still carry a usable exponent.
struct GaussianSum {
  double log_excess = -std::numeric_limits<double>::infinity();
  std::uint64_t points = 0;  // includes the origin

  double excess() const;
  double log_total() const;  // log(1 + excess)
};

GaussianSum gaussian_sum(const EuclideanLattice& l, double t, double r2, std::uint64_t cap = kDefaultCountCap,
                         Backend backend = Backend::parallel);

// Distinct squared norms ≤ r2 with multiplicities, ascending.
struct NormShell {
  double normsq;
  std::uint64_t multiplicity;
};
std::vector<NormShell> norm_shells(const EuclideanLattice& l, double r2, std::uint64_t cap = kDefaultCountCap);

}  // namespace thetaforge
