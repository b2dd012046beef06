#pragma once

#include "thetaforge/lattice.hpp"

#include <cstdint>
#include <vector>

namespace thetaforge {

inline constexpr std::uint64_t kDefaultCountCap = 100'000'000;

enum class Backend { serial, parallel };

// All v with vᵀGv ≤ r2, each once, sorted lexicographically on coordinates.
std::vector<LatticeVector> enumerate(const EuclideanLattice& l, double r2, std::uint64_t cap = kDefaultCountCap,
                                     Backend backend = Backend::parallel);

// All v with ‖v − center‖² ≤ r2 (center in basis coordinates); `normsq`
// holds the squared distance to the center. Sorted lexicographically.
std::vector<LatticeVector> enumerate_around(const EuclideanLattice& l, const Eigen::VectorXd& center, double r2,
                                            std::uint64_t cap = kDefaultCountCap);

struct ClosestVector {
  IntVector coords;
  double dist2 = 0.0;
};

// Exact CVP: radius starts at the Babai rounding distance and shrinks greedily.
ClosestVector closest_vector(const EuclideanLattice& l, const Eigen::VectorXd& center);

// #{v : ‖v‖² ≤ r2}, or ‖v‖² < r2 when `strict`. Norms are recomputed from
// integer coordinates so boundary points are decided exactly for integral Grams.
std::uint64_t count_points(const EuclideanLattice& l, double r2, bool strict = false,
                           std::uint64_t cap = kDefaultCountCap, Backend backend = Backend::parallel);

}  // namespace thetaforge
