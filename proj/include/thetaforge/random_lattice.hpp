#pragma once

#include "thetaforge/admissible.hpp"
#include "thetaforge/lattice.hpp"
#include "thetaforge/rng.hpp"

namespace thetaforge {

struct RandomLatticeOptions {
  bool unit_covolume = true;   // rescale to covolume 1
  bool size_reduce = true;     // return the LLL-reduced Gram
  double scale_spread = 0.5;   // column lengths vary by e^{±spread}
};

// Gram BᵀB of a Gaussian basis B with column lengths spread log-uniformly.
EuclideanLattice random_lattice(SplitMix64& rng, int rank, const RandomLatticeOptions& options = {});

// Product of random elementary integer operations; determinant ±1.
IntMatrix random_unimodular(SplitMix64& rng, int rank, int steps = 0);

// 0 → E → F → G → 0 with F random of rank `rank` and E spanned by the first
// `sub_rank` columns of a random unimodular matrix.
AdmissibleSequence random_admissible(SplitMix64& rng, int rank, int sub_rank, const RandomLatticeOptions& options = {});

}  // namespace thetaforge
