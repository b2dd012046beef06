#pragma once

#include "thetaforge/lattice.hpp"

namespace thetaforge {

// 0 → E → F → G → 0 with E saturated in F, E carrying the induced metric and
// G the quotient metric. `quotient_lift` holds integer lifts in F of the
// quotient basis; [sub_basis | quotient_lift] is unimodular.
struct AdmissibleSequence {
  EuclideanLattice total;
  IntMatrix sub_basis;
  EuclideanLattice sub;
  EuclideanLattice quotient;
  IntMatrix quotient_lift;
  // Integer projection F → G in the chosen quotient basis (kernel = sub).
  IntMatrix projection;
};

// Throws RankDeficient for dependent columns, NotSaturated (with the Smith
// invariants) when the columns do not span a saturated sublattice.
AdmissibleSequence admissible_sequence(const EuclideanLattice& total, const IntMatrix& sub_basis);

// Schur complement C − BᵀA⁻¹B of the leading k×k block.
Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& gram, int k);

}  // namespace thetaforge
