#pragma once

#include "thetaforge/integer_matrix.hpp"

#include <Eigen/Dense>

namespace thetaforge {

// LLL-conditioned view of a Gram matrix: reduced_gram = transformᵀ·gram·transform.
// Used internally to keep enumeration trees narrow; never exposed as a feature.
struct Reduction {
  IntMatrix transform;
  IntMatrix inverse;
  Eigen::MatrixXd reduced_gram;
  Eigen::VectorXd bstar2;  // squared Gram-Schmidt lengths
  Eigen::MatrixXd mu;      // mu(j, i), j > i: Gram-Schmidt coefficients
};

Reduction lll_reduce(const Eigen::MatrixXd& gram, double delta = 0.99);

}  // namespace thetaforge
