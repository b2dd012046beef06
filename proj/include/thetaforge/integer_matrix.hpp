#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace thetaforge {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// transform * input == reduced, with `reduced` in row Hermite normal form
// (positive pivots, entries above each pivot reduced into [0, pivot)).
// `inverse` is transform^{-1}; both are unimodular.
struct RowHermite {
  IntMatrix reduced;
  IntMatrix transform;
  IntMatrix inverse;
  int rank = 0;
};

RowHermite row_hermite(const IntMatrix& input);

// Nonzero invariant factors d_1 | d_2 | ... of the Smith normal form.
std::vector<std::int64_t> smith_divisors(const IntMatrix& input);

// Columns form a basis of {x in Z^n : input * x = 0}; the span is saturated.
IntMatrix integer_kernel(const IntMatrix& input);

// Integer inverse of a unimodular matrix; throws DomainError otherwise.
IntMatrix unimodular_inverse(const IntMatrix& unimodular);

Eigen::MatrixXd to_real(const IntMatrix& m);

}  // namespace thetaforge
