#include "thetaforge/random_lattice.hpp"

#include "thetaforge/error.hpp"
#include "thetaforge/reduction.hpp"

#include <cmath>
#include <random>

namespace thetaforge {

EuclideanLattice random_lattice(SplitMix64& rng, int rank, const RandomLatticeOptions& options) {
  if (rank < 0) throw Error(ErrorKind::DomainError, "rank must be nonnegative");
  if (rank == 0) return EuclideanLattice();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd basis(rank, rank);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int j = 0; j < rank; ++j) {
      const double length = std::exp(options.scale_spread * (2.0 * rng.uniform() - 1.0));
      for (int i = 0; i < rank; ++i) basis(i, j) = normal(rng);
      basis.col(j) *= length / basis.col(j).norm();
    }
    const double det = std::abs(basis.determinant());
    if (det > 1e-3 * basis.colwise().norm().prod()) break;
  }
  if (options.unit_covolume) basis /= std::pow(std::abs(basis.determinant()), 1.0 / rank);
  Eigen::MatrixXd gram = basis.transpose() * basis;
  if (options.size_reduce) gram = lll_reduce(gram).reduced_gram;
  return EuclideanLattice::from_gram(0.5 * (gram + gram.transpose()));
}

IntMatrix random_unimodular(SplitMix64& rng, int rank, int steps) {
  if (rank < 0) throw Error(ErrorKind::DomainError, "rank must be nonnegative");
  IntMatrix u = IntMatrix::Identity(rank, rank);
  if (rank < 2) return u;
  const int count = steps > 0 ? steps : rank + 1;
  for (int s = 0; s < count; ++s) {
    const int i = static_cast<int>(rng() % rank);
    int j = static_cast<int>(rng() % (rank - 1));
    if (j >= i) ++j;
    const std::int64_t c = rng() % 2 ? 1 : -1;
    u.col(i) += c * u.col(j);
    if (rng() % 2) u.col(i).swap(u.col(j));
  }
  return u;
}

AdmissibleSequence random_admissible(SplitMix64& rng, int rank, int sub_rank, const RandomLatticeOptions& options) {
  if (sub_rank < 0 || sub_rank > rank) throw Error(ErrorKind::DomainError, "sub_rank must lie in [0, rank]");
  const EuclideanLattice total = random_lattice(rng, rank, options);
  const IntMatrix u = random_unimodular(rng, rank);
  return admissible_sequence(total, u.leftCols(sub_rank));
}

}  // namespace thetaforge
