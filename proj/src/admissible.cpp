#include "thetaforge/admissible.hpp"

#include "thetaforge/error.hpp"

namespace thetaforge {

Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& gram, int k) {
  const Eigen::Index n = gram.rows();
  const Eigen::Index m = n - k;
  if (k == 0) return gram;
  if (m == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::MatrixXd a = gram.topLeftCorner(k, k);
  const Eigen::MatrixXd b = gram.topRightCorner(k, m);
  const Eigen::MatrixXd c = gram.bottomRightCorner(m, m);
  const Eigen::MatrixXd s = c - b.transpose() * a.llt().solve(b);
  return 0.5 * (s + s.transpose());
}

AdmissibleSequence admissible_sequence(const EuclideanLattice& total, const IntMatrix& sub_basis) {
  const int n = total.rank();
  const int k = static_cast<int>(sub_basis.cols());
  if (sub_basis.rows() != n) throw Error(ErrorKind::DomainError, "sub_basis height differs from the lattice rank");
  if (k > n) throw Error(ErrorKind::RankDeficient, "more sub_basis columns than the lattice rank");

  const RowHermite h = row_hermite(sub_basis);
  if (h.rank < k) throw Error(ErrorKind::RankDeficient, "sub_basis columns are linearly dependent");
  for (int i = 0; i < k; ++i) {
    if (h.reduced(i, i) != 1) {
      throw Error(ErrorKind::NotSaturated, "sub_basis spans a sublattice of finite index > 1 in its saturation", -1,
                  smith_divisors(sub_basis));
    }
  }

  // Rows k.. of the transform project F onto Z^{n-k} with kernel E; the row
  // Hermite form of that projection fixes the quotient basis canonically.
  const IntMatrix raw_projection = h.transform.bottomRows(n - k);
  const RowHermite hp = row_hermite(raw_projection);
  const IntMatrix lift = h.inverse.rightCols(n - k) * hp.inverse;

  IntMatrix completion(n, n);
  completion << sub_basis, lift;
  const Eigen::MatrixXd u = to_real(completion);
  Eigen::MatrixXd g = u.transpose() * total.gram() * u;
  g = 0.5 * (g + g.transpose());

  AdmissibleSequence seq{total,
                         sub_basis,
                         EuclideanLattice::from_gram(g.topLeftCorner(k, k)),
                         EuclideanLattice::from_gram(schur_complement(g, k)),
                         lift,
                         hp.reduced};
  return seq;
}

}  // namespace thetaforge
