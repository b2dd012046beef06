#include "thetaforge/lattice.hpp"

#include "thetaforge/error.hpp"

#include <cmath>
#include <complex>
#include <utility>

namespace thetaforge {
namespace {

constexpr double kSymmetryTolerance = 1e-12;

Eigen::MatrixXd validated_symmetric(const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols()) {
    throw Error(ErrorKind::DomainError, "Gram matrix must be square");
  }
  if (!gram.allFinite()) throw Error(ErrorKind::DomainError, "Gram matrix has non-finite entries");
  const double scale = gram.size() == 0 ? 0.0 : gram.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) {
      if (std::abs(gram(i, j) - gram(j, i)) > kSymmetryTolerance * scale) {
        throw Error(ErrorKind::NotSymmetric, "entries (" + std::to_string(i) + "," + std::to_string(j) +
                                                 ") and transpose differ beyond 1e-12 relative");
      }
    }
  }
  return 0.5 * (gram + gram.transpose());
}

Eigen::MatrixXd cholesky_upper(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    long double d = g(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= static_cast<long double>(r(k, j)) * r(k, j);
    if (!(d > 0.0L)) {
      throw Error(ErrorKind::NotPositiveDefinite, "Cholesky pivot " + std::to_string(j) + " is not positive",
                  static_cast<std::int64_t>(j));
    }
    r(j, j) = static_cast<double>(std::sqrt(d));
    for (Eigen::Index i = j + 1; i < n; ++i) {
      long double s = g(j, i);
      for (Eigen::Index k = 0; k < j; ++k) s -= static_cast<long double>(r(k, j)) * r(k, i);
      r(j, i) = static_cast<double>(s / r(j, j));
    }
  }
  return r;
}

}  // namespace

EuclideanLattice::EuclideanLattice()
    : EuclideanLattice(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), std::nullopt, {}) {}

EuclideanLattice::EuclideanLattice(Eigen::MatrixXd gram, Eigen::MatrixXd cholesky,
                                   std::optional<Eigen::MatrixXd> basis, std::string label)
    : gram_(std::move(gram)),
      cholesky_(std::move(cholesky)),
      basis_(std::move(basis)),
      label_(std::move(label)) {
  reduction_ = std::make_shared<const Reduction>(lll_reduce(gram_));
  // The reduced basis is well conditioned, so its Gram-Schmidt lengths give an accurate determinant.
  log_covolume_ = 0.5 * reduction_->bstar2.array().log().sum();
}

EuclideanLattice EuclideanLattice::from_gram(const Eigen::MatrixXd& gram, std::string label) {
  Eigen::MatrixXd g = validated_symmetric(gram);
  Eigen::MatrixXd r = cholesky_upper(g);
  return EuclideanLattice(std::move(g), std::move(r), std::nullopt, std::move(label));
}

EuclideanLattice EuclideanLattice::from_basis(const Eigen::MatrixXd& basis, std::string label) {
  if (!basis.allFinite()) throw Error(ErrorKind::DomainError, "basis has non-finite entries");
  if (basis.cols() > basis.rows()) {
    throw Error(ErrorKind::RankDeficient, "more basis vectors than ambient dimensions");
  }
  Eigen::MatrixXd g = basis.transpose() * basis;
  Eigen::MatrixXd r = cholesky_upper(g);
  return EuclideanLattice(std::move(g), std::move(r), basis, std::move(label));
}

double EuclideanLattice::covolume() const { return std::exp(log_covolume_); }

double EuclideanLattice::norm2(const IntVector& coords) const {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    if (coords(i) == 0) continue;
    long double row = 0.0L;
    for (Eigen::Index j = 0; j < coords.size(); ++j) {
      if (coords(j) != 0) row += static_cast<long double>(gram_(i, j)) * coords(j);
    }
    s += row * coords(i);
  }
  return static_cast<double>(s);
}

double EuclideanLattice::norm2(const Eigen::VectorXd& coords) const {
  return (cholesky_ * coords).squaredNorm();
}

EuclideanLattice make_lattice(const Eigen::MatrixXd& gram, std::string label) {
  return EuclideanLattice::from_gram(gram, std::move(label));
}

EuclideanLattice dual(const EuclideanLattice& l) {
  if (l.rank() == 0) return l;
  // G⁻¹ = U R⁻¹ Uᵀ with R = UᵀGU the reduced Gram.
  const Reduction& red = l.reduction();
  const Eigen::MatrixXd reduced_inv =
      red.reduced_gram.ldlt().solve(Eigen::MatrixXd::Identity(l.rank(), l.rank()));
  const Eigen::MatrixXd u = to_real(red.transform);
  const Eigen::MatrixXd inv = u * reduced_inv * u.transpose();
  return EuclideanLattice::from_gram(0.5 * (inv + inv.transpose()), l.label().empty() ? "" : l.label() + "^dual");
}

EuclideanLattice rescale(const EuclideanLattice& l, double delta) {
  if (delta == 0.0) return l;
  return EuclideanLattice::from_gram(std::exp(-2.0 * delta) * l.gram(), l.label());
}

EuclideanLattice direct_sum(const EuclideanLattice& a, const EuclideanLattice& b) {
  const int n = a.rank() + b.rank();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  g.topLeftCorner(a.rank(), a.rank()) = a.gram();
  g.bottomRightCorner(b.rank(), b.rank()) = b.gram();
  std::string label;
  if (!a.label().empty() || !b.label().empty()) label = a.label() + "+" + b.label();
  return EuclideanLattice::from_gram(g, std::move(label));
}

EuclideanLattice sublattice(const EuclideanLattice& l, const IntMatrix& coords) {
  if (coords.rows() != l.rank()) throw Error(ErrorKind::DomainError, "sublattice coordinates have wrong height");
  const Eigen::MatrixXd c = to_real(coords);
  const Eigen::MatrixXd g = c.transpose() * l.gram() * c;
  try {
    return EuclideanLattice::from_gram(0.5 * (g + g.transpose()));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotPositiveDefinite) {
      throw Error(ErrorKind::RankDeficient, "sublattice generators are linearly dependent");
    }
    throw;
  }
}

EuclideanLattice direct_image_gram(const Eigen::MatrixXcd& embeddings, std::string label) {
  const Eigen::MatrixXcd h = embeddings.transpose() * embeddings.conjugate();
  const double scale = h.size() == 0 ? 1.0 : h.cwiseAbs().maxCoeff();
  if (h.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error(ErrorKind::DomainError, "embedding rows are not closed under complex conjugation");
  }
  return EuclideanLattice::from_gram(h.real(), std::move(label));
}

EuclideanLattice line_bundle(double delta) {
  return EuclideanLattice::from_gram(Eigen::MatrixXd::Constant(1, 1, std::exp(-2.0 * delta)));
}

EuclideanLattice diagonal_lattice(const Eigen::VectorXd& lambdas, std::string label) {
  return EuclideanLattice::from_gram(lambdas.asDiagonal().toDenseMatrix(), std::move(label));
}

EuclideanLattice identity_lattice(int rank) {
  return EuclideanLattice::from_gram(Eigen::MatrixXd::Identity(rank, rank));
}

}  // namespace thetaforge
