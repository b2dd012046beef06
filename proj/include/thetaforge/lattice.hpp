#pragma once

#include "thetaforge/integer_matrix.hpp"
#include "thetaforge/reduction.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>

namespace thetaforge {

// A free Z-module of finite rank with a euclidean norm, stored as the Gram
// matrix of a chosen basis. Immutable after construction; cheap to copy.
class EuclideanLattice {
 public:
  // The rank-0 lattice: covolume 1, degree 0.
  EuclideanLattice();

  static EuclideanLattice from_gram(const Eigen::MatrixXd& gram, std::string label = {});
  // Columns of `basis` are the lattice generators; Gram = basisᵀ·basis.
  static EuclideanLattice from_basis(const Eigen::MatrixXd& basis, std::string label = {});

  int rank() const { return static_cast<int>(gram_.rows()); }
  const Eigen::MatrixXd& gram() const { return gram_; }
  // Upper-triangular R with gram = Rᵀ·R.
  const Eigen::MatrixXd& cholesky() const { return cholesky_; }
  const std::optional<Eigen::MatrixXd>& basis() const { return basis_; }
  const std::string& label() const { return label_; }
  const Reduction& reduction() const { return *reduction_; }

  double log_covolume() const { return log_covolume_; }
  double covolume() const;
  double degree() const { return -log_covolume_; }

  // vᵀ·G·v evaluated with extended-precision accumulation.
  double norm2(const IntVector& coords) const;
  double norm2(const Eigen::VectorXd& coords) const;

 private:
  EuclideanLattice(Eigen::MatrixXd gram, Eigen::MatrixXd cholesky, std::optional<Eigen::MatrixXd> basis,
                   std::string label);

  Eigen::MatrixXd gram_;
  Eigen::MatrixXd cholesky_;
  std::optional<Eigen::MatrixXd> basis_;
  std::string label_;
  double log_covolume_ = 0.0;
  std::shared_ptr<const Reduction> reduction_;
};

struct LatticeVector {
  IntVector coords;
  double normsq = 0.0;
};

EuclideanLattice make_lattice(const Eigen::MatrixXd& gram, std::string label = {});

inline double covolume(const EuclideanLattice& l) { return l.covolume(); }
inline double degree(const EuclideanLattice& l) { return l.degree(); }

EuclideanLattice dual(const EuclideanLattice& l);
EuclideanLattice rescale(const EuclideanLattice& l, double delta);
EuclideanLattice direct_sum(const EuclideanLattice& a, const EuclideanLattice& b);
// Sublattice spanned by integer columns of `coords`, with the induced metric.
EuclideanLattice sublattice(const EuclideanLattice& l, const IntMatrix& coords);

// Rows are complex embeddings σ, columns the images σ(b_j) of an integral
// basis; rows must be closed under complex conjugation.
EuclideanLattice direct_image_gram(const Eigen::MatrixXcd& embeddings, std::string label = {});

// Rank-one lattice O(δ): Gram [[e^{-2δ}]].
EuclideanLattice line_bundle(double delta);
// Diagonal lattice with Gram diag(lambdas).
EuclideanLattice diagonal_lattice(const Eigen::VectorXd& lambdas, std::string label = {});
EuclideanLattice identity_lattice(int rank);

}  // namespace thetaforge
