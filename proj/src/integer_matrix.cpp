#include "thetaforge/integer_matrix.hpp"

#include "thetaforge/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <utility>

namespace thetaforge {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorKind::DomainError, "integer overflow in exact matrix arithmetic");
  }
  return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_sub_overflow(a, b, &out)) {
    throw Error(ErrorKind::DomainError, "integer overflow in exact matrix arithmetic");
  }
  return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Applies row ops to `m` and `transform`, and the matching inverse column ops to `inverse`.
class RowOps {
 public:
  RowOps(IntMatrix& m, IntMatrix& transform, IntMatrix& inverse)
      : m_(m), t_(transform), inv_(inverse) {}

  // row_i -= q * row_r
  void subtract(Eigen::Index i, Eigen::Index r, std::int64_t q) {
    if (q == 0) return;
    for (Eigen::Index c = 0; c < m_.cols(); ++c) m_(i, c) = checked_sub(m_(i, c), checked_mul(q, m_(r, c)));
    for (Eigen::Index c = 0; c < t_.cols(); ++c) t_(i, c) = checked_sub(t_(i, c), checked_mul(q, t_(r, c)));
    for (Eigen::Index c = 0; c < inv_.rows(); ++c) {
      inv_(c, r) = checked_sub(inv_(c, r), checked_mul(-q, inv_(c, i)));
    }
  }

  void swap(Eigen::Index i, Eigen::Index r) {
    if (i == r) return;
    m_.row(i).swap(m_.row(r));
    t_.row(i).swap(t_.row(r));
    inv_.col(i).swap(inv_.col(r));
  }

  void negate(Eigen::Index i) {
    m_.row(i) = -m_.row(i);
    t_.row(i) = -t_.row(i);
    inv_.col(i) = -inv_.col(i);
  }

 private:
  IntMatrix& m_;
  IntMatrix& t_;
  IntMatrix& inv_;
};

}  // namespace

RowHermite row_hermite(const IntMatrix& input) {
  const Eigen::Index rows = input.rows();
  RowHermite out;
  out.reduced = input;
  out.transform = IntMatrix::Identity(rows, rows);
  out.inverse = IntMatrix::Identity(rows, rows);
  RowOps ops(out.reduced, out.transform, out.inverse);
  IntMatrix& a = out.reduced;

  Eigen::Index pivot_row = 0;
  for (Eigen::Index col = 0; col < a.cols() && pivot_row < rows; ++col) {
    while (true) {
      Eigen::Index best = -1;
      for (Eigen::Index i = pivot_row; i < rows; ++i) {
        if (a(i, col) != 0 && (best < 0 || std::llabs(a(i, col)) < std::llabs(a(best, col)))) best = i;
      }
      if (best < 0) break;
      ops.swap(best, pivot_row);
      bool done = true;
      for (Eigen::Index i = pivot_row + 1; i < rows; ++i) {
        if (a(i, col) == 0) continue;
        ops.subtract(i, pivot_row, a(i, col) / a(pivot_row, col));
        if (a(i, col) != 0) done = false;
      }
      if (done) break;
    }
    if (a(pivot_row, col) == 0) continue;
    if (a(pivot_row, col) < 0) ops.negate(pivot_row);
    for (Eigen::Index i = 0; i < pivot_row; ++i) {
      ops.subtract(i, pivot_row, floor_div(a(i, col), a(pivot_row, col)));
    }
    ++pivot_row;
  }
  out.rank = static_cast<int>(pivot_row);
  return out;
}

std::vector<std::int64_t> smith_divisors(const IntMatrix& input) {
  IntMatrix a = input;
  auto off_diagonal_zero = [](const IntMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (i != j && m(i, j) != 0) return false;
    return true;
  };
  while (!off_diagonal_zero(a)) {
    a = row_hermite(a).reduced;
    IntMatrix at = a.transpose();
    a = row_hermite(at).reduced.transpose();
  }
  std::vector<std::int64_t> d;
  for (Eigen::Index i = 0; i < std::min(a.rows(), a.cols()); ++i) {
    if (a(i, i) != 0) d.push_back(std::llabs(a(i, i)));
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      const std::int64_t g = std::gcd(d[i], d[j]);
      const std::int64_t l = checked_mul(d[i] / g, d[j]);
      d[i] = g;
      d[j] = l;
    }
  }
  return d;
}

IntMatrix integer_kernel(const IntMatrix& input) {
  const RowHermite h = row_hermite(input.transpose());
  const Eigen::Index n = input.cols();
  return h.transform.bottomRows(n - h.rank).transpose();
}

IntMatrix unimodular_inverse(const IntMatrix& unimodular) {
  if (unimodular.rows() != unimodular.cols()) {
    throw Error(ErrorKind::DomainError, "unimodular_inverse expects a square matrix");
  }
  const RowHermite h = row_hermite(unimodular);
  if (h.reduced != IntMatrix::Identity(unimodular.rows(), unimodular.cols())) {
    throw Error(ErrorKind::DomainError, "matrix is not unimodular");
  }
  return h.transform;
}

Eigen::MatrixXd to_real(const IntMatrix& m) { return m.cast<double>(); }

}  // namespace thetaforge
