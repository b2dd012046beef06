#include "thetaforge/reduction.hpp"

#include "thetaforge/error.hpp"

#include <cmath>

namespace thetaforge {
namespace {

struct Gso {
  Eigen::MatrixXd mu;
  Eigen::VectorXd bstar2;
};

Gso gram_schmidt(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows();
  Gso out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      double v = g(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= out.mu(j, k) * r(i, k);
      r(i, j) = v;
      out.mu(i, j) = v / out.bstar2(j);
    }
    double v = g(i, i);
    for (Eigen::Index k = 0; k < i; ++k) v -= out.mu(i, k) * r(i, k);
    out.bstar2(i) = v;
    out.mu(i, i) = 1.0;
  }
  return out;
}

Eigen::MatrixXd congruence(const Eigen::MatrixXd& gram, const IntMatrix& u) {
  const Eigen::Index n = gram.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      long double s = 0.0L;
      for (Eigen::Index a = 0; a < n; ++a) {
        if (u(a, i) == 0) continue;
        long double row = 0.0L;
        for (Eigen::Index b = 0; b < n; ++b) {
          if (u(b, j) != 0) row += static_cast<long double>(gram(a, b)) * u(b, j);
        }
        s += static_cast<long double>(u(a, i)) * row;
      }
      out(i, j) = out(j, i) = static_cast<double>(s);
    }
  }
  return out;
}

}  // namespace

Reduction lll_reduce(const Eigen::MatrixXd& gram, double delta) {
  const Eigen::Index n = gram.rows();
  Reduction red;
  red.transform = IntMatrix::Identity(n, n);
  red.inverse = IntMatrix::Identity(n, n);
  Eigen::MatrixXd g = gram;
  Gso gso = gram_schmidt(g);

  const long max_iterations = 100000 + 1000L * n * n;
  long iterations = 0;
  Eigen::Index k = 1;
  while (k < n) {
    if (++iterations > max_iterations) break;
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double m = gso.mu(k, j);
      if (std::abs(m) <= 0.5 + 1e-9) continue;
      const double qd = std::nearbyint(m);
      if (std::abs(qd) > 9.0e15) throw Error(ErrorKind::DomainError, "basis too ill-conditioned for reduction");
      const auto q = static_cast<std::int64_t>(qd);
      g.row(k) -= qd * g.row(j);
      g.col(k) -= qd * g.col(j);
      red.transform.col(k) -= q * red.transform.col(j);
      red.inverse.row(j) += q * red.inverse.row(k);
      for (Eigen::Index l = 0; l <= j; ++l) gso.mu(k, l) -= qd * gso.mu(j, l);
    }
    const double mu = gso.mu(k, k - 1);
    if (gso.bstar2(k) >= (delta - mu * mu) * gso.bstar2(k - 1)) {
      ++k;
      continue;
    }
    g.row(k).swap(g.row(k - 1));
    g.col(k).swap(g.col(k - 1));
    red.transform.col(k).swap(red.transform.col(k - 1));
    red.inverse.row(k).swap(red.inverse.row(k - 1));
    gso = gram_schmidt(g);
    k = std::max<Eigen::Index>(k - 1, 1);
  }

  red.reduced_gram = congruence(gram, red.transform);
  Eigen::LLT<Eigen::MatrixXd> llt(red.reduced_gram);
  if (llt.info() != Eigen::Success && n > 0) {
    throw Error(ErrorKind::NotPositiveDefinite, "reduced Gram lost positive definiteness");
  }
  const Eigen::MatrixXd r = llt.matrixU();
  red.bstar2.resize(n);
  red.mu = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    red.bstar2(i) = r(i, i) * r(i, i);
    red.mu(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) red.mu(j, i) = r(i, j) / r(i, i);
  }
  return red;
}

}  // namespace thetaforge
