#include "thetaforge/extensions.hpp"

#include "parallel.hpp"
#include "thetaforge/error.hpp"

#include <cmath>

namespace thetaforge {

DefectReport h_theta_defect(const AdmissibleSequence& seq, double tol) {
  const ThetaResult e = theta(seq.sub, 1.0, tol);
  const ThetaResult f = theta(seq.total, 1.0, tol);
  const ThetaResult g = theta(seq.quotient, 1.0, tol);
  const double defect = e.log_value - f.log_value + g.log_value;
  const double bound = std::log1p(e.rel_error) + std::log1p(f.rel_error) + std::log1p(g.rel_error) + 1e-14;
  return {defect, bound, std::abs(defect) <= bound};
}

Eigen::MatrixXd extension_gram(const EuclideanLattice& e, const EuclideanLattice& g, const Eigen::MatrixXd& twist) {
  const int ne = e.rank();
  const int ng = g.rank();
  if (twist.rows() != ne || twist.cols() != ng) throw Error(ErrorKind::DomainError, "twist has the wrong shape");
  if (!twist.allFinite()) throw Error(ErrorKind::DomainError, "twist entries must be finite");
  Eigen::MatrixXd out(ne + ng, ne + ng);
  const Eigen::MatrixXd ge_t = e.gram() * twist;
  out.topLeftCorner(ne, ne) = e.gram();
  out.topRightCorner(ne, ng) = -ge_t;
  out.bottomLeftCorner(ng, ne) = -ge_t.transpose();
  out.bottomRightCorner(ng, ng) = g.gram() + twist.transpose() * ge_t;
  return 0.5 * (out + out.transpose());
}

ThetaResult gext(const EuclideanLattice& e, const EuclideanLattice& g, const Eigen::MatrixXd& twist, double tol) {
  return theta(EuclideanLattice::from_gram(extension_gram(e, g, twist)), 1.0, tol);
}

double gext_dual_series(const EuclideanLattice& e, const EuclideanLattice& g, const Eigen::MatrixXd& twist,
                        double tol) {
  if (twist.rows() != e.rank() || twist.cols() != g.rank()) {
    throw Error(ErrorKind::DomainError, "twist has the wrong shape");
  }
  const EuclideanLattice ed = dual(e);
  const double rg = std::max(tail_radius(g.rank(), 1.0, tol).radius2, 1.0);
  const double re = std::max(tail_radius(ed.rank(), 1.0, tol).radius2, 1.0);
  const auto gpts = g.rank() == 0 ? std::vector<LatticeVector>{{IntVector(0), 0.0}} : enumerate(g, rg);
  const auto epts = ed.rank() == 0 ? std::vector<LatticeVector>{{IntVector(0), 0.0}} : enumerate(ed, re);
  long double total = 0.0L;
  for (const auto& gp : gpts) {
    const Eigen::VectorXd shift = twist * gp.coords.cast<double>();
    long double inner = 0.0L;
    for (const auto& ep : epts) {
      const double phase = 2.0 * M_PI * ep.coords.cast<double>().dot(shift);
      inner += std::exp(-M_PI * ep.normsq) * std::cos(phase);
    }
    total += std::exp(-M_PI * gp.normsq) * inner;
  }
  return static_cast<double>(total) / e.covolume();
}

double gext_average_target(const EuclideanLattice& e, const EuclideanLattice& g, double tol) {
  const double h1e = h1_theta(e, tol);
  const double h0g = h0_theta(g, tol);
  return 1.0 - (-std::expm1(-h1e)) * (-std::expm1(-h0g));
}

GextAverage gext_average(const EuclideanLattice& e, const EuclideanLattice& g, int grid, double tol) {
  if (grid < 8) throw Error(ErrorKind::GridTooCoarse, "torus grid needs at least 8 points per dimension");
  const int ne = e.rank();
  const int ng = g.rank();
  const int dims = ne * ng;
  if (dims > 3) throw Error(ErrorKind::GridOverflow, "exhaustive torus grids need rank(E)*rank(G) <= 3");
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(grid);
  const double base = gext(e, g, Eigen::MatrixXd::Zero(ne, ng), tol).value;

  std::vector<double> values(total);
  detail::parallel_for(total, [&](std::size_t idx) {
    Eigen::MatrixXd twist(ne, ng);
    std::size_t rest = idx;
    for (int d = 0; d < dims; ++d) {
      twist(d % ne, d / ne) = static_cast<double>(rest % grid) / grid;
      rest /= grid;
    }
    values[idx] = gext(e, g, twist, tol).value / base;
  }, 4);
  long double sum = 0.0L;
  for (double v : values) sum += v;
  return {static_cast<double>(sum / static_cast<long double>(total)), gext_average_target(e, g, tol), total};
}

std::vector<Check> alternating_chain(const AdmissibleSequence& seq, double slack, double tol) {
  const double h0e = h0_theta(seq.sub, tol);
  const double h0f = h0_theta(seq.total, tol);
  const double h0g = h0_theta(seq.quotient, tol);
  const double h1e = h1_theta(seq.sub, tol);
  const double h1f = h1_theta(seq.total, tol);
  const double h1g = h1_theta(seq.quotient, tol);
  const double defect = h0e - h0f + h0g;
  const double alternating = h0e - h0f + h0g - h1e + h1f - h1g;
  auto le = [&](std::string name, double a, double b) { return Check{std::move(name), a <= b + slack, a, b, {}}; };
  return {
      le("0 <= h0(E)", 0.0, h0e),
      le("h0(E) <= h0(F)", h0e, h0f),
      le("0 <= defect", 0.0, defect),
      le("defect <= h1(E)", defect, h1e),
      le("h1(E) - h1(F) <= defect", h1e - h1f, defect),
      Check{"alternating sum = 0", std::abs(alternating) <= slack, alternating, 0.0, {}},
  };
}

}  // namespace thetaforge
