#include "thetaforge/prolim.hpp"

#include "thetaforge/enumerate.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/kernels.hpp"
#include "thetaforge/lattice_io.hpp"
#include "thetaforge/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace thetaforge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IntMatrix checked_product(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      __int128 acc = 0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += static_cast<__int128>(a(i, k)) * b(k, j);
      if (acc > std::numeric_limits<std::int64_t>::max() || acc < std::numeric_limits<std::int64_t>::min()) {
        throw Error(ErrorKind::DomainError, "integer overflow composing projective maps");
      }
      out(i, j) = static_cast<std::int64_t>(acc);
    }
  }
  return out;
}

// Integer section s with map·s = I and a basis of ker(map), for a surjective map.
struct Splitting {
  IntMatrix section;
  IntMatrix kernel;
};

Splitting split_surjection(const IntMatrix& map) {
  const Eigen::Index k = map.rows();
  const Eigen::Index n = map.cols();
  const RowHermite h = row_hermite(map.transpose());
  if (h.rank != k) throw Error(ErrorKind::NotSaturated, "projective map is not surjective over the reals");
  const IntMatrix t = h.transform.transpose();
  const IntMatrix top = h.reduced.topRows(k).transpose();
  IntMatrix inv;
  try {
    inv = unimodular_inverse(top);
  } catch (const Error&) {
    throw Error(ErrorKind::NotSaturated, "projective map is not surjective over the integers",
                static_cast<long>(k), smith_divisors(map));
  }
  return {checked_product(t.leftCols(k), inv), t.rightCols(n - k)};
}

EuclideanLattice induced(const EuclideanLattice& l, const IntMatrix& coords) {
  if (coords.cols() == 0) return EuclideanLattice();
  return sublattice(l, coords);
}

// log h⁰_θ from log(θ - 1), stable when the excess is far below the double range.
double log_h0_from_excess(double log_excess) {
  if (log_excess == -kInf) return -kInf;
  if (log_excess < -30.0) return log_excess + std::log1p(-0.5 * std::exp(log_excess));
  return std::log(std::log1p(std::exp(log_excess)));
}

struct KernelData {
  std::vector<double> h0;
  std::vector<double> h0_upper;
  std::vector<double> log_h0;
  std::vector<int> rank;
};

KernelData kernel_data(const std::vector<EuclideanLattice>& kernels, double tol) {
  KernelData d;
  for (const auto& s : kernels) {
    const ThetaResult th = theta(s, 1.0, tol);
    d.h0.push_back(th.log_value);
    d.h0_upper.push_back(th.log_upper());
    d.log_h0.push_back(log_h0_from_excess(th.log_excess));
    d.rank.push_back(s.rank());
  }
  return d;
}

KernelTail fit_tail(const KernelData& d) {
  KernelTail tail;
  const int depth = static_cast<int>(d.h0.size());
  if (depth == 0 || d.rank.back() == 0) {
    tail.slope = -kInf;
    return tail;
  }
  std::vector<double> js;
  std::vector<double> ys;
  for (int j = std::max(0, depth - 3); j < depth; ++j) {
    if (d.rank[j] == 0) continue;
    js.push_back(j);
    ys.push_back(d.log_h0[j]);
  }
  if (js.size() < 2) {
    tail.summable = false;
    tail.value = kInf;
    tail.reason = "fewer than two nonzero kernels among the last three levels";
    return tail;
  }
  const double mj = std::accumulate(js.begin(), js.end(), 0.0) / js.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    sxy += (js[i] - mj) * (ys[i] - my);
    sxx += (js[i] - mj) * (js[i] - mj);
  }
  tail.slope = sxy / sxx;
  // The fit is anchored at the last kernel so the model never undershoots it.
  const double intercept = std::max(my - tail.slope * mj, ys.back() - tail.slope * js.back());
  if (!(tail.slope < -1e-12)) {
    tail.summable = false;
    tail.value = kInf;
    tail.reason = "kernel theta invariants do not decay over the last levels";
    return tail;
  }
  tail.value = std::exp(intercept + tail.slope * depth) / -std::expm1(tail.slope);
  return tail;
}

void require_summable(const KernelTail& tail, int depth) {
  if (!tail.summable) {
    throw Error(ErrorKind::NotSummableAtDepth,
                "projective system is not summable at depth " + std::to_string(depth) + ": " + tail.reason,
                depth);
  }
}

Eigen::VectorXd kernel_center(const EuclideanLattice& total, const IntMatrix& kernel, const IntVector& x0) {
  const Eigen::MatrixXd k = to_real(kernel);
  const Eigen::MatrixXd gk = total.gram() * k;
  const Eigen::MatrixXd kgk = k.transpose() * gk;
  return -kgk.ldlt().solve(gk.transpose() * x0.cast<double>());
}

}  // namespace

ProjectiveSystem::ProjectiveSystem(std::vector<EuclideanLattice> levels, std::vector<IntMatrix> maps)
    : levels_(std::move(levels)), maps_(std::move(maps)) {
  if (levels_.empty()) throw Error(ErrorKind::DomainError, "projective system needs at least one level");
  if (maps_.size() + 1 != levels_.size()) {
    throw Error(ErrorKind::DomainError, "projective system needs one map per level after the first");
  }
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const EuclideanLattice& lower = levels_[i];
    const EuclideanLattice& upper = levels_[i + 1];
    const IntMatrix& q = maps_[i];
    const std::string where = "map " + std::to_string(i + 1);
    if (q.rows() != lower.rank() || q.cols() != upper.rank()) {
      throw Error(ErrorKind::DomainError, where + " has shape " + std::to_string(q.rows()) + "x" +
                                              std::to_string(q.cols()) + ", expected " +
                                              std::to_string(lower.rank()) + "x" + std::to_string(upper.rank()));
    }
    if (lower.rank() > 0) {
      const auto divisors = smith_divisors(q);
      const bool onto = static_cast<int>(divisors.size()) == lower.rank() &&
                        std::all_of(divisors.begin(), divisors.end(), [](std::int64_t d) { return d == 1; });
      if (!onto) throw Error(ErrorKind::NotSaturated, where + " is not surjective over Z", -1, divisors);
      const Eigen::MatrixXd qr = to_real(q);
      const Eigen::MatrixXd pushed = qr * upper.gram().ldlt().solve(qr.transpose());
      const Eigen::MatrixXd quotient = pushed.ldlt().solve(Eigen::MatrixXd::Identity(lower.rank(), lower.rank()));
      const double scale = std::max(1.0, lower.gram().cwiseAbs().maxCoeff());
      const double defect = (quotient - lower.gram()).cwiseAbs().maxCoeff();
      metric_defects_.push_back(defect);
      if (defect > 1e-9 * scale) {
        throw Error(ErrorKind::DomainError, "level " + std::to_string(i) +
                                                " does not carry the quotient metric of level " +
                                                std::to_string(i + 1));
      }
    }
    if (lower.rank() == 0) metric_defects_.push_back(0.0);
    const IntMatrix kernel = lower.rank() == 0 ? IntMatrix(IntMatrix::Identity(upper.rank(), upper.rank()))
                                               : integer_kernel(q);
    kernel_bases_.push_back(kernel);
    kernels_.push_back(induced(upper, kernel));
  }
}

IntMatrix ProjectiveSystem::composite(int from, int to) const {
  if (from < 0 || to > depth() || from > to) throw Error(ErrorKind::DomainError, "composite map levels out of range");
  IntMatrix out = IntMatrix::Identity(levels_[from].rank(), levels_[from].rank());
  for (int i = from; i < to; ++i) out = checked_product(out, maps_[i]);
  return out;
}

ProjectiveSystem ProjectiveSystem::truncated(int depth) const {
  if (depth < 0 || depth > this->depth()) throw Error(ErrorKind::DomainError, "truncation depth out of range");
  return ProjectiveSystem({levels_.begin(), levels_.begin() + depth + 1}, {maps_.begin(), maps_.begin() + depth});
}

ProjectiveSystem projective_system_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("levels") || !doc["levels"].is_array() || doc["levels"].empty()) {
    throw Error(ErrorKind::ParseError, "projective system needs a nonempty \"levels\" array");
  }
  std::vector<EuclideanLattice> levels;
  std::vector<IntMatrix> maps;
  for (const auto& level : doc["levels"]) {
    levels.push_back(lattice_from_json(level));
    if (levels.size() == 1) continue;
    if (!level.contains("map")) {
      throw Error(ErrorKind::ParseError, "level " + std::to_string(levels.size() - 1) + " lacks \"map\"");
    }
    maps.push_back(int_matrix_from_json(level["map"], "map", levels.back().rank()));
  }
  return ProjectiveSystem(std::move(levels), std::move(maps));
}

nlohmann::json projective_system_to_json(const ProjectiveSystem& sys) {
  nlohmann::json levels = nlohmann::json::array();
  for (int i = 0; i <= sys.depth(); ++i) {
    nlohmann::json level = lattice_to_json(sys.levels()[i]);
    if (i > 0) level["map"] = matrix_to_json(sys.maps()[i - 1]);
    levels.push_back(std::move(level));
  }
  return {{"levels", levels}};
}

ProjectiveSystem diagonal_system(const std::vector<double>& lambdas) {
  std::vector<EuclideanLattice> levels;
  std::vector<IntMatrix> maps;
  levels.emplace_back();
  for (std::size_t k = 1; k <= lambdas.size(); ++k) {
    const Eigen::Map<const Eigen::VectorXd> head(lambdas.data(), static_cast<Eigen::Index>(k));
    levels.push_back(diagonal_lattice(head));
    IntMatrix q = IntMatrix::Zero(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k));
    q.leftCols(static_cast<Eigen::Index>(k - 1)).setIdentity();
    maps.push_back(std::move(q));
  }
  return ProjectiveSystem(std::move(levels), std::move(maps));
}

std::vector<double> hardy_lambdas(double radius, double delta, int depth) {
  if (!(radius > 0.0) || depth < 0) throw Error(ErrorKind::DomainError, "hardy family needs R > 0 and depth >= 0");
  std::vector<double> out;
  for (int n = 0; n < depth; ++n) out.push_back(std::exp(2.0 * n * std::log(radius) - 2.0 * delta));
  return out;
}

ProjectiveSystem hardy_system(double radius, double delta, int depth) {
  return diagonal_system(hardy_lambdas(radius, delta, depth));
}

IntVector minimal_preimage(const EuclideanLattice& lattice, const IntMatrix& map, const IntVector& target) {
  if (map.cols() != lattice.rank() || map.rows() != target.size()) {
    throw Error(ErrorKind::DomainError, "minimal_preimage shape mismatch");
  }
  if (map.rows() == 0) return IntVector::Zero(lattice.rank());
  const Splitting s = split_surjection(map);
  const IntVector x0 = checked_product(s.section, target);
  if (s.kernel.cols() == 0) return x0;
  const EuclideanLattice kernel = sublattice(lattice, s.kernel);
  const ClosestVector z = closest_vector(kernel, kernel_center(lattice, s.kernel, x0));
  return x0 + checked_product(s.kernel, z.coords);
}

KernelTail kernel_tail(const ProjectiveSystem& sys, double tol) {
  return fit_tail(kernel_data(sys.kernels(), tol));
}

SummabilityReport summability_report(const ProjectiveSystem& sys, double eps, double tol) {
  std::vector<EuclideanLattice> twisted;
  for (const auto& s : sys.kernels()) twisted.push_back(s.rank() == 0 ? s : rescale(s, eps));
  const KernelData d = kernel_data(twisted, tol);
  SummabilityReport r{eps, d.h0, {}, fit_tail(d), {}};
  double running = 0.0;
  for (double h : d.h0) r.partial_sums.push_back(running += h);
  r.status = r.tail.summable ? "certified-for-this-filtration" : "divergent-at-depth";
  return r;
}

LimitH0 limit_h0(const ProjectiveSystem& sys, double tol) {
  const int depth = sys.depth();
  const KernelData kd = kernel_data(sys.kernels(), tol);
  LimitH0 out{};
  out.tail = fit_tail(kd);
  require_summable(out.tail, depth);
  out.kernel_h0 = kd.h0;

  std::vector<double> level_upper;
  for (const auto& level : sys.levels()) {
    const ThetaResult th = theta(level, 1.0, tol);
    out.level_h0.push_back(th.log_value);
    level_upper.push_back(th.log_upper());
  }
  out.estimate = out.level_h0.back();

  // Suffix sums of certified kernel upper bounds give one upper bound per level.
  out.upper = kInf;
  double suffix = out.tail.value;
  for (int k = depth; k >= 0; --k) {
    if (k < depth) suffix += kd.h0_upper[k];
    out.upper = std::min(out.upper, level_upper[k] + suffix);
  }

  const double slack = 4.0 * tol + 1e-13;
  out.monotone = true;
  out.subadditive = true;
  double kernel_sum = 0.0;
  for (int k = 0; k <= depth; ++k) {
    out.level_values.push_back(out.level_h0[k] - kernel_sum);
    if (k > 0 && out.level_values[k] > out.level_values[k - 1] + slack * (k + 1)) out.monotone = false;
    if (k < depth) {
      if (out.level_h0[k + 1] > out.level_h0[k] + kd.h0[k] + slack) out.subadditive = false;
      kernel_sum += kd.h0[k];
    }
  }

  out.lower = depth == 0 ? out.estimate : -kInf;
  out.lower_level = depth;
  const EuclideanLattice& top = sys.levels().back();
  for (int k = 0; k < depth; ++k) {
    const EuclideanLattice& level = sys.levels()[k];
    double h = 0.0;
    if (level.rank() > 0) {
      const IntMatrix p = sys.composite(k, depth);
      IntMatrix lifts(top.rank(), level.rank());
      for (int j = 0; j < level.rank(); ++j) {
        lifts.col(j) = minimal_preimage(top, p, IntVector::Unit(level.rank(), j));
      }
      h = h0_theta(sublattice(top, lifts), tol);
    }
    if (h > out.lower) {
      out.lower = h;
      out.lower_level = k;
    }
  }
  if (!(out.lower <= out.estimate + slack) || !(out.estimate <= out.upper + slack)) {
    throw Error(ErrorKind::InconsistentBounds, "limit bounds out of order: lower " + format_shortest(out.lower) +
                                                   ", estimate " + format_shortest(out.estimate) + ", upper " +
                                                   format_shortest(out.upper));
  }
  return out;
}

double hardy_invariant(double radius, double delta, double tol) {
  if (!(radius > 0.0)) throw Error(ErrorKind::DomainError, "hardy invariant needs R > 0");
  if (radius <= 1.0) return kInf;
  const double log_r2 = 2.0 * std::log(radius);
  long double sum = 0.0L;
  for (long n = 0; n < 100'000'000; ++n) {
    const double log_x = n * log_r2 - 2.0 * delta;
    const double term = tau(std::exp(log_x));
    sum += term;
    if (log_x >= 0.0 && (term == 0.0 || term < tol * static_cast<double>(sum))) break;
  }
  return static_cast<double>(sum);
}

double HardySlope::relative_error() const { return std::abs(quadratic - target) / target; }

HardySlope hardy_slope(double radius, double delta_lo, double delta_hi, int points) {
  if (!(radius > 1.0) || points < 3 || !(delta_hi > delta_lo)) {
    throw Error(ErrorKind::DomainError, "hardy slope needs R > 1, at least 3 points and a nonempty interval");
  }
  Eigen::MatrixXd design(points, 3);
  Eigen::VectorXd values(points);
  for (int i = 0; i < points; ++i) {
    const double d = delta_lo + (delta_hi - delta_lo) * i / (points - 1);
    design.row(i) << d * d, d, 1.0;
    values(i) = hardy_invariant(radius, d);
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(values);
  return {coef(0), coef(1), coef(2), 1.0 / (2.0 * std::log(radius))};
}

bool LimitMeasureReport::passed() const {
  return std::all_of(atoms.begin(), atoms.end(), [](const MeasureAtom& a) { return a.in_bracket; }) &&
         std::all_of(domination.begin(), domination.end(), [](const Check& c) { return c.passed; });
}

LimitMeasureReport limit_measure_truncation(const ProjectiveSystem& full, int depth, double atom_floor, double tol) {
  if (!(atom_floor > 0.0 && atom_floor < 1.0)) throw Error(ErrorKind::DomainError, "atom floor must lie in (0, 1)");
  const ProjectiveSystem sys = full.truncated(depth);
  const KernelData kd = kernel_data(sys.kernels(), tol);
  LimitMeasureReport r{depth, fit_tail(kd), kd.h0, {}, {}};
  require_summable(r.tail, depth);

  const double atom_r2 = -std::log(atom_floor) / M_PI;
  const EuclideanLattice& top = sys.levels().back();

  // Gaussian mass of the fiber map⁻¹(w) in `total`, summed over integer points
  // so that each norm is evaluated directly from exact coordinates.
  struct Fiber {
    double log_mass = -kInf;
    double min_normsq = kInf;
    double scale = 0.0;  // |v|ᵀ|G||v| at the closest point, for rounding bounds
  };
  auto fiber = [&](const EuclideanLattice& total, const IntMatrix& map, const IntVector& w) {
    Fiber f;
    if (total.rank() == 0) return Fiber{0.0, 0.0, 0.0};
    const Splitting s = map.rows() == 0 ? Splitting{IntMatrix(total.rank(), 0),
                                                    IntMatrix(IntMatrix::Identity(total.rank(), total.rank()))}
                                        : split_surjection(map);
    const IntVector x0 = checked_product(s.section, w);
    std::vector<IntVector> points;
    if (s.kernel.cols() == 0) {
      points.push_back(x0);
    } else {
      const EuclideanLattice kernel = sublattice(total, s.kernel);
      const Eigen::VectorXd c = kernel_center(total, s.kernel, x0);
      const double r2 = std::max(tail_radius(kernel.rank(), 1.0, tol).radius2, closest_vector(kernel, c).dist2);
      for (const auto& p : enumerate_around(kernel, c, r2)) points.push_back(x0 + checked_product(s.kernel, p.coords));
    }
    const Eigen::MatrixXd abs_gram = total.gram().cwiseAbs();
    for (const auto& v : points) {
      const double n2 = total.norm2(v);
      const double e = -M_PI * n2;
      f.log_mass = f.log_mass == -kInf ? e : std::max(f.log_mass, e) + std::log1p(std::exp(-std::abs(f.log_mass - e)));
      if (n2 < f.min_normsq) {
        f.min_normsq = n2;
        const Eigen::VectorXd av = v.cast<double>().cwiseAbs();
        f.scale = av.dot(abs_gram * av);
      }
    }
    return f;
  };
  // Log-domain slack for comparing -π‖v‖² in one level with -π‖w‖² in another:
  // rounding of both quadratic forms plus the measured quotient-metric defect.
  auto norm_slack = [&](const Fiber& f, const IntVector& w, double metric_defect) {
    const double l1 = static_cast<double>(w.cwiseAbs().sum());
    return M_PI * (64.0 * std::numeric_limits<double>::epsilon() * (f.scale + 1.0) + metric_defect * l1 * l1);
  };

  for (int i = 0; i <= depth; ++i) {
    const EuclideanLattice& level = sys.levels()[i];
    const auto atoms = level.rank() == 0 ? std::vector<LatticeVector>{{IntVector(0), 0.0}} : enumerate(level, atom_r2);
    double suffix = r.tail.value;
    double chain_defect = 0.0;
    for (int k = i; k < depth; ++k) {
      suffix += kd.h0_upper[k];
      chain_defect += sys.metric_defects()[k];
    }
    const IntMatrix p = sys.composite(i, depth);

    double worst = -kInf;
    double worst_slack = 0.0;
    std::string witness;
    for (const auto& a : atoms) {
      MeasureAtom m;
      m.level = i;
      m.atom = a.coords;
      m.gamma = std::exp(-M_PI * a.normsq);
      const Fiber f = fiber(top, p, a.coords);
      m.pushforward = std::exp(f.log_mass);
      m.lift_normsq = f.min_normsq;
      m.lower = std::exp(-M_PI * f.min_normsq);
      m.log_upper = -M_PI * a.normsq + suffix;
      m.log_width = m.log_upper + M_PI * f.min_normsq;
      m.in_bracket = f.log_mass >= -M_PI * f.min_normsq && f.log_mass <= m.log_upper + norm_slack(f, a.coords, chain_defect);
      r.atoms.push_back(std::move(m));

      if (i < depth) {
        const Fiber step = fiber(sys.levels()[i + 1], sys.maps()[i], a.coords);
        const double ratio = step.log_mass + M_PI * a.normsq;
        const double slack = norm_slack(step, a.coords, sys.metric_defects()[i]);
        if (ratio - slack > worst - worst_slack) {
          worst = ratio;
          worst_slack = slack;
          witness = "level " + std::to_string(i) + " atom " + matrix_to_json(IntMatrix(a.coords)).dump() +
                    ", rounding slack " + format_shortest(slack);
        }
      }
    }
    if (i < depth) {
      const double bound = kd.h0_upper[i];
      r.domination.push_back(Check{"q_*gamma_" + std::to_string(i + 1) + " <= e^{h0(S_" + std::to_string(i) +
                                       ")} gamma_" + std::to_string(i),
                                   worst <= bound + worst_slack, worst, bound, witness});
    }
  }
  return r;
}

}  // namespace thetaforge
