#include "thetaforge/verify.hpp"

#include "thetaforge/admissible.hpp"
#include "thetaforge/enumerate.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/extensions.hpp"
#include "thetaforge/lattice_io.hpp"
#include "thetaforge/prolim.hpp"
#include "thetaforge/random_lattice.hpp"
#include "thetaforge/siegel.hpp"
#include "thetaforge/special.hpp"
#include "thetaforge/theta.hpp"
#include "thetaforge/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace thetaforge {
namespace {

class Recorder {
 public:
  explicit Recorder(std::string suite) : result_{std::move(suite), {}} {}

  void le(const std::string& name, double lhs, double rhs, double slack = 0.0, std::string witness = {}) {
    result_.checks.push_back(Check{name, lhs <= rhs + slack, lhs, rhs, std::move(witness)});
  }
  void near(const std::string& name, double value, double target, double tol, std::string witness = {}) {
    result_.checks.push_back(Check{name, std::abs(value - target) <= tol, value, target, std::move(witness)});
  }
  void truth(const std::string& name, bool ok, std::string witness = {}) {
    result_.checks.push_back(Check{name, ok, ok ? 1.0 : 0.0, 1.0, std::move(witness)});
  }
  void add(Check c) { result_.checks.push_back(std::move(c)); }
  SuiteResult take() { return std::move(result_); }

 private:
  SuiteResult result_;
};

std::string gram_witness(const EuclideanLattice& l) { return "gram " + lattice_to_json(l)["gram"].dump(); }

SplitMix64 trial_rng(const SuiteOptions& o, std::uint64_t suite, int trial) {
  return SplitMix64::stream(o.seed ^ (suite * 0x9e3779b97f4a7c15ULL), static_cast<std::uint64_t>(trial));
}

int pick(SplitMix64& rng, int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }

std::set<std::vector<std::int64_t>> brute_force_ball(const EuclideanLattice& l, double r2) {
  const int n = l.rank();
  const Eigen::MatrixXd inv = l.gram().inverse();
  std::vector<std::int64_t> bound(n);
  for (int i = 0; i < n; ++i) bound[i] = static_cast<std::int64_t>(std::floor(std::sqrt(r2 * inv(i, i)) + 1e-9));
  std::set<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> x(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      IntVector v(n);
      for (int k = 0; k < n; ++k) v(k) = x[k];
      if (l.norm2(v) <= r2) out.insert(x);
      return;
    }
    for (std::int64_t c = -bound[i]; c <= bound[i]; ++c) {
      x[i] = c;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

SuiteResult lattice_suite(const SuiteOptions& o) {
  Recorder r("lattice");
  for (int trial = 0; trial < o.trials; ++trial) {
    SplitMix64 rng = trial_rng(o, 1, trial);
    const int n = pick(rng, 1, 4);
    const EuclideanLattice base = random_lattice(rng, n);
    const IntMatrix u = random_unimodular(rng, n);
    const EuclideanLattice l = sublattice(base, u);
    const std::string w = gram_witness(l);

    const double r2 = 1.0 + rng.uniform();
    std::set<std::vector<std::int64_t>> found;
    for (const auto& p : enumerate(l, r2)) found.insert({p.coords.data(), p.coords.data() + n});
    r.truth("enumerate matches brute-force box search", found == brute_force_ball(l, r2), w);

    r.near("deg(dual) = -deg", degree(dual(l)), -degree(l), 1e-9, w);
    const double scale = l.gram().cwiseAbs().maxCoeff();
    r.le("dual(dual(L)) = L", (dual(dual(l)).gram() - l.gram()).cwiseAbs().maxCoeff(), 1e-10 * scale, 0.0, w);
    const EuclideanLattice other = random_lattice(rng, pick(rng, 1, 3));
    r.near("deg additive on direct sums", degree(direct_sum(l, other)), degree(l) + degree(other), 1e-9, w);
    const double delta = 2.0 * rng.uniform() - 1.0;
    r.near("rescale shifts deg by n delta", degree(rescale(l, delta)), degree(l) + n * delta, 1e-9, w);

    const int k = pick(rng, 0, n);
    const AdmissibleSequence seq = admissible_sequence(l, random_unimodular(rng, n).leftCols(k));
    r.near("deg F = deg E + deg G", degree(seq.total), degree(seq.sub) + degree(seq.quotient), 1e-9, w);
  }
  return r.take();
}

SuiteResult theta_suite(const SuiteOptions& o) {
  Recorder r("theta");
  r.near("omega = pi^{1/4}/Gamma(3/4)", omega(), std::pow(M_PI, 0.25) / std::tgamma(0.75), 1e-12);
  double fe = 0.0;
  for (int k = -10; k <= 10; ++k) {
    const double x = std::ldexp(1.0, k);
    fe = std::max(fe, std::abs(tau(x) - tau(1.0 / x) + 0.5 * std::log(x)));
  }
  r.le("max |tau(x) - tau(1/x) + log(x)/2|", fe, 1e-12);
  for (double t = -3.0; t <= 3.0; t += 0.25) {
    r.le("eta(t) <= 3 exp(-pi e^{2|t|}) at t=" + format_shortest(t), eta(t), 3.0 * std::exp(-M_PI * std::exp(2.0 * std::abs(t))));
    const LineBundleBounds b = line_bundle_bounds(t, 1);
    const double h = h0_line(t);
    const double bound = t >= 0.0 ? *b.nonnegative : *b.negative;
    r.le("h0(O(t)) <= line bound at t=" + format_shortest(t), h, bound, 1e-15);
  }

  for (int trial = 0; trial < o.trials; ++trial) {
    SplitMix64 rng = trial_rng(o, 2, trial);
    const int n = pick(rng, 1, 6);
    const EuclideanLattice l = random_lattice(rng, n);
    const std::string w = gram_witness(l);
    r.le("|h0 - h1 - deg|", std::abs(poisson_rr_check(l).residual), 1e-8, 0.0, w);

    if (n <= 5) {
      for (double t : {0.25, 1.0, 4.0}) {
        const double lhs = theta(l, t).log_value;
        const double rhs = -0.5 * n * std::log(t) + degree(l) + theta(dual(l), 1.0 / t).log_value;
        r.near("functional equation at t=" + format_shortest(t), lhs, rhs, 2e-10, w);
      }
    }
    if (n <= 4) {
      const EuclideanLattice other = random_lattice(rng, pick(rng, 1, 4 - n + 1));
      r.near("h0 additive on direct sums", h0_theta(direct_sum(l, other)), h0_theta(l) + h0_theta(other), 3e-10, w);
      r.near("h1 additive on direct sums", h1_theta(direct_sum(l, other)), h1_theta(l) + h1_theta(other), 3e-10, w);
    }

    const double delta = rng.uniform();
    const double drop = h0_theta(l) - h0_theta(rescale(l, -delta));
    r.le("0 <= h0(L) - h0(L(-delta))", 0.0, drop, 2e-10, w);
    r.le("h0(L) - h0(L(-delta)) <= n delta", drop, n * delta, 2e-10, w);

    double prev_log = std::numeric_limits<double>::infinity();
    double prev_scaled = -std::numeric_limits<double>::infinity();
    for (double beta = 0.25; beta <= 4.0; beta *= 1.25) {
      const ThetaResult th = theta(l, beta);
      const double scaled = th.log_value + 0.5 * n * std::log(beta);
      r.le("log theta(beta) decreasing", th.log_value, prev_log, 2e-10, w);
      r.le("log theta(beta) + (n/2) log beta increasing", prev_scaled, scaled, 2e-10, w);
      prev_log = th.log_value;
      prev_scaled = scaled;
    }

    const double t = 0.5 + rng.uniform();
    const double radius2 = (1.0 + rng.uniform()) * n / (2.0 * M_PI * t);
    long double inner = 0.0L;
    for (const auto& p : enumerate(l, radius2)) {
      if (p.normsq < radius2) inner += std::exp(-M_PI * t * p.normsq);
    }
    const double factor = 1.0 - n / (2.0 * M_PI * t * radius2);
    r.le("mass near origin", factor * theta(l, t).upper(), static_cast<double>(inner), 1e-12, w);
  }
  return r.take();
}

SuiteResult profile_suite(const SuiteOptions& o) {
  Recorder r("profile");
  for (int n = 1; n <= 8; ++n) {
    const TransferenceConstants tc = transference_constants(n);
    r.le("|psi(t_n) - 3^{-1/n}| n=" + std::to_string(n), std::abs(tc.psi_residual), 1e-12);
    r.truth("1 < t_n n=" + std::to_string(n), tc.t_n > 1.0);
  }
  for (int trial = 0; trial < o.trials; ++trial) {
    SplitMix64 rng = trial_rng(o, 3, trial);
    const int n = pick(rng, 1, 3);
    const EuclideanLattice l = random_lattice(rng, n);
    const std::string w = gram_witness(l);
    for (auto& c : comparison_suite(l, {0.5, 1.0, 2.0}, 5, rng()).checks) {
      c.witness = c.witness.empty() ? w : c.witness + "; " + w;
      r.add(std::move(c));
    }
    if (n <= 2) {
      for (auto& c : transference_check(l, 200, rng()).checks) {
        c.witness += "; " + w;
        r.add(std::move(c));
      }
    }
    if (const auto c = first_minimum_theta_check(l)) r.add(*c);

    const EuclideanLattice other = random_lattice(rng, pick(rng, 1, 3));
    const double t1 = 0.5 + rng.uniform();
    const double t2 = 0.5 + rng.uniform();
    r.le("superadditivity of h0_Ar", h0_ar(l, t1) + h0_ar(other, t2), h0_ar(direct_sum(l, other), t1 + t2), 0.0, w);
  }
  return r.take();
}

SuiteResult extensions_suite(const SuiteOptions& o) {
  Recorder r("extensions");
  for (int trial = 0; trial < o.trials; ++trial) {
    SplitMix64 rng = trial_rng(o, 4, trial);
    const int n = pick(rng, 1, 5);
    const int k = pick(rng, 0, std::min(n, 3));
    const AdmissibleSequence seq = random_admissible(rng, n, k);
    const std::string w = gram_witness(seq.total) + " sub " + matrix_to_json(seq.sub_basis).dump();
    r.le("defect >= -2e-9", -2e-9, h_theta_defect(seq).defect, 0.0, w);
    for (auto& c : alternating_chain(seq)) {
      c.witness = w;
      r.add(std::move(c));
    }

    const EuclideanLattice e = random_lattice(rng, 1, {false, true, 0.5});
    const EuclideanLattice g = random_lattice(rng, 1, {false, true, 0.5});
    Eigen::MatrixXd twist(1, 1);
    twist(0, 0) = rng.uniform();
    const double value = gext(e, g, twist).value;
    const double shifted = gext(e, g, twist.array() + static_cast<double>(pick(rng, -3, 3))).value;
    const double origin = gext(e, g, Eigen::MatrixXd::Zero(1, 1)).value;
    const std::string tw = "E " + gram_witness(e) + ", G " + gram_witness(g) + ", T " + format_shortest(twist(0, 0));
    r.near("Gext periodic under integer shifts", shifted, value, 1e-9 * value, tw);
    r.le("Gext(T) <= Gext(0)", value, origin, 1e-10 * origin, tw);
    r.near("Gext agrees with the dual series", value, gext_dual_series(e, g, twist), 1e-9 * value, tw);
  }
  return r.take();
}

SuiteResult thermo_suite(const SuiteOptions& o) {
  Recorder r("thermo");
  for (int dim = 1; dim <= 3; ++dim) {
    const WeightedEnergySpace m = maxwell_space(dim, 1.0);
    for (double beta : {0.5, 1.0, 2.0}) {
      r.near("Maxwell psi dim=" + std::to_string(dim) + " beta=" + format_shortest(beta), psi(m, beta),
             maxwell_psi(dim, 1.0, beta), 1e-3);
    }
  }
  const int trials = std::min(o.trials, 6);
  for (int trial = 0; trial < trials; ++trial) {
    SplitMix64 rng = trial_rng(o, 5, trial);
    const int n = pick(rng, 1, 2);
    const EuclideanLattice l = random_lattice(rng, n);
    const std::string w = gram_witness(l);
    const WeightedEnergySpace space = from_lattice(l, 0.125);
    double prev_u = std::numeric_limits<double>::infinity();
    for (double beta : {0.5, 1.0, 2.0}) {
      const std::string at = " at beta=" + format_shortest(beta);
      r.near("sup_x(S(x) - beta x) = Psi(beta)" + at, legendre_psi(space, beta), psi(space, beta), 1e-6, w);
      const double u = energy_u(space, beta);
      r.near("S'(U(beta)) = beta" + at, entropy_s(space, u).beta, beta, 1e-6 * beta, w);
      r.truth("U strictly decreasing" + at, u < prev_u, w);
      prev_u = u;
    }
    const MaxEntropyReport me = max_entropy_check(space, 1.0, 16, rng());
    r.near("I(p_beta) = S(U(beta))", me.entropy, me.s_of_u, me.budget, w);
    r.truth("perturbations decrease I", me.decreased == me.perturbations, w);
  }
  return r.take();
}

ProjectiveSystem conjugated_system(SplitMix64& rng, const std::vector<double>& lambdas) {
  const ProjectiveSystem diag = diagonal_system(lambdas);
  std::vector<IntMatrix> change;
  std::vector<IntMatrix> inverse;
  std::vector<EuclideanLattice> levels;
  for (int k = 0; k <= diag.depth(); ++k) {
    change.push_back(random_unimodular(rng, k));
    inverse.push_back(unimodular_inverse(change.back()));
    levels.push_back(k == 0 ? EuclideanLattice() : sublattice(diag.levels()[k], change.back()));
  }
  std::vector<IntMatrix> maps;
  for (int k = 0; k < diag.depth(); ++k) maps.push_back(inverse[k] * diag.maps()[k] * change[k + 1]);
  return ProjectiveSystem(std::move(levels), std::move(maps));
}

SuiteResult prolim_suite(const SuiteOptions& o) {
  Recorder r("prolim");
  r.truth("h(R, delta) infinite for R <= 1", std::isinf(hardy_invariant(1.0, 0.3)) && std::isinf(hardy_invariant(0.7, 0.0)));
  r.truth("h(R, delta) finite for R > 1", std::isfinite(hardy_invariant(1.1, 0.3)));
  bool constant_rejected = false;
  try {
    limit_h0(diagonal_system(std::vector<double>(5, 1.0)));
  } catch (const Error& e) {
    constant_rejected = e.kind() == ErrorKind::NotSummableAtDepth;
  }
  r.truth("constant system is not summable", constant_rejected);

  for (int trial = 0; trial < o.trials; ++trial) {
    SplitMix64 rng = trial_rng(o, 6, trial);
    const int depth = pick(rng, 3, 6);
    std::vector<double> lambdas;
    double lambda = 0.3 + rng.uniform();
    for (int i = 0; i < depth; ++i) {
      lambdas.push_back(lambda);
      lambda *= 2.0 + 2.0 * rng.uniform();
    }
    const ProjectiveSystem sys = conjugated_system(rng, lambdas);
    std::ostringstream ws;
    ws << "lambdas";
    for (double v : lambdas) ws << ' ' << format_shortest(v);
    const std::string w = ws.str();

    double closed = 0.0;
    for (double v : lambdas) closed += tau(v);
    const LimitH0 lim = limit_h0(sys);
    r.near("h0(E_D) = sum tau(lambda_i)", lim.estimate, closed, 1e-9, w);
    r.truth("level values nonincreasing", lim.monotone, w);
    r.truth("h0(E_{k+1}) <= h0(E_k) + h0(S_k)", lim.subadditive, w);
    r.le("lower <= estimate", lim.lower, lim.estimate, 4e-10, w);
    r.le("estimate <= upper", lim.estimate, lim.upper, 4e-10, w);

    const LimitMeasureReport m = limit_measure_truncation(sys, depth, 1e-4);
    for (auto c : m.domination) {
      c.witness = w;
      r.add(std::move(c));
    }
    const bool bracketed = std::all_of(m.atoms.begin(), m.atoms.end(), [](const MeasureAtom& a) { return a.in_bracket; });
    r.truth("atom masses within bracket", bracketed, w);
  }
  return r.take();
}

SuiteResult siegel_suite(const SuiteOptions& o) {
  Recorder r("siegel");
  double worst = 0.0;
  const int draws = 50 * std::max(o.trials, 1);
  for (int i = 0; i < draws; ++i) {
    const double delta = 4.0 * SplitMix64::stream(o.seed, static_cast<std::uint64_t>(i)).uniform() - 2.0;
    const EuclideanLattice l = sample_lattice2(o.seed, delta, static_cast<std::uint64_t>(i));
    worst = std::max(worst, std::abs(l.gram().determinant() * std::exp(2.0 * delta) - 1.0));
  }
  r.le("max |det Gram e^{2 delta} - 1|", worst, 1e-12);

  const SiegelEstimate theta_far = siegel_average_h0theta(-8.0, 2000, o.seed);
  const SiegelEstimate count_far = siegel_average_count(-8.0, 1.0, 2000, o.seed);
  r.near("theta average at delta=-8", theta_far.estimate, theta_far.target, 1e-3);
  r.near("count average at delta=-8", count_far.estimate, count_far.target, 1e-2);

  const SiegelEstimate count = siegel_average_count(0.0, 1.0, 4000, o.seed);
  r.truth("comparison event frequency positive", count.comparison_above > 0.0);
  r.truth("opposite comparison event frequency positive", count.comparison_below > 0.0);
  const SiegelEstimate small = siegel_average_count(0.0, 1.0 / (2.0 * M_PI), 4000, o.seed);
  r.truth("Minkowski fraction positive at t = 1/(2 pi)", small.minkowski_fraction > 0.0);
  return r.take();
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* SuiteResult::first_failure() const {
  const auto it = std::find_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; });
  return it == checks.end() ? nullptr : &*it;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lattice", "theta", "profile", "extensions", "thermo", "prolim", "siegel"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
  static const std::map<std::string, SuiteResult (*)(const SuiteOptions&)> suites{
      {"lattice", lattice_suite},   {"theta", theta_suite},   {"profile", profile_suite},
      {"extensions", extensions_suite}, {"thermo", thermo_suite}, {"prolim", prolim_suite},
      {"siegel", siegel_suite},
  };
  const auto it = suites.find(name);
  if (it == suites.end()) throw Error(ErrorKind::DomainError, "unknown suite '" + name + "'");
  if (options.trials < 1) throw Error(ErrorKind::DomainError, "trials must be positive");
  return it->second(options);
}

}  // namespace thetaforge
