#include "thetaforge/thermo.hpp"

#include "parallel.hpp"
#include "thetaforge/enumerate.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/kernels.hpp"
#include "thetaforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace thetaforge {
namespace {

constexpr double kGolden = 0.6180339887498949;

double golden_minimize(const auto& f, double lo, double hi, double width) {
  double a = lo;
  double b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > width) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

WeightedEnergySpace::WeightedEnergySpace(std::vector<Atom> atoms, double beta_min, double tail_certificate)
    : atoms_(std::move(atoms)), beta_min_(beta_min), tail_(tail_certificate) {
  if (atoms_.empty()) throw Error(ErrorKind::DomainError, "energy space needs at least one atom");
  if (!(beta_min_ > 0.0)) throw Error(ErrorKind::DomainError, "beta_min must be positive");
  for (const auto& a : atoms_) {
    if (!(a.weight > 0.0) || !(a.energy >= 0.0)) {
      throw Error(ErrorKind::DomainError, "atoms need positive weight and non-negative energy");
    }
  }
  std::stable_sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.energy < y.energy; });
}

void WeightedEnergySpace::set_lattice_tail(int rank, double radius2) {
  lattice_rank_ = rank;
  lattice_radius2_ = radius2;
}

double WeightedEnergySpace::tail_at(double beta) const {
  if (lattice_rank_ == 0) return tail_;
  const double factor = std::sqrt(lattice_radius2_ * 2.0 * M_PI * beta / lattice_rank_);
  if (factor <= 1.0) return std::numeric_limits<double>::infinity();
  const double q = std::exp(log_tail_ratio(lattice_rank_, factor));
  return q / (1.0 - q);
}

Moments WeightedEnergySpace::moments(double beta) const {
  if (beta < beta_min_ * (1.0 - 1e-12)) {
    throw Error(ErrorKind::BetaBelowCertified,
                "beta " + std::to_string(beta) + " below certified beta_min " + std::to_string(beta_min_));
  }
  const double h0 = atoms_.front().energy;
  long double z = 0.0L;
  long double zh = 0.0L;
  for (const auto& a : atoms_) {
    const long double w = a.weight * std::exp(-beta * (a.energy - h0));
    z += w;
    zh += w * (a.energy - h0);
  }
  const long double mean_shift = zh / z;
  long double var = 0.0L;
  for (const auto& a : atoms_) {
    const long double w = a.weight * std::exp(-beta * (a.energy - h0));
    const long double d = (a.energy - h0) - mean_shift;
    var += w * d * d;
  }
  return {static_cast<double>(-beta * h0 + std::log(z)), static_cast<double>(h0 + mean_shift),
          static_cast<double>(var / z)};
}

WeightedEnergySpace from_lattice(const EuclideanLattice& l, double beta_min, double tol) {
  if (!(beta_min > 0.0)) throw Error(ErrorKind::DomainError, "beta_min must be positive");
  if (l.rank() == 0) return WeightedEnergySpace({{1.0, 0.0}}, beta_min, 0.0);
  const TailRadius tr = tail_radius(l.rank(), beta_min, tol);
  const auto points = enumerate(l, tr.radius2);
  std::vector<Atom> atoms;
  atoms.reserve(points.size());
  for (const auto& p : points) atoms.push_back({1.0, M_PI * p.normsq});
  WeightedEnergySpace space(std::move(atoms), beta_min, tr.q / (1.0 - tr.q));
  space.set_lattice_tail(l.rank(), tr.radius2);
  return space;
}

double maxwell_psi(int dim, double mass, double beta) { return 0.5 * dim * std::log(2.0 * M_PI * mass / beta); }

double maxwell_energy(int dim, double beta) { return dim / (2.0 * beta); }

double maxwell_entropy(int dim, double mass, double x) {
  return 0.5 * dim * (1.0 + std::log(4.0 * M_PI * mass * x / dim));
}

WeightedEnergySpace maxwell_space(int dim, double mass, const MaxwellGrid& grid) {
  if (dim < 1 || !(mass > 0.0) || !(grid.step > 0.0)) {
    throw Error(ErrorKind::DomainError, "maxwell_space needs dim >= 1, mass > 0, step > 0");
  }
  constexpr double cutoff = 60.0;
  const double r_max = std::sqrt(2.0 * mass * cutoff / grid.beta_min);
  const auto steps = static_cast<std::size_t>(std::ceil(r_max / grid.step));
  const double sphere = 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
  std::vector<Atom> atoms;
  atoms.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double r = (static_cast<double>(k) + 0.5) * grid.step;
    atoms.push_back({sphere * std::pow(r, dim - 1) * grid.step, r * r / (2.0 * mass)});
  }
  return WeightedEnergySpace(std::move(atoms), grid.beta_min, std::exp(-cutoff));
}

WeightedEnergySpace product_space(const WeightedEnergySpace& a, const WeightedEnergySpace& b) {
  std::vector<Atom> atoms;
  atoms.reserve(a.atoms().size() * b.atoms().size());
  for (const auto& x : a.atoms())
    for (const auto& y : b.atoms()) atoms.push_back({x.weight * y.weight, x.energy + y.energy});
  return WeightedEnergySpace(std::move(atoms), std::max(a.beta_min(), b.beta_min()),
                             a.tail_certificate() + b.tail_certificate() +
                                 a.tail_certificate() * b.tail_certificate());
}

double psi(const WeightedEnergySpace& space, double beta) { return space.moments(beta).psi; }

double energy_u(const WeightedEnergySpace& space, double beta) { return space.moments(beta).energy; }

EntropyResult entropy_s(const WeightedEnergySpace& space, double x) {
  const double floor_energy = space.min_energy();
  if (!(x > floor_energy)) {
    throw Error(ErrorKind::XBelowInfimum, "x = " + std::to_string(x) + " is not above inf H = " +
                                              std::to_string(floor_energy));
  }
  const double bmin = space.beta_min();
  if (space.moments(bmin).energy < x) {
    throw Error(ErrorKind::BetaBelowCertified,
                "minimizer for x = " + std::to_string(x) + " lies below beta_min = " + std::to_string(bmin));
  }
  double lo = bmin;
  double hi = std::max(2.0 * bmin, 1.0);
  while (space.moments(hi).energy > x) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw Error(ErrorKind::XBelowInfimum, "x too close to inf H for a finite minimizer");
  }
  auto objective = [&](double log_beta) {
    const double beta = std::exp(log_beta);
    return beta * x + space.moments(beta).psi;
  };
  double beta = std::exp(golden_minimize(objective, std::log(lo), std::log(hi), 1e-6));
  for (int it = 0; it < 60; ++it) {
    const Moments m = space.moments(beta);
    if (!(m.variance > 0.0)) break;
    double next = beta + (m.energy - x) / m.variance;
    next = std::clamp(next, std::max(lo, 0.5 * beta), std::min(hi, 2.0 * beta));
    const bool converged = std::abs(next - beta) <= 1e-15 * beta;
    beta = next;
    if (converged) break;
  }
  const Moments m = space.moments(beta);
  return {beta * x + m.psi, beta, space.tail_at(beta)};
}

double legendre_psi(const WeightedEnergySpace& space, double beta) {
  const double b_hi = beta * 8.0;
  const double b_lo = std::max(beta / 8.0, space.beta_min());
  const double x_lo = space.moments(b_hi).energy;
  const double x_hi = space.moments(b_lo).energy;
  auto negated = [&](double x) { return -(entropy_s(space, x).value - beta * x); };
  const double x = golden_minimize(negated, x_lo, x_hi, 1e-9 * (x_hi - x_lo));
  return -negated(x);
}

EntropyResult htilde0_ar(const EuclideanLattice& l, double t, double tol) {
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "htilde0_ar requires t > 0");
  if (l.rank() == 0) return {0.0, 0.0, 0.0};
  const double x = M_PI * t;
  double beta_min = l.rank() / (8.0 * M_PI * t);
  for (int attempt = 0; attempt < 40; ++attempt) {
    const WeightedEnergySpace space = from_lattice(l, beta_min, tol);
    if (space.moments(beta_min).energy > x) return entropy_s(space, x);
    beta_min *= 0.25;
  }
  throw Error(ErrorKind::BetaBelowCertified, "could not certify a beta range for htilde0_ar");
}

FeketeResult fekete_oracle(const EuclideanLattice& l, double t, int n_max, std::size_t max_bins) {
  if (n_max < 1 || n_max > 8) throw Error(ErrorKind::DomainError, "fekete_oracle supports 1 <= n_max <= 8");
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "fekete_oracle requires t > 0");
  const double reach = n_max * t;
  const auto shells = norm_shells(l, reach);

  FeketeResult out;
  int denominator = 0;
  for (int den = 1; den <= 1000 && denominator == 0; ++den) {
    bool integral = true;
    for (const auto& s : shells) {
      const double scaled = s.normsq * den;
      if (std::abs(scaled - std::nearbyint(scaled)) > 1e-9 * std::max(1.0, scaled)) {
        integral = false;
        break;
      }
    }
    if (integral) denominator = den;
  }
  out.exact = denominator != 0;
  out.grid_step = out.exact ? 1.0 / denominator : 1e-3 * t;

  const double budget_units = reach / out.grid_step;
  if (budget_units + 1.0 > static_cast<double>(max_bins)) {
    throw Error(ErrorKind::GridOverflow, "energy grid would need " + std::to_string(budget_units) + " bins");
  }
  const auto bins = static_cast<std::size_t>(std::floor(budget_units + 1e-9)) + 1;

  // Counting profile on the grid: rounded up (lower count) and down (upper count).
  auto histogram = [&](bool round_up) {
    std::vector<long double> h(bins, 0.0L);
    for (const auto& s : shells) {
      const double u = s.normsq / out.grid_step;
      const double k = out.exact ? std::nearbyint(u) : (round_up ? std::ceil(u - 1e-12) : std::floor(u + 1e-12));
      if (k < static_cast<double>(bins)) h[static_cast<std::size_t>(k)] += static_cast<long double>(s.multiplicity);
    }
    return h;
  };
  const auto h_lower = histogram(true);
  const auto h_upper = out.exact ? h_lower : histogram(false);

  auto run = [&](const std::vector<long double>& h) {
    std::vector<double> values;
    std::vector<long double> dp = h;
    for (int n = 1; n <= n_max; ++n) {
      if (n > 1) {
        std::vector<long double> next(bins, 0.0L);
        for (std::size_t i = 0; i < bins; ++i) {
          if (dp[i] == 0.0L) continue;
          for (std::size_t j = 0; i + j < bins; ++j) {
            if (h[j] != 0.0L) next[i + j] += dp[i] * h[j];
          }
        }
        dp.swap(next);
      }
      const auto limit = static_cast<std::size_t>(std::floor(n * t / out.grid_step + 1e-9));
      long double count = 0.0L;
      for (std::size_t i = 0; i <= std::min(limit, bins - 1); ++i) count += dp[i];
      values.push_back(static_cast<double>(std::log(count)) / n);
    }
    return values;
  };
  const auto lower = run(h_lower);
  const auto upper = out.exact ? lower : run(h_upper);
  double running = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double lo = lower[n - 1];
    const double hi = upper[n - 1];
    running = std::max(running, lo);
    out.entries.push_back({n, 0.5 * (lo + hi), lo, hi, running});
  }
  return out;
}

bool MaxEntropyReport::passed() const {
  return std::abs(entropy - s_of_u) <= budget && decreased == perturbations;
}

MaxEntropyReport max_entropy_check(const WeightedEnergySpace& space, double beta, int perturbations,
                                   std::uint64_t seed, double epsilon) {
  const auto& atoms = space.atoms();
  const std::size_t m = atoms.size();
  const Moments mom = space.moments(beta);
  std::vector<long double> p(m);
  for (std::size_t i = 0; i < m; ++i) {
    p[i] = atoms[i].weight * std::exp(static_cast<long double>(-beta * atoms[i].energy - mom.psi));
  }
  auto information = [&](const std::vector<long double>& q) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      if (q[i] > 0.0L) s -= q[i] * std::log(q[i] / atoms[i].weight);
    }
    return s;
  };
  MaxEntropyReport r{};
  r.beta = beta;
  const long double base = information(p);
  r.entropy = static_cast<double>(base);
  const EntropyResult s = entropy_s(space, mom.energy);
  r.s_of_u = s.value;
  r.budget = 1e-9 * (1.0 + std::abs(r.entropy)) + space.tail_at(beta);
  r.perturbations = perturbations;
  r.worst_change = -std::numeric_limits<double>::infinity();

  for (int k = 0; k < perturbations; ++k) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<long double> g(m);
    for (auto& v : g) v = normal(rng);
    // Remove the span of {1, H} in L²(p) so that Σd = 0 and Σd·H = 0 for d = p∘g.
    long double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const long double e = atoms[i].energy;
      s0 += p[i];
      s1 += p[i] * e;
      s2 += p[i] * e * e;
      t0 += p[i] * g[i];
      t1 += p[i] * g[i] * e;
    }
    const long double det = s0 * s2 - s1 * s1;
    const long double a = (t0 * s2 - t1 * s1) / det;
    const long double b = (s0 * t1 - s1 * t0) / det;
    long double peak = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      g[i] -= a + b * atoms[i].energy;
      peak = std::max(peak, std::abs(g[i]));
    }
    std::vector<long double> q(m);
    for (std::size_t i = 0; i < m; ++i) q[i] = p[i] * (1.0L + epsilon * g[i] / peak);
    const double change = static_cast<double>(information(q) - base);
    r.worst_change = std::max(r.worst_change, change);
    if (change < 0.0) ++r.decreased;
  }
  return r;
}

SecondLawReport second_law_check(const WeightedEnergySpace& a, const WeightedEnergySpace& b,
                                 const WeightedEnergySpace& combined, double x, double grid_step) {
  const EntropyResult whole = entropy_s(combined, x);
  SecondLawReport r{whole.value, -std::numeric_limits<double>::infinity(), 0.0, grid_step, whole.beta,
                    a.moments(std::max(whole.beta, a.beta_min())).energy};
  const double lo = a.min_energy();
  const double hi = x - b.min_energy();
  const auto steps = static_cast<long>(std::floor((hi - lo) / grid_step));
  std::vector<double> values(static_cast<std::size_t>(std::max(steps - 1, 0L)));
  detail::parallel_for(values.size(), [&](std::size_t i) {
    const double t1 = lo + static_cast<double>(i + 1) * grid_step;
    values[i] = entropy_s(a, t1).value + entropy_s(b, x - t1).value;
  }, 64);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > r.split_max) {
      r.split_max = values[i];
      r.argmax = lo + static_cast<double>(i + 1) * grid_step;
    }
  }
  return r;
}

}  // namespace thetaforge
