#pragma once

#include "thetaforge/lattice.hpp"
#include "thetaforge/theta.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace thetaforge {

struct Atom {
  double weight;
  double energy;
};

struct Moments {
  double psi;       // log Σ w e^{-βH}
  double energy;    // U(β)
  double variance;  // -U'(β)
};

// Truncated countable measure space with energy H ≥ 0, atoms sorted by
// energy. The tail certificate bounds the omitted relative Ψ-mass for β ≥ beta_min.
class WeightedEnergySpace {
 public:
  WeightedEnergySpace(std::vector<Atom> atoms, double beta_min, double tail_certificate = 0.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double beta_min() const { return beta_min_; }
  double min_energy() const { return atoms_.front().energy; }
  // Relative omitted mass at β (≥ beta_min).
  double tail_at(double beta) const;
  double tail_certificate() const { return tail_; }

  Moments moments(double beta) const;

  // Lattice spaces shrink their tail bound as β grows.
  void set_lattice_tail(int rank, double radius2);

 private:
  std::vector<Atom> atoms_;
  double beta_min_;
  double tail_;
  int lattice_rank_ = 0;
  double lattice_radius2_ = 0.0;
};

// Atoms v with weight 1 and energy π‖v‖², truncated so that the omitted
// Ψ-mass at beta_min is at most `tol` relative.
WeightedEnergySpace from_lattice(const EuclideanLattice& l, double beta_min, double tol = kDefaultThetaTolerance);

struct MaxwellGrid {
  double step = 1e-3;
  double beta_min = 0.05;
};
// Radial midpoint discretization of (R^dim, Lebesgue, ‖x‖²/2m).
WeightedEnergySpace maxwell_space(int dim, double mass, const MaxwellGrid& grid = {});
double maxwell_psi(int dim, double mass, double beta);
double maxwell_energy(int dim, double beta);
double maxwell_entropy(int dim, double mass, double x);

// A × B with weights multiplied and energies added.
WeightedEnergySpace product_space(const WeightedEnergySpace& a, const WeightedEnergySpace& b);

double psi(const WeightedEnergySpace& space, double beta);
double energy_u(const WeightedEnergySpace& space, double beta);

struct EntropyResult {
  double value;  // S(x) = inf_β (βx + Ψ(β))
  double beta;   // minimizer, equal to S'(x)
  double tail;   // tail certificate at the minimizer
};

// Throws XBelowInfimum if x ≤ inf H, BetaBelowCertified if the minimizer
// lies below the space's beta_min.
EntropyResult entropy_s(const WeightedEnergySpace& space, double x);

// sup_x (S(x) - βx), evaluated numerically from entropy_s.
double legendre_psi(const WeightedEnergySpace& space, double beta);

// h̃⁰_Ar(L, t) = S(πt) on the lattice space; beta_min adapts to t.
EntropyResult htilde0_ar(const EuclideanLattice& l, double t, double tol = kDefaultThetaTolerance);

struct FeketeEntry {
  int n;
  double value;        // (1/n) log #{Σ‖v_i‖² ≤ nt}; midpoint when bracketed
  double lower;
  double upper;
  double running_sup;  // max_{m ≤ n} lower_m
};

struct FeketeResult {
  std::vector<FeketeEntry> entries;
  bool exact;          // energies were integral after scaling
  double grid_step;    // energy grid step in ‖·‖² units
};

FeketeResult fekete_oracle(const EuclideanLattice& l, double t, int n_max, std::size_t max_bins = 20'000'000);

struct MaxEntropyReport {
  double beta;
  double entropy;       // I(p_β) = -Σ p log(p/w)
  double s_of_u;        // S(U(β)) from the Legendre minimization
  double budget;
  int perturbations;
  int decreased;
  double worst_change;  // max of I(p + εd) - I(p)
  bool passed() const;
};

MaxEntropyReport max_entropy_check(const WeightedEnergySpace& space, double beta, int perturbations,
                                   std::uint64_t seed, double epsilon = 1e-3);

struct SecondLawReport {
  double combined;       // S_{A×B}(x)
  double split_max;      // max_{t1 on grid} S_A(t1) + S_B(x - t1)
  double argmax;
  double grid_step;
  double beta;           // S'_{A×B}(x)
  double energy_a;       // U_A(β), predicted location of the argmax
};

SecondLawReport second_law_check(const WeightedEnergySpace& a, const WeightedEnergySpace& b,
                                 const WeightedEnergySpace& combined, double x, double grid_step);

}  // namespace thetaforge
