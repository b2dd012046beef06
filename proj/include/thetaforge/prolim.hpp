#pragma once

#include "thetaforge/integer_matrix.hpp"
#include "thetaforge/lattice.hpp"
#include "thetaforge/profile.hpp"
#include "thetaforge/theta.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace thetaforge {

// Finite truncation E_0 ← E_1 ← ... ← E_D of a projective system. maps[i] is
// the integer matrix of the surjection q_i: E_{i+1} → E_i, and E_i carries the
// quotient metric of E_{i+1} through q_i.
class ProjectiveSystem {
 public:
  // Throws NotSaturated when a map is not surjective over Z, DomainError when
  // shapes disagree or a level's Gram is not the quotient metric within 1e-9.
  ProjectiveSystem(std::vector<EuclideanLattice> levels, std::vector<IntMatrix> maps);

  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  const std::vector<EuclideanLattice>& levels() const { return levels_; }
  const std::vector<IntMatrix>& maps() const { return maps_; }
  // S_i = ker q_i with the metric induced from E_{i+1}.
  const std::vector<EuclideanLattice>& kernels() const { return kernels_; }
  // Columns span ker q_i in E_{i+1} coordinates.
  const std::vector<IntMatrix>& kernel_bases() const { return kernel_bases_; }

  // Max entry of |quotient Gram - level Gram| for each map, as measured at construction.
  const std::vector<double>& metric_defects() const { return metric_defects_; }

  // Composite E_to → E_from-level map p_{from,to}, rank(E_from) × rank(E_to).
  IntMatrix composite(int from, int to) const;

  // The first `depth + 1` levels.
  ProjectiveSystem truncated(int depth) const;

 private:
  std::vector<EuclideanLattice> levels_;
  std::vector<IntMatrix> maps_;
  std::vector<EuclideanLattice> kernels_;
  std::vector<IntMatrix> kernel_bases_;
  std::vector<double> metric_defects_;
};

// {"levels": [{"gram": ..., "map": [[...]]}, ...]}; each map goes to the previous level.
ProjectiveSystem projective_system_from_json(const nlohmann::json& doc);
nlohmann::json projective_system_to_json(const ProjectiveSystem& sys);

// E_k = diag(λ_0, ..., λ_{k-1}) for k = 0..lambdas.size(), with coordinate projections.
ProjectiveSystem diagonal_system(const std::vector<double>& lambdas);
// λ_n = R^{2n} e^{-2δ}, n = 0..depth-1.
std::vector<double> hardy_lambdas(double radius, double delta, int depth);
ProjectiveSystem hardy_system(double radius, double delta, int depth);

// Integer solution x of map·x = target of least norm in `lattice` (exact CVP
// over the kernel coset). `map` must be surjective.
IntVector minimal_preimage(const EuclideanLattice& lattice, const IntMatrix& map, const IntVector& target);

// Geometric model of Σ_{j ≥ depth} h⁰_θ(S_j) fitted to log h⁰_θ of the last three kernels.
struct KernelTail {
  double value = 0.0;
  double slope = 0.0;        // fitted d log h⁰_θ(S_j) / dj; -inf when the kernels vanish
  bool summable = true;
  std::string reason;
};
KernelTail kernel_tail(const ProjectiveSystem& sys, double tol = kDefaultThetaTolerance);

struct SummabilityReport {
  double eps;
  std::vector<double> kernel_h0;     // h⁰_θ(S_i ⊗ O(eps))
  std::vector<double> partial_sums;  // Σ_{i<k}, k = 1..depth
  KernelTail tail;
  std::string status;                // "certified-for-this-filtration" or "divergent-at-depth"
};
SummabilityReport summability_report(const ProjectiveSystem& sys, double eps, double tol = kDefaultThetaTolerance);

struct LimitH0 {
  double estimate;                   // h⁰_θ(E_D)
  double upper;                      // min_k h⁰_θ(E_k) + Σ_{j≥k} h⁰_θ(S_j) + tail
  double lower;                      // best h⁰_θ of a lifted sublattice of E_D
  int lower_level;                   // level whose lifted basis attains `lower`
  KernelTail tail;
  std::vector<double> level_h0;
  std::vector<double> kernel_h0;
  std::vector<double> level_values;  // h⁰_θ(E_k) - Σ_{j<k} h⁰_θ(S_j)
  bool monotone;                     // level_values nonincreasing within slack
  bool subadditive;                  // h⁰_θ(E_{k+1}) ≤ h⁰_θ(E_k) + h⁰_θ(S_k) within slack
};
// Throws NotSummableAtDepth when the kernel tail cannot be modeled as decaying,
// InconsistentBounds when lower ≤ estimate ≤ upper fails.
LimitH0 limit_h0(const ProjectiveSystem& sys, double tol = kDefaultThetaTolerance);

// h(R, δ) = Σ_{n≥0} τ(R^{2n} e^{-2δ}); +inf when R ≤ 1.
double hardy_invariant(double radius, double delta, double tol = 1e-16);

// Least-squares fit h(R, δ) ≈ a δ² + b δ + c on an evenly spaced δ grid.
struct HardySlope {
  double quadratic;
  double linear;
  double constant;
  double target;  // 1/(2 log R)
  double relative_error() const;
};
HardySlope hardy_slope(double radius, double delta_lo, double delta_hi, int points);

struct MeasureAtom {
  int level;
  IntVector atom;        // w in E_level coordinates
  double gamma;          // e^{-π‖w‖²}
  double pushforward;    // p_{level,D*}γ_{E_D}({w}), truncated Gaussian fiber sum
  double lift_normsq;    // ‖v_D‖² of the minimal preimage in E_D
  double lower;          // e^{-π‖v_D‖²}
  double log_upper;      // -π‖w‖² + Σ_{k≥level} h⁰_θ(S_k) + tail
  double log_width;      // log_upper - log(lower)
  bool in_bracket;
};
struct LimitMeasureReport {
  int depth;
  KernelTail tail;
  std::vector<double> kernel_h0;
  std::vector<MeasureAtom> atoms;
  // One check per level i < depth: max_w log(q_{i*}γ_{i+1}({w}) / γ_i({w})) ≤ h⁰_θ(S_i).
  std::vector<Check> domination;
  bool passed() const;
};
// Atoms of each level with γ-mass at least `atom_floor`. Throws NotSummableAtDepth.
LimitMeasureReport limit_measure_truncation(const ProjectiveSystem& sys, int depth, double atom_floor = 1e-6,
                                            double tol = kDefaultThetaTolerance);

}  // namespace thetaforge
