#pragma once

#include <optional>

namespace thetaforge {

// τ(x) = log Σ_{n∈Z} e^{-πxn²}, x > 0.
double tau(double x);
// η(t) = τ(e^{2|t|}).
double eta(double t);
// log τ(x) for x ≥ 1, accurate even when τ(x) underflows.
double log_tau(double x);

// ω = Σ e^{-πn²} = π^{1/4}/Γ(3/4) and η₀ = log ω.
double omega();
double eta0();

// h⁰_θ of the rank-one lattice O(t), i.e. t⁺ + η(t).
double h0_line(double t);

struct LineBundleBounds {
  double degree;
  int field_degree;
  std::optional<double> nonnegative;     // 1 + t, for t ≥ 0
  std::optional<double> negative;        // exp(-πd(e^{-2t/d} - 1)), for t ≤ 0
  std::optional<double> negative_simple; // exp(2πt), for t ≤ 0
  double refined;                        // c^d·exp(-πd(e^{-2t/d}-1)) if t ≤ 0, else c^d + t
  double constant_c;                     // 3e^{-π}/(1 - 1/2π)
};

LineBundleBounds line_bundle_bounds(double degree, int field_degree);
double line_bound_constant();

struct GroenewegenBound {
  double value;                    // C(n, λ), tail of the quadrature bounded from above
  double quadrature_error;         // Gauss-Kronrod error estimate (relative)
  std::optional<double> closed;    // 3ⁿ(1 - n/(2πλ²))⁻¹e^{-πλ²} when λ² > n/2π
};

// C(n,λ) = 3ⁿ(πλ²)^{-n/2} ∫_{πλ²}^∞ u^{n/2} e^{-u} du.
GroenewegenBound groenewegen_bound(int n, double lambda1);
// Throws DomainError when λ² ≤ n/2π.
double groenewegen_closed(int n, double lambda1);

}  // namespace thetaforge
