#pragma once

#include "thetaforge/lattice.hpp"
#include "thetaforge/rng.hpp"

#include <cstdint>
#include <vector>

namespace thetaforge {

// τ = x + iy in the standard fundamental domain |x| ≤ 1/2, |τ| ≥ 1.
struct ModularPoint {
  double x;
  double y;
};

// Exact draw from (3/π) dx dy / y² on the fundamental domain.
ModularPoint sample_modular_point(SplitMix64& rng);

// Gram e^{-δ}/y · [[1, x], [x, x² + y²]], covolume e^{-δ}.
EuclideanLattice modular_lattice(const ModularPoint& p, double delta);

// Sample `index` of the stream seeded by `seed`.
EuclideanLattice sample_lattice2(std::uint64_t seed, double delta, std::uint64_t index = 0);

double siegel_target_h0theta(double delta);
double siegel_target_count(double delta, double t);

struct SiegelEstimate {
  double estimate;                  // median of block means
  double target;
  double relative_error() const;
  double mean;                      // plain sample mean, for reference
  double spread;                    // max - min of the block means
  std::vector<double> block_means;
  std::uint64_t samples;
  std::uint64_t redraws;            // samples replaced after CountCapExceeded near the cusp
  // Only filled by siegel_average_count.
  double minkowski_fraction = 0.0;  // fraction of samples with λ₁² > t
  double comparison_above = 0.0;    // frequency of h⁰_Ar(·,t) - h⁰_θ ≥ log((1 + πte^δ)/(1 + e^δ))
  double comparison_below = 0.0;    // frequency of the opposite strict inequality
};

inline constexpr int kDefaultSiegelBlocks = 32;
inline constexpr double kSiegelThetaTolerance = 1e-8;

// Median-of-means estimate of ∫ e^{h⁰_θ} dμ_{2,δ}. Requires samples ≥ 1000.
SiegelEstimate siegel_average_h0theta(double delta, std::uint64_t samples, std::uint64_t seed,
                                      int blocks = kDefaultSiegelBlocks);

// Median-of-means estimate of ∫ e^{h⁰_Ar(·,t)} dμ_{2,δ}, with the Minkowski and
// comparison frequencies of the same sample.
SiegelEstimate siegel_average_count(double delta, double t, std::uint64_t samples, std::uint64_t seed,
                                    int blocks = kDefaultSiegelBlocks);

double median_of_means(const std::vector<double>& values, int blocks, std::vector<double>* block_means = nullptr);

}  // namespace thetaforge
