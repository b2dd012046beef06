#include "thetaforge/siegel.hpp"

#include "parallel.hpp"
#include "thetaforge/enumerate.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/theta.hpp"

#include <algorithm>
#include <cmath>

namespace thetaforge {
namespace {

constexpr int kMaxRedraws = 64;

// Draws until `accept` succeeds; cusp samples whose counts overflow are replaced.
template <class Accept>
std::uint64_t draw_with_retry(std::uint64_t seed, std::uint64_t index, double delta, Accept&& accept) {
  SplitMix64 rng = SplitMix64::stream(seed, index);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const EuclideanLattice l = modular_lattice(sample_modular_point(rng), delta);
    try {
      accept(l);
      return static_cast<std::uint64_t>(attempt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CountCapExceeded) throw;
    }
  }
  throw Error(ErrorKind::CountCapExceeded, "sample " + std::to_string(index) + " kept exceeding the count cap");
}

void check_request(std::uint64_t samples, int blocks) {
  if (samples < 1000) throw Error(ErrorKind::DomainError, "Siegel averages need at least 1000 samples");
  if (blocks < 1 || static_cast<std::uint64_t>(blocks) > samples) {
    throw Error(ErrorKind::DomainError, "block count must lie in [1, samples]");
  }
}

SiegelEstimate summarize(const std::vector<double>& values, int blocks, double target) {
  SiegelEstimate s{};
  s.target = target;
  s.samples = values.size();
  s.estimate = median_of_means(values, blocks, &s.block_means);
  long double total = 0.0L;
  for (double v : values) total += v;
  s.mean = static_cast<double>(total / values.size());
  const auto [lo, hi] = std::minmax_element(s.block_means.begin(), s.block_means.end());
  s.spread = *hi - *lo;
  return s;
}

}  // namespace

ModularPoint sample_modular_point(SplitMix64& rng) {
  const double angle = (rng.uniform() - 0.5) * (M_PI / 3.0);
  const double x = std::sin(angle);
  const double u = rng.uniform();
  return {x, std::sqrt(1.0 - x * x) / (1.0 - u)};
}

EuclideanLattice modular_lattice(const ModularPoint& p, double delta) {
  if (!(p.y > 0.0)) throw Error(ErrorKind::DomainError, "modular point needs y > 0");
  const double scale = std::exp(-delta) / p.y;
  Eigen::Matrix2d g;
  g << 1.0, p.x, p.x, p.x * p.x + p.y * p.y;
  return EuclideanLattice::from_gram(scale * g);
}

EuclideanLattice sample_lattice2(std::uint64_t seed, double delta, std::uint64_t index) {
  SplitMix64 rng = SplitMix64::stream(seed, index);
  return modular_lattice(sample_modular_point(rng), delta);
}

double siegel_target_h0theta(double delta) { return 1.0 + std::exp(delta); }

double siegel_target_count(double delta, double t) { return 1.0 + M_PI * t * std::exp(delta); }

double SiegelEstimate::relative_error() const { return std::abs(estimate - target) / target; }

double median_of_means(const std::vector<double>& values, int blocks, std::vector<double>* block_means) {
  if (blocks < 1 || values.size() < static_cast<std::size_t>(blocks)) {
    throw Error(ErrorKind::DomainError, "median of means needs at least one value per block");
  }
  std::vector<double> means;
  const std::size_t n = values.size();
  for (int b = 0; b < blocks; ++b) {
    const std::size_t lo = n * b / blocks;
    const std::size_t hi = n * (b + 1) / blocks;
    long double sum = 0.0L;
    for (std::size_t i = lo; i < hi; ++i) sum += values[i];
    means.push_back(static_cast<double>(sum / (hi - lo)));
  }
  if (block_means) *block_means = means;
  std::sort(means.begin(), means.end());
  const std::size_t mid = means.size() / 2;
  return means.size() % 2 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
}

SiegelEstimate siegel_average_h0theta(double delta, std::uint64_t samples, std::uint64_t seed, int blocks) {
  check_request(samples, blocks);
  std::vector<double> values(samples);
  std::vector<std::uint64_t> redraws(samples);
  detail::parallel_for(samples, [&](std::size_t i) {
    redraws[i] = draw_with_retry(seed, i, delta, [&](const EuclideanLattice& l) {
      values[i] = theta(l, 1.0, kSiegelThetaTolerance, Backend::serial).value;
    });
  }, 256);
  SiegelEstimate s = summarize(values, blocks, siegel_target_h0theta(delta));
  for (auto r : redraws) s.redraws += r;
  return s;
}

SiegelEstimate siegel_average_count(double delta, double t, std::uint64_t samples, std::uint64_t seed, int blocks) {
  check_request(samples, blocks);
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "Siegel count average needs t > 0");
  std::vector<double> counts(samples);
  std::vector<double> gaps(samples);
  std::vector<std::uint64_t> redraws(samples);
  detail::parallel_for(samples, [&](std::size_t i) {
    redraws[i] = draw_with_retry(seed, i, delta, [&](const EuclideanLattice& l) {
      const double c = static_cast<double>(count_points(l, t, false, kDefaultCountCap, Backend::serial));
      counts[i] = c;
      gaps[i] = std::log(c) - theta(l, 1.0, kSiegelThetaTolerance, Backend::serial).log_value;
    });
  }, 256);
  SiegelEstimate s = summarize(counts, blocks, siegel_target_count(delta, t));
  for (auto r : redraws) s.redraws += r;
  const double threshold = std::log(siegel_target_count(delta, t) / siegel_target_h0theta(delta));
  std::uint64_t lonely = 0;
  std::uint64_t above = 0;
  std::uint64_t below = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    if (counts[i] == 1.0) ++lonely;
    if (gaps[i] >= threshold) ++above;
    if (gaps[i] < threshold) ++below;
  }
  const double n = static_cast<double>(samples);
  s.minkowski_fraction = lonely / n;
  s.comparison_above = above / n;
  s.comparison_below = below / n;
  return s;
}

}  // namespace thetaforge
