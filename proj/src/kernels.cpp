#include "thetaforge/kernels.hpp"

#include "enum_core.hpp"
#include "thetaforge/error.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>

namespace thetaforge {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Running log-sum-exp with Neumaier compensation in the scaled domain.
class LogAccumulator {
 public:
  void add(double exponent) { add_scaled(exponent, 1.0); }

  void merge(const LogAccumulator& other) {
    if (other.ref_ == kNegInf) return;
    add_scaled(other.ref_, other.sum_ + other.comp_);
  }

  double log_value() const { return ref_ == kNegInf ? kNegInf : ref_ + std::log(sum_ + comp_); }

 private:
  void add_scaled(double exponent, double mantissa) {
    if (exponent > ref_) {
      const double scale = ref_ == kNegInf ? 0.0 : std::exp(ref_ - exponent);
      sum_ *= scale;
      comp_ *= scale;
      ref_ = exponent;
    }
    const double term = mantissa * std::exp(exponent - ref_);
    const double s = sum_ + term;
    comp_ += std::abs(sum_) >= std::abs(term) ? (sum_ - s) + term : (term - s) + sum_;
    sum_ = s;
  }

  double ref_ = kNegInf;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool is_origin(const std::vector<std::int64_t>& x) {
  return std::all_of(x.begin(), x.end(), [](std::int64_t v) { return v == 0; });
}

}  // namespace

double GaussianSum::excess() const { return std::exp(log_excess); }

double GaussianSum::log_total() const {
  if (log_excess == kNegInf) return 0.0;
  if (log_excess > 30.0) return log_excess + std::log1p(std::exp(-log_excess));
  return std::log1p(std::exp(log_excess));
}

GaussianSum gaussian_sum(const EuclideanLattice& l, double t, double r2, std::uint64_t cap, Backend backend) {
  GaussianSum out;
  const int n = l.rank();
  out.points = 1;
  if (n == 0 || !(r2 > 0.0)) return out;
  const Reduction& red = l.reduction();
  const Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
  const double scale = -M_PI * t;
  std::atomic<std::uint64_t> seen{0};
  std::atomic<bool> aborted{false};

  struct Partial {
    LogAccumulator acc;
    std::uint64_t points = 0;
  };
  auto leaf_for = [&](Partial& part) {
    return [&](const std::vector<std::int64_t>& x, double dist, double&) {
      if (seen.fetch_add(1, std::memory_order_relaxed) + 1 > cap || aborted.load(std::memory_order_relaxed)) {
        aborted = true;
        return false;
      }
      ++part.points;
      if (!is_origin(x)) part.acc.add(scale * dist);
      return true;
    };
  };

  Partial total;
  if (backend == Backend::serial || omp_in_parallel()) {
    auto leaf = leaf_for(total);
    detail::Search search(red, center, leaf);
    double r = r2;
    search.run(detail::Prefix{}, r);
  } else {
    Partial unused;
    auto probe_leaf = leaf_for(unused);
    const auto prefixes = detail::Search(red, center, probe_leaf).prefixes(2, r2);
    std::vector<Partial> parts(prefixes.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      if (aborted.load(std::memory_order_relaxed)) continue;
      auto leaf = leaf_for(parts[i]);
      detail::Search search(red, center, leaf);
      double r = r2;
      search.run(prefixes[i], r);
    }
    for (const auto& p : parts) {
      total.acc.merge(p.acc);
      total.points += p.points;
    }
  }
  if (aborted) {
    const auto count = seen.load();
    throw Error(ErrorKind::CountCapExceeded,
                "Gaussian sum exceeded the point cap; at least " + std::to_string(count) + " points",
                static_cast<std::int64_t>(count));
  }
  out.log_excess = total.acc.log_value();
  out.points = total.points;
  return out;
}

std::vector<NormShell> norm_shells(const EuclideanLattice& l, double r2, std::uint64_t cap) {
  const auto points = enumerate(l, r2, cap);
  std::vector<double> norms;
  norms.reserve(points.size());
  for (const auto& p : points) norms.push_back(p.normsq);
  std::sort(norms.begin(), norms.end());
  std::vector<NormShell> shells;
  for (double v : norms) {
    if (!shells.empty() && v - shells.back().normsq <= 1e-12 * std::max(1.0, v)) {
      ++shells.back().multiplicity;
    } else {
      shells.push_back({v, 1});
    }
  }
  return shells;
}

}  // namespace thetaforge
