#include "thetaforge/enumerate.hpp"

#include "enum_core.hpp"
#include "thetaforge/error.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <limits>

namespace thetaforge {
namespace {

constexpr double kRadiusPad = 1e-9;

double padded(double r2) { return r2 * (1.0 + kRadiusPad) + std::numeric_limits<double>::min(); }

IntVector to_original(const Reduction& red, const std::vector<std::int64_t>& x) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  IntVector v = IntVector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (x[j] != 0) v += x[j] * red.transform.col(j);
  }
  return v;
}

Eigen::VectorXd reduced_center(const Reduction& red, const Eigen::VectorXd& center) {
  return red.inverse.cast<double>() * center;
}

bool lex_less(const LatticeVector& a, const LatticeVector& b) {
  return std::lexicographical_compare(a.coords.data(), a.coords.data() + a.coords.size(), b.coords.data(),
                                      b.coords.data() + b.coords.size());
}

[[noreturn]] void cap_exceeded(std::uint64_t seen) {
  throw Error(ErrorKind::CountCapExceeded,
              "enumeration exceeded the point cap; at least " + std::to_string(seen) + " points",
              static_cast<std::int64_t>(seen));
}

// Collects points v with norm (as defined by `measure`) ≤ r2 into per-prefix buckets.
template <class Measure>
std::vector<LatticeVector> collect_points(const EuclideanLattice& l, const Eigen::VectorXd& center, double r2,
                                          std::uint64_t cap, Backend backend, Measure&& measure) {
  const Reduction& red = l.reduction();
  const int n = l.rank();
  if (n == 0) {
    std::vector<LatticeVector> out;
    if (r2 >= 0.0) out.push_back({IntVector(0), 0.0});
    return out;
  }
  const Eigen::VectorXd rc = reduced_center(red, center);
  std::atomic<std::uint64_t> seen{0};
  std::atomic<bool> aborted{false};

  auto leaf_for = [&](std::vector<LatticeVector>& bucket) {
    return [&](const std::vector<std::int64_t>& x, double, double&) {
      if (seen.fetch_add(1, std::memory_order_relaxed) + 1 > cap || aborted.load(std::memory_order_relaxed)) {
        aborted = true;
        return false;
      }
      LatticeVector v{to_original(red, x), 0.0};
      v.normsq = measure(v.coords);
      if (v.normsq <= r2) bucket.push_back(std::move(v));
      return true;
    };
  };

  std::vector<LatticeVector> out;
  const double radius = padded(r2);
  if (backend == Backend::serial || omp_in_parallel()) {
    auto leaf = leaf_for(out);
    detail::Search search(red, rc, leaf);
    double r = radius;
    search.run(detail::Prefix{}, r);
  } else {
    std::vector<LatticeVector> unused;
    auto probe_leaf = leaf_for(unused);
    const auto prefixes = detail::Search(red, rc, probe_leaf).prefixes(2, radius);
    std::vector<std::vector<LatticeVector>> buckets(prefixes.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      if (aborted.load(std::memory_order_relaxed)) continue;
      auto leaf = leaf_for(buckets[i]);
      detail::Search search(red, rc, leaf);
      double r = radius;
      search.run(prefixes[i], r);
    }
    for (auto& b : buckets) {
      out.insert(out.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
    }
  }
  if (aborted) cap_exceeded(seen.load());
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

}  // namespace

std::vector<LatticeVector> enumerate(const EuclideanLattice& l, double r2, std::uint64_t cap, Backend backend) {
  if (!(r2 > 0.0)) throw Error(ErrorKind::DomainError, "enumerate requires r2 > 0");
  const Eigen::VectorXd center = Eigen::VectorXd::Zero(l.rank());
  return collect_points(l, center, r2, cap, backend, [&](const IntVector& v) { return l.norm2(v); });
}

std::vector<LatticeVector> enumerate_around(const EuclideanLattice& l, const Eigen::VectorXd& center, double r2,
                                            std::uint64_t cap) {
  if (!(r2 >= 0.0)) throw Error(ErrorKind::DomainError, "enumerate_around requires r2 >= 0");
  if (center.size() != l.rank()) throw Error(ErrorKind::DomainError, "center has wrong dimension");
  return collect_points(l, center, r2, cap, Backend::parallel, [&](const IntVector& v) {
    const Eigen::VectorXd d = v.cast<double>() - center;
    return l.norm2(d);
  });
}

ClosestVector closest_vector(const EuclideanLattice& l, const Eigen::VectorXd& center) {
  if (center.size() != l.rank()) throw Error(ErrorKind::DomainError, "center has wrong dimension");
  ClosestVector best{IntVector::Zero(l.rank()), 0.0};
  if (l.rank() == 0) return best;
  const Reduction& red = l.reduction();
  const Eigen::VectorXd rc = reduced_center(red, center);
  best.dist2 = std::numeric_limits<double>::infinity();
  auto leaf = [&](const std::vector<std::int64_t>& x, double dist, double& radius2) {
    if (dist < best.dist2) {
      best.dist2 = dist;
      best.coords = to_original(red, x);
      radius2 = dist * (1.0 + kRadiusPad);
    }
    return true;
  };
  detail::Search search(red, rc, leaf);
  double r = std::numeric_limits<double>::infinity();
  search.run(detail::Prefix{}, r);
  best.dist2 = l.norm2(Eigen::VectorXd(best.coords.cast<double>() - center));
  return best;
}

std::uint64_t count_points(const EuclideanLattice& l, double r2, bool strict, std::uint64_t cap, Backend backend) {
  if (!(r2 > 0.0)) return (strict || r2 < 0.0) ? 0 : 1;
  const int n = l.rank();
  if (n == 0) return 1;
  const Reduction& red = l.reduction();
  const Eigen::VectorXd rc = Eigen::VectorXd::Zero(n);
  std::atomic<std::uint64_t> seen{0};
  std::atomic<bool> aborted{false};
  auto leaf_for = [&](std::uint64_t& counter) {
    return [&](const std::vector<std::int64_t>& x, double, double&) {
      if (seen.fetch_add(1, std::memory_order_relaxed) + 1 > cap || aborted.load(std::memory_order_relaxed)) {
        aborted = true;
        return false;
      }
      const double nv = l.norm2(to_original(red, x));
      if (strict ? nv < r2 : nv <= r2) ++counter;
      return true;
    };
  };
  const double radius = padded(r2);
  std::uint64_t total = 0;
  if (backend == Backend::serial || omp_in_parallel()) {
    auto leaf = leaf_for(total);
    detail::Search search(red, rc, leaf);
    double r = radius;
    search.run(detail::Prefix{}, r);
  } else {
    std::uint64_t unused = 0;
    auto probe_leaf = leaf_for(unused);
    const auto prefixes = detail::Search(red, rc, probe_leaf).prefixes(2, radius);
    std::vector<std::uint64_t> counts(prefixes.size(), 0);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      if (aborted.load(std::memory_order_relaxed)) continue;
      auto leaf = leaf_for(counts[i]);
      detail::Search search(red, rc, leaf);
      double r = radius;
      search.run(prefixes[i], r);
    }
    for (auto c : counts) total += c;
  }
  if (aborted) cap_exceeded(seen.load());
  return total;
}

}  // namespace thetaforge
