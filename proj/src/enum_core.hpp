#pragma once

// Pruned depth-first search over the Gram-Schmidt triangularization of an
// LLL-conditioned basis. Shared by the serial and OpenMP kernels.

#include "thetaforge/reduction.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace thetaforge::detail {

struct Prefix {
  std::vector<std::int64_t> top;  // x[n-1], x[n-2], ... fixed by the split
  double partial = 0.0;
};

// Leaf: bool(const std::vector<std::int64_t>& x, double dist2, double& radius2);
// returning false aborts the search. The leaf may shrink radius2.
template <class Leaf>
class Search {
 public:
  Search(const Reduction& red, const Eigen::VectorXd& center, Leaf& leaf)
      : red_(red), center_(center), leaf_(leaf), x_(red.bstar2.size(), 0) {}

  // Explores levels below the given prefix; returns false if aborted.
  bool run(const Prefix& prefix, double& radius2) {
    const int n = static_cast<int>(x_.size());
    const int fixed = static_cast<int>(prefix.top.size());
    for (int k = 0; k < fixed; ++k) x_[n - 1 - k] = prefix.top[k];
    if (fixed == n) return leaf_(x_, prefix.partial, radius2);
    return descend(n - 1 - fixed, prefix.partial, radius2);
  }

  // Enumerates the values of the top `depth` coordinates that can be extended.
  std::vector<Prefix> prefixes(int depth, double radius2) {
    std::vector<Prefix> out;
    const int n = static_cast<int>(x_.size());
    depth = std::min(depth, n);
    collect(n - 1, n - depth, 0.0, radius2, out);
    return out;
  }

 private:
  double level_center(int i) const {
    double c = center_(i);
    const int n = static_cast<int>(x_.size());
    for (int j = i + 1; j < n; ++j) c -= red_.mu(j, i) * (static_cast<double>(x_[j]) - center_(j));
    return c;
  }

  template <class Visit>
  bool zigzag(int i, double partial, const double& radius2, Visit&& visit) {
    const double c = level_center(i);
    const double b = red_.bstar2(i);
    const auto x0 = static_cast<std::int64_t>(std::llround(c));
    const std::int64_t dir = (c >= static_cast<double>(x0)) ? 1 : -1;
    bool open_near = true;
    bool open_far = true;
    for (std::int64_t k = 0; open_near || open_far; ++k) {
      for (int side = 0; side < 2; ++side) {
        bool& open = side == 0 ? open_near : open_far;
        if (!open) continue;
        if (k == 0 && side == 1) continue;
        const std::int64_t xv = x0 + (side == 0 ? dir * k : -dir * k);
        const double d = static_cast<double>(xv) - c;
        const double dist = partial + b * d * d;
        if (dist > radius2) {
          open = false;
          continue;
        }
        x_[i] = xv;
        if (!visit(dist)) return false;
      }
    }
    return true;
  }

  bool descend(int i, double partial, double& radius2) {
    if (i == 0) {
      return zigzag(0, partial, radius2, [&](double dist) { return leaf_(x_, dist, radius2); });
    }
    return zigzag(i, partial, radius2, [&](double dist) { return descend(i - 1, dist, radius2); });
  }

  void collect(int i, int stop, double partial, double radius2, std::vector<Prefix>& out) {
    zigzag(i, partial, radius2, [&](double dist) {
      if (i == stop) {
        Prefix p;
        const int n = static_cast<int>(x_.size());
        for (int k = n - 1; k >= stop; --k) p.top.push_back(x_[k]);
        p.partial = dist;
        out.push_back(std::move(p));
      } else {
        collect(i - 1, stop, dist, radius2, out);
      }
      return true;
    });
  }

  const Reduction& red_;
  const Eigen::VectorXd& center_;
  Leaf& leaf_;
  std::vector<std::int64_t> x_;
};

}  // namespace thetaforge::detail
