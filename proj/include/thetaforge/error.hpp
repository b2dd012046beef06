#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace thetaforge {

enum class ErrorKind {
  NotSymmetric,
  NotPositiveDefinite,
  CountCapExceeded,
  NotSaturated,
  RankDeficient,
  DomainError,
  BetaBelowCertified,
  XBelowInfimum,
  GridTooCoarse,
  GridOverflow,
  NotSummableAtDepth,
  InconsistentBounds,
  ViolationDetected,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library. `index` carries the failing
// Cholesky pivot or the count lower bound; `divisors` the Smith invariants.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::int64_t index = -1,
        std::vector<std::int64_t> divisors = {});

  ErrorKind kind() const noexcept { return kind_; }
  std::int64_t index() const noexcept { return index_; }
  const std::vector<std::int64_t>& divisors() const noexcept { return divisors_; }

 private:
  ErrorKind kind_;
  std::int64_t index_;
  std::vector<std::int64_t> divisors_;
};

}  // namespace thetaforge
