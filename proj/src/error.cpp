#include "thetaforge/error.hpp"

#include <utility>

namespace thetaforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::CountCapExceeded: return "CountCapExceeded";
    case ErrorKind::NotSaturated: return "NotSaturated";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::BetaBelowCertified: return "BetaBelowCertified";
    case ErrorKind::XBelowInfimum: return "XBelowInfimum";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridOverflow: return "GridOverflow";
    case ErrorKind::NotSummableAtDepth: return "NotSummableAtDepth";
    case ErrorKind::InconsistentBounds: return "InconsistentBounds";
    case ErrorKind::ViolationDetected: return "ViolationDetected";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::int64_t index,
             std::vector<std::int64_t> divisors)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      index_(index),
      divisors_(std::move(divisors)) {}

}  // namespace thetaforge
