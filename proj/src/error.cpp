#include "tailrisk/error.hpp"

namespace tailrisk {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::InvalidDelta: return "InvalidDelta";
    case ErrorKind::InfiniteCVaR: return "InfiniteCVaR";
    case ErrorKind::NoFiniteMoment: return "NoFiniteMoment";
    case ErrorKind::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorKind::DegenerateGaps: return "DegenerateGaps";
    case ErrorKind::Unachievable: return "Unachievable";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::IOFailure: return "IOFailure";
  }
  return "Unknown";
}

}  // namespace tailrisk
