#include "rmt/error.hpp"

namespace rmt {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConstantRow: return "ConstantRow";
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateScale: return "DegenerateScale";
    case ErrorKind::RhoZero: return "RhoZero";
    case ErrorKind::NoSpectralGap: return "NoSpectralGap";
    case ErrorKind::InvalidQ: return "InvalidQ";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingSector: return "MissingSector";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::TooFewDates: return "TooFewDates";
    case ErrorKind::DegenerateX: return "DegenerateX";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rmt
