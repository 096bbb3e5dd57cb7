#include "nnst/error.hpp"

namespace nnst {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::ZeroBlock: return "ZeroBlock";
    case ErrorKind::DegenerateViscosity: return "DegenerateViscosity";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::UnresolvableMollifier: return "UnresolvableMollifier";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::BadValue: return "BadValue";
    case ErrorKind::MissingRequired: return "MissingRequired";
    case ErrorKind::InadmissibleExponents: return "InadmissibleExponents";
    case ErrorKind::Io: return "Io";
    case ErrorKind::CorruptSnapshot: return "CorruptSnapshot";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace nnst
