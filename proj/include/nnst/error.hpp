#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nnst {

enum class ErrorKind {
  InvalidArgument,
  NonHermitian,
  ZeroBlock,
  DegenerateViscosity,
  MaxIterations,
  CflViolation,
  UnresolvableMollifier,
  UnknownKey,
  BadValue,
  MissingRequired,
  InadmissibleExponents,
  Io,
  CorruptSnapshot,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace nnst
