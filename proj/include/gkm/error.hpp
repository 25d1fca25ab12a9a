#pragma once

#include <stdexcept>
#include <string>

namespace gkm {

enum class ErrorKind {
  InvalidArgument,
  InvalidLabel,
  ParseError,
  EmptyEdgeSet,
  InvalidK,
  NoLabeledData,
  NonFiniteState,
  EdgeEnumerationTooLarge,
  InfeasibleSigma,
  DisconnectedUnlabeled,
  SingularSystem,
  DegenerateSplit,
  NotConverged,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (and the
/// CLI's exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gkm
