#pragma once

#include <stdexcept>
#include <string>

namespace crcmap {

/// Error identities shared by every module. The CLI maps each code onto
/// one of three exit classes: I/O & format, input validation, statistical
/// infeasibility.
enum class Errc {
  // validation
  InvalidArgument,
  EmptyInput,
  AlphaOutOfRange,
  AurocOutOfRange,
  DegeneratePrevalence,
  // statistical infeasibility
  NoPositives,
  NoNegatives,
  AlphaTooLargeForSample,
  Infeasible,
  TooFewPositives,
  MetricUndefined,
  // I/O and format
  IoFailure,
  BadMagic,
  BadVersion,
  TruncatedPayload,
  ScoreOutOfRange,
  BadLabel,
  BadHeader,
  BadField,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace crcmap
