#include "crcmap/error.hpp"

namespace crcmap {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::AurocOutOfRange: return "AurocOutOfRange";
    case Errc::DegeneratePrevalence: return "DegeneratePrevalence";
    case Errc::NoPositives: return "NoPositives";
    case Errc::NoNegatives: return "NoNegatives";
    case Errc::AlphaTooLargeForSample: return "AlphaTooLargeForSample";
    case Errc::Infeasible: return "Infeasible";
    case Errc::TooFewPositives: return "TooFewPositives";
    case Errc::MetricUndefined: return "MetricUndefined";
    case Errc::IoFailure: return "IoFailure";
    case Errc::BadMagic: return "BadMagic";
    case Errc::BadVersion: return "BadVersion";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::ScoreOutOfRange: return "ScoreOutOfRange";
    case Errc::BadLabel: return "BadLabel";
    case Errc::BadHeader: return "BadHeader";
    case Errc::BadField: return "BadField";
  }
  return "UnknownError";
}

}  // namespace crcmap
