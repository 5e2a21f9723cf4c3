#pragma once

#include <stdexcept>
#include <string>

namespace cryfl {

enum class Errc {
  EmptySignal,
  SignalTooShort,
  InvalidFilterSpec,
  InvalidGain,
  DegenerateRir,
  RateMismatch,
  InvalidConfig,
  DegenerateLabels,
  InvalidK,
  DimensionMismatch,
  InvalidLabel,
  EmptyDataset,
  NonFiniteGradient,
  NotEnoughData,
  CorpusError,
  MissingRir,
  StratifyError,
  UndefinedMetric,
  InvalidWav,
  ParseError,
  IoError,
  NoVoiceDetected,
};

const char* to_string(Errc code) noexcept;

// All library failures are reported through this one exception type; the
// code is stable and maps onto CLI exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cryfl
