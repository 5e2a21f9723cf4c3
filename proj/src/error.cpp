#include "cryfl/error.hpp"

namespace cryfl {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptySignal: return "EmptySignal";
    case Errc::SignalTooShort: return "SignalTooShort";
    case Errc::InvalidFilterSpec: return "InvalidFilterSpec";
    case Errc::InvalidGain: return "InvalidGain";
    case Errc::DegenerateRir: return "DegenerateRir";
    case Errc::RateMismatch: return "RateMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DegenerateLabels: return "DegenerateLabels";
    case Errc::InvalidK: return "InvalidK";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidLabel: return "InvalidLabel";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::NotEnoughData: return "NotEnoughData";
    case Errc::CorpusError: return "CorpusError";
    case Errc::MissingRir: return "MissingRir";
    case Errc::StratifyError: return "StratifyError";
    case Errc::UndefinedMetric: return "UndefinedMetric";
    case Errc::InvalidWav: return "InvalidWav";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    case Errc::NoVoiceDetected: return "NoVoiceDetected";
  }
  return "Unknown";
}

}  // namespace cryfl
