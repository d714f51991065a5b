#include "qpt/error.hpp"

namespace qpt {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::UnsupportedDimension: return "UnsupportedDimension";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::FidelityOutOfRange: return "FidelityOutOfRange";
    case Errc::EmptySubset: return "EmptySubset";
    case Errc::WeightsNotNormalized: return "WeightsNotNormalized";
    case Errc::NotPositive: return "NotPositive";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::IncompleteData: return "IncompleteData";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::BasisMismatch: return "BasisMismatch";
    case Errc::MissingEntries: return "MissingEntries";
    case Errc::NotAState: return "NotAState";
    case Errc::PovmInvalid: return "PovmInvalid";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace qpt
