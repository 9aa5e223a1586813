#include "treentail/error.hpp"

namespace treentail {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::UnbalancedParens: return "UnbalancedParens";
    case Errc::NonBinaryNode: return "NonBinaryNode";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EmptyVector: return "EmptyVector";
    case Errc::NonScalarLoss: return "NonScalarLoss";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::InconsistentDimension: return "InconsistentDimension";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::UnreadableFloat: return "UnreadableFloat";
    case Errc::CalledTwice: return "CalledTwice";
    case Errc::InvalidLabel: return "InvalidLabel";
    case Errc::NotDistribution: return "NotDistribution";
    case Errc::NotOnePerRow: return "NotOnePerRow";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::BadCheckpoint: return "BadCheckpoint";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace treentail
