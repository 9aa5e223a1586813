#pragma once

#include <stdexcept>
#include <string>

namespace treentail {

enum class Errc {
  EmptyInput,
  UnbalancedParens,
  NonBinaryNode,
  ShapeMismatch,
  EmptyVector,
  NonScalarLoss,
  NonFiniteValue,
  InconsistentDimension,
  EmptyFile,
  UnreadableFloat,
  CalledTwice,
  InvalidLabel,
  NotDistribution,
  NotOnePerRow,
  EmptyDataset,
  MalformedRecord,
  BadCheckpoint,
  Io,
};

const char* errc_name(Errc code);

// Every failure raised by the library carries one of the codes above so the
// command line can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace treentail
