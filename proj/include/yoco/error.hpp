#pragma once

#include <stdexcept>
#include <string>

namespace yoco {

enum class Errc {
  InvalidCut,
  InvalidConcat,
  InvalidParameter,
  UnsupportedChannels,
  InvalidMix,
  PolicyParse,
  Format,
  InvalidInput,
  InvalidLayout,
  CannotCut,
  InvalidComparison,
  UnsupportedFormat,
  Config,
  Io,
};

/// All library failures are reported through this type; code() identifies
/// the failure class so callers can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace yoco
