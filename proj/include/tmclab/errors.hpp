#pragma once

#include <stdexcept>
#include <string>

namespace tmc {

enum class Errc {
  ZeroRowOrColumn,
  NotIrreducible,
  BracketUndefined,
  OrbitsNotDisjoint,
  OutsideDomain,
  SideMismatch,
  NotComposable,
  BasisCapExceeded,
  UntrustedBlocks,
  QuasiNormViolation,
  InsufficientData,
  NotAProjection,
  NotCornerUnitary,
  ContourHitsSpectrum,
  SingularResolvent,
  InvalidInput,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tmc
