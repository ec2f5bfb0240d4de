#ifndef FELLER_ERRORS_HPP
#define FELLER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace feller {

enum class Errc {
  NonPositiveDiffusion,
  InvalidSpec,
  DivergentQuadrature,
  IndeterminateDivergence,
  NoConvergence,
  DegenerateBracket,
  ZeroWronskian,
  OutOfDomain,
  UnboundedIntegrand,
  NotInDomain,
  InvalidBoundaryData,
  MissingEndpointData,
  InaccessibleBoundary,
  SingularSystem,
  CaseMismatch,
  InvalidEps,
  GridTooCoarse,
  ConfigError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPositiveDiffusion: return "NonPositiveDiffusion";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::DivergentQuadrature: return "DivergentQuadrature";
    case Errc::IndeterminateDivergence: return "IndeterminateDivergence";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateBracket: return "DegenerateBracket";
    case Errc::ZeroWronskian: return "ZeroWronskian";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::UnboundedIntegrand: return "UnboundedIntegrand";
    case Errc::NotInDomain: return "NotInDomain";
    case Errc::InvalidBoundaryData: return "InvalidBoundaryData";
    case Errc::MissingEndpointData: return "MissingEndpointData";
    case Errc::InaccessibleBoundary: return "InaccessibleBoundary";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::CaseMismatch: return "CaseMismatch";
    case Errc::InvalidEps: return "InvalidEps";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// All library failures throw this; `code` keys the failure class, `what()`
/// carries the context string.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace feller

#endif
