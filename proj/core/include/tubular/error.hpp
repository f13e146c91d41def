#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tubular {

/// Failure categories raised by the library. Every error carries one.
enum class ErrorCode {
  DomainMargin,
  DomainExit,
  StepUnderflow,
  NoConvergence,
  SingularJacobian,
  SingularMetric,
  NotInDomain,
  RankDeficient,
  NoValidRadius,
  NotVanishing,
  FlowExit,
  DecompositionFailure,
  HypothesisFailure,
  DomainError,
  ConfigError,
  IoError,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainMargin: return "DomainMargin";
    case ErrorCode::DomainExit: return "DomainExit";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::NotInDomain: return "NotInDomain";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NoValidRadius: return "NoValidRadius";
    case ErrorCode::NotVanishing: return "NotVanishing";
    case ErrorCode::FlowExit: return "FlowExit";
    case ErrorCode::DecompositionFailure: return "DecompositionFailure";
    case ErrorCode::HypothesisFailure: return "HypothesisFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// True for the codes that mean "this point is not usable", as opposed to a
/// numerical breakdown. The integrator treats these as a domain boundary.
[[nodiscard]] constexpr bool is_domain_failure(ErrorCode code) {
  return code == ErrorCode::DomainMargin || code == ErrorCode::NotInDomain ||
         code == ErrorCode::DomainError || code == ErrorCode::SingularMetric;
}

}  // namespace tubular
