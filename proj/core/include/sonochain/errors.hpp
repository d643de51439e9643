#pragma once

#include <stdexcept>
#include <string>

namespace sonochain {

// Base for every error thrown by the engine. The CLI maps subtypes to
// stable exit codes, so new error kinds should subclass one of these.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input-side failures (exit code 2).
struct InputError : Error { using Error::Error; };
struct ParseError : InputError { using InputError::InputError; };
struct EvalError : InputError { using InputError::InputError; };

// Configuration failures (exit code 3).
struct ConfigError : Error { using Error::Error; };

// Backend failures (exit code 4).
struct BackendError : Error { using Error::Error; };
struct UnknownImageError : BackendError { using BackendError::BackendError; };
struct BackendUnavailableError : BackendError { using BackendError::BackendError; };
struct ProtocolError : BackendError { using BackendError::BackendError; };

// Chain / orchestration failures (exit code 5).
struct ChainError : Error { using Error::Error; };
struct PlanError : ChainError { using ChainError::ChainError; };
struct ChainOverrunError : ChainError { using ChainError::ChainError; };
struct ReportError : ChainError { using ChainError::ChainError; };
struct SummaryUnavailableError : ChainError { using ChainError::ChainError; };

// Violations of core type invariants.
struct DomainError : Error { using Error::Error; };
struct SplitError : Error { using Error::Error; };

}  // namespace sonochain
