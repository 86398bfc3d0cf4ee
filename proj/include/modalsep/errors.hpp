#pragma once

#include <stdexcept>
#include <string>

namespace modalsep {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- model / simulation ----
struct ShapeMismatch : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct NonClassicalDamping : Error { using Error::Error; };
struct SingularEffectiveStiffness : Error { using Error::Error; };

// ---- network / training ----
struct ConfigError : Error { using Error::Error; };
struct DegenerateBatch : Error { using Error::Error; };
struct Diverged : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };

// ---- signal analysis ----
struct TooShort : Error { using Error::Error; };
struct EmptyBand : Error { using Error::Error; };
struct NoTriggers : Error { using Error::Error; };
struct TooFewPeaks : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };

// ---- file I/O ----
struct IoError : Error { using Error::Error; };
struct EmptyFile : Error { using Error::Error; };
struct RaggedRows : Error { using Error::Error; };
struct MissingSampleRate : Error { using Error::Error; };

/// Wraps an error raised inside a pipeline stage so callers can map it to a
/// process exit code (see pipeline.hpp).
struct PipelineError : Error {
    PipelineError(std::string stage_name, int code, const std::string& message)
        : Error("[" + stage_name + "] " + message), stage(std::move(stage_name)), exit_code(code) {}
    std::string stage;
    int exit_code;
};

}  // namespace modalsep
