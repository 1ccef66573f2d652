#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slider/config.hpp"
#include "slider/errors.hpp"

namespace slider {

enum class Command { Simulate, Steady, GCurve, Bounds, Verify };

std::optional<Command> parse_command(std::string_view name);
const char* to_string(Command command);

/// Exit status contract: 0 success, 1 domain errors (contact, bracketing,
/// inadmissible shapes, failed checks), 2 usage and configuration errors,
/// 3 solver non-convergence.
int exit_code_for(ErrorCode code);

struct VerificationCheck {
  std::string name;
  bool pass = false;
  bool skipped = false;
  double margin = 0.0;  // distance to the acceptance threshold; >= 0 when passing
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  bool pass() const;
};

/// Oracle cross-checks driven by the configuration: Fourier constant
/// against a grid solve, PSOR against active-set enumeration, the
/// comparison principle on random sub-rectangles, the exact cutoff above
/// V1, the flat-case envelopes and, for line and point contact, the
/// spring-damper lower bound.
VerificationReport run_verification(const RunConfig& config);

/// Runs one command and writes its artifacts into out_dir:
///   simulate  trajectory.csv, summary.json
///   steady    steady.json
///   gcurve    gcurve.csv
///   bounds    bounds.json
///   verify    verify.json
/// On failure the JSON artifact (error.json for gcurve) holds the error
/// code and reason. Returns the exit status.
int run_command(Command command, const RunConfig& config, const std::filesystem::path& out_dir,
                std::ostream& diagnostics);

}  // namespace slider
