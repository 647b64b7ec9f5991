#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hitchin/angle.hpp"
#include "hitchin/json_io.hpp"

namespace hitchin {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3 };

/// Parsed command line plus the loaded --config document. Flags override the
/// config's "tolerances" object, which overrides the defaults.
struct RunConfig {
  std::string command;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> trace;
  std::optional<double> tol_residual;
  std::optional<double> tol_quad;
  std::optional<double> fd_step;
  std::optional<cplx> basepoint;

  double residual_tol() const;
  double quad_tol() const;
  double fd() const;
};

/// Spectral-model summary: degrees, counts, coefficient layout, rendered R.
json cmd_build(const RunConfig& cfg);
/// Radical pipeline for D2/g=2, Newton from "newton_seed" otherwise.
json cmd_solve(const RunConfig& cfg);
/// Angle coordinates; node traces are appended to `trace` when non-null.
json cmd_angles(const RunConfig& cfg, std::vector<TraceRow>* trace = nullptr);

struct VerifyOutcome {
  json report;
  bool pass = false;
};
/// Residual check, symplectic defect with its step-halving series, and the
/// conjugacy residual, judged against fixed thresholds.
VerifyOutcome cmd_verify(const RunConfig& cfg);
/// A seeded instance (curve, H, divisor) usable as config for the others.
json cmd_sample(const RunConfig& cfg);

/// Thresholds used by verify.
struct VerifyThresholds {
  double defect = 1e-3;
  double conjugacy = 1e-4;  // relative to the divisor scale
  double ratio_lo = 2.0, ratio_hi = 8.0;
};

/// Full front end: parses argv, runs the command, writes output. Returns the
/// exit code; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "re,im" or "re" -> complex. Throws InvalidArgument.
cplx parse_complex_flag(const std::string& s);

}  // namespace hitchin
