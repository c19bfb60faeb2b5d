#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "nlslab/nonlinearity.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kNumericalFailure = 2, kUsageError = 3 };

// Parsed command line. Fields irrelevant to the chosen command are ignored.
struct Options {
  std::string command;
  std::string spec_source;
  int dim = 0;  // 0: take it from the spec file, or 1 for presets
  int points = 0;  // 0: 1024, 256 or 64 by dimension
  double half_length = 0.0;  // 0: 20, 12 or 10 by dimension
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::string out;
  std::string fields_out;
  std::string sweep;

  // ground-state and classify
  double omega = 1.0;
  bool keep_beta = false;
  double tol = 1e-10;
  int max_iter = 3000;
  double damping = 0.0;
  bool radial = false;
  int radial_points = 8000;
  double radial_radius = 30.0;

  // evolve, virial-check and pseudo-conformal
  std::optional<double> t_end;
  double dt = 1e-3;
  double dt_min = 1e-8;
  bool adaptive = false;
  int snapshot_stride = 10;
  double blowup_factor = 1e6;
  double resolution_tol = 1e-6;
  std::string init = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
  double dilation = 1.0;
  double blowup_time = 1.0;

  std::string assume = "finite-variance";
};

struct CommandResult {
  int exit_code = kOk;
  std::string summary;  // human-readable lines for stdout
  std::string error;    // one-line reason when exit_code != 0
};

// Entry point of the executable. Writes the summary to `out` and errors, one
// line each, to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Runs one command with fully resolved options (no sweep expansion).
CommandResult run_command(const Options& options);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

// Writes to a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, const std::string& content);

// Reproducibility record written next to every output.
nlohmann::json make_manifest(const Options& options, const SystemSpec& spec, const std::optional<GridSpec>& grid,
                             const std::vector<std::string>& outputs, const nlohmann::json& notes);

// Bytes allowed for one grid state; NLSLAB_MEMORY_CAP_MB overrides the
// default of 2048 MiB.
std::uint64_t memory_cap_bytes();

// Shortest round-trip decimal form, used for every number in CSV output.
std::string format_number(double v);

}  // namespace nlslab::cli
