#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fewg/cache.hpp"
#include "fewg/config.hpp"
#include "fewg/dispersion.hpp"
#include "fewg/io.hpp"

namespace fewg {

enum ExitCode : int { ExitSuccess = 0, ExitConfigError = 2, ExitPartialFailure = 3 };

/// Families tracked across the configured band, with sweep bookkeeping.
struct SolvedFamilies {
  std::vector<FamilyDispersion> families;
  std::vector<std::string> issues;
  /// "omega=<rad/s>: <error>" for failed sweep samples.
  std::vector<std::string> failures;
};

/// Sweeps solver.omega_points frequencies across the band, through the cache
/// when one is given, and tracks families.
SolvedFamilies solve_families(const RunConfig& config, const MaterialLibrary& materials,
                              ModeCache* cache = nullptr);

/// Background density for the configured model and substrate.
std::function<double(const BeamParams&, double)> background_function(
    const RunConfig& config, const MaterialLibrary& materials);

/// Hash of the config fields that determine results (output, cache and job
/// count excluded).
std::string config_hash(const RunConfig& config);

/// Header shared by every output file. The timestamp is the only field that
/// varies between identical runs.
Metadata run_metadata(const RunConfig& config, const MaterialLibrary& materials);

struct RunResult {
  int exit_code = ExitSuccess;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> failures;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
};

/// Executes the configured task, writing into config.output_dir. Failed work
/// items go to failures.json and yield ExitPartialFailure. ConfigError
/// propagates to the caller.
RunResult run(const RunConfig& config);

}  // namespace fewg
