#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fewg/material.hpp"
#include "fewg/modesolver.hpp"

namespace fewg {

/// Bumped whenever solver output for a fixed input may change.
inline constexpr std::uint32_t solver_version = 3;

/// Content hash of everything that determines a mode set at one frequency.
std::string mode_cache_key(const WaveguideGeometry& geometry, const MaterialLibrary& materials,
                           double omega, const GridSpec& grid, const SolveOptions& options);

std::string serialize_modes(const std::vector<ModeSolution>& modes);
/// Throws CacheCorrupt on any structural error.
std::vector<ModeSolution> deserialize_modes(const std::string& payload);

/// On-disk mode-set cache. Entries are immutable once written, stored as
/// `<key>.modes` with a version and checksum header. Unreadable entries are
/// renamed to `.corrupt` and recomputed.
class ModeCache {
 public:
  explicit ModeCache(std::filesystem::path dir, std::uint32_t version = solver_version);

  using Solver = std::function<std::vector<ModeSolution>()>;

  /// Concurrent callers for the same key wait for one solve and one write.
  std::vector<ModeSolution> get_or_solve(const std::string& key, const Solver& solve);

  const std::filesystem::path& dir() const { return dir_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t writes() const { return writes_; }
  std::uint64_t quarantined() const { return quarantined_; }
  std::filesystem::path entry_path(const std::string& key) const;

 private:
  std::shared_ptr<std::mutex> key_lock(const std::string& key);
  bool try_load(const std::string& key, std::vector<ModeSolution>& out);

  std::filesystem::path dir_;
  std::uint32_t version_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::atomic<std::uint64_t> writes_{0};
  std::atomic<std::uint64_t> quarantined_{0};
};

}  // namespace fewg
