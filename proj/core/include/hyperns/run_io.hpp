#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hyperns/config.hpp"
#include "hyperns/dynamics.hpp"

namespace hyperns {

/// Owns one run directory <root>/<config hash>/:
///
///   manifest.json    config echo, version, seed, hash, wall-clock times,
///                    file list and a "finalized" flag
///   config.txt       canonical config text
///   diagnostics.csv  t, energy, enstrophy, visc_rate, hyper_rate, budget_residual
///   spectrum.csv     t, shell, energy (one row per shell per record)
///   budget.csv       t, energy, visc_rate, hyper_rate (every step)
///   defect.csv       one row per eta
///   final.hypf       last good state
///
/// The manifest is written unfinalized by the constructor; diagnostics rows
/// are flushed as they arrive so a halted run leaves readable partial files.
class RunWriter {
 public:
  RunWriter(const std::filesystem::path& root, const SimConfig& cfg);

  const std::filesystem::path& directory() const { return dir_; }
  const std::string& hash() const { return hash_; }

  /// Sink that appends to diagnostics.csv and spectrum.csv.
  DiagnosticSink sink();

  /// Writes the remaining files and finalizes the manifest.
  void finish(const RunResult& result);

 private:
  void write_manifest(bool finalized, const RunResult* result);

  SimConfig cfg_;
  std::string hash_;
  std::filesystem::path dir_;
  std::ofstream diagnostics_;
  std::ofstream spectrum_;
  std::vector<std::string> files_;
  std::chrono::system_clock::time_point start_;
};

/// Runs cfg with every output written through a RunWriter under root.
struct RecordedRun {
  RunResult result;
  std::filesystem::path directory;
};
RecordedRun run_to_directory(const SimConfig& cfg, const std::filesystem::path& root, const RunOptions& options = {});

/// Directory <root>/<hash>/ for a study (sweep, comparison): the hash
/// covers the canonical base config plus the study parameters. The manifest
/// is written unfinalized on construction.
class StudyDirectory {
 public:
  StudyDirectory(const std::filesystem::path& root, const SimConfig& base, const std::string& kind,
                 const std::vector<std::pair<std::string, std::string>>& parameters);

  const std::filesystem::path& directory() const { return dir_; }
  /// Root for the per-run directories of the study.
  std::filesystem::path runs_root() const { return dir_ / "runs"; }

  /// Records a file (relative to the directory) in the manifest.
  void add_file(const std::string& name) { files_.push_back(name); }
  void finish(const std::string& status);

 private:
  void write_manifest(bool finalized, const std::string& status);

  SimConfig base_;
  std::string kind_;
  std::vector<std::pair<std::string, std::string>> parameters_;
  std::string hash_;
  std::filesystem::path dir_;
  std::vector<std::string> files_;
  std::chrono::system_clock::time_point start_;
};

struct AuditReport {
  std::size_t samples = 0;
  double max_interval = 0.0;
  double max_cumulative = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_interval <= tolerance; }
};

/// Recomputes the energy budget from <rundir>/budget.csv.
AuditReport energy_audit(const std::filesystem::path& rundir, double tolerance = 1e-6);

}  // namespace hyperns
