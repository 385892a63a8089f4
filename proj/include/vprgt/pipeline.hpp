#pragma once

#include "vprgt/config.hpp"
#include "vprgt/evaluation.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vprgt {

struct RunOptions {
  bool auto_only = false;
  std::string run_name;  // default: run-<UTC timestamp>
  // Session store for review mode; default <run>/sessions.
  std::optional<std::filesystem::path> session_dir;
};

struct PairOutcome {
  std::string visit_a;
  std::string visit_b;
  bool ok = false;
  std::string error;
  std::size_t turning_points_a = 0;
  std::size_t turning_points_b = 0;
  std::size_t matches = 0;
  std::size_t accepted = 0;
  double rms_residual = 0.0;
  std::size_t frame_pairs = 0;
  std::size_t fallback_frames = 0;
  std::string session_id;  // review mode only
};

struct PipelineRun {
  std::filesystem::path run_dir;
  std::string scene_id;
  std::vector<PairOutcome> pairs;  // manifest order

  bool ok() const;
};

/// Runs detect → propose → (accept | open session) → fit → generate for
/// every pair of the manifest. Pair failures are recorded, not thrown.
PipelineRun run_pipeline(const std::filesystem::path& manifest_path, const PipelineConfig& config,
                         const RunOptions& options);

std::string pair_dir_name(const std::string& visit_a, const std::string& visit_b);

/// Evaluates each results file (method name = file stem) and writes
/// report.txt and report.json into `out_dir` when given.
std::vector<EvaluationReport> run_evaluation(
    const std::filesystem::path& locations, const std::vector<std::filesystem::path>& results,
    const PipelineConfig& config, const std::map<std::string, double>& scene_units,
    const std::optional<std::filesystem::path>& out_dir);

}  // namespace vprgt
