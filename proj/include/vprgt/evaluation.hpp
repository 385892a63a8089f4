#pragma once

#include "vprgt/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vprgt {

enum class ImageRole { database, query };

std::string_view to_string(ImageRole role);
ImageRole parse_image_role(std::string_view name);

struct LocalizedImage {
  std::string image_id;
  std::string scene_id;
  ImageRole role = ImageRole::database;
  Vec2 location = Vec2::Zero();
};

struct RetrievalResult {
  std::string query_id;
  std::vector<std::string> ranked;  // best first
};

inline constexpr std::size_t kNoHit = std::numeric_limits<std::size_t>::max();

/// Zero-based rank of the first retrieved image within `threshold` of its
/// query, or kNoHit. One entry per query, in query order.
std::vector<std::size_t> first_hit_ranks(std::span<const LocalizedImage> queries,
                                         std::span<const LocalizedImage> database,
                                         std::span<const RetrievalResult> results,
                                         double threshold, Exec exec = Exec::parallel);

/// Percentage of queries with a database image within `threshold`
/// (topometric units) among their top-N results, for each N.
///
/// Exec::parallel reduces first-hit ranks computed per query under OpenMP;
/// Exec::serial rescans the top-N list of every query for every N.
std::vector<double> recall_at_n(std::span<const LocalizedImage> queries,
                                std::span<const LocalizedImage> database,
                                std::span<const RetrievalResult> results,
                                std::span<const int> n_values, double threshold,
                                Exec exec = Exec::parallel);

struct SceneRecall {
  double recall = 0.0;
  std::size_t count = 0;
};

/// Σ recall·count / Σ count.
double weighted_average(std::span<const SceneRecall> scenes);

struct SceneReport {
  std::string scene_id;
  std::size_t query_count = 0;
  double threshold_units = 0.0;
  std::vector<double> recalls;  // aligned with EvaluationReport::n_values
};

struct EvaluationReport {
  std::string method;
  std::vector<int> n_values;
  double threshold = 0.0;  // meters
  std::vector<SceneReport> scenes;  // sorted by scene id
  std::vector<double> weighted;     // count-weighted average per N
};

struct EvaluationOptions {
  std::vector<int> n_values{1, 5, 10, 20};
  double threshold = 10.0;  // meters; scaled by units_per_meter per scene
  double default_units_per_meter = 1.0;
  std::map<std::string, double> units_per_meter;  // per-scene override
};

/// Per-scene recall@N plus the weighted-average row. Each query is scored
/// against the database images of its own scene.
EvaluationReport evaluate(std::span<const LocalizedImage> images,
                          std::span<const RetrievalResult> results,
                          const EvaluationOptions& options, std::string method = {});

/// CSV `image_id,scene_id,role,x,y`.
std::vector<LocalizedImage> read_locations(std::istream& in);
std::vector<LocalizedImage> load_locations(const std::filesystem::path& path);
void write_locations(std::ostream& out, std::span<const LocalizedImage> images);

/// JSON object mapping query id to its ranked database id list.
std::vector<RetrievalResult> load_results(const std::filesystem::path& path);
std::vector<RetrievalResult> parse_results(const std::string& json_text);
void save_results(const std::filesystem::path& path, std::span<const RetrievalResult> results);

std::string format_report_table(std::span<const EvaluationReport> reports);
std::string format_report_json(std::span<const EvaluationReport> reports);

}  // namespace vprgt
