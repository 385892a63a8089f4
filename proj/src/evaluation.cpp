#include "vprgt/evaluation.hpp"

#include "vprgt/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace vprgt {

using nlohmann::json;

namespace {

struct Prepared {
  std::unordered_map<std::string, std::size_t> database_index;
  std::vector<const RetrievalResult*> result_for_query;  // aligned with queries
};

Prepared prepare(std::span<const LocalizedImage> queries, std::span<const LocalizedImage> database,
                 std::span<const RetrievalResult> results, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("distance threshold must be positive");
  Prepared p;
  for (std::size_t i = 0; i < database.size(); ++i) {
    if (!p.database_index.emplace(database[i].image_id, i).second) {
      throw ValidationError("duplicate database image id '" + database[i].image_id + "'");
    }
  }
  std::unordered_map<std::string, const RetrievalResult*> by_query;
  for (const auto& r : results) by_query.emplace(r.query_id, &r);

  std::vector<std::string> missing;
  for (const auto& q : queries) {
    const auto it = by_query.find(q.image_id);
    if (it == by_query.end()) {
      missing.push_back(q.image_id);
      p.result_for_query.push_back(nullptr);
      continue;
    }
    const RetrievalResult& r = *it->second;
    if (r.ranked.empty()) {
      throw ValidationError("retrieval result for query '" + q.image_id + "' is empty");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : r.ranked) {
      if (!seen.insert(id).second) {
        throw ValidationError("retrieval result for query '" + q.image_id +
                              "' lists '" + id + "' twice");
      }
      if (!p.database_index.count(id)) {
        throw ValidationError("retrieval result for query '" + q.image_id +
                              "' references unknown database image '" + id + "'");
      }
    }
    p.result_for_query.push_back(&r);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw ValidationError("missing retrieval results for " + std::to_string(missing.size()) +
                              " queries: " + list,
                          list);
  }
  return p;
}

void check_n_values(std::span<const int> n_values) {
  for (const int n : n_values) {
    if (n < 1) throw ValidationError("recall N values must be >= 1");
  }
}

bool within(const LocalizedImage& q, const LocalizedImage& d, double threshold) {
  return (q.location - d.location).norm() <= threshold;
}

std::size_t first_hit(const LocalizedImage& query, const RetrievalResult& result,
                      std::span<const LocalizedImage> database,
                      const std::unordered_map<std::string, std::size_t>& index,
                      double threshold) {
  for (std::size_t r = 0; r < result.ranked.size(); ++r) {
    if (within(query, database[index.at(result.ranked[r])], threshold)) return r;
  }
  return kNoHit;
}

std::string number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

std::string_view to_string(ImageRole role) {
  return role == ImageRole::database ? "database" : "query";
}

ImageRole parse_image_role(std::string_view name) {
  if (name == "database" || name == "db") return ImageRole::database;
  if (name == "query") return ImageRole::query;
  throw ParseError("unknown image role '" + std::string(name) + "' (database|query)");
}

std::vector<std::size_t> first_hit_ranks(std::span<const LocalizedImage> queries,
                                         std::span<const LocalizedImage> database,
                                         std::span<const RetrievalResult> results,
                                         double threshold, Exec exec) {
  const Prepared p = prepare(queries, database, results, threshold);
  std::vector<std::size_t> ranks(queries.size(), kNoHit);
  const auto count = static_cast<std::ptrdiff_t>(queries.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto q = static_cast<std::size_t>(i);
      ranks[q] = first_hit(queries[q], *p.result_for_query[q], database, p.database_index,
                           threshold);
    }
  } else {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      ranks[q] = first_hit(queries[q], *p.result_for_query[q], database, p.database_index,
                           threshold);
    }
  }
  return ranks;
}

std::vector<double> recall_at_n(std::span<const LocalizedImage> queries,
                                std::span<const LocalizedImage> database,
                                std::span<const RetrievalResult> results,
                                std::span<const int> n_values, double threshold, Exec exec) {
  check_n_values(n_values);
  std::vector<double> recalls(n_values.size(), 0.0);
  if (queries.empty()) {
    prepare(queries, database, results, threshold);
    return recalls;
  }
  const double total = static_cast<double>(queries.size());

  if (exec == Exec::parallel) {
    const auto ranks = first_hit_ranks(queries, database, results, threshold, Exec::parallel);
    for (std::size_t k = 0; k < n_values.size(); ++k) {
      const auto n = static_cast<std::size_t>(n_values[k]);
      const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                      [n](std::size_t r) { return r != kNoHit && r < n; });
      recalls[k] = 100.0 * static_cast<double>(hits) / total;
    }
    return recalls;
  }

  const Prepared p = prepare(queries, database, results, threshold);
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    const auto n = static_cast<std::size_t>(n_values[k]);
    std::size_t hits = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const auto& ranked = p.result_for_query[q]->ranked;
      const std::size_t top = std::min(n, ranked.size());
      for (std::size_t r = 0; r < top; ++r) {
        if (within(queries[q], database[p.database_index.at(ranked[r])], threshold)) {
          ++hits;
          break;
        }
      }
    }
    recalls[k] = 100.0 * static_cast<double>(hits) / total;
  }
  return recalls;
}

double weighted_average(std::span<const SceneRecall> scenes) {
  if (scenes.empty()) throw ValidationError("weighted average of an empty scene list");
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& s : scenes) {
    if (s.count == 0) throw ValidationError("scene image counts must be positive");
    weighted += s.recall * static_cast<double>(s.count);
    total += static_cast<double>(s.count);
  }
  return weighted / total;
}

EvaluationReport evaluate(std::span<const LocalizedImage> images,
                          std::span<const RetrievalResult> results,
                          const EvaluationOptions& options, std::string method) {
  if (!(options.threshold > 0.0)) throw ValidationError("distance threshold must be positive");
  check_n_values(options.n_values);

  std::map<std::string, std::pair<std::vector<LocalizedImage>, std::vector<LocalizedImage>>>
      scenes;  // scene -> (queries, database)
  std::map<std::string, std::string> query_scene;
  for (const auto& img : images) {
    auto& [queries, database] = scenes[img.scene_id];
    if (img.role == ImageRole::query) {
      if (!query_scene.emplace(img.image_id, img.scene_id).second) {
        throw ValidationError("query id '" + img.image_id + "' is not unique across scenes");
      }
      queries.push_back(img);
    } else {
      database.push_back(img);
    }
  }

  EvaluationReport report;
  report.method = std::move(method);
  report.n_values = options.n_values;
  report.threshold = options.threshold;
  std::vector<std::vector<SceneRecall>> per_n(options.n_values.size());
  for (const auto& [scene, sets] : scenes) {
    const auto& [queries, database] = sets;
    if (queries.empty()) continue;
    const auto scale_it = options.units_per_meter.find(scene);
    const double scale =
        scale_it != options.units_per_meter.end() ? scale_it->second : options.default_units_per_meter;
    SceneReport row;
    row.scene_id = scene;
    row.query_count = queries.size();
    row.threshold_units = options.threshold * scale;
    row.recalls = recall_at_n(queries, database, results, options.n_values, row.threshold_units);
    for (std::size_t k = 0; k < row.recalls.size(); ++k) {
      per_n[k].push_back({row.recalls[k], row.query_count});
    }
    report.scenes.push_back(std::move(row));
  }
  if (report.scenes.empty()) throw ValidationError("no query images to evaluate");
  for (const auto& column : per_n) report.weighted.push_back(weighted_average(column));
  return report;
}

std::vector<LocalizedImage> read_locations(std::istream& in) {
  std::vector<LocalizedImage> images;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "image_id,scene_id,role,x,y") {
        throw ParseError("locations file: expected header 'image_id,scene_id,role,x,y'");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw ParseError("locations file line " + std::to_string(line_no) + ": expected 5 columns");
    }
    LocalizedImage img;
    img.image_id = fields[0];
    img.scene_id = fields[1];
    img.role = parse_image_role(fields[2]);
    try {
      std::size_t used = 0;
      const double x = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("x");
      const double y = std::stod(fields[4], &used);
      if (used != fields[4].size()) throw std::invalid_argument("y");
      img.location = Vec2(x, y);
    } catch (const std::exception&) {
      throw ParseError("locations file line " + std::to_string(line_no) + ": bad coordinate");
    }
    if (!img.location.allFinite()) {
      throw ValidationError("locations file line " + std::to_string(line_no) +
                            ": non-finite coordinate");
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<LocalizedImage> load_locations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open locations file", path.string());
  return read_locations(in);
}

void write_locations(std::ostream& out, std::span<const LocalizedImage> images) {
  out << "image_id,scene_id,role,x,y\n";
  for (const auto& img : images) {
    out << img.image_id << ',' << img.scene_id << ',' << to_string(img.role) << ','
        << format_number(img.location.x()) << ',' << format_number(img.location.y()) << '\n';
  }
}

std::vector<RetrievalResult> parse_results(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("results file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("results file must be a JSON object");
  std::vector<RetrievalResult> results;
  for (const auto& [query, ranked] : doc.items()) {
    if (!ranked.is_array()) throw ParseError("results for '" + query + "' must be a list");
    RetrievalResult r;
    r.query_id = query;
    for (const auto& id : ranked) r.ranked.push_back(id.get<std::string>());
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<RetrievalResult> load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file", path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_results(buffer.str());
}

void save_results(const std::filesystem::path& path, std::span<const RetrievalResult> results) {
  json doc = json::object();
  for (const auto& r : results) doc[r.query_id] = r.ranked;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write results file", path.string());
  out << doc.dump(1) << '\n';
}

std::string format_report_table(std::span<const EvaluationReport> reports) {
  std::ostringstream out;
  for (const auto& report : reports) {
    if (!report.method.empty()) out << "method: " << report.method << '\n';
    out << "threshold: " << number(report.threshold, 2) << " m\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-24s %8s", "scene", "queries");
    out << buf;
    for (const int n : report.n_values) {
      std::snprintf(buf, sizeof buf, " %8s", ("R@" + std::to_string(n)).c_str());
      out << buf;
    }
    out << '\n';
    std::size_t total = 0;
    for (const auto& s : report.scenes) {
      std::snprintf(buf, sizeof buf, "%-24s %8zu", s.scene_id.c_str(), s.query_count);
      out << buf;
      for (const double r : s.recalls) {
        std::snprintf(buf, sizeof buf, " %8.2f", r);
        out << buf;
      }
      out << '\n';
      total += s.query_count;
    }
    std::snprintf(buf, sizeof buf, "%-24s %8zu", "weighted average", total);
    out << buf;
    for (const double r : report.weighted) {
      std::snprintf(buf, sizeof buf, " %8.2f", r);
      out << buf;
    }
    out << "\n\n";
  }
  return out.str();
}

std::string format_report_json(std::span<const EvaluationReport> reports) {
  json doc = json::array();
  for (const auto& report : reports) {
    json entry;
    entry["method"] = report.method;
    entry["threshold_m"] = report.threshold;
    entry["n_values"] = report.n_values;
    entry["scenes"] = json::array();
    for (const auto& s : report.scenes) {
      entry["scenes"].push_back({{"scene_id", s.scene_id},
                                 {"queries", s.query_count},
                                 {"threshold_units", s.threshold_units},
                                 {"recall", s.recalls}});
    }
    entry["weighted_average"] = report.weighted;
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

}  // namespace vprgt
