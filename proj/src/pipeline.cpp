#include "vprgt/pipeline.hpp"

#include "vprgt/error.hpp"
#include "vprgt/manifest.hpp"
#include "vprgt/session.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>

namespace vprgt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_stamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file", path.string());
  out << text;
}

Trajectory load_visit(const SceneManifest& manifest, const VisitEntry& visit,
                      const PipelineConfig& config) {
  ParseOptions options;
  options.vertical_axis = config.vertical_axis;
  options.scene_id = manifest.scene_id;
  options.visit_id = visit.visit_id;
  try {
    Trajectory t = parse_trajectory(visit.trajectory, manifest.format, options);
    check_duration(visit, t);
    return t;
  } catch (const Error& e) {
    rethrow_with_prefix(e, "visit '" + visit.visit_id + "' (" +
                               visit.trajectory.filename().string() + "): ");
  }
}

json outcome_json(const PairOutcome& o) {
  json j{{"visit_a", o.visit_a}, {"visit_b", o.visit_b}, {"ok", o.ok}};
  if (!o.ok) {
    j["error"] = o.error;
    return j;
  }
  j["turning_points_a"] = o.turning_points_a;
  j["turning_points_b"] = o.turning_points_b;
  j["matches"] = o.matches;
  if (!o.session_id.empty()) {
    j["session_id"] = o.session_id;
    return j;
  }
  j["accepted"] = o.accepted;
  j["rms_residual"] = o.rms_residual;
  j["frame_pairs"] = o.frame_pairs;
  j["fallback_frames"] = o.fallback_frames;
  return j;
}

}  // namespace

bool PipelineRun::ok() const {
  for (const auto& p : pairs) {
    if (!p.ok) return false;
  }
  return true;
}

std::string pair_dir_name(const std::string& visit_a, const std::string& visit_b) {
  return visit_a + "__" + visit_b;
}

PipelineRun run_pipeline(const fs::path& manifest_path, const PipelineConfig& config,
                         const RunOptions& options) {
  config.validate();
  const SceneManifest manifest = load_manifest(manifest_path);

  PipelineRun run;
  run.scene_id = manifest.scene_id;
  run.run_dir = config.output_dir / (options.run_name.empty() ? "run-" + utc_stamp()
                                                              : options.run_name);
  fs::create_directories(run.run_dir);
  write_file(run.run_dir / "config.txt", config.to_text());

  std::unique_ptr<AnnotationService> service;
  if (!options.auto_only) {
    service = std::make_unique<AnnotationService>(
        options.session_dir.value_or(run.run_dir / "sessions"),
        ServiceOptions{std::nullopt, config.window_radius});
  }

  const AnnotationParams params = config.annotation_params();
  run.pairs.resize(manifest.pairs.size());
  const auto count = static_cast<long>(manifest.pairs.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    const auto& [id_a, id_b] = manifest.pairs[static_cast<std::size_t>(i)];
    PairOutcome& out = run.pairs[static_cast<std::size_t>(i)];
    out.visit_a = id_a;
    out.visit_b = id_b;
    try {
      const VisitEntry& va = manifest.visit(id_a);
      const VisitEntry& vb = manifest.visit(id_b);
      if (service) {
        SessionRequest request;
        request.scene_id = manifest.scene_id;
        request.traj_a = va.trajectory;
        request.traj_b = vb.trajectory;
        request.format = manifest.format;
        request.vertical_axis = config.vertical_axis;
        request.visit_a = id_a;
        request.visit_b = id_b;
        request.duration_a = va.duration;
        request.duration_b = vb.duration;
        request.params = params;
        const auto session = service->create_session(request);
        out.turning_points_a = session->tps_a.size();
        out.turning_points_b = session->tps_b.size();
        out.matches = session->matches.size();
        out.session_id = session->session_id;
        out.ok = true;
        continue;
      }
      const Trajectory a = load_visit(manifest, va, config);
      const Trajectory b = load_visit(manifest, vb, config);
      Proposal proposal = propose_pair(a, b, params);
      const MatchList matches = apply_correction(proposal.matches, AcceptAll{},
                                                 proposal.tps_a.size(), proposal.tps_b.size());
      const GroundTruth truth = build_ground_truth(a, b, proposal.tps_a, proposal.tps_b, matches,
                                                   va.duration, vb.duration, params.model);
      write_pair_artifacts(run.run_dir / pair_dir_name(id_a, id_b), proposal.tps_a,
                           proposal.tps_b, matches, truth);
      out.turning_points_a = proposal.tps_a.size();
      out.turning_points_b = proposal.tps_b.size();
      out.matches = matches.size();
      out.accepted = matches.size();
      out.rms_residual = truth.transform.rms_residual;
      out.frame_pairs = truth.frame_pairs.size();
      for (const auto& fp : truth.frame_pairs) out.fallback_frames += fp.fallback ? 1 : 0;
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  }

  json pairs = json::array();
  std::size_t failures = 0;
  for (const auto& o : run.pairs) {
    pairs.push_back(outcome_json(o));
    failures += o.ok ? 0 : 1;
  }
  const json summary{{"scene_id", run.scene_id},
                     {"mode", options.auto_only ? "auto" : "review"},
                     {"pairs", std::move(pairs)},
                     {"failures", failures}};
  write_file(run.run_dir / "summary.json", summary.dump(2) + "\n");
  return run;
}

std::vector<EvaluationReport> run_evaluation(const fs::path& locations,
                                             const std::vector<fs::path>& results,
                                             const PipelineConfig& config,
                                             const std::map<std::string, double>& scene_units,
                                             const std::optional<fs::path>& out_dir) {
  config.validate();
  if (results.empty()) throw ValidationError("at least one results file is required");
  const auto images = load_locations(locations);
  EvaluationOptions options;
  options.n_values = config.recall_n;
  options.threshold = config.threshold;
  options.default_units_per_meter = config.units_per_meter;
  options.units_per_meter = scene_units;

  std::vector<EvaluationReport> reports;
  for (const auto& path : results) {
    const auto method_results = load_results(path);
    try {
      reports.push_back(evaluate(images, method_results, options, path.stem().string()));
    } catch (const Error& e) {
      rethrow_with_prefix(e, path.filename().string() + ": ");
    }
  }
  if (out_dir) {
    fs::create_directories(*out_dir);
    write_file(*out_dir / "report.txt", format_report_table(reports));
    write_file(*out_dir / "report.json", format_report_json(reports));
  }
  return reports;
}

}  // namespace vprgt
