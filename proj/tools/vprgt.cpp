#include "vprgt/alignment.hpp"
#include "vprgt/annotation.hpp"
#include "vprgt/config.hpp"
#include "vprgt/error.hpp"
#include "vprgt/evaluation.hpp"
#include "vprgt/groundtruth.hpp"
#include "vprgt/http_api.hpp"
#include "vprgt/json_io.hpp"
#include "vprgt/manifest.hpp"
#include "vprgt/matching.hpp"
#include "vprgt/pipeline.hpp"
#include "vprgt/retrieval.hpp"
#include "vprgt/session.hpp"
#include "vprgt/synthetic.hpp"
#include "vprgt/trajectory.hpp"
#include "vprgt/turning_points.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vprgt;

namespace {

// Flags that override config keys. Only flags actually given are applied,
// after the config file.
struct Overrides {
  std::optional<fs::path> config_file;
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  PipelineConfig resolve() const {
    PipelineConfig config = config_file ? load_config(*config_file) : PipelineConfig{};
    for (const auto& [key, value] : values) config.set(key, value);
    config.validate();
    return config;
  }
};

void add_config_file(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_file, "Config file of `key = value` lines")
      ->check(CLI::ExistingFile);
}

void add_detection_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--epsilon", "epsilon", "RDP tolerance in trajectory units (0: 1% of length)");
  o.add(app, "--angle", "angle_threshold_deg", "Turn angle threshold in degrees");
  o.add(app, "--vertical-axis", "vertical_axis", "Axis dropped from 3D input: 0, 1, 2 or auto");
}

void add_matching_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--lambda", "lambda", "Weight of the angle term in the matching cost");
  o.add(app, "--gap-penalty", "gap_penalty", "Cost of leaving an interior turning point unmatched");
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write output file", path.string());
  return out;
}

Trajectory load_traj(const fs::path& path, const std::string& format,
                     const PipelineConfig& config, const std::string& visit) {
  ParseOptions options;
  options.vertical_axis = config.vertical_axis;
  options.visit_id = visit.empty() ? path.stem().string() : visit;
  return parse_trajectory(path, format.empty() ? format_for_path(path)
                                               : parse_trajectory_format(format),
                          options);
}

std::vector<MatchRecord> load_match_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open match file", path.string());
  return read_match_list(in);
}

AlignmentTransform fit_from_records(const Trajectory& a, const Trajectory& b,
                                    const std::vector<KeyframePair>& pairs,
                                    TransformModel model) {
  std::vector<PointPair> points;
  for (const auto& p : pairs) {
    if (p.keyframe_a >= a.size() || p.keyframe_b >= b.size()) {
      throw ValidationError("match file references keyframes outside the trajectories");
    }
    points.push_back({a[p.keyframe_a].position, b[p.keyframe_b].position});
  }
  return fit_transform(points, model);
}

json route_json(const SyntheticRoute& route) {
  json corners = json::array();
  for (const auto& c : route.corners) corners.push_back({c.x(), c.y()});
  return {{"corners", corners},
          {"leg_lengths", route.leg_lengths},
          {"total_length", route.total_length},
          {"turn_angles", route.turn_angles},
          {"corner_fractions", route.corner_fractions}};
}

HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-automatic ground truth generation for indoor visual place recognition"};
  app.set_version_flag("--version", std::string("vprgt ") + VPRGT_VERSION);
  app.require_subcommand(1);
  int exit_code = 0;

  // detect
  Overrides detect_o;
  fs::path detect_traj, detect_out;
  std::string detect_format;
  auto* detect = app.add_subcommand("detect", "Detect turning points of one trajectory");
  detect->add_option("--traj", detect_traj, "Trajectory file (TUM or CSV)")->required();
  detect->add_option("--format", detect_format, "tum or csv (default: from extension)");
  detect->add_option("--out", detect_out, "Output JSON (default: stdout)");
  add_config_file(detect, detect_o);
  add_detection_flags(detect, detect_o);
  detect->callback([&] {
    const auto config = detect_o.resolve();
    const auto traj = load_traj(detect_traj, detect_format, config, "");
    const auto tps = detect_turning_points(traj, {config.epsilon, config.angle_threshold_deg});
    const auto text = to_json(tps).dump(2) + "\n";
    if (detect_out.empty()) {
      std::cout << text;
    } else {
      open_out(detect_out) << text;
    }
  });

  // propose
  Overrides propose_o;
  fs::path propose_a, propose_b, propose_out;
  std::string propose_format;
  bool propose_accept = false;
  auto* propose = app.add_subcommand("propose", "Detect turning points on two trajectories and propose matches");
  propose->add_option("--traj-a", propose_a, "Trajectory to align")->required();
  propose->add_option("--traj-b", propose_b, "Reference trajectory")->required();
  propose->add_option("--format", propose_format, "tum or csv (default: from extension)");
  propose->add_option("--out", propose_out, "Match file (default: stdout)");
  propose->add_flag("--accept", propose_accept, "Mark every proposal confirmed");
  add_config_file(propose, propose_o);
  add_detection_flags(propose, propose_o);
  add_matching_flags(propose, propose_o);
  propose->callback([&] {
    const auto config = propose_o.resolve();
    const auto a = load_traj(propose_a, propose_format, config, "a");
    const auto b = load_traj(propose_b, propose_format, config, "b");
    auto proposal = propose_pair(a, b, config.annotation_params());
    if (propose_accept) {
      proposal.matches = apply_correction(proposal.matches, AcceptAll{}, proposal.tps_a.size(),
                                          proposal.tps_b.size());
    }
    if (propose_out.empty()) {
      write_match_list(std::cout, proposal.matches, proposal.tps_a, proposal.tps_b);
    } else {
      auto out = open_out(propose_out);
      write_match_list(out, proposal.matches, proposal.tps_a, proposal.tps_b);
    }
  });

  // align
  Overrides align_o;
  fs::path align_a, align_b, align_matches, align_out, align_transform_out;
  std::string align_format;
  bool align_proposed = false;
  auto* align = app.add_subcommand("align", "Fit the A to B transform on matched turning points and align A");
  align->add_option("--traj-a", align_a, "Trajectory to align")->required();
  align->add_option("--traj-b", align_b, "Reference trajectory")->required();
  align->add_option("--matches", align_matches, "Match file")->required();
  align->add_option("--format", align_format, "tum or csv (default: from extension)");
  align->add_option("--out", align_out, "Aligned trajectory A (CSV)")->required();
  align->add_option("--transform-out", align_transform_out, "Transform JSON");
  align->add_flag("--include-proposed", align_proposed, "Also use matches still marked proposed");
  add_config_file(align, align_o);
  align_o.add(align, "--model", "model", "affine or similarity");
  align->callback([&] {
    const auto config = align_o.resolve();
    const auto a = load_traj(align_a, align_format, config, "a");
    const auto b = load_traj(align_b, align_format, config, "b");
    const auto pairs = keyframe_pairs(load_match_file(align_matches), align_proposed);
    const auto transform = fit_from_records(a, b, pairs, config.model);
    save_trajectory(align_out, align_trajectory(a, transform), TrajectoryFormat::csv);
    const auto text = to_json(transform).dump(2) + "\n";
    if (align_transform_out.empty()) {
      std::cout << text;
    } else {
      open_out(align_transform_out) << text;
    }
  });

  // generate
  Overrides gen_o;
  fs::path gen_a, gen_b, gen_matches, gen_out;
  std::string gen_format;
  double gen_da = 0.0, gen_db = 0.0;
  bool gen_proposed = false;
  auto* generate = app.add_subcommand("generate", "Generate frame pairs from matched trajectories");
  generate->add_option("--traj-a", gen_a, "Trajectory to align")->required();
  generate->add_option("--traj-b", gen_b, "Reference trajectory")->required();
  generate->add_option("--matches", gen_matches, "Match file")->required();
  generate->add_option("--duration-a", gen_da, "Video A length in seconds")->required();
  generate->add_option("--duration-b", gen_db, "Video B length in seconds")->required();
  generate->add_option("--format", gen_format, "tum or csv (default: from extension)");
  generate->add_option("--out", gen_out, "Frame pair CSV (default: stdout)");
  generate->add_flag("--include-proposed", gen_proposed, "Also use matches still marked proposed");
  add_config_file(generate, gen_o);
  gen_o.add(generate, "--model", "model", "affine or similarity");
  generate->callback([&] {
    const auto config = gen_o.resolve();
    const auto a = load_traj(gen_a, gen_format, config, "a");
    const auto b = load_traj(gen_b, gen_format, config, "b");
    const auto pairs = keyframe_pairs(load_match_file(gen_matches), gen_proposed);
    const auto transform = fit_from_records(a, b, pairs, config.model);
    const auto aligned = align_trajectory(a, transform);
    const auto frames = generate_frame_pairs(aligned, b, pairs, gen_da, gen_db,
                                             AlignmentTransform::identity(config.model));
    if (gen_out.empty()) {
      write_frame_pair_manifest(std::cout, frames);
    } else {
      save_frame_pair_manifest(gen_out, frames);
    }
  });

  // pipeline
  Overrides pipe_o;
  fs::path pipe_manifest;
  RunOptions run_options;
  std::optional<fs::path> pipe_sessions;
  auto* pipeline = app.add_subcommand("pipeline", "Run the whole pipeline over a scene manifest");
  pipeline->add_option("--manifest", pipe_manifest, "Scene manifest JSON")->required()->check(CLI::ExistingFile);
  pipeline->add_flag("--auto-only", run_options.auto_only, "Accept all proposals instead of opening review sessions");
  pipeline->add_option("--run-name", run_options.run_name, "Run directory name (default: run-<UTC time>)");
  pipeline->add_option("--session-dir", pipe_sessions, "Session store for review mode (default: <run>/sessions)");
  add_config_file(pipeline, pipe_o);
  add_detection_flags(pipeline, pipe_o);
  add_matching_flags(pipeline, pipe_o);
  pipe_o.add(pipeline, "--model", "model", "affine or similarity");
  pipe_o.add(pipeline, "--window-radius", "window_radius", "Candidate window radius in keyframes");
  pipe_o.add(pipeline, "--output-dir", "output_dir", "Parent directory of run directories");
  pipeline->callback([&] {
    const auto config = pipe_o.resolve();
    run_options.session_dir = pipe_sessions;
    const auto run = run_pipeline(pipe_manifest, config, run_options);
    for (const auto& p : run.pairs) {
      if (p.ok) continue;
      std::cerr << "error: pair " << p.visit_a << "/" << p.visit_b << ": " << p.error << '\n';
    }
    std::cout << run.run_dir.string() << '\n';
    if (!run.ok()) exit_code = 1;
  });

  // evaluate
  Overrides eval_o;
  fs::path eval_locations;
  std::vector<fs::path> eval_results;
  std::vector<std::string> eval_scales;
  std::optional<fs::path> eval_out;
  bool eval_json = false;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute per-scene recall@N of retrieval results");
  evaluate_cmd->add_option("--locations", eval_locations, "CSV image_id,scene_id,role,x,y")->required();
  evaluate_cmd->add_option("--results", eval_results, "Results JSON, one per method")->required();
  evaluate_cmd->add_option("--scale", eval_scales, "Per-scene units per meter as scene=value");
  evaluate_cmd->add_option("--out-dir", eval_out, "Write report.txt and report.json here");
  evaluate_cmd->add_flag("--json", eval_json, "Print the JSON report instead of the table");
  add_config_file(evaluate_cmd, eval_o);
  eval_o.add(evaluate_cmd, "--n", "recall_n", "Comma separated N values");
  eval_o.add(evaluate_cmd, "--threshold", "threshold", "Distance threshold in meters");
  eval_o.add(evaluate_cmd, "--units-per-meter", "units_per_meter", "Default topometric units per meter");
  evaluate_cmd->callback([&] {
    const auto config = eval_o.resolve();
    std::map<std::string, double> scales;
    for (const auto& s : eval_scales) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ValidationError("--scale expects scene=units_per_meter, got '" + s + "'");
      }
      PipelineConfig probe;
      probe.set("units_per_meter", s.substr(eq + 1));
      probe.validate();
      scales[s.substr(0, eq)] = probe.units_per_meter;
    }
    const auto reports = run_evaluation(eval_locations, eval_results, config, scales, eval_out);
    std::cout << (eval_json ? format_report_json(reports) : format_report_table(reports));
  });

  // retrieve
  fs::path ret_queries, ret_database, ret_out;
  std::size_t ret_k = 20;
  std::string ret_metric = "euclidean";
  auto* retrieve = app.add_subcommand("retrieve", "Exact k-nearest-neighbour retrieval over descriptor files");
  retrieve->add_option("--queries", ret_queries, "Query descriptor file")->required();
  retrieve->add_option("--database", ret_database, "Database descriptor file")->required();
  retrieve->add_option("--k", ret_k, "Results per query")->check(CLI::PositiveNumber);
  retrieve->add_option("--metric", ret_metric, "euclidean or cosine");
  retrieve->add_option("--out", ret_out, "Results JSON")->required();
  retrieve->callback([&] {
    const auto q = load_descriptors(ret_queries);
    const auto db = load_descriptors(ret_database);
    save_results(ret_out, nearest_neighbor_retrieve(q, db, ret_k, parse_distance_metric(ret_metric)));
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Synthetic routes and traversals with known truth");
  synth->require_subcommand(1);
  std::uint64_t syn_seed = 1;
  std::size_t syn_corners = 6;
  fs::path syn_out;
  std::string syn_format = "tum";
  double syn_noise = 0.0;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", syn_seed, "Random seed");
    cmd->add_option("--corners", syn_corners, "Route corners including both endpoints")
        ->check(CLI::Range(2, 1000));
    cmd->add_option("--out", syn_out, "Output directory")->required();
  };

  auto* synth_route = synth->add_subcommand("route", "Random route");
  add_common(synth_route);
  synth_route->callback([&] {
    auto params = default_pair_params(syn_seed, syn_corners).route;
    fs::create_directories(syn_out);
    open_out(syn_out / "route.json") << route_json(generate_route(params)).dump(2) << '\n';
  });

  double trav_duration = 100.0, trav_rate = 1.0;
  std::string trav_profile = "constant";
  auto* synth_traverse = synth->add_subcommand("traverse", "One traversal of a random route");
  add_common(synth_traverse);
  synth_traverse->add_option("--duration", trav_duration, "Seconds")->check(CLI::PositiveNumber);
  synth_traverse->add_option("--rate", trav_rate, "Keyframes per second")->check(CLI::PositiveNumber);
  synth_traverse->add_option("--profile", trav_profile, "constant, piecewise or sinusoidal");
  synth_traverse->add_option("--noise", syn_noise, "Position noise sigma");
  synth_traverse->add_option("--format", syn_format, "tum or csv");
  synth_traverse->callback([&] {
    const auto route = generate_route(default_pair_params(syn_seed, syn_corners).route);
    TraverseParams tp;
    tp.duration = trav_duration;
    tp.keyframe_rate = trav_rate;
    tp.profile = parse_speed_profile(trav_profile);
    tp.noise_sigma = syn_noise;
    tp.seed = syn_seed;
    tp.visit_id = "traversal";
    const auto format = parse_trajectory_format(syn_format);
    const auto t = traverse(route, tp);
    fs::create_directories(syn_out);
    save_trajectory(syn_out / ("traversal." + std::string(to_string(format))), t.trajectory, format);
    json truth = route_json(route);
    truth["fractions"] = t.fractions;
    open_out(syn_out / "truth.json") << truth.dump(2) << '\n';
  });

  auto* synth_pair = synth->add_subcommand("pair", "Two traversals of one route plus a scene manifest");
  add_common(synth_pair);
  synth_pair->add_option("--noise", syn_noise, "Position noise sigma");
  synth_pair->add_option("--format", syn_format, "tum or csv");
  synth_pair->callback([&] {
    auto params = default_pair_params(syn_seed, syn_corners);
    params.noise_sigma = syn_noise;
    const auto pair = make_synthetic_pair(params);
    const auto format = parse_trajectory_format(syn_format);
    const std::string ext = "." + std::string(to_string(format));
    fs::create_directories(syn_out);
    save_trajectory(syn_out / ("a" + ext), pair.a.trajectory, format);
    save_trajectory(syn_out / ("b" + ext), pair.b.trajectory, format);
    SceneManifest manifest;
    manifest.scene_id = "synthetic";
    manifest.format = format;
    manifest.visits = {{"a", syn_out / ("a" + ext), pair.duration_a},
                       {"b", syn_out / ("b" + ext), pair.duration_b}};
    manifest.pairs = {{"a", "b"}};
    save_manifest(syn_out / "manifest.json", manifest);
    json truth = route_json(pair.route);
    json corners = json::array();
    for (const auto& c : pair.truth.corners) {
      corners.push_back({{"corner", c.corner}, {"keyframe_a", c.keyframe_a}, {"keyframe_b", c.keyframe_b}});
    }
    truth["matches"] = corners;
    json frame = json::array();
    for (int r = 0; r < 3; ++r) frame.push_back({pair.frame_a(r, 0), pair.frame_a(r, 1), pair.frame_a(r, 2)});
    truth["frame_a"] = frame;
    open_out(syn_out / "truth.json") << truth.dump(2) << '\n';
  });

  // serve
  fs::path serve_data;
  std::optional<fs::path> serve_media;
  int serve_port = 8080;
  std::string serve_host = "127.0.0.1";
  std::size_t serve_radius = 10;
  auto* serve = app.add_subcommand("serve", "Run the annotation service over HTTP");
  serve->add_option("--data-dir", serve_data, "Session store directory")->required();
  serve->add_option("--media-root", serve_media, "Directory served under /media/")->check(CLI::ExistingDirectory);
  serve->add_option("--port", serve_port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--window-radius", serve_radius, "Default candidate window radius");
  serve->callback([&] {
    AnnotationService service(serve_data, ServiceOptions{serve_media, serve_radius});
    HttpServer server(service);
    const int port = server.bind(serve_host, serve_port);
    if (port < 0) throw IoError("cannot bind", serve_host);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cout << "listening on http://" << serve_host << ':' << port << std::endl;
    server.listen();
    g_server = nullptr;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const vprgt::Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what();
    if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
    std::cerr << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
