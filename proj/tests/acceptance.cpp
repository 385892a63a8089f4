// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "fixtures.hpp"
#include "oracles/normal_equations.hpp"
#include "oracles/rdp_reference.hpp"
#include "oracles/recall_bruteforce.hpp"

#include "vprgt/alignment.hpp"
#include "vprgt/annotation.hpp"
#include "vprgt/error.hpp"
#include "vprgt/evaluation.hpp"
#include "vprgt/groundtruth.hpp"
#include "vprgt/json_io.hpp"
#include "vprgt/manifest.hpp"
#include "vprgt/pipeline.hpp"
#include "vprgt/session.hpp"
#include "vprgt/synthetic.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>

using namespace vprgt;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs of %.0fs", secs, budget_s);
  if (secs > budget_s) {
    o.pass = false;
    o.detail += "; over time budget";
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << o.detail << "; " << timing
            << "]" << std::endl;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome formula_fidelity() {
  if (frame_count(10, 8) != 16) return {false, "frame_count(10,8) != 16"};
  std::size_t checked = 0;
  for (int t1 = 1; t1 <= 60; ++t1) {
    for (int t2 = 1; t2 <= 60; ++t2) {
      const auto direct = static_cast<std::size_t>(2 * std::min(t1, t2));
      if (frame_count(t1, t2) != direct) {
        return {false, "mismatch at (" + std::to_string(t1) + "," + std::to_string(t2) + ")"};
      }
      ++checked;
    }
  }
  return {true, "frame_count(10,8)=16, " + std::to_string(checked) + " integer pairs exact"};
}

Outcome least_squares() {
  std::mt19937_64 rng(1001);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sigmas[] = {0.0, 0.01, 0.1};
  double worst_entry = 0.0, worst_rms = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = testing::uniform_index(rng, 3, 50);
    const double sigma = sigmas[trial % 3];
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 3; ++c) m(r, c) = testing::uniform(rng, -3, 3);
    }
    std::vector<PointPair> pairs;
    std::vector<oracle::Pair2> o;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 x(testing::uniform(rng, -50, 50), testing::uniform(rng, -50, 50));
      const Vec2 y = m.topLeftCorner<2, 2>() * x + m.topRightCorner<2, 1>() +
                     sigma * Vec2(noise(rng), noise(rng));
      pairs.push_back({x, y});
      o.push_back({x.x(), x.y(), y.x(), y.y()});
    }
    const auto fit = fit_transform(pairs, TransformModel::affine);
    const auto ref = oracle::affine(o);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 3; ++c) {
        worst_entry = std::max(worst_entry, std::abs(fit.matrix(r, c) - ref[r * 3 + c]));
      }
    }
    worst_rms = std::max(worst_rms, std::abs(fit.rms_residual - oracle::rms(ref, o)));
  }
  return {worst_entry <= 1e-6 && worst_rms <= 1e-9,
          "200 instances, max entry diff " + fmt("%.2e", worst_entry) + " (tol 1e-6), max rms diff " +
              fmt("%.2e", worst_rms) + " (tol 1e-9)"};
}

Outcome rdp_oracle() {
  std::mt19937_64 rng(1002);
  std::size_t vertices = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = testing::uniform_index(rng, 2, 200);
    std::vector<Vec2> pts;
    std::vector<oracle::P> ref_pts;
    Vec2 p(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
      p += Vec2(testing::uniform(rng, -5, 5), testing::uniform(rng, -5, 5));
      pts.push_back(p);
      ref_pts.push_back({p.x(), p.y()});
    }
    vertices += n;
    const double eps = testing::uniform(rng, 0.1, 10.0);
    const auto kept = rdp_simplify(pts, eps);
    if (kept != oracle::rdp(ref_pts, eps)) {
      return {false, "index mismatch on polyline " + std::to_string(trial)};
    }
    for (std::size_t s = 0; s + 1 < kept.size(); ++s) {
      for (std::size_t i = kept[s]; i <= kept[s + 1]; ++i) {
        if (oracle::seg_dist(ref_pts[i], ref_pts[kept[s]], ref_pts[kept[s + 1]]) > eps) {
          return {false, "deviation above epsilon on polyline " + std::to_string(trial)};
        }
      }
    }
  }
  return {true, "500 polylines (" + std::to_string(vertices) +
                    " vertices) identical to the recursive reference, deviation <= eps"};
}

double route_distance(const SyntheticRoute& route, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < route.corners.size(); ++i) {
    best = std::min(best, point_segment_distance(p, route.corners[i], route.corners[i + 1]));
  }
  return best;
}

struct PairRun {
  Proposal proposal;
  GroundTruth truth;
};

PairRun auto_run(const SyntheticPair& pair) {
  AnnotationParams params;
  auto proposal = propose_pair(pair.a.trajectory, pair.b.trajectory, params);
  const auto accepted = apply_correction(proposal.matches, AcceptAll{}, proposal.tps_a.size(),
                                         proposal.tps_b.size());
  auto truth = build_ground_truth(pair.a.trajectory, pair.b.trajectory, proposal.tps_a,
                                  proposal.tps_b, accepted, pair.duration_a, pair.duration_b,
                                  params.model);
  proposal.matches = accepted;
  return {std::move(proposal), std::move(truth)};
}

Outcome end_to_end() {
  // Noise-free: corners, residual and locations.
  const auto pair = make_synthetic_pair(default_pair_params(1, 6));
  const auto run = auto_run(pair);
  const auto kp = accepted_keyframe_pairs(run.proposal.matches, run.proposal.tps_a, run.proposal.tps_b);
  std::size_t recovered = 0;
  for (const auto& c : pair.truth.corners) {
    const bool found = std::any_of(kp.begin(), kp.end(), [&](const KeyframePair& p) {
      return std::abs(static_cast<long>(p.keyframe_a) - static_cast<long>(c.keyframe_a)) <= 2 &&
             std::abs(static_cast<long>(p.keyframe_b) - static_cast<long>(c.keyframe_b)) <= 2;
    });
    recovered += found ? 1 : 0;
  }
  double worst_route = 0.0;
  for (const auto& fp : run.truth.frame_pairs) {
    worst_route = std::max(worst_route, route_distance(pair.route, fp.location));
  }
  const bool clean_ok = recovered == pair.truth.corners.size() &&
                        run.truth.transform.rms_residual < 1e-6 && worst_route < 1e-6;

  // Noisy: pooled median of the distance to the true position at each B timestamp.
  std::vector<double> errors;
  std::size_t failed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto params = default_pair_params(seed, 6);
    const auto route = generate_route(params.route);
    params.noise_sigma = 0.005 * route.total_length;
    const auto noisy = make_synthetic_pair(params);
    try {
      const auto r = auto_run(noisy);
      for (const auto& fp : r.truth.frame_pairs) {
        const Vec2 truth = noisy.route.point_at_fraction(noisy.b.fraction_at_time(fp.timestamp_b));
        errors.push_back((fp.location - truth).norm() / params.noise_sigma);
      }
    } catch (const Error&) {
      ++failed;
    }
  }
  std::sort(errors.begin(), errors.end());
  const double median = errors.empty() ? INFINITY : errors[errors.size() / 2];
  const bool noisy_ok = failed == 0 && median < 2.0;

  return {clean_ok && noisy_ok,
          std::to_string(recovered) + "/" + std::to_string(pair.truth.corners.size()) +
              " corners within 2 keyframes, rms " + fmt("%.1e", run.truth.transform.rms_residual) +
              ", max route distance " + fmt("%.1e", worst_route) + "; noisy median error " +
              fmt("%.3f", median) + " sigma over 20 seeds (bound 2 sigma), " +
              std::to_string(failed) + " failed pairs"};
}

Outcome recall_oracle() {
  std::mt19937_64 rng(1005);
  const std::vector<int> ns{1, 5, 10, 20};
  const double thresholds[] = {1.0, 10.0, 100.0};
  std::size_t evaluations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LocalizedImage> queries, database;
    std::vector<oracle::Img> oq, od;
    std::vector<RetrievalResult> results;
    std::vector<oracle::Ranking> orank;
    const std::size_t nd = testing::uniform_index(rng, 1, 80);
    const std::size_t nq = testing::uniform_index(rng, 1, 60);
    const auto coord = [&] { return std::round(testing::uniform(rng, 0, 150)); };
    for (std::size_t i = 0; i < nd; ++i) {
      const Vec2 p(coord(), coord());
      database.push_back({"d" + std::to_string(i), "s", ImageRole::database, p});
      od.push_back({database.back().image_id, p.x(), p.y()});
    }
    for (std::size_t i = 0; i < nq; ++i) {
      const Vec2 p(coord(), coord());
      queries.push_back({"q" + std::to_string(i), "s", ImageRole::query, p});
      oq.push_back({queries.back().image_id, p.x(), p.y()});
      std::vector<std::string> ids;
      for (const auto& d : database) ids.push_back(d.image_id);
      std::shuffle(ids.begin(), ids.end(), rng);
      ids.resize(testing::uniform_index(rng, 1, ids.size()));
      results.push_back({queries.back().image_id, ids});
      orank.push_back({queries.back().image_id, ids});
    }
    std::vector<double> previous(ns.size(), -1.0);
    for (const double th : thresholds) {
      const auto got = recall_at_n(queries, database, results, ns, th);
      for (std::size_t k = 0; k < ns.size(); ++k) {
        ++evaluations;
        if (got[k] != oracle::recall(oq, od, orank, ns[k], th)) {
          return {false, "oracle mismatch in layout " + std::to_string(trial)};
        }
        if ((k > 0 && got[k] < got[k - 1]) || got[k] < previous[k]) {
          return {false, "monotonicity violated in layout " + std::to_string(trial)};
        }
      }
      previous = got;
    }
  }
  return {true, "100 layouts, " + std::to_string(evaluations) +
                    " recall values exact, monotone in N and threshold"};
}

Outcome weighted_avg() {
  const std::vector<SceneRecall> fixture{{50.0, 100}, {70.0, 300}};
  if (weighted_average(fixture) != 65.0) return {false, "fixture is not exactly 65"};
  std::mt19937_64 rng(1006);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<SceneRecall> scenes;
    long double num = 0, den = 0;
    for (std::size_t s = 0, n = testing::uniform_index(rng, 1, 13); s < n; ++s) {
      scenes.push_back({testing::uniform(rng, 0, 100), testing::uniform_index(rng, 1, 10000)});
      num += static_cast<long double>(scenes.back().recall) * scenes.back().count;
      den += scenes.back().count;
    }
    worst = std::max(worst, std::abs(weighted_average(scenes) - static_cast<double>(num / den)));
  }
  return {worst <= 1e-9, "fixture 65 exact, 1000 tables max diff " + fmt("%.1e", worst) + " (tol 1e-9)"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VPRGT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome service_equivalence() {
  testing::TempDir tmp;
  const auto input = tmp / "input";
  if (run_cli("synth pair --seed 4 --corners 6 --format csv --out " + input.string()) != 0) {
    return {false, "synth pair failed"};
  }
  const auto manifest_path = input / "manifest.json";
  if (run_cli("pipeline --auto-only --run-name eq --manifest " + manifest_path.string() +
              " --output-dir " + (tmp / "runs").string()) != 0) {
    return {false, "pipeline --auto-only failed"};
  }
  const auto manifest = load_manifest(manifest_path);
  AnnotationService service(tmp / "sessions");
  SessionRequest request;
  request.scene_id = manifest.scene_id;
  request.format = manifest.format;
  request.traj_a = manifest.visit("a").trajectory;
  request.traj_b = manifest.visit("b").trajectory;
  request.visit_a = "a";
  request.visit_b = "b";
  request.duration_a = manifest.visit("a").duration;
  request.duration_b = manifest.visit("b").duration;
  const auto s = service.create_session(request);
  service.submit_correction(s->session_id, {{"type", "accept_all"}}, s->version);
  service.finalize_session(s->session_id);
  const auto from_service = testing::read_file(service.artifact_path(s->session_id, "frame_pairs.csv"));
  const auto from_cli = testing::read_file(tmp / "runs" / "eq" / pair_dir_name("a", "b") / "frame_pairs.csv");
  const auto lines = std::count(from_cli.begin(), from_cli.end(), '\n');
  return {!from_cli.empty() && from_service == from_cli,
          "frame_pairs.csv " + std::string(from_service == from_cli ? "byte-identical" : "differs") +
              " (" + std::to_string(lines) + " lines)"};
}

Outcome audit_replay() {
  testing::TempDir tmp;
  std::mt19937_64 rng(1008);
  std::size_t actions = 0, rejected = 0;
  AnnotationService service(tmp / "sessions");
  std::vector<std::string> ids;
  for (int seq = 0; seq < 50; ++seq) {
    auto params = default_pair_params(100 + seq, 5 + seq % 4);
    params.noise_sigma = seq % 2 ? 0.3 : 0.0;
    const auto pair = make_synthetic_pair(params);
    const auto dir = tmp / ("in" + std::to_string(seq));
    std::filesystem::create_directories(dir);
    save_trajectory(dir / "a.csv", pair.a.trajectory, TrajectoryFormat::csv);
    save_trajectory(dir / "b.csv", pair.b.trajectory, TrajectoryFormat::csv);
    SessionRequest request;
    request.scene_id = "synthetic";
    request.traj_a = dir / "a.csv";
    request.traj_b = dir / "b.csv";
    request.duration_a = pair.duration_a;
    request.duration_b = pair.duration_b;
    const auto id = service.create_session(request)->session_id;
    ids.push_back(id);
    const std::size_t steps = testing::uniform_index(rng, 5, 30);
    for (std::size_t step = 0; step < steps; ++step) {
      const auto s = service.get(id);
      const auto m = testing::uniform_index(rng, 0, s->matches.size() - 1);
      const auto kb = testing::uniform_index(rng, 0, s->traj_b->size() - 1);
      try {
        switch (testing::uniform_index(rng, 0, 7)) {
          case 0: service.submit_correction(id, {{"type", "confirm"}, {"match", m}}, s->version); break;
          case 1: service.submit_correction(id, {{"type", "reject"}, {"match", m}}, s->version); break;
          case 2:
            service.submit_correction(id, {{"type", "reassign"}, {"match", m}, {"keyframe_b", kb}}, s->version);
            break;
          case 3:
            service.submit_correction(
                id, {{"type", "reassign"}, {"match", m}, {"index_b", testing::uniform_index(rng, 0, s->tps_b.size() - 1)}},
                s->version);
            break;
          case 4:
            service.submit_correction(id, {{"type", "add"}, {"index_a", s->matches[m].index_a}, {"keyframe_b", kb}},
                                      s->version);
            break;
          case 5: service.submit_correction(id, {{"type", "accept_all"}}, s->version); break;
          case 6: service.finalize_session(id, s->version); break;
          default: service.reopen_session(id, s->version); break;
        }
        ++actions;
      } catch (const Error&) {
        ++rejected;
      }
    }
  }
  AnnotationService reloaded(tmp / "sessions");
  for (const auto& id : ids) {
    const auto live = service.get(id);
    const auto replayed = replay(service.load_initial(id), service.load_log(id));
    const auto restored = reloaded.get(id);
    for (const auto* other : {&replayed, restored.get()}) {
      if (other->matches != live->matches || other->version != live->version ||
          other->status != live->status || to_json(other->tps_b) != to_json(live->tps_b)) {
        return {false, "replay diverged for session " + id};
      }
    }
  }
  return {true, "50 sequences, " + std::to_string(actions) + " logged actions (" +
                    std::to_string(rejected) + " invalid attempts refused), replay and reload exact"};
}

}  // namespace

int main() {
  criterion("formula fidelity: frame_count", 1, formula_fidelity);
  criterion("least-squares oracle", 10, least_squares);
  criterion("RDP oracle", 10, rdp_oracle);
  criterion("end-to-end synthetic recovery", 30, end_to_end);
  criterion("recall@N oracle", 5, recall_oracle);
  criterion("weighted average", 5, weighted_avg);
  criterion("service/library equivalence", 10, service_equivalence);
  criterion("audit replay", 60, audit_replay);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
