#include "vprgt/annotation.hpp"

#include "vprgt/error.hpp"
#include "vprgt/json_io.hpp"

#include <fstream>

namespace vprgt {

Proposal propose_pair(const Trajectory& a, const Trajectory& b, const AnnotationParams& params) {
  const DetectionParams detection{params.epsilon, params.angle_threshold_deg};
  Proposal p{detect_turning_points(a, detection), detect_turning_points(b, detection), {}};
  p.matches = propose_matches(p.tps_a, p.tps_b, params.proposal);
  return p;
}

GroundTruth build_ground_truth(const Trajectory& a, const Trajectory& b,
                               const TurningPointSet& tps_a, const TurningPointSet& tps_b,
                               const MatchList& matches, double duration_a, double duration_b,
                               TransformModel model) {
  std::vector<PointPair> pairs;
  for (const auto& m : matches) {
    if (is_accepted(m.status)) pairs.push_back({tps_a[m.index_a].position, tps_b[m.index_b].position});
  }
  const AlignmentTransform transform = fit_transform(pairs, model);
  Trajectory aligned = align_trajectory(a, transform);
  const auto keyframes = accepted_keyframe_pairs(matches, tps_a, tps_b);
  auto frame_pairs = generate_frame_pairs(aligned, b, keyframes, duration_a, duration_b,
                                          AlignmentTransform::identity(model));
  return {transform, std::move(aligned), std::move(frame_pairs)};
}

std::vector<std::string> write_pair_artifacts(const std::filesystem::path& dir,
                                              const TurningPointSet& tps_a,
                                              const TurningPointSet& tps_b,
                                              const MatchList& matches, const GroundTruth& truth) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write artifact", (dir / name).string());
    return out;
  };
  {
    auto out = open("turning_points_a.json");
    out << to_json(tps_a).dump(2) << '\n';
  }
  {
    auto out = open("turning_points_b.json");
    out << to_json(tps_b).dump(2) << '\n';
  }
  {
    auto out = open("matches.txt");
    write_match_list(out, matches, tps_a, tps_b);
  }
  {
    auto out = open("transform.json");
    out << to_json(truth.transform).dump(2) << '\n';
  }
  save_trajectory(dir / "aligned_a.csv", truth.aligned_a, TrajectoryFormat::csv);
  save_frame_pair_manifest(dir / "frame_pairs.csv", truth.frame_pairs);
  return {"turning_points_a.json", "turning_points_b.json", "matches.txt", "transform.json",
          "aligned_a.csv", "frame_pairs.csv"};
}

}  // namespace vprgt
