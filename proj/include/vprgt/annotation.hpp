#pragma once

#include "vprgt/alignment.hpp"
#include "vprgt/groundtruth.hpp"
#include "vprgt/matching.hpp"
#include "vprgt/turning_points.hpp"

#include <filesystem>
#include <vector>

namespace vprgt {

/// Parameters shared by the automatic pipeline and annotation sessions.
struct AnnotationParams {
  double epsilon = 0.0;  // <= 0 selects 1% of each trajectory's length
  double angle_threshold_deg = 30.0;
  TransformModel model = TransformModel::affine;
  ProposalParams proposal;
};

struct Proposal {
  TurningPointSet tps_a;
  TurningPointSet tps_b;
  MatchList matches;
};

/// Detects turning points on both trajectories and proposes matches.
Proposal propose_pair(const Trajectory& a, const Trajectory& b, const AnnotationParams& params);

struct GroundTruth {
  AlignmentTransform transform;
  Trajectory aligned_a;
  std::vector<FramePair> frame_pairs;
};

/// Fits the A→B transform on accepted matches, aligns A and generates the
/// frame pairs. Throws DegenerateError with an actionable message when the
/// accepted matches cannot support the model.
GroundTruth build_ground_truth(const Trajectory& a, const Trajectory& b,
                               const TurningPointSet& tps_a, const TurningPointSet& tps_b,
                               const MatchList& matches, double duration_a, double duration_b,
                               TransformModel model);

/// Writes turning points, matches, transform, aligned A and the frame pair
/// manifest (`frame_pairs.csv`) into `dir`. Returns the file names written.
std::vector<std::string> write_pair_artifacts(const std::filesystem::path& dir,
                                              const TurningPointSet& tps_a,
                                              const TurningPointSet& tps_b,
                                              const MatchList& matches, const GroundTruth& truth);

}  // namespace vprgt
