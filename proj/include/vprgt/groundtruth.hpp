#pragma once

#include "vprgt/alignment.hpp"
#include "vprgt/geometry.hpp"
#include "vprgt/matching.hpp"
#include "vprgt/trajectory.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace vprgt {

/// A pair of corresponding video segments bounded by two consecutive
/// matched turning points.
struct SegmentPair {
  std::size_t index = 0;
  KeyframePair start;
  KeyframePair end;
  double t_a_start = 0.0;
  double t_a_end = 0.0;
  double t_b_start = 0.0;
  double t_b_end = 0.0;

  double duration_a() const { return t_a_end - t_a_start; }
  double duration_b() const { return t_b_end - t_b_start; }
};

/// Splits both videos at the matched turning-point timestamps. The first
/// segment starts at 0 and the last ends at the video duration. `matches`
/// must start with the (0, 0) endpoint pair, end with the two last
/// keyframes, and increase strictly in both indices.
std::vector<SegmentPair> split_segments(std::span<const KeyframePair> matches,
                                        const Trajectory& traj_a, const Trajectory& traj_b,
                                        double duration_a, double duration_b);

/// floor(2 min(T1, T2)), at least 1. Throws on non-positive durations.
std::size_t frame_count(double t1, double t2);

/// Midpoints of the n equal parts of each segment, as (timestamp_a, timestamp_b).
std::vector<std::pair<double, double>> sample_frame_timestamps(const SegmentPair& segment,
                                                               std::size_t n);

struct FramePair {
  double timestamp_a = 0.0;
  double timestamp_b = 0.0;
  Vec2 location = Vec2::Zero();  // reference (B) frame
  std::size_t segment = 0;
  std::size_t index = 0;  // within segment
  bool fallback = false;  // straight-line location, spline was degenerate

  bool operator==(const FramePair&) const = default;
};

/// Full frame-pair generation. Locations come from a B-spline through the
/// reference keyframes of each segment; segments run independently and
/// in parallel under Exec::parallel. `transform` maps A into B and is used
/// for the straight-line fallback only.
std::vector<FramePair> generate_frame_pairs(const Trajectory& traj_a, const Trajectory& traj_b,
                                            std::span<const KeyframePair> matches,
                                            double duration_a, double duration_b,
                                            const AlignmentTransform& transform,
                                            Exec exec = Exec::parallel);

/// CSV `segment,idx,timestamp_a,timestamp_b,x,y,fallback_flag`.
void write_frame_pair_manifest(std::ostream& out, std::span<const FramePair> pairs);
void save_frame_pair_manifest(const std::filesystem::path& path, std::span<const FramePair> pairs);
std::vector<FramePair> read_frame_pair_manifest(std::istream& in);

}  // namespace vprgt
