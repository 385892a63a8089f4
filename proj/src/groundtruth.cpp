#include "vprgt/groundtruth.hpp"

#include "vprgt/error.hpp"
#include "vprgt/spline.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace vprgt {

std::vector<SegmentPair> split_segments(std::span<const KeyframePair> matches,
                                        const Trajectory& traj_a, const Trajectory& traj_b,
                                        double duration_a, double duration_b) {
  if (matches.size() < 2) {
    throw ValidationError("need at least the two endpoint matches to split segments");
  }
  if (matches.front() != KeyframePair{0, 0} ||
      matches.back() != KeyframePair{traj_a.size() - 1, traj_b.size() - 1}) {
    throw ValidationError("segment split requires the endpoint matches to be accepted");
  }
  for (std::size_t k = 1; k < matches.size(); ++k) {
    if (matches[k].keyframe_a <= matches[k - 1].keyframe_a ||
        matches[k].keyframe_b <= matches[k - 1].keyframe_b) {
      throw ValidationError("matched keyframes must increase in both trajectories (match " +
                            std::to_string(k) + ")");
    }
  }
  if (duration_a < traj_a.back().timestamp || duration_b < traj_b.back().timestamp) {
    throw ValidationError("video duration shorter than the trajectory");
  }

  std::vector<SegmentPair> segments;
  segments.reserve(matches.size() - 1);
  for (std::size_t k = 0; k + 1 < matches.size(); ++k) {
    SegmentPair s;
    s.index = k;
    s.start = matches[k];
    s.end = matches[k + 1];
    s.t_a_start = k == 0 ? 0.0 : traj_a[s.start.keyframe_a].timestamp;
    s.t_b_start = k == 0 ? 0.0 : traj_b[s.start.keyframe_b].timestamp;
    const bool last = k + 2 == matches.size();
    s.t_a_end = last ? duration_a : traj_a[s.end.keyframe_a].timestamp;
    s.t_b_end = last ? duration_b : traj_b[s.end.keyframe_b].timestamp;
    if (!(s.t_a_end > s.t_a_start) || !(s.t_b_end > s.t_b_start)) {
      throw ValidationError("segment " + std::to_string(k) + " has zero duration");
    }
    segments.push_back(s);
  }
  return segments;
}

std::size_t frame_count(double t1, double t2) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) {
    throw ValidationError("segment durations must be positive");
  }
  const double n = std::floor(2.0 * std::min(t1, t2));
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

std::vector<std::pair<double, double>> sample_frame_timestamps(const SegmentPair& segment,
                                                               std::size_t n) {
  if (n == 0) throw ValidationError("frame count must be at least 1");
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  const double da = segment.duration_a();
  const double db = segment.duration_b();
  for (std::size_t i = 0; i < n; ++i) {
    const double f = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out.emplace_back(segment.t_a_start + f * da, segment.t_b_start + f * db);
  }
  return out;
}

namespace {

std::vector<FramePair> segment_frame_pairs(const SegmentPair& segment, const Trajectory& traj_a,
                                           const Trajectory& traj_b,
                                           const AlignmentTransform& transform) {
  const std::size_t n = frame_count(segment.duration_a(), segment.duration_b());
  const auto stamps = sample_frame_timestamps(segment, n);

  std::vector<Vec2> reference;
  for (std::size_t k = segment.start.keyframe_b; k <= segment.end.keyframe_b; ++k) {
    reference.push_back(traj_b[k].position);
  }

  std::vector<Vec2> locations;
  bool fallback = false;
  try {
    locations = interpolate_even(fit_bspline(reference), n);
  } catch (const DegenerateError&) {
    fallback = true;
    const Vec2 from = 0.5 * (traj_b[segment.start.keyframe_b].position +
                             transform.apply(traj_a[segment.start.keyframe_a].position));
    const Vec2 to = 0.5 * (traj_b[segment.end.keyframe_b].position +
                           transform.apply(traj_a[segment.end.keyframe_a].position));
    for (std::size_t i = 0; i < n; ++i) {
      const double f = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      locations.push_back(from + f * (to - from));
    }
  }

  std::vector<FramePair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({stamps[i].first, stamps[i].second, locations[i], segment.index, i, fallback});
  }
  return out;
}

}  // namespace

std::vector<FramePair> generate_frame_pairs(const Trajectory& traj_a, const Trajectory& traj_b,
                                            std::span<const KeyframePair> matches,
                                            double duration_a, double duration_b,
                                            const AlignmentTransform& transform, Exec exec) {
  const auto segments = split_segments(matches, traj_a, traj_b, duration_a, duration_b);
  std::vector<std::vector<FramePair>> per_segment(segments.size());

  if (exec == Exec::serial) {
    for (std::size_t s = 0; s < segments.size(); ++s) {
      per_segment[s] = segment_frame_pairs(segments[s], traj_a, traj_b, transform);
    }
  } else {
    std::exception_ptr failure;
    const auto count = static_cast<std::ptrdiff_t>(segments.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      try {
        per_segment[static_cast<std::size_t>(s)] =
            segment_frame_pairs(segments[static_cast<std::size_t>(s)], traj_a, traj_b, transform);
      } catch (...) {
#pragma omp critical(vprgt_frame_pair_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<FramePair> out;
  for (auto& chunk : per_segment) out.insert(out.end(), chunk.begin(), chunk.end());
  return out;
}

void write_frame_pair_manifest(std::ostream& out, std::span<const FramePair> pairs) {
  out << "segment,idx,timestamp_a,timestamp_b,x,y,fallback_flag\n";
  for (const auto& p : pairs) {
    out << p.segment << ',' << p.index << ',' << format_number(p.timestamp_a) << ','
        << format_number(p.timestamp_b) << ',' << format_number(p.location.x()) << ','
        << format_number(p.location.y()) << ',' << (p.fallback ? 1 : 0) << '\n';
  }
}

void save_frame_pair_manifest(const std::filesystem::path& path, std::span<const FramePair> pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write frame pair manifest", path.string());
  write_frame_pair_manifest(out, pairs);
}

std::vector<FramePair> read_frame_pair_manifest(std::istream& in) {
  std::vector<FramePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "segment,idx,timestamp_a,timestamp_b,x,y,fallback_flag") {
        throw ParseError("frame pair manifest: unexpected header");
      }
      continue;
    }
    if (line.empty()) continue;
    std::istringstream fields(line);
    FramePair p;
    char c1, c2, c3, c4, c5, c6;
    double x = 0.0, y = 0.0;
    int flag = 0;
    if (!(fields >> p.segment >> c1 >> p.index >> c2 >> p.timestamp_a >> c3 >> p.timestamp_b >>
          c4 >> x >> c5 >> y >> c6 >> flag) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || c6 != ',') {
      throw ParseError("frame pair manifest line " + std::to_string(line_no) + " malformed");
    }
    p.location = Vec2(x, y);
    p.fallback = flag != 0;
    pairs.push_back(p);
  }
  return pairs;
}

}  // namespace vprgt
