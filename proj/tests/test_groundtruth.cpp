#include "support.hpp"

#include "vprgt/error.hpp"
#include "vprgt/groundtruth.hpp"
#include "vprgt/spline.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace vprgt;
using testing::make_trajectory;

namespace {

Trajectory line_traj(std::size_t n, double dt = 1.0, double y = 0.0) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(static_cast<double>(i), y);
  return make_trajectory(pts, dt);
}

Trajectory random_walk(std::mt19937_64& rng, std::size_t n) {
  std::vector<Vec2> pts{Vec2(0, 0)};
  for (std::size_t i = 1; i < n; ++i) {
    pts.push_back(pts.back() + Vec2(testing::uniform(rng, 0.2, 1.5), testing::uniform(rng, -1, 1)));
  }
  std::vector<Keyframe> kfs;
  double t = 0.0;
  for (const auto& p : pts) {
    kfs.push_back({t, p, std::nullopt});
    t += testing::uniform(rng, 0.2, 2.0);
  }
  return Trajectory("s", "v", kfs);
}

std::vector<KeyframePair> random_matches(std::mt19937_64& rng, std::size_t na, std::size_t nb) {
  std::vector<KeyframePair> m{{0, 0}};
  const std::size_t inner = testing::uniform_index(rng, 0, std::min(na, nb) / 3);
  std::vector<std::size_t> ia, ib;
  for (std::size_t i = 1; i + 1 < na; ++i) ia.push_back(i);
  for (std::size_t i = 1; i + 1 < nb; ++i) ib.push_back(i);
  std::shuffle(ia.begin(), ia.end(), rng);
  std::shuffle(ib.begin(), ib.end(), rng);
  ia.resize(inner);
  ib.resize(inner);
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  for (std::size_t k = 0; k < inner; ++k) m.push_back({ia[k], ib[k]});
  m.push_back({na - 1, nb - 1});
  return m;
}

}  // namespace

TEST_CASE("frame_count examples") {
  CHECK(frame_count(10, 8) == 16);
  CHECK(frame_count(1, 1) == 2);
  CHECK(frame_count(0.2, 5) == 1);
  CHECK(frame_count(2.74, 9) == 5);
  CHECK_THROWS_AS(frame_count(0, 5), ValidationError);
  CHECK_THROWS_AS(frame_count(3, -1), ValidationError);
}

TEST_CASE("single endpoint segment spans both videos") {
  const auto a = line_traj(6, 2.0);   // last keyframe at 10 s
  const auto b = line_traj(7, 2.0);   // last keyframe at 12 s
  const std::vector<KeyframePair> m{{0, 0}, {5, 6}};
  const auto segs = split_segments(m, a, b, 10.0, 12.0);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].duration_a() == 10.0);
  CHECK(segs[0].duration_b() == 12.0);
}

TEST_CASE("segments split at matched timestamps") {
  const auto a = line_traj(11);  // 0..10 s
  const auto b = line_traj(13);  // 0..12 s
  const std::vector<KeyframePair> m{{0, 0}, {4, 5}, {10, 12}};
  const auto segs = split_segments(m, a, b, 10.0, 12.0);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].duration_a() == 4.0);
  CHECK(segs[0].duration_b() == 5.0);
  CHECK(segs[1].duration_a() == 6.0);
  CHECK(segs[1].duration_b() == 7.0);
}

TEST_CASE("split_segments validation") {
  const auto a = line_traj(5);
  const auto b = line_traj(5);
  CHECK_THROWS_AS(split_segments(std::vector<KeyframePair>{{0, 0}}, a, b, 4, 4), ValidationError);
  CHECK_THROWS_AS(split_segments(std::vector<KeyframePair>{{0, 0}, {3, 4}}, a, b, 4, 4),
                  ValidationError);
  CHECK_THROWS_AS(split_segments(std::vector<KeyframePair>{{0, 0}, {2, 2}, {2, 3}, {4, 4}}, a, b, 4, 4),
                  ValidationError);
  CHECK_THROWS_AS(split_segments(std::vector<KeyframePair>{{0, 0}, {4, 4}}, a, b, 3.5, 4),
                  ValidationError);
}

TEST_CASE("segments tile both videos") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_walk(rng, testing::uniform_index(rng, 2, 40));
    const auto b = random_walk(rng, testing::uniform_index(rng, 2, 40));
    const double da = a.back().timestamp + testing::uniform(rng, 0, 3);
    const double db = b.back().timestamp + testing::uniform(rng, 0, 3);
    const auto m = random_matches(rng, a.size(), b.size());
    const auto segs = split_segments(m, a, b, da, db);
    REQUIRE(segs.size() == m.size() - 1);
    long double sum_a = 0, sum_b = 0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      if (k > 0) {
        CHECK(segs[k].t_a_start == segs[k - 1].t_a_end);
        CHECK(segs[k].t_b_start == segs[k - 1].t_b_end);
      }
      sum_a += segs[k].duration_a();
      sum_b += segs[k].duration_b();
    }
    CHECK(segs.front().t_a_start == 0.0);
    CHECK(segs.back().t_a_end == da);
    CHECK(segs.back().t_b_end == db);
    CHECK(std::abs(static_cast<double>(sum_a) - da) < 1e-9);
    CHECK(std::abs(static_cast<double>(sum_b) - db) < 1e-9);
  }
}

TEST_CASE("sample_frame_timestamps uses part midpoints") {
  SegmentPair s;
  s.t_a_end = 4.0;
  s.t_b_end = 8.0;
  const auto two = sample_frame_timestamps(s, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == std::make_pair(1.0, 2.0));
  CHECK(two[1] == std::make_pair(3.0, 6.0));
  const auto one = sample_frame_timestamps(s, 1);
  CHECK(one[0] == std::make_pair(2.0, 4.0));
  CHECK_THROWS_AS(sample_frame_timestamps(s, 0), ValidationError);

  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    SegmentPair r;
    r.t_a_start = testing::uniform(rng, 0, 100);
    r.t_a_end = r.t_a_start + testing::uniform(rng, 0.1, 50);
    r.t_b_start = testing::uniform(rng, 0, 100);
    r.t_b_end = r.t_b_start + testing::uniform(rng, 0.1, 50);
    const auto n = testing::uniform_index(rng, 1, 60);
    const auto ts = sample_frame_timestamps(r, n);
    for (std::size_t i = 1; i < n; ++i) {
      CHECK(std::abs((ts[i].first - ts[i - 1].first) - r.duration_a() / n) < 1e-9);
      CHECK(std::abs((ts[i].second - ts[i - 1].second) - r.duration_b() / n) < 1e-9);
    }
  }
}

TEST_CASE("two-point spline is the segment") {
  const std::vector<Vec2> pts{Vec2(0, 0), Vec2(2, 4)};
  const auto c = fit_bspline(pts);
  CHECK(c.degree() == 1);
  CHECK((c.evaluate(0.5) - Vec2(1, 2)).norm() < 1e-12);
}

TEST_CASE("spline reproduces lines and endpoints") {
  std::vector<Vec2> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(1.0 + 2.0 * i, -3.0 + 0.5 * i);
  const auto c = fit_bspline(pts);
  CHECK(c.degree() == 3);
  for (int k = 0; k <= 100; ++k) {
    const Vec2 p = c.evaluate(k / 100.0);
    CHECK(std::abs((p.y() + 3.0) - 0.25 * (p.x() - 1.0)) < 1e-6);
  }
  CHECK((c.evaluate(0) - pts.front()).norm() < 1e-6);
  CHECK((c.evaluate(1) - pts.back()).norm() < 1e-6);

  const auto even = interpolate_even(fit_bspline(std::vector<Vec2>{Vec2(0, 0), Vec2(4, 0)}), 2);
  CHECK((even[0] - Vec2(1, 0)).norm() < 1e-12);
  CHECK((even[1] - Vec2(3, 0)).norm() < 1e-12);
  CHECK((interpolate_even(c, 1)[0] - c.evaluate(0.5)).norm() == 0.0);
}

TEST_CASE("spline collapses duplicates and rejects identical points") {
  const std::vector<Vec2> dup{Vec2(0, 0), Vec2(0, 0), Vec2(1, 1), Vec2(1, 1), Vec2(2, 0)};
  const auto c = fit_bspline(dup);
  CHECK(c.degree() == 2);
  CHECK((c.evaluate(1) - Vec2(2, 0)).norm() < 1e-9);
  const std::vector<Vec2> same{Vec2(3, 3), Vec2(3, 3), Vec2(3, 3)};
  CHECK_THROWS_AS(fit_bspline(same), DegenerateError);
  const std::vector<Vec2> one{Vec2(3, 3)};
  CHECK_THROWS_AS(fit_bspline(one), ValidationError);
}

TEST_CASE("quarter circle: spline stays on the circle and spacing is even") {
  std::vector<Vec2> pts;
  for (int i = 0; i < 20; ++i) {
    const double a = (std::numbers::pi / 2) * i / 19.0;
    pts.emplace_back(std::cos(a), std::sin(a));
  }
  const auto c = fit_bspline(pts);
  for (int k = 0; k <= 99; ++k) {
    CHECK(std::abs(c.evaluate(k / 99.0).norm() - 1.0) < 5e-3);
  }
  const auto even = interpolate_even(c, 50);
  double lo = 1e9, hi = 0;
  for (std::size_t i = 1; i < even.size(); ++i) {
    const double d = (even[i] - even[i - 1]).norm();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK(hi <= 1.1 * lo);
}

TEST_CASE("straight two-second pair gives four even collinear frames") {
  const auto a = line_traj(3);  // 0, 1, 2 s
  const auto b = line_traj(3);
  const std::vector<KeyframePair> m{{0, 0}, {2, 2}};
  const auto fp = generate_frame_pairs(a, b, m, 2.0, 2.0, AlignmentTransform::identity());
  REQUIRE(fp.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(fp[i].location.y()) < 1e-12);
    CHECK(std::abs(fp[i].location.x() - (0.25 + 0.5 * i)) < 1e-9);
    CHECK(fp[i].timestamp_a == fp[i].timestamp_b);
    CHECK_FALSE(fp[i].fallback);
  }
}

TEST_CASE("segments of 10/8 and 6/7 seconds give 28 frame pairs") {
  const auto a = line_traj(17);  // 0..16 s
  const auto b = line_traj(16);  // 0..15 s
  const std::vector<KeyframePair> m{{0, 0}, {10, 8}, {16, 15}};
  const auto fp = generate_frame_pairs(a, b, m, 16.0, 15.0, AlignmentTransform::identity());
  CHECK(fp.size() == 28);
  CHECK(std::count_if(fp.begin(), fp.end(), [](const auto& f) { return f.segment == 0; }) == 16);
}

TEST_CASE("frame pair counts, ordering and bounds on random inputs") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_walk(rng, testing::uniform_index(rng, 2, 40));
    const auto b = random_walk(rng, testing::uniform_index(rng, 2, 40));
    const double da = a.back().timestamp + testing::uniform(rng, 0, 3);
    const double db = b.back().timestamp + testing::uniform(rng, 0, 3);
    const auto m = random_matches(rng, a.size(), b.size());
    const auto segs = split_segments(m, a, b, da, db);
    const auto fp = generate_frame_pairs(a, b, m, da, db, AlignmentTransform::identity());
    std::size_t expected = 0;
    for (const auto& s : segs) expected += frame_count(s.duration_a(), s.duration_b());
    REQUIRE(fp.size() == expected);
    for (std::size_t i = 0; i < fp.size(); ++i) {
      const auto& s = segs[fp[i].segment];
      CHECK(fp[i].timestamp_a >= s.t_a_start);
      CHECK(fp[i].timestamp_a <= s.t_a_end);
      CHECK(fp[i].timestamp_b >= s.t_b_start);
      CHECK(fp[i].timestamp_b <= s.t_b_end);
      CHECK(std::isfinite(fp[i].location.x()));
      if (i > 0) {
        CHECK(fp[i].timestamp_a > fp[i - 1].timestamp_a);
        CHECK(fp[i].timestamp_b > fp[i - 1].timestamp_b);
      }
    }
    CHECK(fp == generate_frame_pairs(a, b, m, da, db, AlignmentTransform::identity(), Exec::serial));
  }
}

TEST_CASE("identity pair: equal timestamps and locations on its own spline") {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = random_walk(rng, 30);
    const std::vector<KeyframePair> m{{0, 0}, {10, 10}, {29, 29}};
    const double d = t.back().timestamp + 1.0;
    const auto fp = generate_frame_pairs(t, t, m, d, d, AlignmentTransform::identity());
    const auto segs = split_segments(m, t, t, d, d);
    for (const auto& f : fp) {
      CHECK(f.timestamp_a == f.timestamp_b);
      const auto& s = segs[f.segment];
      std::vector<Vec2> ref;
      for (std::size_t k = s.start.keyframe_b; k <= s.end.keyframe_b; ++k) ref.push_back(t[k].position);
      const auto n = frame_count(s.duration_a(), s.duration_b());
      const Vec2 on_curve = fit_bspline(ref).evaluate((f.index + 0.5) / static_cast<double>(n));
      CHECK((f.location - on_curve).norm() < 1e-12);
    }
  }
}

TEST_CASE("locations are frame-consistent") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_walk(rng, 25);
    const auto b = random_walk(rng, 25);
    const auto m = random_matches(rng, a.size(), b.size());
    const double da = a.back().timestamp + 0.5, db = b.back().timestamp + 0.5;
    const double theta = testing::uniform(rng, -3, 3);
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    r.topLeftCorner<2, 2>() << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    r(0, 2) = testing::uniform(rng, -10, 10);
    r(1, 2) = testing::uniform(rng, -10, 10);
    AlignmentTransform rt;
    rt.matrix = r;

    // A expressed in another frame with the transform compensating for it.
    AlignmentTransform back = rt.inverse();
    const auto base = generate_frame_pairs(a, b, m, da, db, AlignmentTransform::identity());
    const auto moved_a = generate_frame_pairs(align_trajectory(a, rt), b, m, da, db, back);
    CHECK(base == moved_a);

    // Everything moved together: locations move rigidly with it.
    const auto moved = generate_frame_pairs(align_trajectory(a, rt), align_trajectory(b, rt), m, da,
                                            db, AlignmentTransform::identity());
    REQUIRE(moved.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK((moved[i].location - rt.apply(base[i].location)).norm() < 1e-9);
    }
  }
}

TEST_CASE("stationary reference segment falls back to the straight line") {
  std::vector<Keyframe> a{{0, Vec2(0, 0), {}}, {1, Vec2(1, 0), {}}, {2, Vec2(2, 0), {}}};
  std::vector<Keyframe> b{{0, Vec2(5, 5), {}}, {1, Vec2(5, 5), {}}, {2, Vec2(5, 5), {}}};
  const Trajectory ta("s", "a", a), tb("s", "b", b);
  const std::vector<KeyframePair> m{{0, 0}, {2, 2}};
  const auto fp = generate_frame_pairs(ta, tb, m, 2.0, 2.0, AlignmentTransform::identity());
  REQUIRE(fp.size() == 4);
  for (const auto& f : fp) CHECK(f.fallback);
  CHECK((fp[0].location - Vec2(2.5 + 0.125, 2.5)).norm() < 1e-12);
}

TEST_CASE("frame pair manifest round-trips") {
  std::mt19937_64 rng(56);
  const auto a = random_walk(rng, 20);
  const auto b = random_walk(rng, 20);
  const std::vector<KeyframePair> m{{0, 0}, {7, 9}, {19, 19}};
  const auto fp = generate_frame_pairs(a, b, m, a.back().timestamp, b.back().timestamp,
                                       AlignmentTransform::identity());
  std::stringstream text;
  write_frame_pair_manifest(text, fp);
  CHECK(text.str().rfind("segment,idx,timestamp_a,timestamp_b,x,y,fallback_flag\n", 0) == 0);
  CHECK(read_frame_pair_manifest(text) == fp);
  std::istringstream bad("nope\n");
  CHECK_THROWS_AS(read_frame_pair_manifest(bad), ParseError);
}
