#include "support.hpp"

#include "vprgt/error.hpp"
#include "vprgt/matching.hpp"
#include "vprgt/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace vprgt;
using testing::make_trajectory;

namespace {

MatchList list(std::initializer_list<std::pair<std::size_t, std::size_t>> pairs,
               MatchStatus status = MatchStatus::proposed) {
  MatchList out;
  for (const auto& [a, b] : pairs) out.push_back({a, b, status});
  return out;
}

TurningPointSet set_from(const Trajectory& t, std::vector<std::pair<std::size_t, double>> interior) {
  const auto cumulative = cumulative_arc_length(t.positions());
  TurningPointSet s;
  s.visit_id = t.visit_id();
  s.trajectory_size = t.size();
  s.points.push_back(make_turning_point(t, cumulative, 0, std::nullopt, TurningPointOrigin::automatic));
  for (const auto& [k, angle] : interior) {
    s.points.push_back(make_turning_point(t, cumulative, k, angle, TurningPointOrigin::automatic));
  }
  s.points.push_back(
      make_turning_point(t, cumulative, t.size() - 1, std::nullopt, TurningPointOrigin::automatic));
  return s;
}

Trajectory straight(std::size_t n) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(static_cast<double>(i), 0.0);
  return make_trajectory(pts);
}

}  // namespace

TEST_CASE("identical sets match on the diagonal") {
  const auto t = straight(50);
  const auto s = set_from(t, {{10, 60}, {20, 90}, {35, 45}});
  const auto m = propose_matches(s, s);
  CHECK(m == list({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}}));
}

TEST_CASE("endpoint-only sets give two matches") {
  const auto t = straight(5);
  const auto s = set_from(t, {});
  CHECK(propose_matches(s, s) == list({{0, 0}, {1, 1}}));
}

TEST_CASE("sets without endpoints are rejected") {
  const auto t = straight(10);
  auto s = set_from(t, {{5, 90}});
  auto broken = s;
  broken.points.erase(broken.points.begin());
  CHECK_THROWS_AS(propose_matches(broken, s), ValidationError);
}

TEST_CASE("spurious turning point in a speed-warped traversal stays unmatched") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto params = default_pair_params(seed);
    params.profile_b = SpeedProfile::sinusoidal;
    const auto pair = make_synthetic_pair(params);
    const auto tps_a = detect_turning_points(pair.a.trajectory, {});
    auto tps_b = detect_turning_points(pair.b.trajectory, {});
    REQUIRE(tps_a.size() == pair.route.corners.size());
    REQUIRE(tps_b.size() == pair.route.corners.size());

    // Spurious point in the middle of the longest leg of B.
    std::size_t leg = 0;
    for (std::size_t l = 1; l < pair.route.leg_lengths.size(); ++l) {
      if (pair.route.leg_lengths[l] > pair.route.leg_lengths[leg]) leg = l;
    }
    const std::size_t k = (tps_b[leg].keyframe_index + tps_b[leg + 1].keyframe_index) / 2;
    const auto cumulative = cumulative_arc_length(pair.b.trajectory.positions());
    tps_b.points.insert(tps_b.points.begin() + static_cast<long>(leg) + 1,
                        make_turning_point(pair.b.trajectory, cumulative, k, 40.0,
                                           TurningPointOrigin::automatic));

    const auto m = propose_matches(tps_a, tps_b);
    REQUIRE(m.size() == pair.route.corners.size());
    for (std::size_t c = 0; c < m.size(); ++c) {
      CHECK(m[c].index_a == c);
      CHECK(m[c].index_b == (c <= leg ? c : c + 1));
      CHECK(std::abs(static_cast<long>(tps_a[m[c].index_a].keyframe_index) -
                     static_cast<long>(pair.truth.corners[c].keyframe_a)) <= 2);
      CHECK(std::abs(static_cast<long>(tps_b[m[c].index_b].keyframe_index) -
                     static_cast<long>(pair.truth.corners[c].keyframe_b)) <= 2);
    }
  }
}

TEST_CASE("proposals are invariant to time rescaling") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pair = make_synthetic_pair(default_pair_params(200 + trial));
    std::vector<Keyframe> slow;
    for (const auto& kf : pair.a.trajectory.keyframes()) {
      slow.push_back({kf.timestamp * 3.7, kf.position, std::nullopt});
    }
    const Trajectory a2("s", "a", slow);
    const auto tb = detect_turning_points(pair.b.trajectory, {});
    const auto m1 = propose_matches(detect_turning_points(pair.a.trajectory, {}), tb);
    const auto m2 = propose_matches(detect_turning_points(a2, {}), tb);
    CHECK(m1 == m2);
  }
}

TEST_CASE("reassign within neighbours is accepted") {
  const auto base = list({{0, 0}, {1, 1}, {2, 3}, {3, 4}, {4, 7}, {5, 8}});
  const auto out = apply_correction(base, Reassign{3, 5}, 6, 9);
  CHECK(out[3] == TurningPointMatch{3, 5, MatchStatus::corrected});
  CHECK(out[2].status == MatchStatus::proposed);
}

TEST_CASE("reassign breaking order names the conflicting pair") {
  const auto base = list({{0, 0}, {1, 1}, {2, 3}, {3, 4}, {4, 7}, {5, 8}});
  try {
    apply_correction(base, Reassign{3, 2}, 6, 9);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("(2,3)") != std::string::npos);
    CHECK(e.detail() == "(2,3)");
  }
}

TEST_CASE("reassign to the same index confirms") {
  const auto base = list({{0, 0}, {1, 2}, {2, 3}});
  CHECK(apply_correction(base, Reassign{1, 2}, 3, 4)[1].status == MatchStatus::confirmed);
}

TEST_CASE("endpoints cannot be reassigned or rejected") {
  const auto base = list({{0, 0}, {1, 1}, {2, 2}});
  CHECK_THROWS_AS(apply_correction(base, Reassign{0, 1}, 3, 3), ValidationError);
  CHECK_THROWS_AS(apply_correction(base, RejectPair{2}, 3, 3), ValidationError);
  CHECK(apply_correction(base, Reassign{0, 0}, 3, 3)[0].status == MatchStatus::confirmed);
}

TEST_CASE("reject then re-add restores the pair") {
  const auto base = list({{0, 0}, {1, 1}, {2, 3}, {3, 4}});
  const auto rejected = apply_correction(base, RejectPair{2}, 4, 5);
  CHECK(rejected[2].status == MatchStatus::rejected);
  CHECK_THROWS_AS(apply_correction(rejected, RejectPair{2}, 4, 5), ValidationError);
  const auto readded = apply_correction(rejected, AddPair{2, 3}, 4, 5);
  REQUIRE(readded.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(readded[i].index_a == base[i].index_a);
    CHECK(readded[i].index_b == base[i].index_b);
  }
  CHECK(readded[2].status == MatchStatus::confirmed);
}

TEST_CASE("adding a pair for an already matched point is rejected") {
  const auto base = list({{0, 0}, {1, 1}, {3, 3}});
  CHECK_THROWS_AS(apply_correction(base, AddPair{1, 2}, 4, 4), ValidationError);
  const auto added = apply_correction(base, AddPair{2, 2}, 4, 4);
  CHECK(added == MatchList{{0, 0, MatchStatus::proposed}, {1, 1, MatchStatus::proposed},
                           {2, 2, MatchStatus::confirmed}, {3, 3, MatchStatus::proposed}});
  CHECK_THROWS_AS(apply_correction(base, AddPair{2, 1}, 4, 4), ValidationError);
  CHECK_THROWS_AS(apply_correction(base, AddPair{2, 9}, 4, 4), ValidationError);
}

TEST_CASE("rejected entries do not constrain ordering") {
  auto base = list({{0, 0}, {1, 1}, {2, 2}, {3, 5}});
  base = apply_correction(base, RejectPair{2}, 4, 6);
  const auto out = apply_correction(base, Reassign{1, 3}, 4, 6);
  CHECK(out[1] == TurningPointMatch{1, 3, MatchStatus::corrected});
}

TEST_CASE("accept all confirms proposals and keeps other statuses") {
  auto base = list({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  base = apply_correction(base, RejectPair{1}, 4, 4);
  base = apply_correction(base, Reassign{2, 2}, 4, 4);
  const auto out = apply_correction(base, AcceptAll{}, 4, 4);
  CHECK(out[0].status == MatchStatus::confirmed);
  CHECK(out[1].status == MatchStatus::rejected);
  CHECK(out[2].status == MatchStatus::confirmed);
}

TEST_CASE("random corrections never produce a non-monotonic list") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t na = testing::uniform_index(rng, 2, 12);
    const std::size_t nb = testing::uniform_index(rng, 2, 12);
    MatchList m = list({{0, 0}, {na - 1, nb - 1}});
    for (int step = 0; step < 30; ++step) {
      Correction c;
      switch (testing::uniform_index(rng, 0, 3)) {
        case 0: c = Reassign{testing::uniform_index(rng, 0, m.size()), testing::uniform_index(rng, 0, nb)}; break;
        case 1: c = RejectPair{testing::uniform_index(rng, 0, m.size())}; break;
        case 2: c = AddPair{testing::uniform_index(rng, 0, na), testing::uniform_index(rng, 0, nb)}; break;
        default: c = AcceptAll{}; break;
      }
      const MatchList before = m;
      try {
        m = apply_correction(m, c, na, nb);
      } catch (const ValidationError&) {
        CHECK(m == before);
      }
      CHECK_NOTHROW(validate_match_list(m, na, nb));
      std::size_t last_b = 0;
      bool first = true;
      for (const auto& x : m) {
        if (!is_active(x.status)) continue;
        if (!first) CHECK(x.index_b > last_b);
        last_b = x.index_b;
        first = false;
      }
    }
  }
}

TEST_CASE("match files round-trip") {
  const auto t = straight(30);
  const auto s = set_from(t, {{10, 90}, {20, 45}});
  auto m = propose_matches(s, s);
  m = apply_correction(m, RejectPair{1}, s.size(), s.size());
  m = apply_correction(m, AcceptAll{}, s.size(), s.size());
  std::stringstream text;
  write_match_list(text, m, s, s);
  const auto records = read_match_list(text);
  REQUIRE(records.size() == m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(records[i].match == m[i]);
    CHECK(records[i].keyframe_a == s[m[i].index_a].keyframe_index);
    CHECK(records[i].timestamp_b == s[m[i].index_b].timestamp);
  }
  CHECK(keyframe_pairs(records) == accepted_keyframe_pairs(m, s, s));
  CHECK(keyframe_pairs(records).size() == 3);

  std::istringstream bad("0 0 confirmed 0 0 0\n");
  CHECK_THROWS_AS(read_match_list(bad), ParseError);
  std::istringstream bad_status("0 0 maybe 0 0 0 0\n");
  CHECK_THROWS_AS(read_match_list(bad_status), ParseError);
}
