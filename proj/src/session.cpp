#include "vprgt/session.hpp"

#include "vprgt/error.hpp"
#include "vprgt/json_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace vprgt {

using nlohmann::json;
namespace fs = std::filesystem;

struct AnnotationService::Entry {
  std::mutex write_mutex;
  mutable std::mutex snapshot_mutex;
  std::shared_ptr<const AnnotationSession> snapshot;

  std::shared_ptr<const AnnotationSession> load() const {
    std::lock_guard lock(snapshot_mutex);
    return snapshot;
  }
  void store(std::shared_ptr<const AnnotationSession> next) {
    std::lock_guard lock(snapshot_mutex);
    snapshot = std::move(next);
  }
};

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json params_to_json(const AnnotationParams& p) {
  return {{"epsilon", p.epsilon},
          {"angle_threshold_deg", p.angle_threshold_deg},
          {"model", std::string(to_string(p.model))},
          {"lambda", p.proposal.lambda},
          {"gap_penalty", p.proposal.gap_penalty}};
}

AnnotationParams params_from_json(const json& doc) {
  AnnotationParams p;
  p.epsilon = doc.value("epsilon", p.epsilon);
  p.angle_threshold_deg = doc.value("angle_threshold_deg", p.angle_threshold_deg);
  p.model = parse_transform_model(doc.value("model", std::string(to_string(p.model))));
  p.proposal.lambda = doc.value("lambda", p.proposal.lambda);
  p.proposal.gap_penalty = doc.value("gap_penalty", p.proposal.gap_penalty);
  if (!(p.angle_threshold_deg > 0.0 && p.angle_threshold_deg < 180.0)) {
    throw ValidationError("angle_threshold_deg must lie in (0, 180)");
  }
  if (p.epsilon < 0.0 || p.proposal.lambda < 0.0 || !(p.proposal.gap_penalty > 0.0)) {
    throw ValidationError("epsilon and lambda must be non-negative, gap_penalty positive");
  }
  return p;
}

std::size_t require_index(const json& action, const char* key) {
  const auto it = action.find(key);
  if (it == action.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0) {
    throw ValidationError(std::string("correction needs a non-negative integer '") + key + "'");
  }
  return it->get<std::size_t>();
}

// Turning-point position in B for keyframe `keyframe`, creating or moving a
// turning point if the keyframe is not one yet.
std::size_t resolve_keyframe(AnnotationSession& s, std::size_t keyframe,
                             std::optional<std::size_t> match_position, bool& moved) {
  moved = false;
  if (keyframe >= s.traj_b->size()) {
    throw ValidationError("keyframe_b " + std::to_string(keyframe) + " out of range (" +
                          std::to_string(s.traj_b->size()) + " keyframes)");
  }
  if (const auto existing = s.tps_b.find_keyframe(keyframe)) return *existing;

  const auto positions = s.traj_b->positions();
  const auto cumulative = cumulative_arc_length(positions);
  auto& points = s.tps_b.points;

  if (match_position && *match_position < s.matches.size()) {
    const std::size_t j = s.matches[*match_position].index_b;
    const bool interior = j > 0 && j + 1 < points.size();
    const bool shared = std::count_if(s.matches.begin(), s.matches.end(), [j](const auto& m) {
                          return m.index_b == j;
                        }) > 1;
    if (interior && !shared && points[j - 1].keyframe_index < keyframe &&
        keyframe < points[j + 1].keyframe_index) {
      points[j] = make_turning_point(*s.traj_b, cumulative, keyframe, std::nullopt,
                                     TurningPointOrigin::manual_moved);
      moved = true;
      return j;
    }
  }
  const auto it = std::lower_bound(points.begin(), points.end(), keyframe,
                                   [](const TurningPoint& tp, std::size_t k) {
                                     return tp.keyframe_index < k;
                                   });
  const auto pos = static_cast<std::size_t>(it - points.begin());
  points.insert(it, make_turning_point(*s.traj_b, cumulative, keyframe, std::nullopt,
                                       TurningPointOrigin::manual_added));
  for (auto& m : s.matches) {
    if (m.index_b >= pos) ++m.index_b;
  }
  return pos;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file", path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed", path.string());
}

void append_durable(const fs::path& path, const std::string& line) {
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (!f) throw IoError("cannot open log for append", path.string());
  const bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size() &&
                  std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
  std::fclose(f);
  if (!ok) throw IoError("log append failed", path.string());
}

Trajectory load_input(const fs::path& path, std::optional<TrajectoryFormat> format,
                      std::optional<int> vertical_axis, const std::string& scene,
                      const std::string& visit, const char* label) {
  try {
    ParseOptions options;
    options.scene_id = scene;
    options.visit_id = visit;
    options.vertical_axis = vertical_axis;
    return parse_trajectory(path, format.value_or(format_for_path(path)), options);
  } catch (const Error& e) {
    rethrow_with_prefix(e, std::string("trajectory-model: ") + label + ": ");
  }
}

}  // namespace

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::proposed: return "proposed";
    case SessionStatus::in_review: return "in_review";
    case SessionStatus::finalized: return "finalized";
  }
  return "proposed";
}

AnnotationSession apply_action(const AnnotationSession& session, const json& action) {
  if (!action.is_object() || !action.contains("type") || !action["type"].is_string()) {
    throw ValidationError("correction must be an object with a string 'type'");
  }
  const auto type = action["type"].get<std::string>();
  AnnotationSession next = session;

  if (type == "finalize") {
    if (session.status == SessionStatus::finalized) throw StateError("session already finalized");
    next.status = SessionStatus::finalized;
    next.artifacts = action.value("artifacts", std::vector<std::string>{});
  } else if (type == "reopen") {
    if (session.status != SessionStatus::finalized) {
      throw StateError("only finalized sessions can be reopened");
    }
    next.status = SessionStatus::in_review;
    next.artifacts.clear();
  } else {
    if (session.status == SessionStatus::finalized) {
      throw StateError("session " + session.session_id + " is finalized; reopen it to correct");
    }
    const std::size_t size_a = session.tps_a.size();
    Correction correction;
    bool moved = false;
    std::optional<std::size_t> moved_match;
    if (type == "confirm") {
      const auto k = require_index(action, "match");
      if (k >= next.matches.size()) throw ValidationError("match position out of range");
      correction = Reassign{k, next.matches[k].index_b};
    } else if (type == "reassign") {
      const auto k = require_index(action, "match");
      if (k >= next.matches.size()) throw ValidationError("match position out of range");
      std::size_t index_b = 0;
      if (action.contains("index_b")) {
        index_b = require_index(action, "index_b");
      } else {
        index_b = resolve_keyframe(next, require_index(action, "keyframe_b"), k, moved);
        if (moved) moved_match = k;
      }
      correction = Reassign{k, index_b};
    } else if (type == "reject") {
      correction = RejectPair{require_index(action, "match")};
    } else if (type == "add") {
      const auto index_a = require_index(action, "index_a");
      const auto index_b = action.contains("index_b")
                               ? require_index(action, "index_b")
                               : resolve_keyframe(next, require_index(action, "keyframe_b"),
                                                  std::nullopt, moved);
      correction = AddPair{index_a, index_b};
    } else if (type == "accept_all") {
      correction = AcceptAll{};
    } else {
      throw ValidationError("unknown correction type '" + type + "'");
    }
    next.matches = apply_correction(std::move(next.matches), correction, size_a, next.tps_b.size());
    if (moved_match) next.matches[*moved_match].status = MatchStatus::corrected;
    next.status = SessionStatus::in_review;
  }
  next.version = session.version + 1;
  return next;
}

AnnotationSession replay(const AnnotationSession& initial, const std::vector<AuditEntry>& log) {
  AnnotationSession s = initial;
  s.audit.clear();
  for (const auto& e : log) {
    s = apply_action(s, e.action);
    if (s.version != e.version) {
      throw ParseError("audit log out of sequence at version " + std::to_string(e.version));
    }
    s.audit.push_back(e);
  }
  return s;
}

AnnotationService::AnnotationService(fs::path data_dir, ServiceOptions options)
    : data_dir_(std::move(data_dir)), options_(std::move(options)) {
  fs::create_directories(data_dir_);
  load_existing();
}

AnnotationService::~AnnotationService() = default;

fs::path AnnotationService::session_dir(const std::string& session_id) const {
  return data_dir_ / session_id;
}

fs::path AnnotationService::artifact_path(const std::string& session_id,
                                          const std::string& name) const {
  return session_dir(session_id) / "artifacts" / name;
}

void AnnotationService::load_existing() {
  std::vector<fs::path> dirs;
  for (const auto& item : fs::directory_iterator(data_dir_)) {
    if (!item.is_directory()) continue;
    const auto name = item.path().filename().string();
    if (name.rfind(".tmp-", 0) == 0) {
      fs::remove_all(item.path());  // interrupted creation
      continue;
    }
    if (fs::exists(item.path() / "session.json")) dirs.push_back(item.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const auto id = dir.filename().string();
    try {
      auto session = std::make_shared<AnnotationSession>(replay(load_initial(id), load_log(id)));
      auto e = std::make_unique<Entry>();
      e->snapshot = std::move(session);
      sessions_.emplace(id, std::move(e));
      if (id.size() > 1 && id[0] == 's') {
        next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(id.substr(1)) + 1);
      }
    } catch (const std::exception& ex) {
      std::cerr << "warning: skipping session " << id << ": " << ex.what() << '\n';
    }
  }
}

AnnotationSession AnnotationService::load_initial(const std::string& session_id) const {
  const auto dir = session_dir(session_id);
  std::ifstream in(dir / "session.json");
  if (!in) throw NotFoundError("unknown session '" + session_id + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupt session.json: ") + e.what(), dir.string());
  }
  AnnotationSession s;
  s.session_id = doc.at("session_id").get<std::string>();
  s.scene_id = doc.at("scene_id").get<std::string>();
  s.visit_a = doc.at("visit_a").get<std::string>();
  s.visit_b = doc.at("visit_b").get<std::string>();
  s.duration_a = doc.at("duration_a").get<double>();
  s.duration_b = doc.at("duration_b").get<double>();
  s.params = params_from_json(doc.at("params"));
  ParseOptions pa{std::nullopt, s.scene_id, s.visit_a};
  ParseOptions pb{std::nullopt, s.scene_id, s.visit_b};
  s.traj_a = std::make_shared<const Trajectory>(
      parse_trajectory(dir / "traj_a.csv", TrajectoryFormat::csv, pa));
  s.traj_b = std::make_shared<const Trajectory>(
      parse_trajectory(dir / "traj_b.csv", TrajectoryFormat::csv, pb));
  s.tps_a = turning_point_set_from_json(doc.at("turning_points_a"));
  s.tps_b = turning_point_set_from_json(doc.at("turning_points_b"));
  s.matches = match_list_from_json(doc.at("matches"));
  validate_match_list(s.matches, s.tps_a.size(), s.tps_b.size());
  return s;
}

std::vector<AuditEntry> AnnotationService::load_log(const std::string& session_id) const {
  const auto path = session_dir(session_id) / "log.jsonl";
  std::vector<AuditEntry> log;
  std::ifstream in(path, std::ios::binary);
  if (!in) return log;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::size_t pos = 0;
  std::size_t good = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    if (eol == std::string::npos) break;  // torn final write
    const auto line = text.substr(pos, eol - pos);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception&) {
      if (text.find('\n', eol + 1) == std::string::npos && eol + 1 >= text.size()) break;
      throw ParseError("corrupt audit log line", path.string());
    }
    log.push_back({doc.at("version").get<std::uint64_t>(), doc.value("who", std::string()),
                   doc.value("when", std::string()), doc.at("action")});
    pos = eol + 1;
    good = pos;
  }
  if (good < text.size()) {
    fs::resize_file(path, good);
  }
  return log;
}

AnnotationService::Entry& AnnotationService::entry(const std::string& session_id) const {
  std::lock_guard lock(map_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + session_id + "'");
  return *it->second;
}

std::shared_ptr<const AnnotationSession> AnnotationService::get(
    const std::string& session_id) const {
  return entry(session_id).load();
}

std::vector<std::string> AnnotationService::list_sessions() const {
  std::lock_guard lock(map_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

std::shared_ptr<const AnnotationSession> AnnotationService::create_session(
    const SessionRequest& request) {
  const std::string visit_a =
      request.visit_a.empty() ? request.traj_a.stem().string() : request.visit_a;
  std::string visit_b = request.visit_b.empty() ? request.traj_b.stem().string() : request.visit_b;
  if (visit_b == visit_a) visit_b += "_b";

  Trajectory a = load_input(request.traj_a, request.format, request.vertical_axis,
                            request.scene_id, visit_a, "trajectory A");
  Trajectory b = load_input(request.traj_b, request.format, request.vertical_axis,
                            request.scene_id, visit_b, "trajectory B");
  if (!(request.duration_a >= a.back().timestamp) || !(request.duration_b >= b.back().timestamp)) {
    throw ValidationError("video durations must cover the last keyframe of each trajectory");
  }

  AnnotationSession s;
  s.scene_id = request.scene_id;
  s.visit_a = visit_a;
  s.visit_b = visit_b;
  s.duration_a = request.duration_a;
  s.duration_b = request.duration_b;
  s.params = request.params;
  Proposal proposal;
  try {
    proposal = propose_pair(a, b, request.params);
  } catch (const Error& e) {
    rethrow_with_prefix(e, "turning-point-detection: ");
  }
  s.tps_a = std::move(proposal.tps_a);
  s.tps_b = std::move(proposal.tps_b);
  s.matches = std::move(proposal.matches);
  s.traj_a = std::make_shared<const Trajectory>(std::move(a));
  s.traj_b = std::make_shared<const Trajectory>(std::move(b));

  {
    std::lock_guard lock(map_mutex_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_++));
    s.session_id = buf;
  }

  const auto tmp = data_dir_ / (".tmp-" + s.session_id);
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  try {
    json doc{{"session_id", s.session_id},
             {"scene_id", s.scene_id},
             {"visit_a", s.visit_a},
             {"visit_b", s.visit_b},
             {"source_a", request.traj_a.string()},
             {"source_b", request.traj_b.string()},
             {"duration_a", s.duration_a},
             {"duration_b", s.duration_b},
             {"params", params_to_json(s.params)},
             {"turning_points_a", to_json(s.tps_a)},
             {"turning_points_b", to_json(s.tps_b)},
             {"matches", to_json(s.matches)}};
    write_text(tmp / "session.json", doc.dump(2) + "\n");
    save_trajectory(tmp / "traj_a.csv", *s.traj_a, TrajectoryFormat::csv);
    save_trajectory(tmp / "traj_b.csv", *s.traj_b, TrajectoryFormat::csv);
    write_text(tmp / "log.jsonl", "");
    fs::rename(tmp, session_dir(s.session_id));
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }

  auto snapshot = std::make_shared<const AnnotationSession>(std::move(s));
  auto e = std::make_unique<Entry>();
  e->snapshot = snapshot;
  std::lock_guard lock(map_mutex_);
  sessions_.emplace(snapshot->session_id, std::move(e));
  return snapshot;
}

std::shared_ptr<const AnnotationSession> AnnotationService::commit(Entry& e,
                                                                   AnnotationSession next) {
  const AuditEntry& record = next.audit.back();
  const json line{{"version", record.version},
                  {"who", record.who},
                  {"when", record.when},
                  {"action", record.action}};
  append_durable(session_dir(next.session_id) / "log.jsonl", line.dump() + "\n");
  auto snapshot = std::make_shared<const AnnotationSession>(std::move(next));
  e.store(snapshot);
  return snapshot;
}

std::shared_ptr<const AnnotationSession> AnnotationService::submit_correction(
    const std::string& session_id, const json& correction, std::uint64_t expected_version,
    const std::string& who) {
  Entry& e = entry(session_id);
  std::lock_guard lock(e.write_mutex);
  const auto current = e.load();
  if (current->version != expected_version) {
    throw VersionConflictError("session " + session_id + " is at version " +
                                   std::to_string(current->version) + ", correction was based on " +
                                   std::to_string(expected_version),
                               std::to_string(current->version));
  }
  if (correction.is_object() && correction.contains("type") &&
      (correction["type"] == "finalize" || correction["type"] == "reopen")) {
    throw ValidationError("use the finalize/reopen operations for lifecycle changes");
  }
  AnnotationSession next = apply_action(*current, correction);
  next.audit.push_back({next.version, who, now_iso8601(), correction});
  return commit(e, std::move(next));
}

std::vector<fs::path> AnnotationService::finalize_session(
    const std::string& session_id, std::optional<std::uint64_t> expected_version,
    const std::string& who) {
  Entry& e = entry(session_id);
  std::lock_guard lock(e.write_mutex);
  const auto current = e.load();
  if (expected_version && current->version != *expected_version) {
    throw VersionConflictError("session " + session_id + " is at version " +
                                   std::to_string(current->version),
                               std::to_string(current->version));
  }
  if (current->status == SessionStatus::finalized) {
    throw StateError("session " + session_id + " is already finalized");
  }
  const auto pending = std::count_if(current->matches.begin(), current->matches.end(),
                                     [](const auto& m) { return m.status == MatchStatus::proposed; });
  if (pending > 0) {
    throw StateError(std::to_string(pending) +
                     " matches are still proposed; confirm, correct or reject them first");
  }
  const auto accepted = std::count_if(current->matches.begin(), current->matches.end(),
                                      [](const auto& m) { return is_accepted(m.status); });
  if (accepted < 2) throw ValidationError("finalization needs at least 2 accepted matches");

  GroundTruth truth = [&] {
    try {
      return build_ground_truth(*current->traj_a, *current->traj_b, current->tps_a,
                                current->tps_b, current->matches, current->duration_a,
                                current->duration_b, current->params.model);
    } catch (const DegenerateError& ex) {
      throw DegenerateError(std::string(ex.what()) +
                                (current->params.model == TransformModel::affine
                                     ? "; confirm more turning points or use the similarity model"
                                     : ""),
                            ex.detail());
    }
  }();

  const auto dir = session_dir(session_id);
  const auto staging = dir / "artifacts.tmp";
  fs::remove_all(staging);
  const auto names = write_pair_artifacts(staging, current->tps_a, current->tps_b,
                                          current->matches, truth);
  fs::remove_all(dir / "artifacts");
  fs::rename(staging, dir / "artifacts");

  const json action{{"type", "finalize"}, {"artifacts", names}};
  AnnotationSession next = apply_action(*current, action);
  next.audit.push_back({next.version, who, now_iso8601(), action});
  commit(e, std::move(next));

  std::vector<fs::path> paths;
  for (const auto& n : names) paths.push_back(dir / "artifacts" / n);
  return paths;
}

std::shared_ptr<const AnnotationSession> AnnotationService::reopen_session(
    const std::string& session_id, std::uint64_t expected_version, const std::string& who) {
  Entry& e = entry(session_id);
  std::lock_guard lock(e.write_mutex);
  const auto current = e.load();
  if (current->version != expected_version) {
    throw VersionConflictError("session " + session_id + " is at version " +
                                   std::to_string(current->version),
                               std::to_string(current->version));
  }
  const json action{{"type", "reopen"}};
  AnnotationSession next = apply_action(*current, action);
  next.audit.push_back({next.version, who, now_iso8601(), action});
  return commit(e, std::move(next));
}

std::optional<std::string> AnnotationService::media_url(const std::string& scene,
                                                        const std::string& visit,
                                                        std::size_t keyframe) const {
  if (!options_.media_root) return std::nullopt;
  char name[32];
  std::snprintf(name, sizeof name, "%06zu.jpg", keyframe);
  const auto rel = fs::path(scene) / visit / name;
  if (!fs::exists(*options_.media_root / rel)) return std::nullopt;
  return "/media/" + rel.generic_string();
}

CandidateWindow AnnotationService::get_candidates(const std::string& session_id,
                                                  std::size_t match_position,
                                                  std::optional<std::size_t> radius) const {
  const auto s = get(session_id);
  if (match_position >= s->matches.size()) {
    throw NotFoundError("session " + session_id + " has no match at position " +
                        std::to_string(match_position));
  }
  const std::size_t r = radius.value_or(options_.default_window_radius);
  const auto& m = s->matches[match_position];
  const std::size_t center = s->tps_b[m.index_b].keyframe_index;
  std::size_t lo = center >= r ? center - r : 0;
  std::size_t hi = std::min(s->traj_b->size() - 1, center + r);
  for (std::size_t i = match_position; i-- > 0;) {
    if (!is_active(s->matches[i].status)) continue;
    lo = std::max(lo, s->tps_b[s->matches[i].index_b].keyframe_index + 1);
    break;
  }
  for (std::size_t i = match_position + 1; i < s->matches.size(); ++i) {
    if (!is_active(s->matches[i].status)) continue;
    const std::size_t bound = s->tps_b[s->matches[i].index_b].keyframe_index;
    hi = bound == 0 ? 0 : std::min(hi, bound - 1);
    break;
  }

  CandidateWindow w;
  w.match_position = match_position;
  w.target = s->tps_a[m.index_a];
  w.target_image = media_url(s->scene_id, s->visit_a, w.target.keyframe_index);
  w.proposed_keyframe_b = center;
  w.radius = r;
  for (std::size_t k = lo; k <= hi && lo <= hi; ++k) {
    const auto& kf = (*s->traj_b)[k];
    w.candidates.push_back({k, kf.timestamp, kf.position, media_url(s->scene_id, s->visit_b, k)});
  }
  return w;
}

json to_json(const AuditEntry& entry) {
  return {{"version", entry.version}, {"who", entry.who}, {"when", entry.when},
          {"action", entry.action}};
}

json to_json(const AnnotationSession& s, bool include_trajectories) {
  json audit = json::array();
  for (const auto& e : s.audit) audit.push_back(to_json(e));
  json doc{{"session_id", s.session_id},
           {"scene_id", s.scene_id},
           {"visit_a", s.visit_a},
           {"visit_b", s.visit_b},
           {"duration_a", s.duration_a},
           {"duration_b", s.duration_b},
           {"status", std::string(to_string(s.status))},
           {"version", s.version},
           {"params", params_to_json(s.params)},
           {"turning_points_a", to_json(s.tps_a)},
           {"turning_points_b", to_json(s.tps_b)},
           {"matches", to_json(s.matches, s.tps_a, s.tps_b)},
           {"audit", std::move(audit)},
           {"artifacts", s.artifacts}};
  if (include_trajectories) {
    const auto dump = [](const Trajectory& t) {
      json rows = json::array();
      for (const auto& kf : t.keyframes()) {
        rows.push_back({kf.timestamp, kf.position.x(), kf.position.y()});
      }
      return rows;
    };
    doc["trajectories"] = {{"a", dump(*s.traj_a)}, {"b", dump(*s.traj_b)}};
  }
  return doc;
}

json to_json(const CandidateWindow& w) {
  json candidates = json::array();
  for (const auto& c : w.candidates) {
    candidates.push_back({{"keyframe_index", c.keyframe_index},
                          {"timestamp", c.timestamp},
                          {"x", c.position.x()},
                          {"y", c.position.y()},
                          {"image", c.image ? json(*c.image) : json(nullptr)}});
  }
  return {{"match_position", w.match_position},
          {"target", to_json(w.target)},
          {"target_image", w.target_image ? json(*w.target_image) : json(nullptr)},
          {"proposed_keyframe_b", w.proposed_keyframe_b},
          {"radius", w.radius},
          {"candidates", std::move(candidates)}};
}

SessionRequest session_request_from_json(const json& doc) {
  try {
    SessionRequest r;
    r.scene_id = doc.value("scene_id", std::string("scene"));
    r.traj_a = doc.at("traj_a").get<std::string>();
    r.traj_b = doc.at("traj_b").get<std::string>();
    if (doc.contains("format")) r.format = parse_trajectory_format(doc["format"].get<std::string>());
    if (doc.contains("vertical_axis")) r.vertical_axis = doc["vertical_axis"].get<int>();
    r.visit_a = doc.value("visit_a", std::string());
    r.visit_b = doc.value("visit_b", std::string());
    r.duration_a = doc.at("duration_a").get<double>();
    r.duration_b = doc.at("duration_b").get<double>();
    if (doc.contains("params")) r.params = params_from_json(doc["params"]);
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed session request: ") + e.what());
  }
}

}  // namespace vprgt
