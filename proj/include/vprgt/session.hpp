#pragma once

#include "vprgt/annotation.hpp"
#include "vprgt/trajectory.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vprgt {

enum class SessionStatus { proposed, in_review, finalized };

std::string_view to_string(SessionStatus status);

struct SessionRequest {
  std::string scene_id;
  std::filesystem::path traj_a;
  std::filesystem::path traj_b;
  std::optional<TrajectoryFormat> format;  // inferred from the extension when unset
  std::optional<int> vertical_axis;
  std::string visit_a;  // default: file stems
  std::string visit_b;
  double duration_a = 0.0;
  double duration_b = 0.0;
  AnnotationParams params;
};

struct AuditEntry {
  std::uint64_t version = 0;  // session version after the entry
  std::string who;
  std::string when;  // ISO 8601 UTC
  nlohmann::json action;
};

struct AnnotationSession {
  std::string session_id;
  std::string scene_id;
  std::string visit_a;
  std::string visit_b;
  double duration_a = 0.0;
  double duration_b = 0.0;
  AnnotationParams params;
  std::shared_ptr<const Trajectory> traj_a;
  std::shared_ptr<const Trajectory> traj_b;
  TurningPointSet tps_a;
  TurningPointSet tps_b;
  MatchList matches;
  SessionStatus status = SessionStatus::proposed;
  std::uint64_t version = 0;
  std::vector<AuditEntry> audit;
  std::vector<std::string> artifacts;  // file names under <session>/artifacts
};

struct Candidate {
  std::size_t keyframe_index = 0;
  double timestamp = 0.0;
  Vec2 position = Vec2::Zero();
  std::optional<std::string> image;  // URL path under /media/
};

struct CandidateWindow {
  std::size_t match_position = 0;
  TurningPoint target;  // turning point in trajectory A
  std::optional<std::string> target_image;
  std::size_t proposed_keyframe_b = 0;
  std::size_t radius = 0;
  std::vector<Candidate> candidates;  // sorted by keyframe index
};

/// Applies one logged action (a correction, `finalize` or `reopen`) to a
/// session value, returning the successor with version + 1. Actions:
///   {"type":"reassign","match":k,"index_b":j}    or with "keyframe_b"
///   {"type":"confirm","match":k}
///   {"type":"reject","match":k}
///   {"type":"add","index_a":i,"index_b":j}        or with "keyframe_b"
///   {"type":"accept_all"}
/// A keyframe of B that is not yet a turning point moves the matched
/// turning point there when ordering allows, else inserts a new one.
AnnotationSession apply_action(const AnnotationSession& session, const nlohmann::json& action);

/// Re-applies `log` on top of the initial proposal.
AnnotationSession replay(const AnnotationSession& initial, const std::vector<AuditEntry>& log);

struct ServiceOptions {
  std::optional<std::filesystem::path> media_root;
  std::size_t default_window_radius = 10;
};

/// Session store backed by one directory per session:
///   session.json  initial proposal and parameters
///   traj_a.csv, traj_b.csv  copies of the input trajectories
///   log.jsonl     append-only action log, one fsync'd line per mutation
///   artifacts/    ground truth written on finalize
/// Mutations on one session are serialized; a stale `expected_version`
/// raises VersionConflictError. Readers get immutable snapshots.
class AnnotationService {
 public:
  explicit AnnotationService(std::filesystem::path data_dir, ServiceOptions options = {});
  ~AnnotationService();

  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  std::shared_ptr<const AnnotationSession> create_session(const SessionRequest& request);
  std::shared_ptr<const AnnotationSession> get(const std::string& session_id) const;
  std::vector<std::string> list_sessions() const;

  CandidateWindow get_candidates(const std::string& session_id, std::size_t match_position,
                                 std::optional<std::size_t> radius = std::nullopt) const;

  std::shared_ptr<const AnnotationSession> submit_correction(const std::string& session_id,
                                                             const nlohmann::json& correction,
                                                             std::uint64_t expected_version,
                                                             const std::string& who = "anonymous");

  /// Fits, aligns and generates ground truth; returns artifact paths.
  std::vector<std::filesystem::path> finalize_session(
      const std::string& session_id, std::optional<std::uint64_t> expected_version = std::nullopt,
      const std::string& who = "anonymous");

  std::shared_ptr<const AnnotationSession> reopen_session(const std::string& session_id,
                                                          std::uint64_t expected_version,
                                                          const std::string& who = "anonymous");

  /// Initial proposal as persisted, before any logged action.
  AnnotationSession load_initial(const std::string& session_id) const;
  std::vector<AuditEntry> load_log(const std::string& session_id) const;

  std::filesystem::path session_dir(const std::string& session_id) const;
  std::filesystem::path artifact_path(const std::string& session_id, const std::string& name) const;
  const std::filesystem::path& data_dir() const noexcept { return data_dir_; }
  const ServiceOptions& options() const noexcept { return options_; }

 private:
  struct Entry;

  Entry& entry(const std::string& session_id) const;
  void load_existing();
  std::shared_ptr<const AnnotationSession> commit(Entry& entry, AnnotationSession next);
  std::optional<std::string> media_url(const std::string& scene, const std::string& visit,
                                       std::size_t keyframe) const;

  std::filesystem::path data_dir_;
  ServiceOptions options_;
  mutable std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

nlohmann::json to_json(const AnnotationSession& session, bool include_trajectories = false);
nlohmann::json to_json(const CandidateWindow& window);
nlohmann::json to_json(const AuditEntry& entry);

SessionRequest session_request_from_json(const nlohmann::json& doc);

}  // namespace vprgt
