#pragma once

#include "vprgt/turning_points.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vprgt {

enum class MatchStatus { proposed, confirmed, corrected, rejected };

std::string_view to_string(MatchStatus status);
MatchStatus parse_match_status(std::string_view name);

/// Correspondence between positions in two turning point sets.
struct TurningPointMatch {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  MatchStatus status = MatchStatus::proposed;

  bool operator==(const TurningPointMatch&) const = default;
};

using MatchList = std::vector<TurningPointMatch>;

inline bool is_active(MatchStatus s) { return s != MatchStatus::rejected; }
inline bool is_accepted(MatchStatus s) {
  return s == MatchStatus::confirmed || s == MatchStatus::corrected;
}

struct ProposalParams {
  double lambda = 0.25;       // weight of the angle term
  double gap_penalty = 0.15;  // cost of leaving an interior turning point unmatched
};

/// Order-preserving alignment of interior turning points by dynamic
/// programming; endpoints are always matched to endpoints.
MatchList propose_matches(const TurningPointSet& a, const TurningPointSet& b,
                          const ProposalParams& params = {});

/// Point match `match` at `index_b`. Keeping the current index confirms
/// the match, changing it marks it corrected.
struct Reassign {
  std::size_t match = 0;
  std::size_t index_b = 0;
};
struct RejectPair {
  std::size_t match = 0;
};
/// Adds a confirmed pair. Replaces a rejected entry with the same index_a.
struct AddPair {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
};
/// Confirms every proposed match.
struct AcceptAll {};

using Correction = std::variant<Reassign, RejectPair, AddPair, AcceptAll>;

/// Returns the corrected list; throws ValidationError (leaving the input
/// untouched) when the result would not be order-preserving. The message
/// names the conflicting pair as "(index_a,index_b)".
MatchList apply_correction(MatchList matches, const Correction& correction, std::size_t size_a,
                           std::size_t size_b);

/// Checks bounds, one entry per index_a, sorted order and strict
/// monotonicity of the active entries.
void validate_match_list(const MatchList& matches, std::size_t size_a, std::size_t size_b);

/// Keyframe indices of a pair of matched turning points.
struct KeyframePair {
  std::size_t keyframe_a = 0;
  std::size_t keyframe_b = 0;

  bool operator==(const KeyframePair&) const = default;
};

/// Keyframe pairs of accepted matches (and proposed ones if asked), in order.
std::vector<KeyframePair> accepted_keyframe_pairs(const MatchList& matches,
                                                  const TurningPointSet& a,
                                                  const TurningPointSet& b,
                                                  bool include_proposed = false);

/// One line of a match file.
struct MatchRecord {
  TurningPointMatch match;
  std::size_t keyframe_a = 0;
  std::size_t keyframe_b = 0;
  double timestamp_a = 0.0;
  double timestamp_b = 0.0;
};

void write_match_list(std::ostream& out, const MatchList& matches, const TurningPointSet& a,
                      const TurningPointSet& b);
std::vector<MatchRecord> read_match_list(std::istream& in);

std::vector<KeyframePair> keyframe_pairs(const std::vector<MatchRecord>& records,
                                         bool include_proposed = false);

}  // namespace vprgt
