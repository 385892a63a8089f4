#include "vprgt/matching.hpp"

#include "vprgt/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vprgt {

namespace {

std::string pair_name(const TurningPointMatch& m) {
  return "(" + std::to_string(m.index_a) + "," + std::to_string(m.index_b) + ")";
}

bool is_endpoint(const TurningPointMatch& m, std::size_t size_a) {
  return m.index_a == 0 || m.index_a + 1 == size_a;
}

// Throws naming the active neighbour that `matches[pos]` conflicts with.
void check_neighbours(const MatchList& matches, std::size_t pos) {
  const auto& m = matches[pos];
  if (!is_active(m.status)) return;
  for (std::size_t i = pos; i-- > 0;) {
    if (!is_active(matches[i].status)) continue;
    if (matches[i].index_b >= m.index_b) {
      throw ValidationError("match " + pair_name(m) + " breaks ordering with pair " +
                                pair_name(matches[i]),
                            pair_name(matches[i]));
    }
    break;
  }
  for (std::size_t i = pos + 1; i < matches.size(); ++i) {
    if (!is_active(matches[i].status)) continue;
    if (matches[i].index_b <= m.index_b) {
      throw ValidationError("match " + pair_name(m) + " breaks ordering with pair " +
                                pair_name(matches[i]),
                            pair_name(matches[i]));
    }
    break;
  }
}

void check_position(const MatchList& matches, std::size_t pos) {
  if (pos >= matches.size()) {
    throw ValidationError("match position " + std::to_string(pos) + " out of range (" +
                          std::to_string(matches.size()) + " matches)");
  }
}

}  // namespace

std::string_view to_string(MatchStatus status) {
  switch (status) {
    case MatchStatus::proposed: return "proposed";
    case MatchStatus::confirmed: return "confirmed";
    case MatchStatus::corrected: return "corrected";
    case MatchStatus::rejected: return "rejected";
  }
  return "proposed";
}

MatchStatus parse_match_status(std::string_view name) {
  if (name == "proposed") return MatchStatus::proposed;
  if (name == "confirmed") return MatchStatus::confirmed;
  if (name == "corrected") return MatchStatus::corrected;
  if (name == "rejected") return MatchStatus::rejected;
  throw ParseError("unknown match status '" + std::string(name) + "'");
}

MatchList propose_matches(const TurningPointSet& a, const TurningPointSet& b,
                          const ProposalParams& params) {
  a.validate();
  b.validate();
  const std::size_t na = a.size() - 2;  // interior counts
  const std::size_t nb = b.size() - 2;

  const auto cost = [&](std::size_t i, std::size_t j) {
    const auto& ta = a[i];
    const auto& tb = b[j];
    double c = std::abs(ta.arc_fraction - tb.arc_fraction);
    if (ta.angle_deg && tb.angle_deg) {
      c += params.lambda * std::abs(*ta.angle_deg - *tb.angle_deg) / 180.0;
    }
    return c;
  };

  // table[i][j]: best cost aligning the first i interior points of A with
  // the first j of B.
  const std::size_t cols = nb + 1;
  std::vector<double> table((na + 1) * cols, 0.0);
  std::vector<unsigned char> move((na + 1) * cols, 0);  // 0 diag, 1 skip A, 2 skip B
  for (std::size_t i = 1; i <= na; ++i) {
    table[i * cols] = static_cast<double>(i) * params.gap_penalty;
    move[i * cols] = 1;
  }
  for (std::size_t j = 1; j <= nb; ++j) {
    table[j] = static_cast<double>(j) * params.gap_penalty;
    move[j] = 2;
  }
  for (std::size_t i = 1; i <= na; ++i) {
    for (std::size_t j = 1; j <= nb; ++j) {
      const double diag = table[(i - 1) * cols + (j - 1)] + cost(i, j);
      const double skip_a = table[(i - 1) * cols + j] + params.gap_penalty;
      const double skip_b = table[i * cols + (j - 1)] + params.gap_penalty;
      double best = diag;
      unsigned char how = 0;
      if (skip_a < best) {
        best = skip_a;
        how = 1;
      }
      if (skip_b < best) {
        best = skip_b;
        how = 2;
      }
      table[i * cols + j] = best;
      move[i * cols + j] = how;
    }
  }

  MatchList interior;
  for (std::size_t i = na, j = nb; i > 0 || j > 0;) {
    switch (move[i * cols + j]) {
      case 0:
        interior.push_back({i, j, MatchStatus::proposed});
        --i;
        --j;
        break;
      case 1: --i; break;
      default: --j; break;
    }
  }
  std::reverse(interior.begin(), interior.end());

  MatchList matches;
  matches.push_back({0, 0, MatchStatus::proposed});
  matches.insert(matches.end(), interior.begin(), interior.end());
  matches.push_back({a.size() - 1, b.size() - 1, MatchStatus::proposed});
  return matches;
}

void validate_match_list(const MatchList& matches, std::size_t size_a, std::size_t size_b) {
  const TurningPointMatch* prev_active = nullptr;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& m = matches[i];
    if (m.index_a >= size_a || m.index_b >= size_b) {
      throw ValidationError("match " + pair_name(m) + " out of range");
    }
    if (i > 0 && matches[i - 1].index_a >= m.index_a) {
      throw ValidationError("match list not sorted by index_a at " + pair_name(m));
    }
    if (!is_active(m.status)) continue;
    if (prev_active && prev_active->index_b >= m.index_b) {
      throw ValidationError("match " + pair_name(m) + " breaks ordering with pair " +
                                pair_name(*prev_active),
                            pair_name(*prev_active));
    }
    prev_active = &m;
  }
}

MatchList apply_correction(MatchList matches, const Correction& correction, std::size_t size_a,
                           std::size_t size_b) {
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Reassign>) {
          check_position(matches, c.match);
          auto& m = matches[c.match];
          if (c.index_b >= size_b) {
            throw ValidationError("index_b " + std::to_string(c.index_b) + " out of range");
          }
          if (is_endpoint(m, size_a) && c.index_b != m.index_b) {
            throw ValidationError("endpoint match " + pair_name(m) + " cannot be reassigned");
          }
          const bool same = m.index_b == c.index_b && m.status != MatchStatus::rejected;
          m.index_b = c.index_b;
          m.status = same ? MatchStatus::confirmed : MatchStatus::corrected;
          check_neighbours(matches, c.match);
        } else if constexpr (std::is_same_v<T, RejectPair>) {
          check_position(matches, c.match);
          auto& m = matches[c.match];
          if (is_endpoint(m, size_a)) {
            throw ValidationError("endpoint match " + pair_name(m) + " cannot be rejected");
          }
          if (m.status == MatchStatus::rejected) {
            throw ValidationError("match " + pair_name(m) + " is already rejected");
          }
          m.status = MatchStatus::rejected;
        } else if constexpr (std::is_same_v<T, AddPair>) {
          if (c.index_a >= size_a || c.index_b >= size_b) {
            throw ValidationError("pair (" + std::to_string(c.index_a) + "," +
                                  std::to_string(c.index_b) + ") out of range");
          }
          const auto it = std::lower_bound(
              matches.begin(), matches.end(), c.index_a,
              [](const TurningPointMatch& m, std::size_t ia) { return m.index_a < ia; });
          std::size_t pos = static_cast<std::size_t>(it - matches.begin());
          if (it != matches.end() && it->index_a == c.index_a) {
            if (is_active(it->status)) {
              throw ValidationError("turning point " + std::to_string(c.index_a) +
                                        " of trajectory A is already matched by pair " +
                                        pair_name(*it),
                                    pair_name(*it));
            }
            *it = {c.index_a, c.index_b, MatchStatus::confirmed};
          } else {
            matches.insert(it, {c.index_a, c.index_b, MatchStatus::confirmed});
          }
          check_neighbours(matches, pos);
        } else {
          for (auto& m : matches) {
            if (m.status == MatchStatus::proposed) m.status = MatchStatus::confirmed;
          }
        }
      },
      correction);
  validate_match_list(matches, size_a, size_b);
  return matches;
}

std::vector<KeyframePair> accepted_keyframe_pairs(const MatchList& matches,
                                                  const TurningPointSet& a,
                                                  const TurningPointSet& b,
                                                  bool include_proposed) {
  std::vector<KeyframePair> pairs;
  for (const auto& m : matches) {
    if (is_accepted(m.status) || (include_proposed && m.status == MatchStatus::proposed)) {
      pairs.push_back({a[m.index_a].keyframe_index, b[m.index_b].keyframe_index});
    }
  }
  return pairs;
}

void write_match_list(std::ostream& out, const MatchList& matches, const TurningPointSet& a,
                      const TurningPointSet& b) {
  out << "# index_a index_b status keyframe_a keyframe_b timestamp_a timestamp_b\n";
  for (const auto& m : matches) {
    const auto& ta = a[m.index_a];
    const auto& tb = b[m.index_b];
    out << m.index_a << ' ' << m.index_b << ' ' << to_string(m.status) << ' '
        << ta.keyframe_index << ' ' << tb.keyframe_index << ' ' << format_number(ta.timestamp)
        << ' ' << format_number(tb.timestamp) << '\n';
  }
}

std::vector<MatchRecord> read_match_list(std::istream& in) {
  std::vector<MatchRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    MatchRecord r;
    std::string status;
    if (!(fields >> r.match.index_a >> r.match.index_b >> status >> r.keyframe_a >>
          r.keyframe_b >> r.timestamp_a >> r.timestamp_b)) {
      throw ParseError("match file line " + std::to_string(line_no) + ": expected 7 fields");
    }
    r.match.status = parse_match_status(status);
    records.push_back(r);
  }
  return records;
}

std::vector<KeyframePair> keyframe_pairs(const std::vector<MatchRecord>& records,
                                         bool include_proposed) {
  std::vector<KeyframePair> pairs;
  for (const auto& r : records) {
    if (is_accepted(r.match.status) ||
        (include_proposed && r.match.status == MatchStatus::proposed)) {
      pairs.push_back({r.keyframe_a, r.keyframe_b});
    }
  }
  return pairs;
}

}  // namespace vprgt
