#pragma once

// recall@N by the definition: for every query, look through its first N
// results for any database image within the threshold.

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct Img {
  std::string id;
  double x, y;
};

struct Ranking {
  std::string query;
  std::vector<std::string> ranked;
};

inline double recall(const std::vector<Img>& queries, const std::vector<Img>& database,
                     const std::vector<Ranking>& results, int n, double threshold) {
  std::map<std::string, Img> db;
  for (const auto& d : database) db[d.id] = d;
  int hits = 0;
  for (const auto& q : queries) {
    const Ranking* r = nullptr;
    for (const auto& cand : results) {
      if (cand.query == q.id) r = &cand;
    }
    bool hit = false;
    for (int k = 0; r && k < n && k < static_cast<int>(r->ranked.size()); ++k) {
      const Img& d = db.at(r->ranked[k]);
      const double dx = d.x - q.x, dy = d.y - q.y;
      if (std::sqrt(dx * dx + dy * dy) <= threshold) hit = true;
    }
    hits += hit ? 1 : 0;
  }
  return queries.empty() ? 0.0 : 100.0 * hits / static_cast<double>(queries.size());
}

}  // namespace oracle
