#include "vprgt/retrieval.hpp"

#include "vprgt/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace vprgt {

namespace {

std::filesystem::path sidecar(const std::filesystem::path& path,
                              const std::filesystem::path& ids_path) {
  if (!ids_path.empty()) return ids_path;
  auto p = path;
  p += ".ids";
  return p;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                  static_cast<char>((v >> 16) & 0xFF),
                                  static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes.data(), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw ParseError("descriptor file truncated while reading " + what);
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void check_compatible(const DescriptorSet& queries, const DescriptorSet& database) {
  if (queries.dimension != database.dimension) {
    throw ValidationError("descriptor dimension mismatch: queries " +
                          std::to_string(queries.dimension) + ", database " +
                          std::to_string(database.dimension));
  }
  for (const auto* set : {&queries, &database}) {
    if (set->values.size() != set->ids.size() * set->dimension) {
      throw ValidationError("descriptor set size does not match ids x dimension");
    }
  }
  std::unordered_set<std::string> ids;
  for (const auto& id : database.ids) {
    if (!ids.insert(id).second) throw ValidationError("duplicate database id '" + id + "'");
  }
}

struct Candidate {
  double distance;
  std::size_t index;
};

}  // namespace

std::string_view to_string(DistanceMetric metric) {
  return metric == DistanceMetric::euclidean ? "euclidean" : "cosine";
}

DistanceMetric parse_distance_metric(std::string_view name) {
  if (name == "euclidean" || name == "l2") return DistanceMetric::euclidean;
  if (name == "cosine") return DistanceMetric::cosine;
  throw ValidationError("unknown distance metric '" + std::string(name) + "' (euclidean|cosine)");
}

double descriptor_distance(std::span<const float> a, std::span<const float> b,
                           DistanceMetric metric) {
  if (metric == DistanceMetric::euclidean) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
      sum += d * d;
    }
    return std::sqrt(sum);
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<RetrievalResult> nearest_neighbor_retrieve(const DescriptorSet& queries,
                                                       const DescriptorSet& database,
                                                       std::size_t k, DistanceMetric metric,
                                                       Exec exec) {
  if (k < 1) throw ValidationError("k must be at least 1");
  check_compatible(queries, database);
  const std::size_t top = std::min(k, database.size());
  std::vector<RetrievalResult> results(queries.size());

  const auto before = [&](const Candidate& l, const Candidate& r) {
    if (l.distance != r.distance) return l.distance < r.distance;
    return database.ids[l.index] < database.ids[r.index];
  };

  const auto rank_query = [&](std::size_t q, bool partial) {
    std::vector<Candidate> candidates(database.size());
    for (std::size_t d = 0; d < database.size(); ++d) {
      candidates[d] = {descriptor_distance(queries.row(q), database.row(d), metric), d};
    }
    if (partial) {
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(top),
                        candidates.end(), before);
    } else {
      std::sort(candidates.begin(), candidates.end(), before);
    }
    RetrievalResult& r = results[q];
    r.query_id = queries.ids[q];
    r.ranked.reserve(top);
    for (std::size_t i = 0; i < top; ++i) r.ranked.push_back(database.ids[candidates[i].index]);
  };

  if (exec == Exec::parallel) {
    const auto count = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t q = 0; q < count; ++q) rank_query(static_cast<std::size_t>(q), true);
  } else {
    for (std::size_t q = 0; q < queries.size(); ++q) rank_query(q, false);
  }
  return results;
}

DescriptorSet load_descriptors(const std::filesystem::path& path,
                               const std::filesystem::path& ids_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open descriptor file", path.string());
  if (get_u32(in, "magic") != kDescriptorMagic) {
    throw ParseError("not a descriptor file (bad magic)", path.string());
  }
  const auto version = get_u32(in, "version");
  if (version != kDescriptorVersion) {
    throw ParseError("unsupported descriptor file version " + std::to_string(version),
                     path.string());
  }
  DescriptorSet set;
  const std::size_t count = get_u32(in, "count");
  set.dimension = get_u32(in, "dimension");
  set.values.resize(count * set.dimension);
  for (auto& v : set.values) v = std::bit_cast<float>(get_u32(in, "values"));

  const auto ids_file = sidecar(path, ids_path);
  std::ifstream ids(ids_file);
  if (!ids) throw IoError("cannot open descriptor id list", ids_file.string());
  std::string line;
  while (std::getline(ids, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) set.ids.push_back(line);
  }
  if (set.ids.size() != count) {
    throw ValidationError("descriptor id list has " + std::to_string(set.ids.size()) +
                              " ids for " + std::to_string(count) + " descriptors",
                          ids_file.string());
  }
  return set;
}

void save_descriptors(const std::filesystem::path& path, const DescriptorSet& set,
                      const std::filesystem::path& ids_path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write descriptor file", path.string());
  put_u32(out, kDescriptorMagic);
  put_u32(out, kDescriptorVersion);
  put_u32(out, static_cast<std::uint32_t>(set.size()));
  put_u32(out, static_cast<std::uint32_t>(set.dimension));
  for (const float v : set.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  std::ofstream ids(sidecar(path, ids_path));
  for (const auto& id : set.ids) ids << id << '\n';
}

}  // namespace vprgt
