#pragma once

#include "vprgt/evaluation.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vprgt {

enum class DistanceMetric { euclidean, cosine };

std::string_view to_string(DistanceMetric metric);
DistanceMetric parse_distance_metric(std::string_view name);

/// Row-major float descriptors with one id per row.
struct DescriptorSet {
  std::vector<std::string> ids;
  std::size_t dimension = 0;
  std::vector<float> values;

  std::size_t size() const noexcept { return ids.size(); }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * dimension, dimension};
  }
};

double descriptor_distance(std::span<const float> a, std::span<const float> b,
                           DistanceMetric metric);

/// Exact k-nearest database descriptors per query, ties broken by database
/// id. `k` is clamped to the database size.
///
/// Exec::parallel partially sorts per query under OpenMP; Exec::serial
/// fully sorts every (distance, id) list.
std::vector<RetrievalResult> nearest_neighbor_retrieve(const DescriptorSet& queries,
                                                       const DescriptorSet& database,
                                                       std::size_t k,
                                                       DistanceMetric metric = DistanceMetric::euclidean,
                                                       Exec exec = Exec::parallel);

// Binary layout: magic, version, count, dimension as little-endian uint32,
// then count * dimension little-endian float32. Ids live in a sidecar text
// file, one per line (default: `<path>.ids`).
inline constexpr std::uint32_t kDescriptorMagic = 0x44525056;  // "VPRD"
inline constexpr std::uint32_t kDescriptorVersion = 1;

DescriptorSet load_descriptors(const std::filesystem::path& path,
                               const std::filesystem::path& ids_path = {});
void save_descriptors(const std::filesystem::path& path, const DescriptorSet& set,
                      const std::filesystem::path& ids_path = {});

}  // namespace vprgt
