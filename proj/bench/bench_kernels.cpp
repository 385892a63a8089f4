#include "vprgt/annotation.hpp"
#include "vprgt/evaluation.hpp"
#include "vprgt/groundtruth.hpp"
#include "vprgt/retrieval.hpp"
#include "vprgt/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

using namespace vprgt;

namespace {

DescriptorSet random_descriptors(std::size_t count, std::size_t dim, std::uint64_t seed,
                                 const std::string& prefix) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  DescriptorSet set;
  set.dimension = dim;
  for (std::size_t i = 0; i < count; ++i) {
    set.ids.push_back(prefix + std::to_string(i));
    for (std::size_t j = 0; j < dim; ++j) set.values.push_back(g(rng));
  }
  return set;
}

void knn(benchmark::State& state, Exec exec) {
  const auto db = random_descriptors(static_cast<std::size_t>(state.range(0)), 256, 1, "d");
  const auto q = random_descriptors(200, 256, 2, "q");
  for (auto _ : state) {
    benchmark::DoNotOptimize(nearest_neighbor_retrieve(q, db, 20, DistanceMetric::euclidean, exec));
  }
  state.SetItemsProcessed(state.iterations() * 200);
}

struct RecallFixture {
  std::vector<LocalizedImage> queries, database;
  std::vector<RetrievalResult> results;

  explicit RecallFixture(std::size_t nq) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 500);
    for (std::size_t i = 0; i < 2000; ++i) {
      database.push_back({"d" + std::to_string(i), "s", ImageRole::database, Vec2(u(rng), u(rng))});
    }
    std::uniform_int_distribution<std::size_t> pick(0, database.size() - 1);
    for (std::size_t i = 0; i < nq; ++i) {
      queries.push_back({"q" + std::to_string(i), "s", ImageRole::query, Vec2(u(rng), u(rng))});
      RetrievalResult r{queries.back().image_id, {}};
      for (int k = 0; k < 20; ++k) r.ranked.push_back(database[pick(rng)].image_id);
      std::sort(r.ranked.begin(), r.ranked.end());
      r.ranked.erase(std::unique(r.ranked.begin(), r.ranked.end()), r.ranked.end());
      results.push_back(std::move(r));
    }
  }
};

void recall(benchmark::State& state, Exec exec) {
  const RecallFixture f(static_cast<std::size_t>(state.range(0)));
  const std::vector<int> ns{1, 5, 10, 20};
  for (auto _ : state) {
    benchmark::DoNotOptimize(recall_at_n(f.queries, f.database, f.results, ns, 25.0, exec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void frame_pairs(benchmark::State& state, Exec exec) {
  auto params = default_pair_params(5, static_cast<std::size_t>(state.range(0)));
  params.route.width = params.route.height = 400.0;
  params.keyframe_rate_a = params.keyframe_rate_b = 4.0;
  const auto pair = make_synthetic_pair(params);
  const auto proposal = propose_pair(pair.a.trajectory, pair.b.trajectory, {});
  const auto matches =
      apply_correction(proposal.matches, AcceptAll{}, proposal.tps_a.size(), proposal.tps_b.size());
  const auto kp = accepted_keyframe_pairs(matches, proposal.tps_a, proposal.tps_b);
  const auto transform = AlignmentTransform::identity();
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_frame_pairs(pair.a.trajectory, pair.b.trajectory, kp,
                                                  pair.duration_a, pair.duration_b, transform, exec));
  }
}

}  // namespace

BENCHMARK_CAPTURE(knn, serial, Exec::serial)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(knn, parallel, Exec::parallel)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(recall, serial, Exec::serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(recall, parallel, Exec::parallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(frame_pairs, serial, Exec::serial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(frame_pairs, parallel, Exec::parallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
