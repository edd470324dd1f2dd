#include <benchmark/benchmark.h>

#include <random>

#include "ma/embed.hpp"
#include "ma/hungarian.hpp"
#include "ma/mask.hpp"
#include "ma/pointcloud.hpp"
#include "ma/vectordb.hpp"

namespace {

ma::PointCloud make_cloud(std::size_t n) {
  std::mt19937_64 rng(1);
  ma::PointCloud cloud;
  cloud.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.push_back(ma::Point3{static_cast<double>(rng() % 128),
                               static_cast<double>(rng() % 96),
                               static_cast<double>(rng() % 256)});
  }
  return cloud;
}

ma::FeatureVector make_feature(std::mt19937_64& rng) {
  ma::FeatureVector fv;
  double norm2 = 0.0;
  for (double& v : fv.values) {
    v = (rng() >> 11) * 0x1.0p-53;
    norm2 += v * v;
  }
  for (double& v : fv.values) v /= std::sqrt(norm2);
  return fv;
}

void BM_FarthestPointSample(benchmark::State& state) {
  const ma::PointCloud cloud = make_cloud(static_cast<std::size_t>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ma::farthest_point_sample(cloud, k, 7));
  }
}
BENCHMARK(BM_FarthestPointSample)
    ->Args({4096, 512})
    ->Args({8192, 1024})
    ->Args({20000, 3072});

void BM_Embed(benchmark::State& state) {
  const ma::PointCloud cloud = ma::normalize_unit_sphere(
      make_cloud(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ma::embed(cloud));
  }
}
BENCHMARK(BM_Embed)->Arg(512)->Arg(1024)->Arg(3072);

void BM_Hungarian(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0));
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (auto& row : cost) {
    for (double& c : row) c = (rng() >> 11) * 0x1.0p-53;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ma::hungarian(cost));
  }
}
BENCHMARK(BM_Hungarian)->Arg(7)->Arg(32)->Arg(128);

void BM_QueryTopK(benchmark::State& state) {
  std::mt19937_64 rng(3);
  ma::Database db;
  for (int i = 0; i < state.range(0); ++i) {
    db.insert(ma::DbEntry{"v" + std::to_string(i), 0, "object", make_feature(rng)});
  }
  const ma::FeatureVector probe = make_feature(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(db.query_topk(probe, 5));
  }
}
BENCHMARK(BM_QueryTopK)->Arg(1000)->Arg(10000);

void BM_BoundaryExtract(benchmark::State& state) {
  std::mt19937_64 rng(4);
  ma::BinaryMask mask(96, 128);
  for (int r = 20; r < 70; ++r) {
    for (int c = 30; c < 100; ++c) {
      if ((r - 45) * (r - 45) * 4 + (c - 65) * (c - 65) <= 1200) mask.set(r, c, true);
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ma::boundary_extract(mask));
  }
}
BENCHMARK(BM_BoundaryExtract);

void BM_RleRoundTrip(benchmark::State& state) {
  std::mt19937_64 rng(5);
  ma::BinaryMask mask(96, 128);
  for (int r = 0; r < 96; ++r) {
    for (int c = 0; c < 128; ++c) {
      if (rng() % 3 == 0) mask.set(r, c, true);
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ma::rle_decode(ma::rle_encode(mask), 96, 128));
  }
}
BENCHMARK(BM_RleRoundTrip);

}  // namespace

BENCHMARK_MAIN();
