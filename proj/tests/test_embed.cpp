#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ma/embed.hpp"
#include "ma/error.hpp"
#include "ma/pointcloud.hpp"

using namespace ma;

namespace {

PointCloud random_normalized_cloud(std::mt19937_64& rng, std::size_t n) {
  PointCloud cloud;
  cloud.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto coord = [&] { return (rng() >> 11) * 0x1.0p-53 * 60.0 - 30.0; };
    cloud.push_back(Point3{coord(), coord(), coord()});
  }
  return normalize_unit_sphere(cloud);
}

double l2_norm(const FeatureVector& fv) {
  double sum = 0.0;
  for (double v : fv.values) sum += v * v;
  return std::sqrt(sum);
}

double block_sum(const FeatureVector& fv, int offset, int bins) {
  return std::accumulate(fv.values.begin() + offset,
                         fv.values.begin() + offset + bins, 0.0);
}

FeatureVector random_unit_feature(std::mt19937_64& rng) {
  FeatureVector fv;
  double norm2 = 0.0;
  for (double& v : fv.values) {
    v = (rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  for (double& v : fv.values) v /= norm;
  return fv;
}

}  // namespace

TEST_CASE("embed produces a 256-dim unit vector") {
  std::mt19937_64 rng(11);
  const FeatureVector fv = embed(random_normalized_cloud(rng, 300));
  CHECK(fv.values.size() == 256);
  CHECK(l2_norm(fv) == doctest::Approx(1.0).epsilon(1e-9));
  for (double v : fv.values) CHECK(std::isfinite(v));
}

TEST_CASE("identical clouds embed to identical vectors") {
  std::mt19937_64 rng(12);
  const PointCloud cloud = random_normalized_cloud(rng, 200);
  CHECK(feature_distance(embed(cloud), embed(cloud)) == 0.0);
}

TEST_CASE("embedding is invariant under point permutations") {
  std::mt19937_64 rng(13);
  PointCloud cloud = random_normalized_cloud(rng, 150);
  const FeatureVector original = embed(cloud);
  std::shuffle(cloud.begin(), cloud.end(), rng);
  const FeatureVector shuffled = embed(cloud);
  for (int i = 0; i < kFeatureDim; ++i) {
    CHECK(std::abs(original.values[i] - shuffled.values[i]) <= 1e-12);
  }
}

TEST_CASE("similarity transforms barely move the feature") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    PointCloud cloud;
    for (int i = 0; i < 400; ++i) {
      cloud.push_back(Point3{static_cast<double>(rng() % 120),
                             static_cast<double>(rng() % 90),
                             static_cast<double>(rng() % 60)});
    }
    PointCloud transformed;
    for (const Point3& p : cloud) {
      transformed.push_back(Point3{2.0 * p.x + 7.0, 2.0 * p.y + 3.0, 2.0 * p.z + 11.0});
    }
    const FeatureVector a = embed(normalize_unit_sphere(cloud));
    const FeatureVector b = embed(normalize_unit_sphere(transformed));
    CHECK(feature_distance(a, b) <= 1e-6);
  }
}

TEST_CASE("reflection only touches the x-axis histogram block") {
  std::mt19937_64 rng(15);
  PointCloud cloud = random_normalized_cloud(rng, 250);
  PointCloud mirrored = cloud;
  for (Point3& p : mirrored) p.x = -p.x;

  const FeatureVector a = embed(cloud);
  const FeatureVector b = embed(mirrored);

  // Norms and pairwise distances are preserved by reflection: those blocks
  // are bit-stable. The y/z axis blocks are untouched too.
  for (int i = 0; i < kNormBins; ++i) CHECK(a.values[i] == b.values[i]);
  const int y_off = kNormBins + kAxisBins;
  for (int i = y_off; i < y_off + 2 * kAxisBins; ++i) CHECK(a.values[i] == b.values[i]);
  const int pair_off = kNormBins + 3 * kAxisBins;
  for (int i = pair_off; i < pair_off + kPairBins; ++i) CHECK(a.values[i] == b.values[i]);

  // The x block itself is mirrored rather than preserved.
  bool x_changed = false;
  for (int i = kNormBins; i < kNormBins + kAxisBins; ++i) {
    if (a.values[i] != b.values[i]) x_changed = true;
  }
  CHECK(x_changed);
}

TEST_CASE("all five histogram blocks carry equal pre-normalization mass") {
  std::mt19937_64 rng(16);
  const FeatureVector fv = embed(random_normalized_cloud(rng, 120));
  const double norm_mass = block_sum(fv, 0, kNormBins);
  CHECK(norm_mass > 0.0);
  CHECK(block_sum(fv, kNormBins, kAxisBins) == doctest::Approx(norm_mass).epsilon(1e-9));
  CHECK(block_sum(fv, kNormBins + kAxisBins, kAxisBins) ==
        doctest::Approx(norm_mass).epsilon(1e-9));
  CHECK(block_sum(fv, kNormBins + 2 * kAxisBins, kAxisBins) ==
        doctest::Approx(norm_mass).epsilon(1e-9));
  CHECK(block_sum(fv, kNormBins + 3 * kAxisBins, kPairBins) ==
        doctest::Approx(norm_mass).epsilon(1e-9));
}

TEST_CASE("clouds above the all-pairs limit embed deterministically") {
  std::mt19937_64 rng(17);
  const PointCloud big = random_normalized_cloud(rng, kAllPairsLimit + 400);
  const FeatureVector a = embed(big);
  const FeatureVector b = embed(big);
  CHECK(a == b);
  CHECK(l2_norm(a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("embed rejects an empty cloud") {
  CHECK_THROWS_AS(embed(PointCloud{}), InputError);
}

TEST_CASE("feature distance basics") {
  FeatureVector a;
  a.values[0] = 1.0;
  FeatureVector b;
  b.values[1] = 1.0;
  CHECK(feature_distance(a, a) == 0.0);
  CHECK(feature_distance(a, b) == doctest::Approx(std::sqrt(2.0)));

  const std::vector<double> three{1.0, 2.0, 3.0};
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(euclidean_distance(three, two), InputError);
}

TEST_CASE("feature distance matches an independent summation order") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    const FeatureVector a = random_unit_feature(rng);
    const FeatureVector b = random_unit_feature(rng);
    // Reverse-order accumulation as the second route.
    double sum = 0.0;
    for (int i = kFeatureDim - 1; i >= 0; --i) {
      const double d = a.values[i] - b.values[i];
      sum += d * d;
    }
    CHECK(std::abs(feature_distance(a, b) - std::sqrt(sum)) <= 1e-12);
  }
}

TEST_CASE("feature files round-trip bit-exactly") {
  std::mt19937_64 rng(19);
  FeatureFile file;
  file.header.params.point_count = 512;
  file.header.params.time_scale = "auto";
  file.header.seed = 77;
  for (int i = 0; i < 100; ++i) {
    file.records.push_back(FeatureRecord{
        "video " + std::to_string(i % 10), i, "object", random_unit_feature(rng)});
  }
  std::stringstream stream;
  write_feature_file(stream, file);
  const FeatureFile back = read_feature_file(stream);
  CHECK(back.header.params == file.header.params);
  CHECK(back.header.seed == file.header.seed);
  REQUIRE(back.records.size() == file.records.size());
  for (std::size_t i = 0; i < file.records.size(); ++i) {
    CHECK(back.records[i].video_id == file.records[i].video_id);
    CHECK(back.records[i].target_id == file.records[i].target_id);
    CHECK(back.records[i].feature == file.records[i].feature);
  }
}

TEST_CASE("feature files with the unnormalized flag are renormalized on read") {
  FeatureFile file;
  file.header.normalized = false;
  FeatureRecord rec{"v", 0, "object", {}};
  rec.feature.values[0] = 3.0;
  rec.feature.values[1] = 4.0;
  file.records.push_back(rec);
  std::stringstream stream;
  write_feature_file(stream, file);
  const FeatureFile back = read_feature_file(stream);
  CHECK(back.records[0].feature.values[0] == doctest::Approx(0.6));
  CHECK(back.records[0].feature.values[1] == doctest::Approx(0.8));
  CHECK(back.header.normalized);
}

TEST_CASE("feature file parse errors carry line numbers") {
  std::stringstream missing;
  missing << "MAFT 1 1 3072 auto 0 1\n";
  missing << "v 0 object 0.5 0.5\n";  // far fewer than 256 values
  CHECK_THROWS_WITH_AS(read_feature_file(missing),
                       doctest::Contains("line 2"), InputError);

  std::stringstream wrong_dim;
  wrong_dim << "MAFT 1 1 3072 auto 0 1\nv 0 object";
  for (int i = 0; i < 255; ++i) wrong_dim << " 0.0625";
  wrong_dim << "\n";
  CHECK_THROWS_WITH_AS(read_feature_file(wrong_dim),
                       doctest::Contains("255"), InputError);

  std::stringstream bad_value;
  bad_value << "MAFT 1 1 3072 auto 0 1\nv 0 object";
  for (int i = 0; i < 255; ++i) bad_value << " 0.0625";
  bad_value << " zap\n";
  CHECK_THROWS_AS(read_feature_file(bad_value), InputError);

  std::stringstream bad_header;
  bad_header << "WRONG 1 1 3072 auto 0 1\n";
  CHECK_THROWS_AS(read_feature_file(bad_header), InputError);

  std::stringstream future_version;
  future_version << "MAFT 99 1 3072 auto 0 1\n";
  CHECK_THROWS_AS(read_feature_file(future_version), IncompatibilityError);
}

TEST_CASE("require_compatible accepts equal params and rejects the rest") {
  PipelineParams a;
  PipelineParams b;
  CHECK_NOTHROW(require_compatible(a, b));
  b.point_count = 128;
  CHECK_THROWS_AS(require_compatible(a, b), IncompatibilityError);
  b = a;
  b.descriptor_version = 2;
  CHECK_THROWS_AS(require_compatible(a, b), IncompatibilityError);
  b = a;
  b.time_scale = "0.5";
  CHECK_THROWS_AS(require_compatible(a, b), IncompatibilityError);
}
