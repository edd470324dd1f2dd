#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ma/pointcloud.hpp"

namespace ma {

inline constexpr int kFeatureDim = 256;
inline constexpr int kNormBins = 64;
inline constexpr int kAxisBins = 48;
inline constexpr int kPairBins = 48;
inline constexpr int kDescriptorVersion = 1;

/// Pairwise distances use every pair up to this cloud size; larger clouds
/// fall back to a fixed-seed sample of kSampledPairs pairs.
inline constexpr std::size_t kAllPairsLimit = 3072;
inline constexpr std::size_t kSampledPairs = 5'000'000;

/// 256-dim L2-normalized retrieval key.
struct FeatureVector {
  std::array<double, kFeatureDim> values{};

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class EmbedderKind { builtin_descriptor, imported };

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::builtin_descriptor;
  int descriptor_version = kDescriptorVersion;
};

/// Shape descriptor of a normalized cloud. Concatenates five L1-normalized
/// histogram blocks (point norms: 64 bins over [0,1]; per-axis coordinates:
/// 3 x 48 bins over [-1,1]; pairwise distances: 48 bins over [0,2]),
/// then L2-normalizes the result. Throws InputError on an empty cloud.
FeatureVector embed(const PointCloud& cloud);

/// Euclidean distance between two equal-length vectors.
/// Throws InputError on a dimension mismatch.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

double feature_distance(const FeatureVector& a, const FeatureVector& b);

/// Parameters that decide whether two feature sets are comparable.
/// time_scale is the policy token: "auto" or a decimal value.
struct PipelineParams {
  int descriptor_version = kDescriptorVersion;
  int point_count = 3072;
  std::string time_scale = "auto";

  friend bool operator==(const PipelineParams&, const PipelineParams&) = default;
};

/// Throws IncompatibilityError unless both sides agree on descriptor version,
/// point count and time-scale policy. Seeds are allowed to differ.
void require_compatible(const PipelineParams& a, const PipelineParams& b);

struct FeatureFileHeader {
  int format_version = 1;
  PipelineParams params;
  std::uint64_t seed = 0;
  bool normalized = true;
};

struct FeatureRecord {
  std::string video_id;
  int target_id = 0;
  std::string class_label;
  FeatureVector feature;
};

struct FeatureFile {
  FeatureFileHeader header;
  std::vector<FeatureRecord> records;
};

// Line-oriented format. Header: "MAFT <format> <descriptor> <points> <tau>
// <seed> <normalized>". Records: "<video_id> <target_id> <class_label>"
// followed by 256 round-trip-exact decimals. String fields are
// percent-escaped. Vectors flagged unnormalized are re-normalized on read.
void write_feature_file(std::ostream& out, const FeatureFile& file);
FeatureFile read_feature_file(std::istream& in);

FeatureFile load_feature_file(const std::filesystem::path& path);
void save_feature_file(const std::filesystem::path& path, const FeatureFile& file);

}  // namespace ma
