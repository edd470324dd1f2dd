#include "ma/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ma/error.hpp"
#include "ma/text_format.hpp"

namespace ma {

namespace {

// Half-open bins [lo, hi) with the final bin closed; out-of-range values
// clamp to the end bins to absorb float slop at the block boundaries.
int bin_index(double value, double lo, double hi, int bins) {
  const double scaled = (value - lo) / (hi - lo) * bins;
  int idx = static_cast<int>(std::floor(scaled));
  if (idx < 0) idx = 0;
  if (idx >= bins) idx = bins - 1;
  return idx;
}

void normalize_l1(std::span<double> block, double total) {
  if (total <= 0.0) return;
  for (double& v : block) v /= total;
}

constexpr std::uint64_t kPairSampleSeed = 0x5D2F0C1A93B7E441ull;

}  // namespace

FeatureVector embed(const PointCloud& cloud) {
  if (cloud.empty()) {
    throw InputError("cannot embed an empty cloud");
  }
  FeatureVector fv;
  auto& v = fv.values;
  const std::size_t n = cloud.size();

  std::span<double> norm_block(v.data(), kNormBins);
  std::span<double> x_block(v.data() + kNormBins, kAxisBins);
  std::span<double> y_block(v.data() + kNormBins + kAxisBins, kAxisBins);
  std::span<double> z_block(v.data() + kNormBins + 2 * kAxisBins, kAxisBins);
  std::span<double> pair_block(v.data() + kNormBins + 3 * kAxisBins, kPairBins);

  for (const Point3& p : cloud) {
    const double norm = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    norm_block[bin_index(norm, 0.0, 1.0, kNormBins)] += 1.0;
    x_block[bin_index(p.x, -1.0, 1.0, kAxisBins)] += 1.0;
    y_block[bin_index(p.y, -1.0, 1.0, kAxisBins)] += 1.0;
    z_block[bin_index(p.z, -1.0, 1.0, kAxisBins)] += 1.0;
  }
  normalize_l1(norm_block, static_cast<double>(n));
  normalize_l1(x_block, static_cast<double>(n));
  normalize_l1(y_block, static_cast<double>(n));
  normalize_l1(z_block, static_cast<double>(n));

  auto pair_distance = [&](std::size_t i, std::size_t j) {
    const double dx = cloud[i].x - cloud[j].x;
    const double dy = cloud[i].y - cloud[j].y;
    const double dz = cloud[i].z - cloud[j].z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };

  std::size_t pair_count = 0;
  if (n <= kAllPairsLimit) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        pair_block[bin_index(pair_distance(i, j), 0.0, 2.0, kPairBins)] += 1.0;
        ++pair_count;
      }
    }
  } else {
    std::mt19937_64 rng(kPairSampleSeed);
    while (pair_count < kSampledPairs) {
      const std::size_t i = static_cast<std::size_t>(rng() % n);
      const std::size_t j = static_cast<std::size_t>(rng() % n);
      if (i == j) continue;
      pair_block[bin_index(pair_distance(i, j), 0.0, 2.0, kPairBins)] += 1.0;
      ++pair_count;
    }
  }
  normalize_l1(pair_block, static_cast<double>(pair_count));

  // Accumulate the squared norm over sorted values so the normalizer is
  // identical for any permutation-equivalent vector (e.g. a mirrored axis
  // block), keeping the untouched blocks bit-stable.
  std::array<double, kFeatureDim> squares;
  for (int i = 0; i < kFeatureDim; ++i) squares[i] = v[i] * v[i];
  std::sort(squares.begin(), squares.end());
  double norm2 = 0.0;
  for (double s : squares) norm2 += s;
  const double norm = std::sqrt(norm2);
  if (norm > 0.0) {
    for (double& value : v) value /= norm;
  }
  return fv;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("vector dimensions differ: " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double feature_distance(const FeatureVector& a, const FeatureVector& b) {
  return euclidean_distance(a.values, b.values);
}

void require_compatible(const PipelineParams& a, const PipelineParams& b) {
  if (a == b) return;
  throw IncompatibilityError(
      "pipeline parameters differ: descriptor " + std::to_string(a.descriptor_version) +
      "/" + std::to_string(b.descriptor_version) + ", points " +
      std::to_string(a.point_count) + "/" + std::to_string(b.point_count) +
      ", tau " + a.time_scale + "/" + b.time_scale);
}

namespace {

constexpr std::string_view kFeatureTag = "MAFT";
constexpr int kFeatureFormatVersion = 1;

void renormalize(FeatureVector& fv) {
  double norm2 = 0.0;
  for (double value : fv.values) norm2 += value * value;
  const double norm = std::sqrt(norm2);
  if (norm > 0.0) {
    for (double& value : fv.values) value /= norm;
  }
}

/// Validates the time-scale policy token: "auto" or a positive decimal.
void check_time_scale_token(const std::string& token) {
  if (token == "auto") return;
  if (!(parse_double(token) > 0.0)) {
    throw InputError("time_scale must be positive: " + token);
  }
}

}  // namespace

void write_feature_file(std::ostream& out, const FeatureFile& file) {
  const FeatureFileHeader& h = file.header;
  out << kFeatureTag << ' ' << h.format_version << ' '
      << h.params.descriptor_version << ' ' << h.params.point_count << ' '
      << h.params.time_scale << ' ' << h.seed << ' ' << (h.normalized ? 1 : 0)
      << '\n';
  for (const FeatureRecord& rec : file.records) {
    out << escape_field(rec.video_id) << ' ' << rec.target_id << ' '
        << escape_field(rec.class_label);
    for (double value : rec.feature.values) {
      out << ' ' << format_double(value);
    }
    out << '\n';
  }
}

FeatureFile read_feature_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("feature file is empty");
  }
  const auto header_tokens = split_tokens(line);
  if (header_tokens.size() != 7 || header_tokens[0] != kFeatureTag) {
    throw InputError("feature file line 1: bad header");
  }
  FeatureFile file;
  FeatureFileHeader& h = file.header;
  h.format_version = static_cast<int>(parse_int(header_tokens[1]));
  if (h.format_version != kFeatureFormatVersion) {
    throw IncompatibilityError("unsupported feature file format version " +
                               std::string(header_tokens[1]));
  }
  h.params.descriptor_version = static_cast<int>(parse_int(header_tokens[2]));
  h.params.point_count = static_cast<int>(parse_int(header_tokens[3]));
  h.params.time_scale = std::string(header_tokens[4]);
  check_time_scale_token(h.params.time_scale);
  h.seed = static_cast<std::uint64_t>(parse_int(header_tokens[5]));
  h.normalized = parse_int(header_tokens[6]) != 0;

  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto tokens = split_tokens(line);
    const std::string where = "feature file line " + std::to_string(line_number);
    if (tokens.size() < 3) {
      throw InputError(where + ": expected ids and values");
    }
    const std::size_t value_count = tokens.size() - 3;
    if (value_count != kFeatureDim) {
      throw InputError(where + ": expected " + std::to_string(kFeatureDim) +
                       " values, got " + std::to_string(value_count));
    }
    FeatureRecord rec;
    try {
      rec.video_id = unescape_field(tokens[0]);
      rec.target_id = static_cast<int>(parse_int(tokens[1]));
      rec.class_label = unescape_field(tokens[2]);
      for (int i = 0; i < kFeatureDim; ++i) {
        rec.feature.values[i] = parse_double(tokens[3 + i]);
      }
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    if (!h.normalized) renormalize(rec.feature);
    file.records.push_back(std::move(rec));
  }
  if (!h.normalized) h.normalized = true;
  return file;
}

FeatureFile load_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open feature file: " + path.string());
  }
  return read_feature_file(in);
}

void save_feature_file(const std::filesystem::path& path, const FeatureFile& file) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write feature file: " + path.string());
  }
  write_feature_file(out, file);
  if (!out.flush()) {
    throw InputError("write failed: " + path.string());
  }
}

}  // namespace ma
