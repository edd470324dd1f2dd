#include "ma/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "ma/error.hpp"
#include "ma/text_format.hpp"

namespace ma {

PointCloud masks_to_pointcloud(const TrackMaskSequence& seq, double time_scale) {
  if (seq.entries.empty()) {
    throw InputError("mask sequence is empty");
  }
  if (!(time_scale > 0.0)) {
    throw InputError("time_scale must be positive");
  }
  PointCloud cloud;
  for (const auto& [frame_index, mask] : seq.entries) {
    const BinaryMask boundary = boundary_extract(mask);
    const double z = frame_index * time_scale;
    for (int r = 0; r < boundary.height(); ++r) {
      for (int c = 0; c < boundary.width(); ++c) {
        if (boundary.at(r, c)) {
          cloud.push_back(Point3{static_cast<double>(c), static_cast<double>(r), z});
        }
      }
    }
  }
  if (cloud.empty()) {
    throw InputError("sequence produced an empty point cloud");
  }
  return cloud;
}

namespace {

double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

std::vector<std::size_t> farthest_point_sample_indices(const PointCloud& cloud,
                                                       int point_count,
                                                       std::size_t first_index) {
  if (point_count < 1) {
    throw InputError("point_count must be >= 1");
  }
  if (cloud.empty()) {
    throw InputError("cannot sample an empty cloud");
  }
  if (first_index >= cloud.size()) {
    throw InputError("first_index out of range");
  }
  const std::size_t n = cloud.size();
  const std::size_t k = std::min<std::size_t>(point_count, n);

  std::vector<std::size_t> selected;
  selected.reserve(k);
  std::vector<double> min_dist2(n, std::numeric_limits<double>::infinity());

  std::size_t current = first_index;
  selected.push_back(current);
  while (selected.size() < k) {
    std::size_t best = n;
    double best_dist2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      min_dist2[i] = std::min(min_dist2[i], squared_distance(cloud[i], cloud[current]));
      if (min_dist2[i] > best_dist2) {  // strict '>' keeps the smallest index on ties
        best_dist2 = min_dist2[i];
        best = i;
      }
    }
    current = best;
    selected.push_back(current);
  }
  return selected;
}

PointCloud farthest_point_sample_from(const PointCloud& cloud, int point_count,
                                      std::size_t first_index) {
  if (point_count >= static_cast<int>(cloud.size())) {
    if (point_count < 1) throw InputError("point_count must be >= 1");
    return cloud;
  }
  PointCloud out;
  out.reserve(point_count);
  for (std::size_t i : farthest_point_sample_indices(cloud, point_count, first_index)) {
    out.push_back(cloud[i]);
  }
  return out;
}

PointCloud farthest_point_sample(const PointCloud& cloud, int point_count,
                                 std::uint64_t seed) {
  if (point_count < 1) {
    throw InputError("point_count must be >= 1");
  }
  if (cloud.empty()) {
    throw InputError("cannot sample an empty cloud");
  }
  if (point_count >= static_cast<int>(cloud.size())) {
    return cloud;
  }
  // Modulo keeps the draw reproducible across standard library implementations.
  std::mt19937_64 rng(seed);
  const std::size_t first = static_cast<std::size_t>(rng() % cloud.size());
  return farthest_point_sample_from(cloud, point_count, first);
}

PointCloud normalize_unit_sphere(const PointCloud& cloud) {
  if (cloud.empty()) {
    throw InputError("cannot normalize an empty cloud");
  }
  double cx = 0.0, cy = 0.0, cz = 0.0;
  for (const Point3& p : cloud) {
    cx += p.x;
    cy += p.y;
    cz += p.z;
  }
  const double n = static_cast<double>(cloud.size());
  cx /= n;
  cy /= n;
  cz /= n;

  PointCloud centered;
  centered.reserve(cloud.size());
  double max_norm2 = 0.0;
  for (const Point3& p : cloud) {
    const Point3 q{p.x - cx, p.y - cy, p.z - cz};
    max_norm2 = std::max(max_norm2, q.x * q.x + q.y * q.y + q.z * q.z);
    centered.push_back(q);
  }
  if (max_norm2 == 0.0) {
    return centered;  // all points coincide
  }
  const double scale = std::sqrt(max_norm2);
  for (Point3& q : centered) {
    q.x /= scale;
    q.y /= scale;
    q.z /= scale;
  }
  return centered;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
  for (const Point3& p : cloud) {
    out << format_double(p.x) << ' ' << format_double(p.y) << ' '
        << format_double(p.z) << '\n';
  }
}

}  // namespace ma
