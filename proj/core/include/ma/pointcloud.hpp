#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ma/tracker.hpp"

namespace ma {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

using PointCloud = std::vector<Point3>;

/// Boundary pixels of every mask in the sequence mapped to 3-D points:
/// column -> x, row -> y, frame_index * time_scale -> z. Frames whose
/// boundary is empty are skipped; an entirely empty cloud is an error.
PointCloud masks_to_pointcloud(const TrackMaskSequence& seq, double time_scale);

/// Greedy farthest-point downsampling. Returns all points in input order when
/// point_count >= cloud size; otherwise starts from a uniformly seeded index
/// and repeatedly takes the point maximizing the minimum distance to the
/// selected set, breaking ties by smallest input index.
PointCloud farthest_point_sample(const PointCloud& cloud, int point_count,
                                 std::uint64_t seed);

/// Same, with the first selected index forced (used by tests).
PointCloud farthest_point_sample_from(const PointCloud& cloud, int point_count,
                                      std::size_t first_index);

/// Index form of the greedy selection; first_index must be < cloud size.
std::vector<std::size_t> farthest_point_sample_indices(const PointCloud& cloud,
                                                       int point_count,
                                                       std::size_t first_index);

/// Centroid-centering followed by isotropic scaling so the farthest point has
/// norm 1. A cloud of coincident points maps to all zeros.
PointCloud normalize_unit_sphere(const PointCloud& cloud);

/// Debug dump, one "x y z" line per point.
void write_xyz(std::ostream& out, const PointCloud& cloud);

}  // namespace ma
