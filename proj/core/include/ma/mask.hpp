#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ma {

/// Row-major boolean raster holding one frame (or one target within a frame).
class BinaryMask {
 public:
  BinaryMask() = default;

  /// All-false raster. Height and width must both be >= 1.
  BinaryMask(int height, int width);
  BinaryMask(int height, int width, std::vector<std::uint8_t> bits);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return bits_.size(); }

  bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
  void set(int row, int col, bool value) { bits_[index(row, col)] = value ? 1 : 0; }

  /// Number of true pixels. O(H*W).
  std::size_t count() const;
  bool any() const;

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + col;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Inclusive integer pixel box: both corners are contained pixels.
struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  std::int64_t area() const {
    return static_cast<std::int64_t>(x_max - x_min + 1) * (y_max - y_min + 1);
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// One detected target in one frame. `bbox` is always the tight box of `mask`.
struct Detection {
  int frame_index = 0;
  BinaryMask mask;
  BoundingBox bbox;
  std::string class_label;
  double score = 1.0;
};

/// Builds a Detection from a nonempty mask, computing the tight box.
Detection make_detection(int frame_index, BinaryMask mask,
                         std::string class_label = "object", double score = 1.0);

/// Alternating run counts over the row-major raster, first run counts zeros.
/// Only the leading run may be 0; runs sum to H*W.
std::vector<std::int64_t> rle_encode(const BinaryMask& mask);

/// Exact inverse of rle_encode. Throws InputError on malformed runs.
BinaryMask rle_decode(const std::vector<std::int64_t>& runs, int height, int width);

/// Pixels that are true and have at least one false 4-neighbor (image borders
/// count as false). Output is a subset of the input.
BinaryMask boundary_extract(const BinaryMask& mask);

/// Tight inclusive box of all true pixels. Throws InputError on an empty mask.
BoundingBox bounding_box(const BinaryMask& mask);

/// Intersection over union under the inclusive-pixel area convention.
double iou(const BoundingBox& a, const BoundingBox& b);

/// One Detection per 4-connected component with area >= min_area, ordered by
/// (y_min, x_min). Component masks keep the full frame size.
std::vector<Detection> connected_components(const BinaryMask& frame,
                                            std::int64_t min_area = 4,
                                            int frame_index = 0);

}  // namespace ma
