#include "ma/mask.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "ma/error.hpp"

namespace ma {

BinaryMask::BinaryMask(int height, int width)
    : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw InputError("mask dimensions must be >= 1");
  }
  bits_.assign(static_cast<std::size_t>(height) * width, 0);
}

BinaryMask::BinaryMask(int height, int width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  if (height < 1 || width < 1) {
    throw InputError("mask dimensions must be >= 1");
  }
  if (bits_.size() != static_cast<std::size_t>(height) * width) {
    throw InputError("mask bit count does not match dimensions");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

bool BinaryMask::any() const {
  return std::find(bits_.begin(), bits_.end(), 1) != bits_.end();
}

Detection make_detection(int frame_index, BinaryMask mask,
                         std::string class_label, double score) {
  Detection det;
  det.frame_index = frame_index;
  det.bbox = bounding_box(mask);
  det.mask = std::move(mask);
  det.class_label = std::move(class_label);
  det.score = score;
  return det;
}

std::vector<std::int64_t> rle_encode(const BinaryMask& mask) {
  std::vector<std::int64_t> runs;
  std::uint8_t current = 0;  // first run counts zeros
  std::int64_t length = 0;
  for (std::uint8_t bit : mask.bits()) {
    if (bit == current) {
      ++length;
    } else {
      runs.push_back(length);
      current = bit;
      length = 1;
    }
  }
  runs.push_back(length);
  return runs;
}

BinaryMask rle_decode(const std::vector<std::int64_t>& runs, int height, int width) {
  if (height < 1 || width < 1) {
    throw InputError("mask dimensions must be >= 1");
  }
  if (runs.empty()) {
    throw InputError("malformed rle: empty run list");
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i] < 0 || (runs[i] == 0 && i != 0)) {
      throw InputError("malformed rle: runs must be positive (leading zero allowed)");
    }
  }
  const std::int64_t total = std::accumulate(runs.begin(), runs.end(), std::int64_t{0});
  const std::int64_t expected = static_cast<std::int64_t>(height) * width;
  if (total != expected) {
    throw InputError("malformed rle: runs sum to " + std::to_string(total) +
                     ", expected " + std::to_string(expected));
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(expected));
  std::uint8_t value = 0;
  for (std::int64_t run : runs) {
    bits.insert(bits.end(), static_cast<std::size_t>(run), value);
    value ^= 1;
  }
  return BinaryMask(height, width, std::move(bits));
}

BinaryMask boundary_extract(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  BinaryMask out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      const bool interior = r > 0 && r < h - 1 && c > 0 && c < w - 1 &&
                            mask.at(r - 1, c) && mask.at(r + 1, c) &&
                            mask.at(r, c - 1) && mask.at(r, c + 1);
      if (!interior) out.set(r, c, true);
    }
  }
  return out;
}

BoundingBox bounding_box(const BinaryMask& mask) {
  BoundingBox box{mask.width(), mask.height(), -1, -1};
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(r, c)) continue;
      box.x_min = std::min(box.x_min, c);
      box.y_min = std::min(box.y_min, r);
      box.x_max = std::max(box.x_max, c);
      box.y_max = std::max(box.y_max, r);
    }
  }
  if (box.x_max < 0) {
    throw InputError("bounding_box of an empty mask");
  }
  return box;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const int ix_min = std::max(a.x_min, b.x_min);
  const int iy_min = std::max(a.y_min, b.y_min);
  const int ix_max = std::min(a.x_max, b.x_max);
  const int iy_max = std::min(a.y_max, b.y_max);
  std::int64_t inter = 0;
  if (ix_min <= ix_max && iy_min <= iy_max) {
    inter = static_cast<std::int64_t>(ix_max - ix_min + 1) * (iy_max - iy_min + 1);
  }
  const std::int64_t uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Detection> connected_components(const BinaryMask& frame,
                                            std::int64_t min_area,
                                            int frame_index) {
  const int h = frame.height();
  const int w = frame.width();
  std::vector<std::uint8_t> visited(frame.size(), 0);
  std::vector<Detection> detections;
  std::vector<std::pair<int, int>> stack;

  for (int r0 = 0; r0 < h; ++r0) {
    for (int c0 = 0; c0 < w; ++c0) {
      const std::size_t start = static_cast<std::size_t>(r0) * w + c0;
      if (!frame.at(r0, c0) || visited[start]) continue;

      BinaryMask component(h, w);
      std::int64_t area = 0;
      stack.clear();
      stack.emplace_back(r0, c0);
      visited[start] = 1;
      while (!stack.empty()) {
        auto [r, c] = stack.back();
        stack.pop_back();
        component.set(r, c, true);
        ++area;
        const int nr[4] = {r - 1, r + 1, r, r};
        const int nc[4] = {c, c, c - 1, c + 1};
        for (int k = 0; k < 4; ++k) {
          if (nr[k] < 0 || nr[k] >= h || nc[k] < 0 || nc[k] >= w) continue;
          const std::size_t ni = static_cast<std::size_t>(nr[k]) * w + nc[k];
          if (!visited[ni] && frame.at(nr[k], nc[k])) {
            visited[ni] = 1;
            stack.emplace_back(nr[k], nc[k]);
          }
        }
      }
      if (area >= min_area) {
        detections.push_back(make_detection(frame_index, std::move(component)));
      }
    }
  }
  std::sort(detections.begin(), detections.end(),
            [](const Detection& a, const Detection& b) {
              return std::pair(a.bbox.y_min, a.bbox.x_min) <
                     std::pair(b.bbox.y_min, b.bbox.x_min);
            });
  return detections;
}

}  // namespace ma
