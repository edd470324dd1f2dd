#include "ma/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ma/error.hpp"
#include "ma/text_format.hpp"

namespace ma {

namespace {

double size_scale(const ShapeSpec& shape, int frame) {
  if (shape.deform_amplitude == 0.0) return 1.0;
  const double angle =
      2.0 * std::numbers::pi * frame / shape.deform_period + shape.deform_phase;
  return std::max(0.2, 1.0 + shape.deform_amplitude * std::sin(angle));
}

bool point_in_polygon(const std::vector<std::pair<double, double>>& poly,
                      double px, double py) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto [xi, yi] = poly[i];
    const auto [xj, yj] = poly[j];
    if ((yi > py) != (yj > py) &&
        px < (xj - xi) * (py - yi) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

/// Renders one shape at frame n into a full-frame mask. Returns an empty
/// mask when nothing rasterizes.
BinaryMask render_shape(const ShapeSpec& shape, int frame, int width, int height) {
  const double scale = size_scale(shape, frame);
  double extent_x = shape.half_width * scale;
  double extent_y = shape.half_height * scale;
  double max_radius = 1.0;
  if (shape.kind == ShapeKind::polygon) {
    for (double r : shape.polygon_radii) max_radius = std::max(max_radius, r);
    extent_x *= max_radius;
    extent_y *= max_radius;
  }

  const double lo_x = 1.0 + extent_x;
  const double hi_x = width - 2.0 - extent_x;
  const double lo_y = 1.0 + extent_y;
  const double hi_y = height - 2.0 - extent_y;
  if (lo_x > hi_x || lo_y > hi_y) {
    throw InputError("shape does not fit inside the frame");
  }
  const double cx = std::clamp(shape.start_x + frame * shape.velocity_x, lo_x, hi_x);
  const double cy = std::clamp(shape.start_y + frame * shape.velocity_y, lo_y, hi_y);

  std::vector<std::pair<double, double>> poly;
  if (shape.kind == ShapeKind::polygon) {
    std::vector<double> radii = shape.polygon_radii;
    if (radii.empty()) radii.assign(5, 1.0);
    if (radii.size() < 3) {
      throw InputError("polygon needs at least 3 vertices");
    }
    poly.reserve(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double angle = 2.0 * std::numbers::pi * i / radii.size();
      poly.emplace_back(cx + shape.half_width * scale * radii[i] * std::cos(angle),
                        cy + shape.half_height * scale * radii[i] * std::sin(angle));
    }
  }

  const int r0 = std::max(0, static_cast<int>(std::floor(cy - extent_y)));
  const int r1 = std::min(height - 1, static_cast<int>(std::ceil(cy + extent_y)));
  const int c0 = std::max(0, static_cast<int>(std::floor(cx - extent_x)));
  const int c1 = std::min(width - 1, static_cast<int>(std::ceil(cx + extent_x)));

  BinaryMask mask(height, width);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      bool inside = false;
      switch (shape.kind) {
        case ShapeKind::rectangle:
          inside = std::abs(c - cx) <= shape.half_width * scale &&
                   std::abs(r - cy) <= shape.half_height * scale;
          break;
        case ShapeKind::ellipse: {
          const double dx = (c - cx) / (shape.half_width * scale);
          const double dy = (r - cy) / (shape.half_height * scale);
          inside = dx * dx + dy * dy <= 1.0;
          break;
        }
        case ShapeKind::polygon:
          inside = point_in_polygon(poly, c, r);
          break;
      }
      if (inside) mask.set(r, c, true);
    }
  }
  // Thin star-polygon spikes can pinch off stray pixels in the even-odd
  // rasterization; keep the largest 4-connected piece so every rendered
  // shape is a single component.
  if (shape.kind == ShapeKind::polygon && mask.any()) {
    auto components = connected_components(mask, 1);
    const auto largest = std::max_element(
        components.begin(), components.end(),
        [](const Detection& a, const Detection& b) {
          return a.mask.count() < b.mask.count();
        });
    mask = largest->mask;
  }
  return mask;
}

}  // namespace

Scene generate_scene(const SceneSpec& spec, const std::string& video_id) {
  if (spec.frame_count < 2) {
    throw InputError("scenes need at least 2 frames");
  }
  if (spec.width < 8 || spec.height < 8) {
    throw InputError("scene dimensions too small");
  }

  Scene scene;
  scene.frames.reserve(spec.frame_count);
  for (int f = 0; f < spec.frame_count; ++f) {
    scene.frames.emplace_back(spec.height, spec.width);
  }
  scene.ground_truth.reserve(spec.shapes.size());

  for (std::size_t s = 0; s < spec.shapes.size(); ++s) {
    const ShapeSpec& shape = spec.shapes[s];
    TrackMaskSequence seq;
    seq.video_id = video_id;
    seq.track_id = static_cast<int>(s);
    seq.class_label = "object";
    seq.frame_width = spec.width;
    seq.frame_height = spec.height;
    seq.frame_count = spec.frame_count;

    const int last =
        shape.last_frame < 0 ? spec.frame_count - 1
                             : std::min(shape.last_frame, spec.frame_count - 1);
    for (int f = std::max(0, shape.first_frame); f <= last; ++f) {
      BinaryMask mask = render_shape(shape, f, spec.width, spec.height);
      if (!mask.any()) continue;
      for (int r = 0; r < spec.height; ++r) {
        for (int c = 0; c < spec.width; ++c) {
          if (mask.at(r, c)) scene.frames[f].set(r, c, true);
        }
      }
      seq.entries.emplace_back(f, std::move(mask));
    }
    scene.ground_truth.push_back(std::move(seq));
  }
  return scene;
}

namespace {

/// Deterministic uniform draw in [lo, hi); identical across platforms.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

SceneSpec random_scene_spec(int width, int height, int frame_count,
                            int shape_count, std::uint64_t seed,
                            bool disjoint_lanes) {
  if (shape_count < 1) {
    throw InputError("need at least one shape");
  }
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.frame_count = frame_count;
  spec.seed = seed;
  std::mt19937_64 rng(seed);

  const int lane_height = height / shape_count;
  if (disjoint_lanes && lane_height < 12) {
    throw InputError("too many lanes for the frame height");
  }

  for (int i = 0; i < shape_count; ++i) {
    ShapeSpec shape;
    switch (rng() % 3) {
      case 0: shape.kind = ShapeKind::ellipse; break;
      case 1: shape.kind = ShapeKind::rectangle; break;
      default: shape.kind = ShapeKind::polygon; break;
    }
    if (shape.kind == ShapeKind::polygon) {
      const int vertices = uniform_int(rng, 3, 7);
      shape.polygon_radii.reserve(vertices);
      for (int v = 0; v < vertices; ++v) {
        shape.polygon_radii.push_back(uniform(rng, 0.6, 1.0));
      }
    }

    if (disjoint_lanes) {
      const double lane_center = (i + 0.5) * lane_height;
      shape.half_height = uniform(rng, 3.0, std::min(10.0, lane_height / 2.0 - 3.0));
      shape.half_width = uniform(rng, 4.0, 12.0);
      shape.start_y = lane_center;
      shape.velocity_y = 0.0;
      shape.start_x = uniform(rng, shape.half_width + 2.0,
                              width - shape.half_width - 3.0);
      shape.velocity_x = (rng() % 2 ? 1.0 : -1.0) * uniform(rng, 0.2, 0.8);
      shape.deform_amplitude = uniform(rng, 0.0, 0.12);
    } else {
      shape.half_width = uniform(rng, 6.0, 15.0);
      shape.half_height = uniform(rng, 5.0, 12.0);
      shape.start_x = uniform(rng, shape.half_width + 2.0,
                              width - shape.half_width - 3.0);
      shape.start_y = uniform(rng, shape.half_height + 2.0,
                              height - shape.half_height - 3.0);
      shape.velocity_x = (rng() % 2 ? 1.0 : -1.0) * uniform(rng, 0.3, 1.3);
      shape.velocity_y = (rng() % 2 ? 1.0 : -1.0) * uniform(rng, 0.0, 0.35);
      shape.deform_amplitude = uniform(rng, 0.0, 0.22);
      if (i > 0) {
        // Shorter appearance windows keep target 0 the longest-lived shape
        // under every edit, including clipping and speed changes.
        const int window = std::max(2, static_cast<int>(
            frame_count * uniform(rng, 0.35, 0.55)));
        shape.first_frame = uniform_int(rng, 0, frame_count - window);
        shape.last_frame = shape.first_frame + window - 1;
      }
    }
    shape.deform_period = uniform(rng, 16.0, 60.0);
    shape.deform_phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    spec.shapes.push_back(std::move(shape));
  }
  return spec;
}

std::vector<MaskRecord> scene_to_records(const Scene& scene, const std::string& video_id) {
  std::vector<MaskRecord> records;
  records.reserve(scene.frames.size());
  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    MaskRecord rec;
    rec.video_id = video_id;
    rec.frame_index = static_cast<int>(f);
    rec.mask = scene.frames[f];
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<MaskRecord> ground_truth_records(const Scene& scene, const std::string& video_id) {
  std::vector<MaskRecord> records = sequence_records(scene.ground_truth);
  for (MaskRecord& rec : records) rec.video_id = video_id;
  return records;
}

namespace {

BinaryMask resample_nearest(const BinaryMask& mask, int new_height, int new_width) {
  BinaryMask out(new_height, new_width);
  for (int r = 0; r < new_height; ++r) {
    const int src_r = std::min(mask.height() - 1,
                               static_cast<int>((r + 0.5) * mask.height() / new_height));
    for (int c = 0; c < new_width; ++c) {
      const int src_c = std::min(mask.width() - 1,
                                 static_cast<int>((c + 0.5) * mask.width() / new_width));
      if (mask.at(src_r, src_c)) out.set(r, c, true);
    }
  }
  return out;
}

}  // namespace

EditOp parse_edit_op(std::string_view text) {
  std::string_view name = text;
  std::string_view params;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    name = text.substr(0, colon);
    params = text.substr(colon + 1);
  }

  auto split_params = [&](std::size_t expected) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= params.size()) {
      const auto comma = params.find(',', start);
      if (comma == std::string_view::npos) {
        parts.emplace_back(params.substr(start));
        break;
      }
      parts.emplace_back(params.substr(start, comma - start));
      start = comma + 1;
    }
    if (parts.size() != expected) {
      throw InputError("edit '" + std::string(name) + "' expects " +
                       std::to_string(expected) + " parameters");
    }
    return parts;
  };

  EditOp op;
  if (name == "change_aspect") {
    op.kind = EditOp::Kind::change_aspect;
    if (!params.empty()) {
      const auto parts = split_params(2);
      op.aspect = {parse_double(parts[0]), parse_double(parts[1])};
      if (!(op.aspect->first > 0.0) || !(op.aspect->second > 0.0)) {
        throw InputError("aspect scale factors must be positive");
      }
    }
  } else if (name == "reverse") {
    op.kind = EditOp::Kind::reverse;
  } else if (name == "clip") {
    op.kind = EditOp::Kind::clip;
    if (!params.empty()) {
      const auto parts = split_params(2);
      op.clip_range = {static_cast<int>(parse_int(parts[0])),
                       static_cast<int>(parse_int(parts[1]))};
    }
  } else if (name == "mirror_h") {
    op.kind = EditOp::Kind::mirror_h;
  } else if (name == "crop") {
    op.kind = EditOp::Kind::crop;
    if (!params.empty()) {
      const auto parts = split_params(4);
      op.crop_region = CropRegion{
          static_cast<int>(parse_int(parts[0])), static_cast<int>(parse_int(parts[1])),
          static_cast<int>(parse_int(parts[2])), static_cast<int>(parse_int(parts[3]))};
    }
  } else if (name == "speed_2x") {
    op.kind = EditOp::Kind::speed_2x;
  } else if (name == "speed_half") {
    op.kind = EditOp::Kind::speed_half;
  } else if (name == "rotate90") {
    op.kind = EditOp::Kind::rotate90;
  } else {
    throw InputError("unknown edit operation: '" + std::string(name) + "'");
  }
  if (!params.empty() && op.kind != EditOp::Kind::change_aspect &&
      op.kind != EditOp::Kind::clip && op.kind != EditOp::Kind::crop) {
    throw InputError("edit '" + std::string(name) + "' takes no parameters");
  }
  return op;
}

std::string edit_name(const EditOp& op) {
  switch (op.kind) {
    case EditOp::Kind::change_aspect: return "change_aspect";
    case EditOp::Kind::reverse: return "reverse";
    case EditOp::Kind::clip: return "clip";
    case EditOp::Kind::mirror_h: return "mirror_h";
    case EditOp::Kind::crop: return "crop";
    case EditOp::Kind::speed_2x: return "speed_2x";
    case EditOp::Kind::speed_half: return "speed_half";
    case EditOp::Kind::rotate90: return "rotate90";
  }
  return "unknown";
}

std::vector<EditOp> all_edit_ops() {
  std::vector<EditOp> ops;
  for (auto kind : {EditOp::Kind::change_aspect, EditOp::Kind::reverse,
                    EditOp::Kind::clip, EditOp::Kind::mirror_h, EditOp::Kind::crop,
                    EditOp::Kind::speed_2x, EditOp::Kind::speed_half,
                    EditOp::Kind::rotate90}) {
    EditOp op;
    op.kind = kind;
    ops.push_back(op);
  }
  return ops;
}

VideoMasks apply_edit(const VideoMasks& video, const EditOp& op) {
  if (video.records.empty() || video.frame_count < 1) {
    throw InputError("cannot edit an empty video");
  }
  VideoMasks out;
  out.video_id = video.video_id;
  out.width = video.width;
  out.height = video.height;
  out.frame_count = video.frame_count;

  switch (op.kind) {
    case EditOp::Kind::change_aspect: {
      const auto [sx, sy] = op.aspect.value_or(std::pair{1.2, 0.9});
      const int new_w = std::max(1, static_cast<int>(std::lround(video.width * sx)));
      const int new_h = std::max(1, static_cast<int>(std::lround(video.height * sy)));
      out.width = new_w;
      out.height = new_h;
      for (const MaskRecord& rec : video.records) {
        MaskRecord edited = rec;
        edited.mask = resample_nearest(rec.mask, new_h, new_w);
        out.records.push_back(std::move(edited));
      }
      break;
    }
    case EditOp::Kind::reverse: {
      for (const MaskRecord& rec : video.records) {
        MaskRecord edited = rec;
        edited.frame_index = video.frame_count - 1 - rec.frame_index;
        out.records.push_back(std::move(edited));
      }
      break;
    }
    case EditOp::Kind::clip: {
      const auto [start, end] = op.clip_range.value_or(
          std::pair{video.frame_count / 5,
                    std::max(video.frame_count / 5 + 2, 4 * video.frame_count / 5)});
      if (start < 0 || end > video.frame_count || end - start < 2) {
        throw InputError("clip range must keep at least 2 frames within the video");
      }
      out.frame_count = end - start;
      for (const MaskRecord& rec : video.records) {
        if (rec.frame_index < start || rec.frame_index >= end) continue;
        MaskRecord edited = rec;
        edited.frame_index = rec.frame_index - start;
        out.records.push_back(std::move(edited));
      }
      if (out.records.empty()) {
        throw InputError("clip removed every record of the video");
      }
      break;
    }
    case EditOp::Kind::mirror_h: {
      for (const MaskRecord& rec : video.records) {
        MaskRecord edited = rec;
        BinaryMask mirrored(rec.mask.height(), rec.mask.width());
        for (int r = 0; r < rec.mask.height(); ++r) {
          for (int c = 0; c < rec.mask.width(); ++c) {
            if (rec.mask.at(r, c)) mirrored.set(r, rec.mask.width() - 1 - c, true);
          }
        }
        edited.mask = std::move(mirrored);
        out.records.push_back(std::move(edited));
      }
      break;
    }
    case EditOp::Kind::crop: {
      CropRegion region = op.crop_region.value_or(CropRegion{
          video.width / 5, video.height / 5,
          std::max(1, 3 * video.width / 5), std::max(1, 3 * video.height / 5)});
      region.x = std::clamp(region.x, 0, video.width - 1);
      region.y = std::clamp(region.y, 0, video.height - 1);
      region.width = std::clamp(region.width, 1, video.width - region.x);
      region.height = std::clamp(region.height, 1, video.height - region.y);
      out.width = region.width;
      out.height = region.height;
      bool any_pixel = false;
      for (const MaskRecord& rec : video.records) {
        MaskRecord edited = rec;
        BinaryMask cropped(region.height, region.width);
        for (int r = 0; r < region.height; ++r) {
          for (int c = 0; c < region.width; ++c) {
            if (rec.mask.at(r + region.y, c + region.x)) {
              cropped.set(r, c, true);
              any_pixel = true;
            }
          }
        }
        edited.mask = std::move(cropped);
        out.records.push_back(std::move(edited));
      }
      if (!any_pixel) {
        throw InputError("crop removed every mask pixel of the video");
      }
      break;
    }
    case EditOp::Kind::speed_2x: {
      out.frame_count = (video.frame_count + 1) / 2;
      for (const MaskRecord& rec : video.records) {
        if (rec.frame_index % 2 != 0) continue;
        MaskRecord edited = rec;
        edited.frame_index = rec.frame_index / 2;
        out.records.push_back(std::move(edited));
      }
      if (out.records.empty()) {
        throw InputError("speed change removed every record of the video");
      }
      break;
    }
    case EditOp::Kind::speed_half: {
      out.frame_count = 2 * video.frame_count;
      for (const MaskRecord& rec : video.records) {
        MaskRecord first = rec;
        first.frame_index = 2 * rec.frame_index;
        MaskRecord second = rec;
        second.frame_index = 2 * rec.frame_index + 1;
        out.records.push_back(std::move(first));
        out.records.push_back(std::move(second));
      }
      break;
    }
    case EditOp::Kind::rotate90: {
      out.width = video.height;
      out.height = video.width;
      for (const MaskRecord& rec : video.records) {
        MaskRecord edited = rec;
        BinaryMask rotated(out.height, out.width);
        for (int r = 0; r < rec.mask.height(); ++r) {
          for (int c = 0; c < rec.mask.width(); ++c) {
            if (rec.mask.at(r, c)) rotated.set(c, rec.mask.height() - 1 - r, true);
          }
        }
        edited.mask = std::move(rotated);
        out.records.push_back(std::move(edited));
      }
      break;
    }
  }

  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const MaskRecord& a, const MaskRecord& b) {
                     return std::pair(a.frame_index, a.track_id.value_or(-1)) <
                            std::pair(b.frame_index, b.track_id.value_or(-1));
                   });
  return out;
}

}  // namespace ma
