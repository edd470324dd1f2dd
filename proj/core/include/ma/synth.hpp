#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ma/mask.hpp"
#include "ma/mask_io.hpp"
#include "ma/tracker.hpp"

namespace ma {

enum class ShapeKind { ellipse, rectangle, polygon };

/// One moving shape: linear center motion plus optional sinusoidal size
/// modulation. The renderer clamps the center so the shape always stays at
/// least one pixel inside the frame.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::ellipse;
  double half_width = 10.0;
  double half_height = 8.0;
  double start_x = 0.0;
  double start_y = 0.0;
  double velocity_x = 0.0;
  double velocity_y = 0.0;
  double deform_amplitude = 0.0;
  double deform_period = 24.0;
  double deform_phase = 0.0;
  int first_frame = 0;
  int last_frame = -1;  // -1 = last frame of the scene
  std::vector<double> polygon_radii;  // per-vertex radius factors, polygon only
};

struct SceneSpec {
  int width = 128;
  int height = 96;
  int frame_count = 60;
  std::uint64_t seed = 0;
  std::vector<ShapeSpec> shapes;
};

struct Scene {
  std::vector<BinaryMask> frames;               // composite, one per frame
  std::vector<TrackMaskSequence> ground_truth;  // one per shape
};

/// Deterministic filled rasterization of every shape over every frame.
/// Throws InputError when a shape cannot fit inside the frame.
Scene generate_scene(const SceneSpec& spec, const std::string& video_id);

/// Draws a concrete SceneSpec from a seed. Shape 0 spans every frame; the
/// others get shorter random appearance windows so "longest appearance"
/// stays discriminative. With disjoint_lanes the shapes move in separate
/// horizontal bands and never touch.
SceneSpec random_scene_spec(int width, int height, int frame_count,
                            int shape_count, std::uint64_t seed,
                            bool disjoint_lanes = false);

/// Composite frames as track-less interchange records (one per frame,
/// including empty frames).
std::vector<MaskRecord> scene_to_records(const Scene& scene, const std::string& video_id);

/// Ground-truth sequences as records with track ids.
std::vector<MaskRecord> ground_truth_records(const Scene& scene, const std::string& video_id);

struct CropRegion {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// One video edit. Parameters left unset fall back to per-video defaults:
/// change_aspect 1.2x0.9, clip keeps the middle 60% of frames, crop keeps
/// the centered 60% x 60% region.
struct EditOp {
  enum class Kind {
    change_aspect,
    reverse,
    clip,
    mirror_h,
    crop,
    speed_2x,
    speed_half,
    rotate90,
  };

  Kind kind = Kind::reverse;
  std::optional<std::pair<double, double>> aspect;
  std::optional<std::pair<int, int>> clip_range;  // [start, end)
  std::optional<CropRegion> crop_region;
};

/// Parses "name" or "name:params", e.g. "change_aspect:1.5,0.8",
/// "clip:10,50", "crop:8,6,80,60". Throws InputError on unknown names or
/// malformed parameters.
EditOp parse_edit_op(std::string_view text);

/// Canonical name of the operation (no parameters).
std::string edit_name(const EditOp& op);

/// All eight operations with default parameters, in canonical order.
std::vector<EditOp> all_edit_ops();

/// Applies the edit to every record of the video, remapping frame indices,
/// dimensions and pixels. Masks may become empty (kept as placeholders);
/// an edit that empties the whole video is an error.
VideoMasks apply_edit(const VideoMasks& video, const EditOp& op);

}  // namespace ma
