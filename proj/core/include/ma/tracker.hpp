#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ma/kalman.hpp"
#include "ma/mask.hpp"

namespace ma {

struct TrackerConfig {
  double iou_threshold = 0.3;
  int max_age = 3;
  int min_hits = 1;
  KalmanNoise noise;  // sigma is set per track from the spawning box
};

/// Per-target mask sequence: ordered (frame_index, mask) pairs for the frames
/// in which the target was matched. Gaps stay gaps (no interpolation).
struct TrackMaskSequence {
  std::string video_id;
  int track_id = 0;
  std::string class_label;
  int frame_width = 0;
  int frame_height = 0;
  int frame_count = 0;
  std::vector<std::pair<int, BinaryMask>> entries;
};

struct Track {
  int track_id = 0;
  KalmanState state;
  KalmanNoise noise;
  int hits = 0;              // consecutive matched frames
  int age_since_update = 0;  // frames since last match
  bool confirmed = false;    // hits reached min_hits at least once
  std::string class_label;
  std::vector<std::pair<int, BinaryMask>> entries;
};

struct AssociationResult {
  std::vector<std::pair<int, int>> matches;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

/// Hungarian assignment on cost 1 - IoU; pairs below the IoU threshold are
/// demoted to unmatched.
AssociationResult associate(const std::vector<BoxF>& tracks,
                            const std::vector<BoxF>& detections,
                            double iou_threshold);

/// Stateful single-video tracker. Feed frames in strictly increasing order.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {});

  /// One frame step: predict, associate, update, spawn, retire.
  /// Throws InputError when frame_index does not increase.
  void step(int frame_index, const std::vector<Detection>& detections);

  const std::vector<Track>& active_tracks() const { return active_; }

  /// Mask sequences of every confirmed track (active and retired),
  /// ordered by track id.
  std::vector<TrackMaskSequence> sequences(const std::string& video_id,
                                           int frame_width, int frame_height,
                                           int frame_count) const;

 private:
  TrackerConfig config_;
  std::vector<Track> active_;
  std::vector<Track> retired_;
  int next_track_id_ = 0;
  int last_frame_ = -1;
};

/// Runs a tracker over per-frame detection lists (frames[i] holds frame i).
std::vector<TrackMaskSequence> track_video(const std::string& video_id,
                                           const std::vector<std::vector<Detection>>& frames,
                                           int frame_width, int frame_height,
                                           const TrackerConfig& config = {});

}  // namespace ma
