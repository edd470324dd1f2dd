#include "ma/tracker.hpp"

#include <algorithm>

#include "ma/error.hpp"
#include "ma/hungarian.hpp"

namespace ma {

AssociationResult associate(const std::vector<BoxF>& tracks,
                            const std::vector<BoxF>& detections,
                            double iou_threshold) {
  AssociationResult result;
  if (tracks.empty() || detections.empty()) {
    for (int i = 0; i < static_cast<int>(tracks.size()); ++i) {
      result.unmatched_tracks.push_back(i);
    }
    for (int j = 0; j < static_cast<int>(detections.size()); ++j) {
      result.unmatched_detections.push_back(j);
    }
    return result;
  }

  std::vector<std::vector<double>> cost(tracks.size(),
                                        std::vector<double>(detections.size()));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (std::size_t j = 0; j < detections.size(); ++j) {
      cost[i][j] = 1.0 - iou(tracks[i], detections[j]);
    }
  }

  std::vector<char> track_used(tracks.size(), 0);
  std::vector<char> det_used(detections.size(), 0);
  for (auto [i, j] : hungarian(cost).pairs) {
    if (iou(tracks[i], detections[j]) < iou_threshold) continue;
    result.matches.emplace_back(i, j);
    track_used[i] = 1;
    det_used[j] = 1;
  }
  for (int i = 0; i < static_cast<int>(tracks.size()); ++i) {
    if (!track_used[i]) result.unmatched_tracks.push_back(i);
  }
  for (int j = 0; j < static_cast<int>(detections.size()); ++j) {
    if (!det_used[j]) result.unmatched_detections.push_back(j);
  }
  return result;
}

Tracker::Tracker(TrackerConfig config) : config_(config) {}

void Tracker::step(int frame_index, const std::vector<Detection>& detections) {
  if (frame_index <= last_frame_) {
    throw InputError("frames must arrive in strictly increasing order");
  }
  last_frame_ = frame_index;

  std::vector<BoxF> predicted;
  predicted.reserve(active_.size());
  for (Track& track : active_) {
    track.state = kalman_predict(track.state, track.noise);
    ++track.age_since_update;
    predicted.push_back(observation_to_box(track.state.mean.head<kObsDim>()));
  }

  std::vector<BoxF> det_boxes;
  det_boxes.reserve(detections.size());
  for (const Detection& det : detections) {
    det_boxes.push_back(to_boxf(det.bbox));
  }

  const AssociationResult assoc =
      associate(predicted, det_boxes, config_.iou_threshold);

  for (auto [ti, dj] : assoc.matches) {
    Track& track = active_[ti];
    const Detection& det = detections[dj];
    track.state = kalman_update(track.state, box_to_observation(det.bbox), track.noise);
    track.hits += 1;
    track.age_since_update = 0;
    if (track.hits >= config_.min_hits) track.confirmed = true;
    track.entries.emplace_back(frame_index, det.mask);
  }
  for (int ti : assoc.unmatched_tracks) {
    active_[ti].hits = 0;  // consecutive-match count broken
  }
  for (int dj : assoc.unmatched_detections) {
    const Detection& det = detections[dj];
    Track track;
    track.track_id = next_track_id_++;
    track.noise = config_.noise;
    track.noise.sigma = box_scale(det.bbox);
    track.state = kalman_init(box_to_observation(det.bbox), track.noise);
    track.hits = 1;
    track.age_since_update = 0;
    track.confirmed = track.hits >= config_.min_hits;
    track.class_label = det.class_label;
    track.entries.emplace_back(frame_index, det.mask);
    active_.push_back(std::move(track));
  }

  for (auto it = active_.begin(); it != active_.end();) {
    if (it->age_since_update > config_.max_age) {
      retired_.push_back(std::move(*it));
      it = active_.erase(it);
    } else {
      ++it;
    }
  }
}

std::vector<TrackMaskSequence> Tracker::sequences(const std::string& video_id,
                                                  int frame_width, int frame_height,
                                                  int frame_count) const {
  std::vector<const Track*> tracks;
  for (const Track& t : retired_) {
    if (t.confirmed) tracks.push_back(&t);
  }
  for (const Track& t : active_) {
    if (t.confirmed) tracks.push_back(&t);
  }
  std::sort(tracks.begin(), tracks.end(),
            [](const Track* a, const Track* b) { return a->track_id < b->track_id; });

  std::vector<TrackMaskSequence> out;
  out.reserve(tracks.size());
  for (const Track* t : tracks) {
    TrackMaskSequence seq;
    seq.video_id = video_id;
    seq.track_id = t->track_id;
    seq.class_label = t->class_label;
    seq.frame_width = frame_width;
    seq.frame_height = frame_height;
    seq.frame_count = frame_count;
    seq.entries = t->entries;
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<TrackMaskSequence> track_video(const std::string& video_id,
                                           const std::vector<std::vector<Detection>>& frames,
                                           int frame_width, int frame_height,
                                           const TrackerConfig& config) {
  Tracker tracker(config);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    tracker.step(static_cast<int>(f), frames[f]);
  }
  return tracker.sequences(video_id, frame_width, frame_height,
                           static_cast<int>(frames.size()));
}

}  // namespace ma
