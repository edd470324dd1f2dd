#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ma/mask.hpp"
#include "ma/tracker.hpp"

namespace ma {

/// One line of the mask interchange file: a mask for (video, frame) and
/// optionally a track within it.
struct MaskRecord {
  std::string video_id;
  int frame_index = 0;
  std::optional<int> track_id;
  std::string class_label;  // empty when absent
  BinaryMask mask;
};

/// All masks of one video, dimension-checked and sorted by (frame, track).
struct VideoMasks {
  std::string video_id;
  int width = 0;
  int height = 0;
  int frame_count = 0;
  std::vector<MaskRecord> records;
};

// Newline-delimited records; one JSON object per line with fields
// video_id, frame_index, track_id?, class_label?, height, width, rle.
std::vector<MaskRecord> read_mask_records(std::istream& in);
void write_mask_records(std::ostream& out, const std::vector<MaskRecord>& records);

std::vector<MaskRecord> load_mask_file(const std::filesystem::path& path);
void save_mask_file(const std::filesystem::path& path,
                    const std::vector<MaskRecord>& records);

/// Groups records into per-video containers (stable video order of first
/// appearance). Validates consistent mask dimensions per video and infers
/// frame_count = max frame_index + 1.
std::vector<VideoMasks> group_by_video(std::vector<MaskRecord> records);

std::vector<MaskRecord> flatten(const VideoMasks& video);

/// Tracker output as interchange records, track ids populated,
/// sorted by (frame, track).
std::vector<MaskRecord> sequence_records(const std::vector<TrackMaskSequence>& sequences);

}  // namespace ma
