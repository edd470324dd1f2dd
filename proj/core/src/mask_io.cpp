#include "ma/mask_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ma/error.hpp"

namespace ma {

namespace {

using nlohmann::json;

MaskRecord record_from_json(const json& j, std::size_t line_number) {
  try {
    MaskRecord rec;
    rec.video_id = j.at("video_id").get<std::string>();
    rec.frame_index = j.at("frame_index").get<int>();
    if (j.contains("track_id") && !j["track_id"].is_null()) {
      rec.track_id = j["track_id"].get<int>();
    }
    if (j.contains("class_label") && !j["class_label"].is_null()) {
      rec.class_label = j["class_label"].get<std::string>();
    }
    const int height = j.at("height").get<int>();
    const int width = j.at("width").get<int>();
    const auto runs = j.at("rle").get<std::vector<std::int64_t>>();
    rec.mask = rle_decode(runs, height, width);
    if (rec.frame_index < 0) {
      throw InputError("negative frame_index");
    }
    return rec;
  } catch (const json::exception& e) {
    throw InputError("mask record line " + std::to_string(line_number) + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError("mask record line " + std::to_string(line_number) + ": " + e.what());
  }
}

}  // namespace

std::vector<MaskRecord> read_mask_records(std::istream& in) {
  std::vector<MaskRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw InputError("mask record line " + std::to_string(line_number) + ": invalid JSON");
    }
    records.push_back(record_from_json(j, line_number));
  }
  return records;
}

void write_mask_records(std::ostream& out, const std::vector<MaskRecord>& records) {
  for (const MaskRecord& rec : records) {
    json j{
        {"video_id", rec.video_id},
        {"frame_index", rec.frame_index},
        {"height", rec.mask.height()},
        {"width", rec.mask.width()},
        {"rle", rle_encode(rec.mask)},
    };
    if (rec.track_id) j["track_id"] = *rec.track_id;
    if (!rec.class_label.empty()) j["class_label"] = rec.class_label;
    out << j.dump() << '\n';
  }
}

std::vector<MaskRecord> load_mask_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open mask file: " + path.string());
  }
  return read_mask_records(in);
}

void save_mask_file(const std::filesystem::path& path,
                    const std::vector<MaskRecord>& records) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write mask file: " + path.string());
  }
  write_mask_records(out, records);
  if (!out.flush()) {
    throw InputError("write failed: " + path.string());
  }
}

std::vector<VideoMasks> group_by_video(std::vector<MaskRecord> records) {
  std::vector<VideoMasks> videos;
  std::map<std::string, std::size_t> index_of;
  for (MaskRecord& rec : records) {
    auto [it, inserted] = index_of.try_emplace(rec.video_id, videos.size());
    if (inserted) {
      VideoMasks v;
      v.video_id = rec.video_id;
      v.width = rec.mask.width();
      v.height = rec.mask.height();
      videos.push_back(std::move(v));
    }
    VideoMasks& video = videos[it->second];
    if (rec.mask.width() != video.width || rec.mask.height() != video.height) {
      throw InputError("video '" + video.video_id + "' mixes mask dimensions");
    }
    video.frame_count = std::max(video.frame_count, rec.frame_index + 1);
    video.records.push_back(std::move(rec));
  }
  for (VideoMasks& video : videos) {
    std::stable_sort(video.records.begin(), video.records.end(),
                     [](const MaskRecord& a, const MaskRecord& b) {
                       return std::pair(a.frame_index, a.track_id.value_or(-1)) <
                              std::pair(b.frame_index, b.track_id.value_or(-1));
                     });
  }
  return videos;
}

std::vector<MaskRecord> flatten(const VideoMasks& video) {
  return video.records;
}

std::vector<MaskRecord> sequence_records(const std::vector<TrackMaskSequence>& sequences) {
  std::vector<MaskRecord> records;
  std::map<std::string, std::pair<int, const TrackMaskSequence*>> last_frame;
  for (const TrackMaskSequence& seq : sequences) {
    auto& [max_frame, any_seq] = last_frame[seq.video_id];
    if (!any_seq) {
      max_frame = -1;
      any_seq = &seq;
    }
    for (const auto& [frame, mask] : seq.entries) {
      MaskRecord rec;
      rec.video_id = seq.video_id;
      rec.frame_index = frame;
      rec.track_id = seq.track_id;
      rec.class_label = seq.class_label;
      rec.mask = mask;
      records.push_back(std::move(rec));
      max_frame = std::max(max_frame, frame);
    }
  }
  // The interchange format carries no frame count; an empty placeholder at
  // the final frame preserves the video's extent when every track ends early.
  for (const auto& [video_id, entry] : last_frame) {
    const auto& [max_frame, seq] = entry;
    if (seq->frame_count > 0 && max_frame < seq->frame_count - 1) {
      MaskRecord pad;
      pad.video_id = video_id;
      pad.frame_index = seq->frame_count - 1;
      pad.track_id = seq->track_id;
      pad.class_label = seq->class_label;
      pad.mask = BinaryMask(seq->frame_height, seq->frame_width);
      records.push_back(std::move(pad));
    }
  }
  std::sort(records.begin(), records.end(),
            [](const MaskRecord& a, const MaskRecord& b) {
              return std::tuple(a.video_id, a.frame_index, *a.track_id) <
                     std::tuple(b.video_id, b.frame_index, *b.track_id);
            });
  return records;
}

}  // namespace ma
