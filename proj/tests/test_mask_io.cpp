#include <doctest.h>

#include <sstream>

#include "ma/error.hpp"
#include "ma/mask_io.hpp"

using namespace ma;

namespace {

MaskRecord sample_record(const std::string& video, int frame,
                         std::optional<int> track = std::nullopt) {
  MaskRecord rec;
  rec.video_id = video;
  rec.frame_index = frame;
  rec.track_id = track;
  rec.class_label = track ? "object" : "";
  BinaryMask mask(6, 8);
  mask.set(frame % 6, (frame * 3) % 8, true);
  mask.set(2, 2, true);
  rec.mask = mask;
  return rec;
}

}  // namespace

TEST_CASE("mask records round-trip through the interchange format") {
  std::vector<MaskRecord> records;
  records.push_back(sample_record("vid a", 0));
  records.push_back(sample_record("vid a", 1, 3));
  records.push_back(sample_record("other", 0));

  std::stringstream stream;
  write_mask_records(stream, records);
  const auto back = read_mask_records(stream);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].video_id == records[i].video_id);
    CHECK(back[i].frame_index == records[i].frame_index);
    CHECK(back[i].track_id == records[i].track_id);
    CHECK(back[i].class_label == records[i].class_label);
    CHECK(back[i].mask == records[i].mask);
  }
}

TEST_CASE("reader reports bad lines with their numbers") {
  std::stringstream not_json("{\"video_id\": \"v\"}\nnot json\n");
  CHECK_THROWS_WITH_AS(read_mask_records(not_json), doctest::Contains("line 1"),
                       InputError);

  std::stringstream bad_rle(
      "{\"video_id\":\"v\",\"frame_index\":0,\"height\":2,\"width\":2,\"rle\":[3]}\n");
  CHECK_THROWS_WITH_AS(read_mask_records(bad_rle), doctest::Contains("line 1"),
                       InputError);

  std::stringstream missing_field("{\"video_id\":\"v\"}\n");
  CHECK_THROWS_AS(read_mask_records(missing_field), InputError);

  std::stringstream negative(
      "{\"video_id\":\"v\",\"frame_index\":-1,\"height\":2,\"width\":2,\"rle\":[4]}\n");
  CHECK_THROWS_AS(read_mask_records(negative), InputError);
}

TEST_CASE("group_by_video sorts, infers frame counts and checks dimensions") {
  std::vector<MaskRecord> records;
  records.push_back(sample_record("b", 4));
  records.push_back(sample_record("a", 2));
  records.push_back(sample_record("b", 0));
  records.push_back(sample_record("a", 0));

  const auto videos = group_by_video(records);
  REQUIRE(videos.size() == 2);
  CHECK(videos[0].video_id == "b");  // first appearance order
  CHECK(videos[0].frame_count == 5);
  CHECK(videos[0].records[0].frame_index == 0);
  CHECK(videos[0].records[1].frame_index == 4);
  CHECK(videos[1].video_id == "a");
  CHECK(videos[1].frame_count == 3);
  CHECK(videos[0].width == 8);
  CHECK(videos[0].height == 6);

  std::vector<MaskRecord> mixed;
  mixed.push_back(sample_record("v", 0));
  MaskRecord other = sample_record("v", 1);
  other.mask = BinaryMask(4, 4);
  mixed.push_back(other);
  CHECK_THROWS_AS(group_by_video(mixed), InputError);
}

TEST_CASE("sequence_records carries tracker output into the interchange format") {
  TrackMaskSequence seq;
  seq.video_id = "vid";
  seq.track_id = 3;
  seq.class_label = "object";
  seq.frame_width = 8;
  seq.frame_height = 6;
  seq.frame_count = 3;
  BinaryMask mask(6, 8);
  mask.set(1, 2, true);
  seq.entries = {{0, mask}, {2, mask}};

  const auto records = sequence_records({seq});
  REQUIRE(records.size() == 2);
  CHECK(records[0].frame_index == 0);
  CHECK(records[1].frame_index == 2);
  for (const MaskRecord& rec : records) {
    CHECK(rec.video_id == "vid");
    CHECK(rec.track_id == 3);
    CHECK(rec.mask == mask);
  }

  std::stringstream stream;
  write_mask_records(stream, records);
  const auto back = read_mask_records(stream);
  CHECK(back.size() == 2);
  CHECK(back[0].track_id == 3);
}

TEST_CASE("sequence_records pads the final frame when every track ends early") {
  TrackMaskSequence seq;
  seq.video_id = "vid";
  seq.track_id = 0;
  seq.frame_width = 8;
  seq.frame_height = 6;
  seq.frame_count = 10;
  BinaryMask mask(6, 8);
  mask.set(0, 0, true);
  seq.entries = {{1, mask}, {3, mask}};

  const auto records = sequence_records({seq});
  REQUIRE(records.size() == 3);
  CHECK(records.back().frame_index == 9);
  CHECK_FALSE(records.back().mask.any());
  CHECK(group_by_video(records)[0].frame_count == 10);

  // No padding when a track reaches the last frame.
  seq.entries.emplace_back(9, mask);
  CHECK(sequence_records({seq}).size() == 3);
}

TEST_CASE("empty masks are representable records") {
  MaskRecord rec;
  rec.video_id = "v";
  rec.frame_index = 0;
  rec.mask = BinaryMask(4, 4);  // all false
  std::stringstream stream;
  write_mask_records(stream, {rec});
  const auto back = read_mask_records(stream);
  REQUIRE(back.size() == 1);
  CHECK_FALSE(back[0].mask.any());
}
