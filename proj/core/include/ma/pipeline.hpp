#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ma/embed.hpp"
#include "ma/mask_io.hpp"
#include "ma/pointcloud.hpp"
#include "ma/synth.hpp"
#include "ma/tracker.hpp"
#include "ma/vectordb.hpp"

namespace ma {

/// Downsampling parameters. A missing time_scale means "auto":
/// (width + height) / (2 * frame_count), keeping the temporal extent
/// commensurate with the spatial extent of each video.
struct SampleConfig {
  int point_count = 3072;
  std::uint64_t seed = 0;
  std::optional<double> time_scale;
};

struct PipelineConfig {
  TrackerConfig tracker;
  SampleConfig sample;
  EmbedderSpec embedder;
  bool primary_target_only = false;
  std::int64_t min_component_area = 4;
};

/// "auto" or the exact decimal value; stored in feature and database headers.
std::string time_scale_token(const SampleConfig& sample);

double resolve_time_scale(const SampleConfig& sample, int width, int height,
                          int frame_count);

PipelineParams pipeline_params(const PipelineConfig& config);
FeatureFileHeader feature_header(const PipelineConfig& config);

/// One tracked target reduced to its raw boundary cloud (before sampling).
struct TargetCloud {
  int target_id = 0;
  std::string class_label;
  int frames_present = 0;
  PointCloud cloud;  // empty when every mask of the target was empty
};

/// Per-target mask sequences of a video. Records carrying track ids bypass
/// the tracker; track-less records are treated as composite frames and run
/// through the connected-component detector and the tracker. Throws
/// InputError when track-less and tracked records are mixed.
std::vector<TrackMaskSequence> track_sequences(const VideoMasks& video,
                                               const TrackerConfig& tracker_config,
                                               std::int64_t min_component_area);

/// track_sequences + boundary conversion into raw clouds.
std::vector<TargetCloud> extract_target_clouds(const VideoMasks& video,
                                               const TrackerConfig& tracker_config,
                                               double time_scale,
                                               std::int64_t min_component_area);

struct TargetReport {
  int target_id = 0;
  std::string class_label;
  int frames_present = 0;
  std::size_t cloud_size_before = 0;
  std::size_t cloud_size_after = 0;
  bool skipped = false;      // empty cloud; feature not populated
  std::string note;
  FeatureVector feature;
};

struct ExtractionReport {
  std::string video_id;
  int width = 0;
  int height = 0;
  int frame_count = 0;
  double time_scale = 0.0;  // resolved value
  std::vector<TargetReport> targets;
};

/// Full per-video pipeline: masks -> tracked targets -> sampled, normalized
/// boundary clouds -> feature vectors. With primary_target_only the report
/// keeps only the longest-appearing target. Throws InputError when no target
/// yields a nonempty cloud.
ExtractionReport process_video(const VideoMasks& video, const PipelineConfig& config);

/// Target with the most frames present; ties broken by smallest target id.
int select_primary_target(const ExtractionReport& report);

std::vector<FeatureRecord> feature_records(const ExtractionReport& report);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  std::vector<int> point_counts;  // retrieval sweep; may be empty
  std::vector<EditOp> edits;      // edit-robustness rows; may be empty
  int edit_point_count = 3072;
  std::uint64_t db_seed = 1;
  std::uint64_t query_seed = 2;
  PipelineConfig base;
  bool sweep_primary_only = false;
  bool edit_primary_only = true;
  int threads = 0;  // 0 = hardware concurrency
};

struct ExperimentRow {
  std::string section;  // "sweep" or "edit"
  std::string name;     // "k3072", "original", or the edit name
  int point_count = 0;
  int query_count = 0;
  double top1 = 0.0;
  double top5 = 0.0;
};

struct ExperimentResults {
  std::vector<ExperimentRow> rows;
};

/// Builds a database from the corpus with one seed, re-extracts queries with
/// an independent seed and reports Top-1/Top-5 accuracy per point count; for
/// every edit, the database comes from the originals and the queries from
/// the edited videos.
ExperimentResults run_experiment(const std::vector<VideoMasks>& corpus,
                                 const ExperimentConfig& config);

// Versioned line-oriented results format ("MARES 1" header).
void write_results_file(std::ostream& out, const ExperimentResults& results);
ExperimentResults read_results_file(std::istream& in);

/// Aligned plain-text table of the rows.
std::string format_results_table(const ExperimentResults& results);

/// Runs fn(0..count-1) on a small thread pool. The first exception thrown by
/// any task is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ma
