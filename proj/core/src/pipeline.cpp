#include "ma/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ma/error.hpp"
#include "ma/text_format.hpp"

namespace ma {

std::string time_scale_token(const SampleConfig& sample) {
  return sample.time_scale ? format_double(*sample.time_scale) : "auto";
}

double resolve_time_scale(const SampleConfig& sample, int width, int height,
                          int frame_count) {
  if (sample.time_scale) {
    if (!(*sample.time_scale > 0.0)) {
      throw InputError("time_scale must be positive");
    }
    return *sample.time_scale;
  }
  if (frame_count < 1) {
    throw InputError("cannot derive time_scale for an empty video");
  }
  return static_cast<double>(width + height) / (2.0 * frame_count);
}

PipelineParams pipeline_params(const PipelineConfig& config) {
  PipelineParams params;
  params.descriptor_version = config.embedder.descriptor_version;
  params.point_count = config.sample.point_count;
  params.time_scale = time_scale_token(config.sample);
  return params;
}

FeatureFileHeader feature_header(const PipelineConfig& config) {
  FeatureFileHeader header;
  header.params = pipeline_params(config);
  header.seed = config.sample.seed;
  header.normalized = true;
  return header;
}

namespace {

std::vector<TrackMaskSequence> sequences_from_tracked_records(
    const VideoMasks& video) {
  std::map<int, TrackMaskSequence> by_track;
  for (const MaskRecord& rec : video.records) {
    TrackMaskSequence& seq = by_track[*rec.track_id];
    if (seq.entries.empty() && seq.video_id.empty()) {
      seq.video_id = video.video_id;
      seq.track_id = *rec.track_id;
      seq.class_label = rec.class_label;
      seq.frame_width = video.width;
      seq.frame_height = video.height;
      seq.frame_count = video.frame_count;
    }
    if (!rec.mask.any()) continue;  // placeholder record
    if (!seq.entries.empty() && seq.entries.back().first >= rec.frame_index) {
      throw InputError("track " + std::to_string(*rec.track_id) +
                       " has out-of-order or duplicate frame " +
                       std::to_string(rec.frame_index));
    }
    seq.entries.emplace_back(rec.frame_index, rec.mask);
  }
  std::vector<TrackMaskSequence> sequences;
  sequences.reserve(by_track.size());
  for (auto& [id, seq] : by_track) {
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

std::vector<TrackMaskSequence> sequences_from_composite_frames(
    const VideoMasks& video, const TrackerConfig& tracker_config,
    std::int64_t min_component_area) {
  std::vector<std::vector<Detection>> frames(video.frame_count);
  std::map<int, BinaryMask> composite;
  for (const MaskRecord& rec : video.records) {
    auto [it, inserted] = composite.try_emplace(rec.frame_index, rec.mask);
    if (!inserted) {
      for (int r = 0; r < rec.mask.height(); ++r) {
        for (int c = 0; c < rec.mask.width(); ++c) {
          if (rec.mask.at(r, c)) it->second.set(r, c, true);
        }
      }
    }
  }
  for (const auto& [frame_index, mask] : composite) {
    frames[frame_index] = connected_components(mask, min_component_area, frame_index);
  }
  return track_video(video.video_id, frames, video.width, video.height,
                     tracker_config);
}

}  // namespace

std::vector<TrackMaskSequence> track_sequences(const VideoMasks& video,
                                               const TrackerConfig& tracker_config,
                                               std::int64_t min_component_area) {
  if (video.records.empty()) {
    throw InputError("video '" + video.video_id + "' has no mask records");
  }
  const bool first_tracked = video.records.front().track_id.has_value();
  for (const MaskRecord& rec : video.records) {
    if (rec.track_id.has_value() != first_tracked) {
      throw InputError("video '" + video.video_id +
                       "' mixes tracked and track-less records");
    }
    if (rec.frame_index < 0 || rec.frame_index >= video.frame_count) {
      throw InputError("video '" + video.video_id + "' has frame " +
                       std::to_string(rec.frame_index) + " outside 0.." +
                       std::to_string(video.frame_count - 1));
    }
    if (rec.mask.width() != video.width || rec.mask.height() != video.height) {
      throw InputError("video '" + video.video_id + "' mixes mask dimensions");
    }
  }
  return first_tracked
             ? sequences_from_tracked_records(video)
             : sequences_from_composite_frames(video, tracker_config,
                                               min_component_area);
}

std::vector<TargetCloud> extract_target_clouds(const VideoMasks& video,
                                               const TrackerConfig& tracker_config,
                                               double time_scale,
                                               std::int64_t min_component_area) {
  const std::vector<TrackMaskSequence> sequences =
      track_sequences(video, tracker_config, min_component_area);

  std::vector<TargetCloud> targets;
  targets.reserve(sequences.size());
  for (const TrackMaskSequence& seq : sequences) {
    TargetCloud target;
    target.target_id = seq.track_id;
    target.class_label = seq.class_label;
    target.frames_present = static_cast<int>(seq.entries.size());
    if (!seq.entries.empty()) {
      target.cloud = masks_to_pointcloud(seq, time_scale);
    }
    targets.push_back(std::move(target));
  }
  return targets;
}

namespace {

TargetReport report_for_target(const TargetCloud& target, int point_count,
                               std::uint64_t seed) {
  TargetReport report;
  report.target_id = target.target_id;
  report.class_label = target.class_label;
  report.frames_present = target.frames_present;
  report.cloud_size_before = target.cloud.size();
  if (target.cloud.empty()) {
    report.skipped = true;
    report.note = "empty point cloud";
    return report;
  }
  const PointCloud sampled = farthest_point_sample(target.cloud, point_count, seed);
  report.cloud_size_after = sampled.size();
  report.feature = embed(normalize_unit_sphere(sampled));
  return report;
}

}  // namespace

ExtractionReport process_video(const VideoMasks& video, const PipelineConfig& config) {
  ExtractionReport report;
  report.video_id = video.video_id;
  report.width = video.width;
  report.height = video.height;
  report.frame_count = video.frame_count;
  report.time_scale =
      resolve_time_scale(config.sample, video.width, video.height, video.frame_count);

  const std::vector<TargetCloud> targets = extract_target_clouds(
      video, config.tracker, report.time_scale, config.min_component_area);
  for (const TargetCloud& target : targets) {
    report.targets.push_back(
        report_for_target(target, config.sample.point_count, config.sample.seed));
  }

  const bool any_usable =
      std::any_of(report.targets.begin(), report.targets.end(),
                  [](const TargetReport& t) { return !t.skipped; });
  if (!any_usable) {
    throw InputError("video '" + video.video_id + "' has no extractable targets");
  }
  if (config.primary_target_only) {
    const int primary = select_primary_target(report);
    auto keep = std::find_if(report.targets.begin(), report.targets.end(),
                             [&](const TargetReport& t) { return t.target_id == primary; });
    TargetReport primary_report = std::move(*keep);
    report.targets.clear();
    report.targets.push_back(std::move(primary_report));
  }
  return report;
}

int select_primary_target(const ExtractionReport& report) {
  const TargetReport* best = nullptr;
  for (const TargetReport& target : report.targets) {
    if (target.skipped) continue;
    if (!best || target.frames_present > best->frames_present ||
        (target.frames_present == best->frames_present &&
         target.target_id < best->target_id)) {
      best = &target;
    }
  }
  if (!best) {
    throw InputError("no usable target in report for '" + report.video_id + "'");
  }
  return best->target_id;
}

std::vector<FeatureRecord> feature_records(const ExtractionReport& report) {
  std::vector<FeatureRecord> records;
  for (const TargetReport& target : report.targets) {
    if (target.skipped) continue;
    records.push_back(FeatureRecord{report.video_id, target.target_id,
                                    target.class_label, target.feature});
  }
  return records;
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  int worker_count = threads > 0
                         ? threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  worker_count = std::max(1, std::min<int>(worker_count, static_cast<int>(count)));
  if (worker_count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(worker_count);
  for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct CorpusClouds {
  std::vector<std::string> video_ids;
  std::vector<std::vector<TargetCloud>> targets;  // aligned with video_ids
};

CorpusClouds extract_corpus_clouds(const std::vector<VideoMasks>& corpus,
                                   const ExperimentConfig& config) {
  CorpusClouds clouds;
  clouds.video_ids.resize(corpus.size());
  clouds.targets.resize(corpus.size());
  parallel_for(corpus.size(), config.threads, [&](std::size_t v) {
    const VideoMasks& video = corpus[v];
    const double tau = resolve_time_scale(config.base.sample, video.width,
                                          video.height, video.frame_count);
    clouds.video_ids[v] = video.video_id;
    clouds.targets[v] = extract_target_clouds(
        video, config.base.tracker, tau, config.base.min_component_area);
  });
  return clouds;
}

/// Index of the longest-appearing usable target, or -1.
int primary_index(const std::vector<TargetCloud>& targets) {
  int best = -1;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].cloud.empty()) continue;
    if (best < 0 || targets[i].frames_present > targets[best].frames_present ||
        (targets[i].frames_present == targets[best].frames_present &&
         targets[i].target_id < targets[best].target_id)) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<FeatureRecord> embed_corpus(const CorpusClouds& clouds, int point_count,
                                        std::uint64_t seed, bool primary_only,
                                        int threads) {
  std::vector<std::vector<FeatureRecord>> per_video(clouds.targets.size());
  parallel_for(clouds.targets.size(), threads, [&](std::size_t v) {
    const std::vector<TargetCloud>& targets = clouds.targets[v];
    std::vector<FeatureRecord>& records = per_video[v];
    auto add = [&](const TargetCloud& target) {
      if (target.cloud.empty()) return;
      const PointCloud sampled =
          farthest_point_sample(target.cloud, point_count, seed);
      records.push_back(FeatureRecord{clouds.video_ids[v], target.target_id,
                                      target.class_label,
                                      embed(normalize_unit_sphere(sampled))});
    };
    if (primary_only) {
      const int idx = primary_index(targets);
      if (idx >= 0) add(targets[idx]);
    } else {
      for (const TargetCloud& target : targets) add(target);
    }
  });
  std::vector<FeatureRecord> records;
  for (auto& chunk : per_video) {
    for (auto& rec : chunk) records.push_back(std::move(rec));
  }
  return records;
}

/// Videos whose edit left nothing extractable contribute failed queries:
/// they stay in the denominator as guaranteed misses.
ExperimentRow evaluate_records(const std::vector<FeatureRecord>& db_records,
                               const std::vector<FeatureRecord>& query_records,
                               const std::string& section, const std::string& name,
                               int point_count, int failed_queries = 0) {
  Database db;
  for (const FeatureRecord& rec : db_records) {
    db.insert(DbEntry{rec.video_id, rec.target_id, rec.class_label, rec.feature});
  }
  std::vector<LabeledQuery> queries;
  queries.reserve(query_records.size());
  for (const FeatureRecord& rec : query_records) {
    queries.push_back(LabeledQuery{rec.video_id, rec.feature});
  }
  ExperimentRow row;
  row.section = section;
  row.name = name;
  row.point_count = point_count;
  const std::size_t total = queries.size() + failed_queries;
  row.query_count = static_cast<int>(total);
  if (total > 0) {
    row.top1 = static_cast<double>(evaluate_hit_count(db, queries, 1)) / total;
    row.top5 = static_cast<double>(evaluate_hit_count(db, queries, 5)) / total;
  }
  return row;
}

}  // namespace

ExperimentResults run_experiment(const std::vector<VideoMasks>& corpus,
                                 const ExperimentConfig& config) {
  if (corpus.empty()) {
    throw InputError("experiment corpus is empty");
  }
  ExperimentResults results;
  const CorpusClouds originals = extract_corpus_clouds(corpus, config);

  for (int k : config.point_counts) {
    const auto db_records = embed_corpus(originals, k, config.db_seed,
                                         config.sweep_primary_only, config.threads);
    const auto query_records = embed_corpus(originals, k, config.query_seed,
                                            config.sweep_primary_only, config.threads);
    results.rows.push_back(evaluate_records(db_records, query_records, "sweep",
                                            "k" + std::to_string(k), k));
  }

  if (!config.edits.empty()) {
    const int k = config.edit_point_count;
    const auto db_records = embed_corpus(originals, k, config.db_seed,
                                         config.edit_primary_only, config.threads);
    const auto original_queries = embed_corpus(
        originals, k, config.query_seed, config.edit_primary_only, config.threads);
    results.rows.push_back(
        evaluate_records(db_records, original_queries, "edit", "original", k));

    for (const EditOp& op : config.edits) {
      std::vector<std::vector<FeatureRecord>> per_video(corpus.size());
      std::vector<char> failed(corpus.size(), 0);
      parallel_for(corpus.size(), config.threads, [&](std::size_t v) {
        try {
          const VideoMasks edited = apply_edit(corpus[v], op);
          const double tau = resolve_time_scale(config.base.sample, edited.width,
                                                edited.height, edited.frame_count);
          const auto targets = extract_target_clouds(
              edited, config.base.tracker, tau, config.base.min_component_area);
          auto add = [&](const TargetCloud& target) {
            if (target.cloud.empty()) return;
            const PointCloud sampled =
                farthest_point_sample(target.cloud, k, config.query_seed);
            per_video[v].push_back(
                FeatureRecord{edited.video_id, target.target_id, target.class_label,
                              embed(normalize_unit_sphere(sampled))});
          };
          if (config.edit_primary_only) {
            const int idx = primary_index(targets);
            if (idx >= 0) add(targets[idx]);
          } else {
            for (const TargetCloud& target : targets) add(target);
          }
        } catch (const InputError&) {
          // Edit wiped the video (e.g. crop with nothing in the region).
        }
        if (per_video[v].empty()) failed[v] = 1;
      });
      std::vector<FeatureRecord> edit_queries;
      int failed_queries = 0;
      for (std::size_t v = 0; v < corpus.size(); ++v) {
        for (auto& rec : per_video[v]) edit_queries.push_back(std::move(rec));
        failed_queries += failed[v];
      }
      results.rows.push_back(evaluate_records(db_records, edit_queries, "edit",
                                              edit_name(op), k, failed_queries));
    }
  }
  return results;
}

namespace {

constexpr std::string_view kResultsTag = "MARES";
constexpr int kResultsFormatVersion = 1;

}  // namespace

void write_results_file(std::ostream& out, const ExperimentResults& results) {
  out << kResultsTag << ' ' << kResultsFormatVersion << '\n';
  for (const ExperimentRow& row : results.rows) {
    out << "row section=" << escape_field(row.section)
        << " name=" << escape_field(row.name) << " points=" << row.point_count
        << " queries=" << row.query_count << " top1=" << format_double(row.top1)
        << " top5=" << format_double(row.top5) << '\n';
  }
}

ExperimentResults read_results_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("results file is empty");
  }
  const auto header = split_tokens(line);
  if (header.size() != 2 || header[0] != kResultsTag) {
    throw InputError("results file line 1: bad header");
  }
  if (parse_int(header[1]) != kResultsFormatVersion) {
    throw IncompatibilityError("unsupported results format version " +
                               std::string(header[1]));
  }
  ExperimentResults results;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto tokens = split_tokens(line);
    const std::string where = "results file line " + std::to_string(line_number);
    if (tokens.empty() || tokens[0] != "row") {
      throw InputError(where + ": expected a row");
    }
    ExperimentRow row;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string_view::npos) {
        throw InputError(where + ": expected key=value");
      }
      const std::string_view key = tokens[i].substr(0, eq);
      const std::string_view value = tokens[i].substr(eq + 1);
      if (key == "section") {
        row.section = unescape_field(value);
      } else if (key == "name") {
        row.name = unescape_field(value);
      } else if (key == "points") {
        row.point_count = static_cast<int>(parse_int(value));
      } else if (key == "queries") {
        row.query_count = static_cast<int>(parse_int(value));
      } else if (key == "top1") {
        row.top1 = parse_double(value);
      } else if (key == "top5") {
        row.top5 = parse_double(value);
      } else {
        throw InputError(where + ": unknown key '" + std::string(key) + "'");
      }
    }
    results.rows.push_back(std::move(row));
  }
  return results;
}

std::string format_results_table(const ExperimentResults& results) {
  std::ostringstream out;
  char buffer[128];
  std::snprintf(buffer, sizeof(buffer), "%-8s %-16s %8s %8s %8s %8s\n", "section",
                "name", "points", "queries", "top1", "top5");
  out << buffer;
  for (const ExperimentRow& row : results.rows) {
    std::snprintf(buffer, sizeof(buffer), "%-8s %-16s %8d %8d %8.4f %8.4f\n",
                  row.section.c_str(), row.name.c_str(), row.point_count,
                  row.query_count, row.top1, row.top5);
    out << buffer;
  }
  return out.str();
}

}  // namespace ma
