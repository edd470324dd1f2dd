// Command-line front end for the contour fingerprinting pipeline:
// synthesize mask videos, edit them, extract features, build and query
// retrieval databases, and run the retrieval experiments.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ma/embed.hpp"
#include "ma/error.hpp"
#include "ma/mask_io.hpp"
#include "ma/pipeline.hpp"
#include "ma/synth.hpp"
#include "ma/text_format.hpp"
#include "ma/vectordb.hpp"

namespace fs = std::filesystem;
using namespace ma;

namespace {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

IntRange parse_range(const std::string& text) {
  const auto dash = text.find('-', 1);  // allow negative lo? counts only
  IntRange range;
  if (dash == std::string::npos) {
    range.lo = range.hi = static_cast<int>(parse_int(text));
  } else {
    range.lo = static_cast<int>(parse_int(text.substr(0, dash)));
    range.hi = static_cast<int>(parse_int(text.substr(dash + 1)));
  }
  if (range.lo < 1 || range.hi < range.lo) {
    throw InputError("bad range: '" + text + "'");
  }
  return range;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (!token.empty()) values.push_back(static_cast<int>(parse_int(token)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.empty()) {
    throw InputError("expected a comma-separated integer list, got '" + text + "'");
  }
  return values;
}

std::optional<double> parse_tau(const std::string& text) {
  if (text == "auto") return std::nullopt;
  const double value = parse_double(text);
  if (!(value > 0.0)) {
    throw InputError("tau must be positive or 'auto'");
  }
  return value;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  const std::string name = p.filename().string();

  // '*' wildcards in the filename component only.
  auto matches = [&](const std::string& candidate) {
    std::size_t ci = 0, pi = 0, star = std::string::npos, backtrack = 0;
    while (ci < candidate.size()) {
      if (pi < name.size() && (name[pi] == candidate[ci])) {
        ++ci, ++pi;
      } else if (pi < name.size() && name[pi] == '*') {
        star = pi++;
        backtrack = ci;
      } else if (star != std::string::npos) {
        pi = star + 1;
        ci = ++backtrack;
      } else {
        return false;
      }
    }
    while (pi < name.size() && name[pi] == '*') ++pi;
    return pi == name.size();
  };

  std::vector<fs::path> files;
  if (name.find('*') == std::string::npos) {
    if (fs::exists(p)) files.push_back(p);
  } else if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && matches(entry.path().filename().string())) {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw InputError("no files match '" + pattern + "'");
  }
  return files;
}

std::string video_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "video_%03d", index);
  return buf;
}

// --- subcommand payloads -----------------------------------------------

struct SynthArgs {
  std::string out_dir;
  int videos = 1;
  std::string shapes = "3";
  std::string frames = "60";
  std::uint64_t seed = 1;
  int width = 128;
  int height = 96;
  bool disjoint = false;
  bool ground_truth = false;
};

int run_synth(const SynthArgs& args) {
  const IntRange shape_range = parse_range(args.shapes);
  const IntRange frame_range = parse_range(args.frames);
  fs::create_directories(args.out_dir);
  for (int v = 0; v < args.videos; ++v) {
    const std::uint64_t video_seed =
        args.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(v + 1);
    std::mt19937_64 rng(video_seed);
    const int shapes = shape_range.lo +
        static_cast<int>(rng() % static_cast<std::uint64_t>(shape_range.hi - shape_range.lo + 1));
    const int frames = frame_range.lo +
        static_cast<int>(rng() % static_cast<std::uint64_t>(frame_range.hi - frame_range.lo + 1));
    const std::string id = video_name(v);
    const SceneSpec spec = random_scene_spec(args.width, args.height, frames,
                                             shapes, rng(), args.disjoint);
    const Scene scene = generate_scene(spec, id);
    save_mask_file(fs::path(args.out_dir) / (id + ".masks.jsonl"),
                   scene_to_records(scene, id));
    if (args.ground_truth) {
      save_mask_file(fs::path(args.out_dir) / (id + ".gt.jsonl"),
                     ground_truth_records(scene, id));
    }
  }
  std::cout << "wrote " << args.videos << " videos to " << args.out_dir << "\n";
  return kExitOk;
}

struct EditArgs {
  std::string in_file;
  std::string op;
  std::string out_file;
};

int run_edit(const EditArgs& args) {
  const EditOp op = parse_edit_op(args.op);
  const auto videos = group_by_video(load_mask_file(args.in_file));
  if (videos.empty()) {
    throw InputError("no mask records in " + args.in_file);
  }
  std::vector<MaskRecord> out;
  for (const VideoMasks& video : videos) {
    const VideoMasks edited = apply_edit(video, op);
    for (const MaskRecord& rec : edited.records) out.push_back(rec);
  }
  save_mask_file(args.out_file, out);
  std::cout << "applied " << edit_name(op) << " to " << videos.size()
            << " video(s) -> " << args.out_file << "\n";
  return kExitOk;
}

struct ExtractArgs {
  std::string in_file;
  std::string out_file;
  std::string tracks_file;
  std::string dump_dir;
  int points = 3072;
  std::uint64_t seed = 0;
  std::string tau = "auto";
  bool primary_only = false;
  double iou_threshold = 0.3;
  int max_age = 3;
  int min_hits = 1;
  std::int64_t min_area = 4;
};

PipelineConfig extract_config(const ExtractArgs& args) {
  PipelineConfig config;
  config.sample.point_count = args.points;
  config.sample.seed = args.seed;
  config.sample.time_scale = parse_tau(args.tau);
  config.primary_target_only = args.primary_only;
  config.tracker.iou_threshold = args.iou_threshold;
  config.tracker.max_age = args.max_age;
  config.tracker.min_hits = args.min_hits;
  config.min_component_area = args.min_area;
  if (args.points < 1) throw InputError("--points must be >= 1");
  return config;
}

int run_extract(const ExtractArgs& args) {
  const PipelineConfig config = extract_config(args);
  const auto videos = group_by_video(load_mask_file(args.in_file));
  if (videos.empty()) {
    throw InputError("no mask records in " + args.in_file);
  }
  FeatureFile file;
  file.header = feature_header(config);
  std::vector<MaskRecord> track_records;
  for (const VideoMasks& video : videos) {
    if (!args.tracks_file.empty()) {
      for (MaskRecord& rec : sequence_records(
               track_sequences(video, config.tracker, config.min_component_area))) {
        track_records.push_back(std::move(rec));
      }
    }
    const ExtractionReport report = process_video(video, config);
    for (const TargetReport& target : report.targets) {
      if (target.skipped) {
        std::cerr << "warning: " << report.video_id << " target "
                  << target.target_id << " skipped: " << target.note << "\n";
        continue;
      }
      std::cout << report.video_id << " target " << target.target_id
                << " frames " << target.frames_present << " cloud "
                << target.cloud_size_before << " -> " << target.cloud_size_after
                << "\n";
    }
    for (FeatureRecord& rec : feature_records(report)) {
      file.records.push_back(std::move(rec));
    }
    if (!args.dump_dir.empty()) {
      fs::create_directories(args.dump_dir);
      const auto targets = extract_target_clouds(video, config.tracker,
                                                 report.time_scale,
                                                 config.min_component_area);
      for (const TargetCloud& target : targets) {
        if (target.cloud.empty()) continue;
        const PointCloud sampled = normalize_unit_sphere(farthest_point_sample(
            target.cloud, config.sample.point_count, config.sample.seed));
        std::ofstream out(fs::path(args.dump_dir) /
                          (video.video_id + "_" + std::to_string(target.target_id) +
                           ".xyz"));
        write_xyz(out, sampled);
      }
    }
  }
  save_feature_file(args.out_file, file);
  if (!args.tracks_file.empty()) {
    save_mask_file(args.tracks_file, track_records);
  }
  std::cout << "wrote " << file.records.size() << " features -> "
            << args.out_file << "\n";
  return kExitOk;
}

struct DbBuildArgs {
  std::string features_glob;
  std::string out_file;
};

int run_db_build(const DbBuildArgs& args) {
  const auto files = expand_glob(args.features_glob);
  Database db;
  bool first = true;
  PipelineParams reference;
  for (const fs::path& path : files) {
    const FeatureFile file = load_feature_file(path);
    if (first) {
      reference = file.header.params;
      db = Database(reference);
      first = false;
    } else {
      require_compatible(reference, file.header.params);
    }
    for (const FeatureRecord& rec : file.records) {
      if (db.insert(DbEntry{rec.video_id, rec.target_id, rec.class_label,
                            rec.feature})) {
        std::cerr << "notice: replaced entry " << rec.video_id << "/"
                  << rec.target_id << "\n";
      }
    }
  }
  db.save(fs::path(args.out_file));
  std::cout << "database with " << db.size() << " entries -> " << args.out_file
            << "\n";
  return kExitOk;
}

struct DbQueryArgs {
  std::string db_file;
  std::string in_file;
  std::size_t topk = 5;
};

int run_db_query(const DbQueryArgs& args) {
  const Database db = Database::load(fs::path(args.db_file));
  const FeatureFile queries = load_feature_file(args.in_file);
  require_compatible(db.params(), queries.header.params);
  for (const FeatureRecord& rec : queries.records) {
    const QueryResult ranked = db.query_topk(rec.feature, args.topk);
    for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
      std::cout << "query=" << escape_field(rec.video_id) << "/" << rec.target_id
                << " rank=" << rank + 1
                << " video=" << escape_field(ranked[rank].video_id)
                << " target=" << ranked[rank].target_id
                << " distance=" << format_double(ranked[rank].distance) << "\n";
    }
  }
  return kExitOk;
}

struct EvalArgs {
  std::string db_file;
  std::string queries_glob;
  std::string topk = "1,5";
  std::string out_file;
  bool target_granularity = false;
};

int run_eval(const EvalArgs& args) {
  const Database db = Database::load(fs::path(args.db_file));
  std::vector<LabeledQuery> queries;
  for (const fs::path& path : expand_glob(args.queries_glob)) {
    const FeatureFile file = load_feature_file(path);
    require_compatible(db.params(), file.header.params);
    for (const FeatureRecord& rec : file.records) {
      queries.push_back(LabeledQuery{rec.video_id, rec.feature});
    }
  }
  ExperimentResults results;
  for (int k : parse_int_list(args.topk)) {
    if (k < 1) throw InputError("--topk entries must be >= 1");
    const double accuracy =
        evaluate(db, queries, static_cast<std::size_t>(k), !args.target_granularity);
    results.rows.push_back(ExperimentRow{"eval", "top" + std::to_string(k),
                                         db.params().point_count,
                                         static_cast<int>(queries.size()),
                                         accuracy, accuracy});
    std::cout << "top" << k << " accuracy " << format_double(accuracy) << " ("
              << queries.size() << " queries)\n";
  }
  if (!args.out_file.empty()) {
    std::ofstream out(args.out_file);
    if (!out) throw InputError("cannot write results file: " + args.out_file);
    write_results_file(out, results);
  }
  return kExitOk;
}

struct ExperimentArgs {
  std::string corpus_dir;
  std::string points = "128,256,512,1024,3072";
  std::vector<std::string> edits;
  std::string out_file = "results.txt";
  int edit_points = 3072;
  std::uint64_t db_seed = 1;
  std::uint64_t query_seed = 2;
  std::string tau = "auto";
  int threads = 0;
  bool all_targets_for_edits = false;
  bool primary_only_sweep = false;
};

int run_experiment_cmd(const ExperimentArgs& args) {
  std::vector<fs::path> files;
  try {
    files = expand_glob((fs::path(args.corpus_dir) / "*.masks.jsonl").string());
  } catch (const InputError&) {
    files = expand_glob((fs::path(args.corpus_dir) / "*.jsonl").string());
  }
  std::vector<VideoMasks> corpus;
  for (const fs::path& path : files) {
    for (VideoMasks& video : group_by_video(load_mask_file(path))) {
      corpus.push_back(std::move(video));
    }
  }

  ExperimentConfig config;
  if (args.points != "none") config.point_counts = parse_int_list(args.points);
  for (const std::string& edit : args.edits) {
    if (edit == "all") {
      for (const EditOp& op : all_edit_ops()) config.edits.push_back(op);
    } else if (edit == "none") {
      config.edits.clear();
    } else {
      config.edits.push_back(parse_edit_op(edit));
    }
  }
  config.edit_point_count = args.edit_points;
  config.db_seed = args.db_seed;
  config.query_seed = args.query_seed;
  config.base.sample.time_scale = parse_tau(args.tau);
  config.threads = args.threads;
  config.edit_primary_only = !args.all_targets_for_edits;
  config.sweep_primary_only = args.primary_only_sweep;

  const ExperimentResults results = run_experiment(corpus, config);
  std::cout << format_results_table(results);
  std::ofstream out(args.out_file);
  if (!out) throw InputError("cannot write results file: " + args.out_file);
  write_results_file(out, results);
  std::cout << "results -> " << args.out_file << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contour-based video fingerprinting and retrieval"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic mask videos");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--videos", synth.videos, "Number of videos");
  synth_cmd->add_option("--shapes", synth.shapes, "Shapes per video (N or MIN-MAX)");
  synth_cmd->add_option("--frames", synth.frames, "Frames per video (N or MIN-MAX)");
  synth_cmd->add_option("--seed", synth.seed, "Corpus seed");
  synth_cmd->add_option("--width", synth.width, "Frame width");
  synth_cmd->add_option("--height", synth.height, "Frame height");
  synth_cmd->add_flag("--disjoint", synth.disjoint, "Keep shapes in disjoint lanes");
  synth_cmd->add_flag("--ground-truth", synth.ground_truth,
                      "Also write per-shape tracked mask files");

  EditArgs edit;
  auto* edit_cmd = app.add_subcommand("edit", "Apply an edit to a mask video file");
  edit_cmd->add_option("--in", edit.in_file, "Input mask file")->required();
  edit_cmd->add_option("--op", edit.op, "Edit operation name[:params]")->required();
  edit_cmd->add_option("--out", edit.out_file, "Output mask file")->required();

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Extract contour features");
  extract_cmd->add_option("--in", extract.in_file, "Input mask file")->required();
  extract_cmd->add_option("--out", extract.out_file, "Output feature file")->required();
  extract_cmd->add_option("--points", extract.points, "Downsampled cloud size");
  extract_cmd->add_option("--seed", extract.seed, "Sampling seed");
  extract_cmd->add_option("--tau", extract.tau, "Time scale ('auto' or a number)");
  extract_cmd->add_flag("--primary-only", extract.primary_only,
                        "Keep only the longest-appearing target per video");
  extract_cmd->add_option("--iou-threshold", extract.iou_threshold, "Association IoU");
  extract_cmd->add_option("--max-age", extract.max_age, "Frames a track may coast");
  extract_cmd->add_option("--min-hits", extract.min_hits, "Hits to confirm a track");
  extract_cmd->add_option("--min-area", extract.min_area, "Detector stub min area");
  extract_cmd->add_option("--dump-clouds", extract.dump_dir,
                          "Also write sampled clouds as .xyz files here");
  extract_cmd->add_option("--emit-tracks", extract.tracks_file,
                          "Also write the tracked masks as an interchange file");

  auto* db_cmd = app.add_subcommand("db", "Database operations");
  db_cmd->require_subcommand(1);
  DbBuildArgs db_build;
  auto* db_build_cmd = db_cmd->add_subcommand("build", "Build a database from features");
  db_build_cmd->add_option("--features", db_build.features_glob, "Feature file glob")
      ->required();
  db_build_cmd->add_option("--out", db_build.out_file, "Output database")->required();

  DbQueryArgs db_query;
  auto* db_query_cmd = db_cmd->add_subcommand("query", "Query a database");
  db_query_cmd->add_option("--db", db_query.db_file, "Database file")->required();
  db_query_cmd->add_option("--in", db_query.in_file, "Query feature file")->required();
  db_query_cmd->add_option("--topk", db_query.topk, "Results per query");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate retrieval accuracy");
  eval_cmd->add_option("--db", eval_args.db_file, "Database file")->required();
  eval_cmd->add_option("--queries", eval_args.queries_glob, "Query feature glob")
      ->required();
  eval_cmd->add_option("--topk", eval_args.topk, "Comma-separated k values");
  eval_cmd->add_option("--out", eval_args.out_file, "Optional results file");
  eval_cmd->add_flag("--target-granularity", eval_args.target_granularity,
                     "Rank raw entries instead of distinct videos");

  ExperimentArgs experiment;
  auto* exp_cmd = app.add_subcommand("experiment", "Run the retrieval experiments");
  exp_cmd->add_option("--corpus", experiment.corpus_dir, "Corpus directory")->required();
  exp_cmd->add_option("--points", experiment.points,
                      "Comma-separated point counts, or 'none'");
  exp_cmd->add_option("--edits", experiment.edits,
                      "Edit specs, or 'all' / 'none'");
  exp_cmd->add_option("--out", experiment.out_file, "Results file");
  exp_cmd->add_option("--edit-points", experiment.edit_points,
                      "Point count for the edit rows");
  exp_cmd->add_option("--db-seed", experiment.db_seed, "Database sampling seed");
  exp_cmd->add_option("--query-seed", experiment.query_seed, "Query sampling seed");
  exp_cmd->add_option("--tau", experiment.tau, "Time scale ('auto' or a number)");
  exp_cmd->add_option("--threads", experiment.threads, "Worker threads (0 = auto)");
  exp_cmd->add_flag("--all-targets-for-edits", experiment.all_targets_for_edits,
                    "Use every target (not just the primary) for edit rows");
  exp_cmd->add_flag("--primary-only", experiment.primary_only_sweep,
                    "Use only the primary target in the sweep");

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed()) return run_synth(synth);
    if (edit_cmd->parsed()) return run_edit(edit);
    if (extract_cmd->parsed()) return run_extract(extract);
    if (db_build_cmd->parsed()) return run_db_build(db_build);
    if (db_query_cmd->parsed()) return run_db_query(db_query);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (exp_cmd->parsed()) return run_experiment_cmd(experiment);
    return kExitInputError;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  } catch (const IncompatibilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIncompatible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
