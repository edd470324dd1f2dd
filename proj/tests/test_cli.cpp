// End-to-end checks of the `ma` binary: the synth -> extract -> db -> eval
// flow, the edit command, and the documented exit codes.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ma/mask_io.hpp"
#include "ma/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

#define EXPECT(cond, what)                                                   \
  do {                                                                       \
    if (!(cond)) {                                                           \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << what   \
                << "\n";                                                     \
      ++failures;                                                            \
    }                                                                        \
  } while (0)

std::string cli;
fs::path work;

int run(const std::string& args) {
  const std::string cmd = cli + " " + args + " >> " + (work / "log.txt").string() +
                          " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: ma_cli_tests <path-to-ma-binary>\n";
    return 2;
  }
  cli = argv[1];
  work = fs::temp_directory_path() / "ma_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string corpus = (work / "corpus").string();

  // Full happy path: synth -> extract (db + query seeds) -> db build -> eval.
  EXPECT(run("synth --out " + corpus +
             " --videos 4 --shapes 1-3 --frames 40 --seed 11") == 0,
         "synth exits 0");
  EXPECT(fs::exists(corpus + "/video_000.masks.jsonl"), "synth wrote mask files");
  EXPECT(fs::exists(corpus + "/video_003.masks.jsonl"), "synth wrote all videos");

  for (int v = 0; v < 4; ++v) {
    const std::string stem = corpus + "/video_00" + std::to_string(v);
    EXPECT(run("extract --in " + stem + ".masks.jsonl --points 512 --seed 1 --out " +
               stem + ".db.feat") == 0,
           "extract (db side) exits 0");
    EXPECT(run("extract --in " + stem + ".masks.jsonl --points 512 --seed 2 --out " +
               stem + ".q.feat") == 0,
           "extract (query side) exits 0");
  }

  // Cloud dumps are plain "x y z" lines.
  const std::string clouds = (work / "clouds").string();
  EXPECT(run("extract --in " + corpus + "/video_000.masks.jsonl --points 64 "
             "--seed 1 --out " + (work / "dump.feat").string() +
             " --dump-clouds " + clouds) == 0,
         "extract with --dump-clouds exits 0");
  {
    bool found = false;
    for (const auto& entry : fs::directory_iterator(clouds)) {
      if (entry.path().extension() == ".xyz") {
        found = true;
        std::ifstream in(entry.path());
        std::string line;
        std::size_t lines = 0;
        while (std::getline(in, line)) {
          double x, y, z;
          EXPECT(std::sscanf(line.c_str(), "%lf %lf %lf", &x, &y, &z) == 3,
                 "xyz line parses");
          ++lines;
        }
        EXPECT(lines == 64, "dumped cloud has the sampled size");
        break;
      }
    }
    EXPECT(found, "a .xyz dump exists");
  }

  // Tracker output re-emitted as an interchange file feeds straight back in.
  const std::string tracks = (work / "tracks.jsonl").string();
  EXPECT(run("extract --in " + corpus + "/video_000.masks.jsonl --points 128 "
             "--seed 3 --out " + (work / "a.feat").string() +
             " --emit-tracks " + tracks) == 0,
         "extract with --emit-tracks exits 0");
  EXPECT(run("extract --in " + tracks + " --points 128 --seed 3 --out " +
             (work / "b.feat").string()) == 0,
         "re-extract from emitted tracks exits 0");
  EXPECT(slurp(work / "a.feat") == slurp(work / "b.feat"),
         "tracker path and emitted-tracks path agree bit for bit");

  const std::string db = (work / "corpus.madb").string();
  EXPECT(run("db build --features '" + corpus + "/*.db.feat' --out " + db) == 0,
         "db build exits 0");

  EXPECT(run("db query --db " + db + " --in " + corpus + "/video_001.q.feat "
             "--topk 3") == 0,
         "db query exits 0");

  const std::string results = (work / "eval.txt").string();
  EXPECT(run("eval --db " + db + " --queries '" + corpus + "/*.q.feat' "
             "--topk 1,5 --out " + results) == 0,
         "eval exits 0");
  {
    std::ifstream in(results);
    const ma::ExperimentResults parsed = ma::read_results_file(in);
    EXPECT(parsed.rows.size() == 2, "eval wrote two rows");
    EXPECT(parsed.rows[0].name == "top1", "first row is top1");
    EXPECT(parsed.rows[0].top1 == 1.0, "self-retrieval on a tiny corpus is perfect");
    EXPECT(parsed.rows[1].top5 >= parsed.rows[0].top1, "top5 >= top1");
  }

  // Edits through the CLI keep the interchange format loadable.
  const std::string edited = (work / "edited.jsonl").string();
  EXPECT(run("edit --in " + corpus + "/video_000.masks.jsonl --op reverse --out " +
             edited) == 0,
         "edit exits 0");
  {
    const auto videos = ma::group_by_video(ma::load_mask_file(edited));
    EXPECT(videos.size() == 1, "edited file holds one video");
    EXPECT(videos[0].frame_count == 40, "reverse keeps the frame count");
  }
  EXPECT(run("edit --in " + edited + " --op crop:0,0,1,1 --out " +
             (work / "cropped.jsonl").string()) == 2,
         "crop that empties the video exits 2");

  // Experiment over the tiny corpus.
  const std::string exp_results = (work / "exp.txt").string();
  EXPECT(run("experiment --corpus " + corpus + " --points 128 --edits reverse "
             "--edit-points 128 --out " + exp_results + " --threads 2") == 0,
         "experiment exits 0");
  {
    std::ifstream in(exp_results);
    const ma::ExperimentResults parsed = ma::read_results_file(in);
    EXPECT(parsed.rows.size() == 3, "sweep row + original + reverse");
    EXPECT(parsed.rows[0].section == "sweep", "sweep section first");
    EXPECT(parsed.rows[1].name == "original", "original row present");
  }

  // Exit code 2: unusable inputs.
  EXPECT(run("extract --in " + (work / "missing.jsonl").string() +
             " --out " + (work / "x.feat").string()) == 2,
         "missing input exits 2");
  EXPECT(run("edit --in " + corpus + "/video_000.masks.jsonl --op zoom --out " +
             edited) == 2,
         "unknown edit exits 2");
  EXPECT(run("db build --features '" + corpus + "/*.nope' --out " + db) == 2,
         "empty glob exits 2");
  EXPECT(run("nonsense") == 2, "unknown subcommand exits 2");

  // Exit code 3: version and parameter incompatibilities.
  {
    std::string text = slurp(db);
    text.replace(text.find("MADB 1"), 6, "MADB 9");
    std::ofstream out(work / "tampered.madb");
    out << text;
  }
  EXPECT(run("db query --db " + (work / "tampered.madb").string() + " --in " +
             corpus + "/video_001.q.feat --topk 1") == 3,
         "tampered db version exits 3");

  const std::string other_points = (work / "k128.feat").string();
  EXPECT(run("extract --in " + corpus + "/video_001.masks.jsonl --points 128 "
             "--seed 2 --out " + other_points) == 0,
         "extract at a different point count exits 0");
  EXPECT(run("db query --db " + db + " --in " + other_points + " --topk 1") == 3,
         "querying with mismatched pipeline parameters exits 3");

  EXPECT(run("--help") == 0, "--help exits 0");

  if (failures == 0) {
    std::cout << "cli tests passed\n";
    return 0;
  }
  std::cerr << failures << " cli check(s) failed; log: " << (work / "log.txt")
            << "\n";
  return 1;
}
