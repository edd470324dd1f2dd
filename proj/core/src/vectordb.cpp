#include "ma/vectordb.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ma/error.hpp"
#include "ma/text_format.hpp"

namespace ma {

namespace {

constexpr std::string_view kDbTag = "MADB";
constexpr int kDbFormatVersion = 1;

}  // namespace

bool Database::insert(DbEntry entry) {
  const auto key = std::pair(entry.video_id, entry.target_id);
  auto it = key_index_.find(key);
  if (it != key_index_.end()) {
    entries_[it->second] = std::move(entry);
    return true;
  }
  key_index_.emplace(key, entries_.size());
  entries_.push_back(std::move(entry));
  return false;
}

QueryResult Database::query_topk(const FeatureVector& query, std::size_t k) const {
  if (entries_.empty()) {
    throw InputError("query against an empty database");
  }
  if (k < 1) {
    throw InputError("k must be >= 1");
  }
  QueryResult ranked;
  ranked.reserve(entries_.size());
  for (const DbEntry& entry : entries_) {
    ranked.push_back(RankedMatch{entry.video_id, entry.target_id,
                                 feature_distance(query, entry.feature)});
  }
  auto before = [](const RankedMatch& a, const RankedMatch& b) {
    return std::tie(a.distance, a.video_id, a.target_id) <
           std::tie(b.distance, b.video_id, b.target_id);
  };
  const std::size_t take = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end(), before);
  ranked.resize(take);
  return ranked;
}

void Database::save(std::ostream& out) const {
  out << kDbTag << ' ' << kDbFormatVersion << ' ' << params_.descriptor_version
      << ' ' << params_.point_count << ' ' << params_.time_scale << '\n';
  for (const DbEntry& entry : entries_) {
    out << escape_field(entry.video_id) << ' ' << entry.target_id << ' '
        << escape_field(entry.class_label);
    for (double value : entry.feature.values) {
      out << ' ' << format_double(value);
    }
    out << '\n';
  }
}

void Database::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write database file: " + path.string());
  }
  save(out);
  if (!out.flush()) {
    throw InputError("write failed: " + path.string());
  }
}

Database Database::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("database file is empty");
  }
  const auto header = split_tokens(line);
  if (header.size() != 5 || header[0] != kDbTag) {
    throw InputError("database file line 1: bad header");
  }
  const int format_version = static_cast<int>(parse_int(header[1]));
  if (format_version != kDbFormatVersion) {
    throw IncompatibilityError("unsupported database format version " +
                               std::string(header[1]));
  }
  PipelineParams params;
  params.descriptor_version = static_cast<int>(parse_int(header[2]));
  params.point_count = static_cast<int>(parse_int(header[3]));
  params.time_scale = std::string(header[4]);

  Database db(params);
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto tokens = split_tokens(line);
    const std::string where = "database file line " + std::to_string(line_number);
    if (tokens.size() != 3 + kFeatureDim) {
      throw InputError(where + ": expected ids and " + std::to_string(kFeatureDim) +
                       " values, got " + std::to_string(tokens.size()) + " tokens");
    }
    DbEntry entry;
    try {
      entry.video_id = unescape_field(tokens[0]);
      entry.target_id = static_cast<int>(parse_int(tokens[1]));
      entry.class_label = unescape_field(tokens[2]);
      for (int i = 0; i < kFeatureDim; ++i) {
        entry.feature.values[i] = parse_double(tokens[3 + i]);
      }
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    db.insert(std::move(entry));
  }
  return db;
}

Database Database::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open database file: " + path.string());
  }
  return load(in);
}

std::size_t evaluate_hit_count(const Database& db,
                               const std::vector<LabeledQuery>& queries,
                               std::size_t k, bool video_granularity) {
  std::size_t correct = 0;
  for (const LabeledQuery& query : queries) {
    const QueryResult ranked = db.query_topk(query.feature, db.size());
    bool hit = false;
    if (video_granularity) {
      std::set<std::string> seen;
      for (const RankedMatch& match : ranked) {
        if (!seen.insert(match.video_id).second) continue;
        if (match.video_id == query.true_video_id) {
          hit = true;
          break;
        }
        if (seen.size() >= k) break;
      }
    } else {
      for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        if (ranked[i].video_id == query.true_video_id) {
          hit = true;
          break;
        }
      }
    }
    if (hit) ++correct;
  }
  return correct;
}

double evaluate(const Database& db, const std::vector<LabeledQuery>& queries,
                std::size_t k, bool video_granularity) {
  if (queries.empty()) {
    throw InputError("no queries to evaluate");
  }
  return static_cast<double>(evaluate_hit_count(db, queries, k, video_granularity)) /
         static_cast<double>(queries.size());
}

}  // namespace ma
