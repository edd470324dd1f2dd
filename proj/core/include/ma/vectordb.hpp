#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ma/embed.hpp"

namespace ma {

struct DbEntry {
  std::string video_id;
  int target_id = 0;
  std::string class_label;
  FeatureVector feature;
};

struct RankedMatch {
  std::string video_id;
  int target_id = 0;
  double distance = 0.0;

  friend bool operator==(const RankedMatch&, const RankedMatch&) = default;
};

/// Ranked matches, ascending distance; ties resolved by (video_id, target_id).
using QueryResult = std::vector<RankedMatch>;

/// Exhaustive-scan Euclidean retrieval database. (video_id, target_id) keys
/// are unique; re-inserting a key replaces the stored feature.
class Database {
 public:
  Database() = default;
  explicit Database(PipelineParams params) : params_(std::move(params)) {}

  const PipelineParams& params() const { return params_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<DbEntry>& entries() const { return entries_; }

  /// Returns true when an existing entry was replaced.
  bool insert(DbEntry entry);

  /// k smallest distances over the whole database (k capped at size).
  /// Throws InputError when the database is empty or k < 1.
  QueryResult query_topk(const FeatureVector& query, std::size_t k) const;

  // "MADB <format> <descriptor> <points> <tau>" header, then one feature
  // record per line. Round-trip exact.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static Database load(std::istream& in);
  static Database load(const std::filesystem::path& path);

 private:
  PipelineParams params_;
  std::vector<DbEntry> entries_;
  std::map<std::pair<std::string, int>, std::size_t> key_index_;
};

struct LabeledQuery {
  std::string true_video_id;
  FeatureVector feature;
};

/// Number of queries whose true video id appears among the top-k results.
/// With video_granularity (the default), ranks are distinct video ids in
/// distance order; otherwise raw entries.
std::size_t evaluate_hit_count(const Database& db,
                               const std::vector<LabeledQuery>& queries,
                               std::size_t k, bool video_granularity = true);

/// Hit count as a fraction of the query count. Throws InputError when the
/// database or the query list is empty.
double evaluate(const Database& db, const std::vector<LabeledQuery>& queries,
                std::size_t k, bool video_granularity = true);

}  // namespace ma
