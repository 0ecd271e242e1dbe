// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "forumdyn/analysis.hpp"
#include "forumdyn/bphmm.hpp"
#include "forumdyn/clustering.hpp"
#include "forumdyn/corpus.hpp"
#include "forumdyn/lda.hpp"
#include "forumdyn/timeseries.hpp"

namespace forumdyn {

using Json = nlohmann::json;

// JSON containers. Matrices are arrays of rows; every container carries a
// "format" tag checked on load.

Json to_json(const IngestReport& r);
IngestReport ingest_report_from_json(const Json& j);

Json to_json(const ProcessedCorpus& c);
ProcessedCorpus corpus_from_json(const Json& j);

Json to_json(const TopicModel& m);
TopicModel topic_model_from_json(const Json& j);

Json to_json(const ForumSeries& s);
ForumSeries series_from_json(const Json& j);

Json to_json(const McmcConfig& c);
McmcConfig mcmc_config_from_json(const Json& j, McmcConfig base = {});

Json to_json(const BphmmModel& m);
BphmmModel bphmm_model_from_json(const Json& j);

Json to_json(const Dendrogram& d);
Dendrogram dendrogram_from_json(const Json& j);

/// Nested form: leaves {"forum": id, "index": i}; internal nodes
/// {"height": h, "size": n, "children": [left, right]}.
Json dendrogram_tree_json(const Dendrogram& d, const std::vector<std::string>& labels);

Json to_json(const AnomalyReport& r);

Json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const Json& j);

// CSV exports.
std::string top_words_csv(const TopicModel& model, std::size_t n);
std::string series_csv(const ForumSeries& s);
std::string state_sequences_csv(const BphmmModel& model, const std::vector<ForumSeries>& series);
std::string similarity_csv(const SimilarityMatrix& sim);
std::string volatility_csv(const VolatilityReport& rep);
std::string cross_entropy_csv(const std::vector<CrossEntropySeries>& ce, int window);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// Files.
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);
Json read_json(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const Json& j);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string content_hash(const std::string& bytes);
std::string file_hash(const std::filesystem::path& p);

}  // namespace forumdyn
