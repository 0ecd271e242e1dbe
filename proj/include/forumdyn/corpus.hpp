// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "forumdyn/dates.hpp"

namespace forumdyn {

struct RawPost {
  std::string forum_id;
  std::string post_id;
  Timestamp timestamp = 0;
  std::string text;
};

struct IngestReport {
  std::size_t lines = 0;       // non-blank lines read
  std::size_t valid = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
  std::size_t dropped_empty = 0;  // filled in by preprocess
};

struct IngestResult {
  std::vector<RawPost> posts;
  IngestReport report;
};

/// Reads JSON Lines post records. Malformed lines and repeated
/// (forum_id, post_id) pairs are skipped and counted; the first occurrence wins.
/// Throws Error when the file cannot be opened.
IngestResult ingest(const std::filesystem::path& records_file);

/// Same as ingest() but over an in-memory JSONL buffer.
IngestResult ingest_lines(std::string_view jsonl);

struct Vocabulary {
  std::vector<std::string> tokens;         // id -> token, sorted ascending
  std::vector<std::size_t> doc_frequency;  // id -> number of documents
  std::map<std::string, int, std::less<>> index;

  std::size_t size() const { return tokens.size(); }
  int id(std::string_view token) const;  // -1 when absent
};

struct Document {
  std::string forum_id;
  std::string post_id;
  Timestamp timestamp = 0;
  std::vector<int> tokens;  // token ids, in text order
};

struct ProcessedCorpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;
  std::map<std::string, std::vector<std::size_t>> forum_index;
  std::size_t dropped_empty = 0;

  std::size_t token_count() const;
};

struct PreprocessOptions {
  std::size_t min_df = 2;
  double max_df = 0.5;
};

using StopwordSet = std::unordered_set<std::string>;

StopwordSet load_stopwords(const std::filesystem::path& file);

/// Lowercases ASCII letters and splits on characters that are not ASCII
/// alphanumerics. Bytes >= 0x80 are kept as token characters so UTF-8
/// sequences are never split. Tokens shorter than two bytes are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Tokenizes, removes stopwords, and filters tokens whose document frequency
/// falls outside [min_df, max_df * N_docs]. Filtering repeats until no token
/// changes so that the result is a fixed point of the same filter.
ProcessedCorpus preprocess(const std::vector<RawPost>& posts,
                           const StopwordSet& stopwords,
                           const PreprocessOptions& opts = {});

constexpr Timestamp kOneMonth = 28 * kSecondsPerDay;

/// Forums with more than min_posts posts whose first and last posts are at
/// least min_span seconds apart. Sorted by forum id.
std::vector<std::string> select_forums(const ProcessedCorpus& corpus,
                                       std::size_t min_posts = 100,
                                       Timestamp min_span = kOneMonth);

}  // namespace forumdyn
