// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "forumdyn/common.hpp"

namespace forumdyn {

using nlohmann::json;

namespace {

std::optional<RawPost> parse_record(const std::string& line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object()) return std::nullopt;
  for (const char* key : {"forum_id", "post_id", "timestamp", "text"})
    if (!j.contains(key)) return std::nullopt;
  const auto& f = j["forum_id"];
  const auto& p = j["post_id"];
  const auto& t = j["timestamp"];
  const auto& x = j["text"];
  if (!x.is_string()) return std::nullopt;

  RawPost post;
  // Integer ids are accepted and stored in their decimal form.
  auto id_string = [](const json& v) -> std::optional<std::string> {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    return std::nullopt;
  };
  auto fid = id_string(f);
  auto pid = id_string(p);
  if (!fid || !pid || fid->empty() || pid->empty()) return std::nullopt;
  post.forum_id = *fid;
  post.post_id = *pid;

  if (t.is_number_integer()) {
    post.timestamp = t.get<std::int64_t>();
  } else if (t.is_string()) {
    auto ts = parse_iso8601(t.get<std::string>());
    if (!ts) return std::nullopt;
    post.timestamp = *ts;
  } else {
    return std::nullopt;
  }
  post.text = x.get<std::string>();
  return post;
}

IngestResult ingest_stream(std::istream& in) {
  IngestResult out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++out.report.lines;
    auto post = parse_record(line);
    if (!post) {
      ++out.report.malformed;
      continue;
    }
    if (!seen.emplace(post->forum_id, post->post_id).second) {
      ++out.report.duplicates;
      continue;
    }
    out.posts.push_back(std::move(*post));
  }
  out.report.valid = out.posts.size();
  return out;
}

bool is_token_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

IngestResult ingest(const std::filesystem::path& records_file) {
  std::ifstream in(records_file, std::ios::binary);
  if (!in) throw Error("cannot open records file: " + records_file.string());
  return ingest_stream(in);
}

IngestResult ingest_lines(std::string_view jsonl) {
  std::istringstream in{std::string(jsonl)};
  return ingest_stream(in);
}

int Vocabulary::id(std::string_view token) const {
  auto it = index.find(token);
  return it == index.end() ? -1 : it->second;
}

std::size_t ProcessedCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.tokens.size();
  return n;
}

StopwordSet load_stopwords(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open stopword list: " + file.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& tok : tokenize(line)) words.insert(std::move(tok));
  }
  return words;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2) out.push_back(cur);
    cur.clear();
  };
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

ProcessedCorpus preprocess(const std::vector<RawPost>& posts, const StopwordSet& stopwords,
                           const PreprocessOptions& opts) {
  if (posts.empty()) throw Error("preprocess: empty post list");
  if (opts.min_df < 1) throw Error("preprocess: min_df must be >= 1");
  if (!(opts.max_df > 0.0 && opts.max_df <= 1.0))
    throw Error("preprocess: max_df must lie in (0, 1]");

  std::vector<std::vector<std::string>> docs(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) {
    for (auto& tok : tokenize(posts[i].text))
      if (!stopwords.contains(tok)) docs[i].push_back(std::move(tok));
  }

  // Repeat the frequency filter until nothing changes: dropping emptied
  // documents shrinks N_docs and with it the max_df bound.
  std::map<std::string, std::size_t> df;
  for (;;) {
    df.clear();
    std::size_t n_docs = 0;
    for (const auto& d : docs) {
      if (d.empty()) continue;
      ++n_docs;
      std::set<std::string_view> uniq(d.begin(), d.end());
      for (auto t : uniq) ++df[std::string(t)];
    }
    const double upper = opts.max_df * static_cast<double>(n_docs);
    std::set<std::string> removed;
    for (const auto& [tok, count] : df)
      if (count < opts.min_df || static_cast<double>(count) > upper) removed.insert(tok);
    if (removed.empty()) break;
    for (auto& d : docs)
      std::erase_if(d, [&](const std::string& t) { return removed.contains(t); });
  }

  ProcessedCorpus corpus;
  auto& vocab = corpus.vocabulary;
  for (const auto& [tok, count] : df) {
    vocab.index.emplace(tok, static_cast<int>(vocab.tokens.size()));
    vocab.tokens.push_back(tok);
    vocab.doc_frequency.push_back(count);
  }
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (docs[i].empty()) {
      ++corpus.dropped_empty;
      continue;
    }
    Document doc{posts[i].forum_id, posts[i].post_id, posts[i].timestamp, {}};
    doc.tokens.reserve(docs[i].size());
    for (const auto& t : docs[i]) doc.tokens.push_back(vocab.id(t));
    corpus.forum_index[doc.forum_id].push_back(corpus.documents.size());
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

std::vector<std::string> select_forums(const ProcessedCorpus& corpus, std::size_t min_posts,
                                       Timestamp min_span) {
  std::vector<std::string> out;
  for (const auto& [forum, idx] : corpus.forum_index) {
    if (idx.size() <= min_posts) continue;
    Timestamp lo = corpus.documents[idx.front()].timestamp, hi = lo;
    for (auto i : idx) {
      lo = std::min(lo, corpus.documents[i].timestamp);
      hi = std::max(hi, corpus.documents[i].timestamp);
    }
    if (hi - lo >= min_span) out.push_back(forum);
  }
  return out;
}

}  // namespace forumdyn
