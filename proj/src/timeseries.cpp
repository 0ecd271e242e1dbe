// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/timeseries.hpp"

#include <algorithm>
#include <limits>

namespace forumdyn {

WeekRange global_week_range(const ProcessedCorpus& corpus, const std::vector<std::string>& forums) {
  WeekRange r{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::min()};
  for (const auto& f : forums) {
    auto it = corpus.forum_index.find(f);
    if (it == corpus.forum_index.end()) continue;
    for (auto d : it->second) {
      const auto w = iso_week_index(corpus.documents[d].timestamp);
      r.start_week = std::min(r.start_week, w);
      r.end_week = std::max(r.end_week, w);
    }
  }
  if (r.start_week > r.end_week) return WeekRange{};
  return r;
}

ForumSeries build_series(const MatrixXd& doc_topics, const ProcessedCorpus& corpus,
                         const std::string& forum_id, const WeekRange& range) {
  auto it = corpus.forum_index.find(forum_id);
  if (it == corpus.forum_index.end()) throw Error("build_series: unknown forum " + forum_id);
  if (static_cast<std::size_t>(doc_topics.rows()) != corpus.documents.size())
    throw Error("build_series: topic matrix rows do not match corpus documents");
  if (range.size() < 1) throw Error("build_series: empty week range");

  ForumSeries s;
  s.forum_id = forum_id;
  s.weeks = range;
  s.observations = MatrixXd::Zero(range.size(), doc_topics.cols());
  s.post_counts = Eigen::VectorXi::Zero(range.size());
  for (auto d : it->second) {
    const auto w = iso_week_index(corpus.documents[d].timestamp);
    if (!range.contains(w)) continue;
    const auto row = w - range.start_week;
    s.observations.row(row) += doc_topics.row(static_cast<Eigen::Index>(d));
    ++s.post_counts(row);
  }
  if (s.post_counts.sum() == 0)
    throw Error("build_series: forum " + forum_id + " has no posts in the week range");
  for (Eigen::Index w = 0; w < s.length(); ++w)
    if (s.post_counts(w) > 0) s.observations.row(w) /= s.post_counts(w);
  return s;
}

}  // namespace forumdyn
