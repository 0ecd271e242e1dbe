// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forumdyn/common.hpp"
#include "forumdyn/corpus.hpp"

namespace forumdyn {

// Inclusive range of week indices (see iso_week_index).
struct WeekRange {
  std::int64_t start_week = 0;
  std::int64_t end_week = -1;

  std::int64_t size() const { return end_week - start_week + 1; }
  bool contains(std::int64_t w) const { return w >= start_week && w <= end_week; }
};

/// Weekly mean topic vectors of one forum. Weeks without posts hold the zero
/// vector and a zero count.
struct ForumSeries {
  std::string forum_id;
  WeekRange weeks;
  MatrixXd observations;            // W x K
  Eigen::VectorXi post_counts;      // W

  Eigen::Index length() const { return observations.rows(); }
  Eigen::Index dim() const { return observations.cols(); }
  std::int64_t total_posts() const { return post_counts.sum(); }
};

/// Union of the week spans of the given forums.
WeekRange global_week_range(const ProcessedCorpus& corpus, const std::vector<std::string>& forums);

/// Averages the rows of `doc_topics` (one per corpus document) per week.
/// Throws when the forum is absent or has no post inside `range`.
ForumSeries build_series(const MatrixXd& doc_topics, const ProcessedCorpus& corpus,
                         const std::string& forum_id, const WeekRange& range);

}  // namespace forumdyn
