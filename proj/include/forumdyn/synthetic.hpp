// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forumdyn/common.hpp"
#include "forumdyn/corpus.hpp"
#include "forumdyn/timeseries.hpp"

namespace forumdyn::synthetic {

// Planted-topic corpora. Topic k puts Dirichlet(word_concentration) mass on
// its own block of vocab / topics consecutive token ids.
struct PlantedCorpusSpec {
  int topics = 10;
  int vocab = 1000;
  int documents = 5000;
  int min_length = 50;
  int max_length = 100;
  double doc_concentration = 0.1;   // Dirichlet on document-topic mixtures
  double word_concentration = 1.0;  // Dirichlet on words within a block
  std::uint64_t seed = 1;
};

struct PlantedCorpus {
  ProcessedCorpus corpus;
  MatrixXd phi;    // K x V
  MatrixXd theta;  // D x K
};

PlantedCorpus planted_corpus(const PlantedCorpusSpec& spec);

// Planted multi-series HMM data with well separated diagonal Gaussian states.
// State k has mean base + separation * e_(k mod dim) + separation * (k / dim)
// * e_((k + 1) mod dim) and standard deviation `sigma` in every dimension.
struct PlantedSeriesSpec {
  int series = 12;
  int weeks = 80;
  int dim = 4;
  int states = 4;
  double sigma = 0.05;
  double separation = 0.5;
  double stay = 0.9;
  int min_subset = 2;
  int max_subset = 3;
  std::vector<std::vector<int>> subsets;  // fixed state subset per series, overrides the random draw
  int posts_per_week = 20;
  int post_jitter = 2;     // counts uniform in [posts - jitter, posts + jitter]
  std::vector<int> series_with_gaps;  // series that get a run of zero-post weeks
  int gap_length = 6;
  std::uint64_t seed = 7;
};

struct PlantedSeries {
  std::vector<ForumSeries> series;
  std::vector<std::vector<int>> labels;  // planted state per week, -1 for empty weeks
  MatrixXd means;                        // states x dim
};

PlantedSeries planted_series(const PlantedSeriesSpec& spec);

/// Replaces the observation at (series, week) by a draw from an extra state
/// far from every planted state, labeled `label`.
void plant_outlier_state(PlantedSeries& data, const std::vector<std::pair<int, int>>& forum_weeks,
                         int label, double offset, std::uint64_t seed);

// Raw forum posts for pipeline fixtures: forums in two groups that talk
// about different word pools, spread across `weeks` weeks from `start_day`.
struct FixtureSpec {
  int forums = 4;
  int posts = 200;
  int weeks = 10;
  std::int64_t start_day = 17168;  // 2017-01-02, a Monday
  std::uint64_t seed = 11;
};

std::vector<RawPost> fixture_posts(const FixtureSpec& spec);

/// JSON Lines encoding of posts with ISO-8601 UTC timestamps.
std::string to_jsonl(const std::vector<RawPost>& posts);

/// Stopword list matching the fixture vocabulary.
std::string fixture_stopwords();

}  // namespace forumdyn::synthetic
