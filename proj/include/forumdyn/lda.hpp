// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "forumdyn/common.hpp"
#include "forumdyn/corpus.hpp"

namespace forumdyn {

struct LdaHyperparams {
  int topics = 100;
  double alpha = 0.5;   // symmetric document-topic concentration
  double beta = 0.01;   // symmetric topic-word concentration
  int iterations = 500;
  std::uint64_t seed = 0;

  // alpha = 50 / K, beta = 0.01, 500 sweeps.
  static LdaHyperparams defaults(int topics, std::uint64_t seed = 0);
  void validate() const;
};

struct TopicModel {
  MatrixXd phi;    // K x V, rows sum to one
  MatrixXd theta;  // D x K, rows sum to one
  LdaHyperparams hp;
  std::vector<std::string> vocabulary;
  std::vector<std::vector<int>> assignments;  // final token-topic draws

  int topics() const { return static_cast<int>(phi.rows()); }
  int vocab_size() const { return static_cast<int>(phi.cols()); }
};

/// Collapsed Gibbs sampler over a fixed corpus. One instance is one chain.
class LdaSampler {
 public:
  LdaSampler(const ProcessedCorpus& corpus, const LdaHyperparams& hp);

  void sweep();
  int sweeps_done() const { return sweeps_; }

  // Sum of doc-topic counts equals document lengths, topic-word counts agree
  // with doc-topic counts, and topic totals agree with both.
  bool counts_consistent() const;

  // Point estimate from the current counts.
  TopicModel estimate() const;

 private:
  const ProcessedCorpus& corpus_;
  LdaHyperparams hp_;
  int vocab_;
  Rng rng_;
  std::vector<std::vector<int>> z_;
  MatrixXi doc_topic_;    // D x K
  MatrixXi topic_word_;   // K x V
  Eigen::VectorXi topic_total_;
  std::vector<double> weights_;
  int sweeps_ = 0;
};

using LdaTraceFn = std::function<void(int sweep, const LdaSampler&)>;

/// Trains with hp.iterations sweeps. `trace`, when set, is called after every sweep.
TopicModel train_lda(const ProcessedCorpus& corpus, const LdaHyperparams& hp,
                     const LdaTraceFn& trace = {});

/// Folds one document into a trained model with phi held fixed. Token ids
/// outside the vocabulary are ignored; a document with no usable tokens gets
/// the uniform vector.
VectorXd infer_doc(const TopicModel& model, std::span<const int> doc, int fold_in_iters,
                   std::uint64_t seed);

/// Topic vectors for every document of `corpus`, row d seeded by derive_seed(seed, d).
MatrixXd infer_corpus(const TopicModel& model, const ProcessedCorpus& corpus, int fold_in_iters,
                      std::uint64_t seed);

/// Token ids of a topic ranked by probability, ties by ascending id.
std::vector<int> top_words(const TopicModel& model, int topic_index, std::size_t n);

/// exp(-mean per-token log likelihood) of corpus documents under phi and theta.
/// theta rows are matched to corpus documents by index.
double perplexity(const TopicModel& model, const ProcessedCorpus& corpus);

}  // namespace forumdyn
