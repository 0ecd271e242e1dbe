// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/lda.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iostream>
#include <numeric>

namespace forumdyn {

namespace {

int sample_index(std::span<const double> cumulative, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, cumulative.back());
  const double u = unif(rng);
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                   static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
}

}  // namespace

LdaHyperparams LdaHyperparams::defaults(int topics, std::uint64_t seed) {
  LdaHyperparams hp;
  hp.topics = topics;
  hp.alpha = 50.0 / topics;
  hp.beta = 0.01;
  hp.iterations = 500;
  hp.seed = seed;
  return hp;
}

void LdaHyperparams::validate() const {
  if (topics < 1) throw Error("lda: topic count must be >= 1");
  if (!(alpha > 0.0)) throw Error("lda: alpha must be positive");
  if (!(beta > 0.0)) throw Error("lda: beta must be positive");
  if (iterations < 0) throw Error("lda: iterations must be non-negative");
}

LdaSampler::LdaSampler(const ProcessedCorpus& corpus, const LdaHyperparams& hp)
    : corpus_(corpus), hp_(hp), vocab_(static_cast<int>(corpus.vocabulary.size())), rng_(hp.seed) {
  hp_.validate();
  if (corpus.documents.empty()) throw Error("lda: empty corpus");
  if (vocab_ < hp_.topics)
    std::cerr << "warning: vocabulary size " << vocab_ << " is smaller than topic count "
              << hp_.topics << "\n";
  const int k = hp_.topics;
  const auto d = static_cast<Eigen::Index>(corpus.documents.size());
  doc_topic_ = MatrixXi::Zero(d, k);
  topic_word_ = MatrixXi::Zero(k, vocab_);
  topic_total_ = Eigen::VectorXi::Zero(k);
  weights_.resize(k);
  z_.resize(corpus.documents.size());
  std::uniform_int_distribution<int> pick(0, k - 1);
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const auto& toks = corpus.documents[i].tokens;
    z_[i].resize(toks.size());
    for (std::size_t n = 0; n < toks.size(); ++n) {
      const int t = pick(rng_);
      z_[i][n] = t;
      ++doc_topic_(static_cast<Eigen::Index>(i), t);
      ++topic_word_(t, toks[n]);
      ++topic_total_(t);
    }
  }
}

void LdaSampler::sweep() {
  const int k = hp_.topics;
  const double vbeta = vocab_ * hp_.beta;
  for (std::size_t i = 0; i < corpus_.documents.size(); ++i) {
    const auto& toks = corpus_.documents[i].tokens;
    const auto di = static_cast<Eigen::Index>(i);
    for (std::size_t n = 0; n < toks.size(); ++n) {
      const int w = toks[n];
      int t = z_[i][n];
      --doc_topic_(di, t);
      --topic_word_(t, w);
      --topic_total_(t);
      double acc = 0.0;
      for (int j = 0; j < k; ++j) {
        acc += (doc_topic_(di, j) + hp_.alpha) * (topic_word_(j, w) + hp_.beta) /
               (topic_total_(j) + vbeta);
        weights_[j] = acc;
      }
      t = sample_index(weights_, rng_);
      z_[i][n] = t;
      ++doc_topic_(di, t);
      ++topic_word_(t, w);
      ++topic_total_(t);
    }
  }
  ++sweeps_;
  assert(counts_consistent());
}

bool LdaSampler::counts_consistent() const {
  for (std::size_t i = 0; i < corpus_.documents.size(); ++i) {
    if (doc_topic_.row(static_cast<Eigen::Index>(i)).sum() !=
        static_cast<int>(corpus_.documents[i].tokens.size()))
      return false;
  }
  if ((doc_topic_.colwise().sum().transpose() - topic_total_).cwiseAbs().sum() != 0) return false;
  if ((topic_word_.rowwise().sum() - topic_total_).cwiseAbs().sum() != 0) return false;
  return (doc_topic_.array() >= 0).all() && (topic_word_.array() >= 0).all();
}

TopicModel LdaSampler::estimate() const {
  TopicModel m;
  m.hp = hp_;
  m.vocabulary = corpus_.vocabulary.tokens;
  m.assignments = z_;
  m.phi = topic_word_.cast<double>().array() + hp_.beta;
  m.phi.array().colwise() /= m.phi.rowwise().sum().array();
  m.theta = doc_topic_.cast<double>().array() + hp_.alpha;
  m.theta.array().colwise() /= m.theta.rowwise().sum().array();
  return m;
}

TopicModel train_lda(const ProcessedCorpus& corpus, const LdaHyperparams& hp,
                     const LdaTraceFn& trace) {
  LdaSampler sampler(corpus, hp);
  for (int it = 0; it < hp.iterations; ++it) {
    sampler.sweep();
    if (trace) trace(sampler.sweeps_done(), sampler);
  }
  return sampler.estimate();
}

VectorXd infer_doc(const TopicModel& model, std::span<const int> doc, int fold_in_iters,
                   std::uint64_t seed) {
  const int k = model.topics();
  std::vector<int> words;
  for (int w : doc)
    if (w >= 0 && w < model.vocab_size()) words.push_back(w);
  if (words.empty() || k == 1) return VectorXd::Constant(k, 1.0 / k);

  Rng rng(seed);
  const double alpha = model.hp.alpha;
  std::vector<int> z(words.size());
  VectorXd counts = VectorXd::Zero(k);
  std::vector<double> cum(k);
  // Initialize from phi alone, then run fold-in sweeps.
  for (std::size_t n = 0; n < words.size(); ++n) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) cum[j] = (acc += model.phi(j, words[n]));
    z[n] = sample_index(cum, rng);
    counts(z[n]) += 1.0;
  }
  for (int it = 0; it < fold_in_iters; ++it) {
    for (std::size_t n = 0; n < words.size(); ++n) {
      counts(z[n]) -= 1.0;
      double acc = 0.0;
      for (int j = 0; j < k; ++j) cum[j] = (acc += (counts(j) + alpha) * model.phi(j, words[n]));
      z[n] = sample_index(cum, rng);
      counts(z[n]) += 1.0;
    }
  }
  VectorXd theta = counts.array() + alpha;
  return theta / theta.sum();
}

MatrixXd infer_corpus(const TopicModel& model, const ProcessedCorpus& corpus, int fold_in_iters,
                      std::uint64_t seed) {
  MatrixXd out(static_cast<Eigen::Index>(corpus.documents.size()), model.topics());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d)
    out.row(static_cast<Eigen::Index>(d)) =
        infer_doc(model, corpus.documents[d].tokens, fold_in_iters, derive_seed(seed, d)).transpose();
  return out;
}

std::vector<int> top_words(const TopicModel& model, int topic_index, std::size_t n) {
  if (topic_index < 0 || topic_index >= model.topics())
    throw Error("top_words: topic index " + std::to_string(topic_index) + " out of range");
  std::vector<int> ids(static_cast<std::size_t>(model.vocab_size()));
  std::iota(ids.begin(), ids.end(), 0);
  const auto row = model.phi.row(topic_index);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return row(a) > row(b); });
  ids.resize(std::min(n, ids.size()));
  return ids;
}

double perplexity(const TopicModel& model, const ProcessedCorpus& corpus) {
  if (static_cast<std::size_t>(model.theta.rows()) != corpus.documents.size())
    throw Error("perplexity: theta rows do not match corpus documents");
  double loglik = 0.0;
  std::size_t tokens = 0;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto theta = model.theta.row(static_cast<Eigen::Index>(d));
    for (int w : corpus.documents[d].tokens) {
      loglik += std::log(theta.dot(model.phi.col(w)));
      ++tokens;
    }
  }
  if (tokens == 0) return 1.0;
  return std::exp(-loglik / static_cast<double>(tokens));
}

}  // namespace forumdyn
