// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <set>

#include <json.hpp>

namespace forumdyn::synthetic {

namespace {

VectorXd dirichlet(const VectorXd& conc, Rng& rng) {
  VectorXd out(conc.size());
  for (Eigen::Index i = 0; i < conc.size(); ++i) {
    std::gamma_distribution<double> g(conc(i), 1.0);
    out(i) = g(rng);
  }
  const double s = out.sum();
  if (s > 0.0) return out / s;
  // Every gamma underflowed: fall back to one coordinate.
  out.setZero();
  std::uniform_int_distribution<Eigen::Index> pick(0, conc.size() - 1);
  out(pick(rng)) = 1.0;
  return out;
}

int draw(const VectorXd& p, Rng& rng) {
  std::discrete_distribution<int> d(p.data(), p.data() + p.size());
  return d(rng);
}

}  // namespace

PlantedCorpus planted_corpus(const PlantedCorpusSpec& spec) {
  if (spec.topics < 1 || spec.vocab < spec.topics) throw Error("planted_corpus: bad shape");
  Rng rng(spec.seed);
  PlantedCorpus out;
  const int block = spec.vocab / spec.topics;
  out.phi = MatrixXd::Zero(spec.topics, spec.vocab);
  for (int k = 0; k < spec.topics; ++k)
    out.phi.row(k).segment(k * block, block) =
        dirichlet(VectorXd::Constant(block, spec.word_concentration), rng).transpose();

  auto& vocab = out.corpus.vocabulary;
  for (int v = 0; v < spec.vocab; ++v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%05d", v);
    vocab.index.emplace(buf, v);
    vocab.tokens.emplace_back(buf);
  }
  vocab.doc_frequency.assign(static_cast<std::size_t>(spec.vocab), 0);

  out.theta.resize(spec.documents, spec.topics);
  std::uniform_int_distribution<int> len(spec.min_length, spec.max_length);
  const VectorXd conc = VectorXd::Constant(spec.topics, spec.doc_concentration);
  std::vector<VectorXd> phi_rows;
  for (int k = 0; k < spec.topics; ++k) phi_rows.push_back(out.phi.row(k).transpose());
  for (int d = 0; d < spec.documents; ++d) {
    const VectorXd theta = dirichlet(conc, rng);
    out.theta.row(d) = theta.transpose();
    Document doc;
    doc.forum_id = "f" + std::to_string(d % 4);
    doc.post_id = std::to_string(d);
    doc.timestamp = static_cast<Timestamp>(d) * 3600;
    const int n = len(rng);
    std::set<int> seen;
    for (int i = 0; i < n; ++i) {
      const int k = draw(theta, rng);
      const int w = draw(phi_rows[static_cast<std::size_t>(k)], rng);
      doc.tokens.push_back(w);
      seen.insert(w);
    }
    for (int w : seen) ++vocab.doc_frequency[static_cast<std::size_t>(w)];
    out.corpus.forum_index[doc.forum_id].push_back(out.corpus.documents.size());
    out.corpus.documents.push_back(std::move(doc));
  }
  return out;
}

PlantedSeries planted_series(const PlantedSeriesSpec& spec) {
  if (spec.states < 1 || spec.dim < 1 || spec.series < 1 || spec.weeks < 1)
    throw Error("planted_series: bad shape");
  Rng rng(spec.seed);
  PlantedSeries out;
  out.means = MatrixXd::Constant(spec.states, spec.dim, 0.1);
  for (int k = 0; k < spec.states; ++k) {
    out.means(k, k % spec.dim) += spec.separation;
    out.means(k, (k + 1) % spec.dim) += spec.separation * (k / spec.dim);
  }

  // Subsets: cycle through states first so every state is used somewhere.
  std::vector<std::vector<int>> subsets(static_cast<std::size_t>(spec.series));
  std::uniform_int_distribution<int> subset_size(spec.min_subset, spec.max_subset);
  for (int i = 0; i < spec.series; ++i) {
    std::vector<int> all(static_cast<std::size_t>(spec.states));
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const int size = std::min(subset_size(rng), spec.states);
    std::vector<int> subset(all.begin(), all.begin() + size);
    const int must = i % spec.states;
    if (std::find(subset.begin(), subset.end(), must) == subset.end()) subset[0] = must;
    std::sort(subset.begin(), subset.end());
    subsets[static_cast<std::size_t>(i)] = spec.subsets.empty() ? subset : spec.subsets.at(static_cast<std::size_t>(i));
  }

  std::normal_distribution<double> noise(0.0, spec.sigma);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> jitter(-spec.post_jitter, spec.post_jitter);
  for (int i = 0; i < spec.series; ++i) {
    const auto& subset = subsets[static_cast<std::size_t>(i)];
    std::uniform_int_distribution<std::size_t> pick(0, subset.size() - 1);
    ForumSeries s;
    s.forum_id = "forum" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    s.weeks = WeekRange{2400, 2400 + spec.weeks - 1};
    s.observations.resize(spec.weeks, spec.dim);
    s.post_counts.resize(spec.weeks);
    std::vector<int> labels(static_cast<std::size_t>(spec.weeks));
    std::size_t cur = pick(rng);
    for (int t = 0; t < spec.weeks; ++t) {
      if (t > 0 && unif(rng) >= spec.stay && subset.size() > 1) {
        std::size_t next = cur;
        while (next == cur) next = pick(rng);
        cur = next;
      }
      const int k = subset[cur];
      labels[static_cast<std::size_t>(t)] = k;
      for (int d = 0; d < spec.dim; ++d) s.observations(t, d) = out.means(k, d) + noise(rng);
      s.post_counts(t) = std::max(1, spec.posts_per_week + jitter(rng));
    }
    if (std::find(spec.series_with_gaps.begin(), spec.series_with_gaps.end(), i) !=
        spec.series_with_gaps.end()) {
      std::uniform_int_distribution<int> gap_start(1, std::max(1, spec.weeks - spec.gap_length - 1));
      const int g = gap_start(rng);
      for (int t = g; t < std::min(spec.weeks, g + spec.gap_length); ++t) {
        s.observations.row(t).setZero();
        s.post_counts(t) = 0;
        labels[static_cast<std::size_t>(t)] = -1;
      }
    }
    out.series.push_back(std::move(s));
    out.labels.push_back(std::move(labels));
  }
  return out;
}

void plant_outlier_state(PlantedSeries& data, const std::vector<std::pair<int, int>>& forum_weeks,
                         int label, double offset, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index dim = data.means.cols();
  // Shared mean: the planted base shifted by `offset` in every dimension.
  const VectorXd mean = VectorXd::Constant(dim, 0.1 + offset);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (auto [i, t] : forum_weeks) {
    auto& s = data.series.at(static_cast<std::size_t>(i));
    for (Eigen::Index d = 0; d < dim; ++d) s.observations(t, d) = mean(d) + noise(rng);
    data.labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = label;
  }
}

namespace {

const std::array<std::vector<std::string>, 4> kTopicWords = {{
    {"vendor", "order", "shipping", "package", "stealth", "escrow", "review", "tracking",
     "delivered", "quality"},
    {"bitcoin", "wallet", "btc", "coins", "transaction", "address", "exchange", "monero",
     "mixer", "fees"},
    {"exploit", "injection", "payload", "sql", "vulnerability", "server", "shell", "script",
     "kernel", "patch"},
    {"malware", "botnet", "virus", "crypter", "keylogger", "antivirus", "rat", "ddos",
     "infected", "stealer"},
}};

const std::vector<std::string> kStopwords = {"the", "and", "is", "to", "of", "it", "for", "this",
                                             "you", "my", "in", "on", "with", "was"};
const std::vector<std::string> kFiller = {"thanks", "anyone", "help", "please", "today", "good"};

}  // namespace

std::vector<RawPost> fixture_posts(const FixtureSpec& spec) {
  Rng rng(spec.seed);
  std::vector<RawPost> posts;
  std::uniform_int_distribution<int> len(8, 16);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> second(0, spec.weeks * 7 * kSecondsPerDay - 1);
  const int per_forum = spec.posts / spec.forums;
  for (int f = 0; f < spec.forums; ++f) {
    const bool market = f < (spec.forums + 1) / 2;
    const std::string forum = (market ? "market_" : "hacking_") + std::to_string(f);
    // Each forum leans on one topic of its group, drifting halfway through.
    for (int p = 0; p < per_forum; ++p) {
      RawPost post;
      post.forum_id = forum;
      post.post_id = forum + "-" + std::to_string(p);
      post.timestamp = spec.start_day * kSecondsPerDay + second(rng);
      const bool late = post.timestamp >= (spec.start_day + spec.weeks * 7 / 2) * kSecondsPerDay;
      const int primary = (market ? 0 : 2) + ((f + (late ? 1 : 0)) % 2);
      const int secondary = (market ? 0 : 2) + ((f + (late ? 0 : 1)) % 2);
      std::string text;
      const int n = len(rng);
      for (int w = 0; w < n; ++w) {
        const double u = unif(rng);
        const std::vector<std::string>* pool = &kFiller;
        if (u < 0.6)
          pool = &kTopicWords[static_cast<std::size_t>(primary)];
        else if (u < 0.8)
          pool = &kTopicWords[static_cast<std::size_t>(secondary)];
        else if (u < 0.92)
          pool = &kStopwords;
        std::uniform_int_distribution<std::size_t> pick(0, pool->size() - 1);
        std::string word = (*pool)[pick(rng)];
        if (w == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
        text += (w ? " " : "") + word;
      }
      text += unif(rng) < 0.3 ? "!!" : ".";
      post.text = std::move(text);
      posts.push_back(std::move(post));
    }
  }
  std::sort(posts.begin(), posts.end(),
            [](const RawPost& a, const RawPost& b) { return a.timestamp < b.timestamp; });
  return posts;
}

std::string to_jsonl(const std::vector<RawPost>& posts) {
  std::string out;
  for (const auto& p : posts) {
    const auto day = p.timestamp >= 0 ? p.timestamp / kSecondsPerDay : (p.timestamp - kSecondsPerDay + 1) / kSecondsPerDay;
    const auto sec = p.timestamp - day * kSecondsPerDay;
    char time[64];
    std::snprintf(time, sizeof time, "T%02lld:%02lld:%02lldZ", static_cast<long long>(sec / 3600),
                  static_cast<long long>((sec / 60) % 60), static_cast<long long>(sec % 60));
    nlohmann::ordered_json j;
    j["forum_id"] = p.forum_id;
    j["post_id"] = p.post_id;
    j["timestamp"] = format_date(day) + time;
    j["text"] = p.text;
    out += j.dump() + "\n";
  }
  return out;
}

std::string fixture_stopwords() {
  std::string out;
  for (const auto& w : kStopwords) out += w + "\n";
  return out;
}

}  // namespace forumdyn::synthetic
