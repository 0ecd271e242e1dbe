// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <set>

#include "forumdyn/analysis.hpp"
#include "forumdyn/lda.hpp"
#include "forumdyn/timeseries.hpp"

namespace forumdyn {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 6> kStageNames = {"ingest", "lda", "series", "fit", "analyze", "report"};

constexpr const char* kManifest = "manifest.json";
constexpr const char* kTimings = "logs/timings.json";
constexpr const char* kReport = "ingest_report.json";
constexpr const char* kCorpus = "corpus.json";
constexpr const char* kLda = "lda_model.json";
constexpr const char* kTopWords = "top_words.csv";
constexpr const char* kSeries = "series.json";
constexpr const char* kModel = "bphmm_model.json";
constexpr const char* kSequences = "state_sequences.csv";
constexpr const char* kAnalysis = "analysis.json";

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error("config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw Error("config: unknown key '" + key + "' in '" + where + "'");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

std::int64_t week_of_date(const std::string& text) {
  const auto ts = parse_iso8601(text);
  if (!ts) throw Error("config: invalid date '" + text + "'");
  return iso_week_index(*ts);
}

// Upstream records: the files an artifact was computed from, with their hashes.
// Paths are relative to the output directory, or absolute for input files.
Json upstream_entry(const fs::path& dir, const std::string& name) {
  return Json{{"path", name}, {"hash", file_hash(dir / name)}};
}

Json read_artifact(Stage stage, const fs::path& dir, const std::string& name, const RunOptions& opts) {
  const fs::path p = dir / name;
  if (!fs::exists(p))
    throw StageError(stage, "missing " + name + " in " + dir.string() + "; run the earlier stages first");
  Json j;
  try {
    j = read_json(p);
  } catch (const std::exception& e) {
    throw StageError(stage, "cannot read " + name + ": " + e.what());
  }
  if (opts.force || !j.contains("upstream")) return j;
  for (const auto& u : j.at("upstream")) {
    const auto path = u.at("path").get<std::string>();
    const fs::path file = dir / path;
    const bool ok = fs::exists(file) && file_hash(file) == u.at("hash").get<std::string>();
    if (!ok)
      throw StageError(stage, name + " is stale: " + path +
                                  " changed since it was produced; rerun the producing stage or pass --force");
  }
  return j;
}

template <typename Fn>
auto stage_guard(Stage stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

struct ManifestUpdate {
  Json counts = Json::object();
  std::vector<std::string> written;
};

void update_manifest(Stage stage, const PipelineConfig& cfg, const ManifestUpdate& up, double seconds) {
  const fs::path dir = cfg.output_dir;
  Json m = fs::exists(dir / kManifest) ? read_json(dir / kManifest) : Json::object();
  if (m.value("format", std::string{}) != "forumdyn.manifest/1") m = Json::object();
  const Json config = cfg.to_json();
  m["format"] = "forumdyn.manifest/1";
  m["config"] = config;
  m["config_hash"] = content_hash(config.dump());
  m["seeds"] = Json{{"master", cfg.seed},
                    {"lda", cfg.stage_seed(Stage::Lda)},
                    {"inference", cfg.inference_seed()},
                    {"bphmm", cfg.stage_seed(Stage::Fit)}};
  for (const auto& [k, v] : up.counts.items()) m["counts"][k] = v;
  for (const auto& name : up.written) m["artifacts"][name] = file_hash(dir / name);
  m["stages"][to_string(stage)] = Json{{"overrides", cfg.overrides}};
  std::set<std::string> all;
  for (const auto& [_, s] : m["stages"].items())
    for (const auto& o : s.at("overrides")) all.insert(o.get<std::string>());
  m["overrides"] = std::vector<std::string>(all.begin(), all.end());
  write_json(dir / kManifest, m);

  Json t = fs::exists(dir / kTimings) ? read_json(dir / kTimings) : Json::object();
  t[to_string(stage)] = seconds;
  write_json(dir / kTimings, t);
}

// --- stages -----------------------------------------------------------------

ManifestUpdate stage_ingest(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  auto [posts, report] = ingest(cfg.posts);
  const StopwordSet stop = cfg.stopwords.empty() ? StopwordSet{} : load_stopwords(cfg.stopwords);
  ProcessedCorpus corpus = preprocess(posts, stop, cfg.preprocess);
  report.dropped_empty = corpus.dropped_empty;
  const auto forums = select_forums(corpus, cfg.min_posts, cfg.min_span_days * kSecondsPerDay);

  Json upstream = Json::array({Json{{"path", cfg.posts.string()}, {"hash", file_hash(cfg.posts)}}});
  if (!cfg.stopwords.empty())
    upstream.push_back(Json{{"path", cfg.stopwords.string()}, {"hash", file_hash(cfg.stopwords)}});

  Json rep = to_json(report);
  rep["format"] = "forumdyn.ingest_report/1";
  write_json(dir / kReport, rep);
  Json cj = to_json(corpus);
  cj["selected_forums"] = forums;
  cj["params"] = Json{{"min_df", cfg.preprocess.min_df},
                      {"max_df", cfg.preprocess.max_df},
                      {"min_posts", cfg.min_posts},
                      {"min_span_days", cfg.min_span_days}};
  cj["upstream"] = std::move(upstream);
  write_json(dir / kCorpus, cj);

  ManifestUpdate up;
  up.counts = Json{{"lines", report.lines},
                   {"posts", report.valid},
                   {"malformed", report.malformed},
                   {"duplicates", report.duplicates},
                   {"documents", corpus.documents.size()},
                   {"dropped_empty", corpus.dropped_empty},
                   {"vocabulary", corpus.vocabulary.size()},
                   {"tokens", corpus.token_count()},
                   {"forums", corpus.forum_index.size()},
                   {"selected_forums", forums.size()}};
  up.written = {kReport, kCorpus};
  return up;
}

LdaHyperparams lda_params(const PipelineConfig& cfg) {
  LdaHyperparams hp = LdaHyperparams::defaults(cfg.topics, cfg.stage_seed(Stage::Lda));
  if (cfg.lda_alpha) hp.alpha = *cfg.lda_alpha;
  hp.beta = cfg.lda_beta;
  hp.iterations = cfg.lda_iterations;
  return hp;
}

ManifestUpdate stage_lda(const PipelineConfig& cfg, const RunOptions& opts) {
  const fs::path dir = cfg.output_dir;
  const Json cj = read_artifact(Stage::Lda, dir, kCorpus, opts);
  const ProcessedCorpus corpus = corpus_from_json(cj);
  if (corpus.documents.empty()) throw StageError(Stage::Lda, "corpus has no documents");
  const TopicModel model = train_lda(corpus, lda_params(cfg));
  Json mj = to_json(model);
  mj["upstream"] = Json::array({upstream_entry(dir, kCorpus)});
  write_json(dir / kLda, mj);
  write_file(dir / kTopWords, top_words_csv(model, static_cast<std::size_t>(cfg.top_words)));
  ManifestUpdate up;
  up.counts = Json{{"topics", model.topics()}, {"perplexity", perplexity(model, corpus)}};
  up.written = {kLda, kTopWords};
  return up;
}

std::string series_file(const std::string& forum) { return "series/" + forum + ".csv"; }

std::vector<ForumSeries> load_series(const Json& j) {
  if (j.value("format", std::string{}) != "forumdyn.series_set/1") throw Error("expected a series set");
  std::vector<ForumSeries> out;
  for (const auto& s : j.at("series")) out.push_back(series_from_json(s));
  return out;
}

ManifestUpdate stage_series(const PipelineConfig& cfg, const RunOptions& opts) {
  const fs::path dir = cfg.output_dir;
  const Json cj = read_artifact(Stage::Series, dir, kCorpus, opts);
  const Json mj = read_artifact(Stage::Series, dir, kLda, opts);
  const ProcessedCorpus corpus = corpus_from_json(cj);
  const TopicModel model = topic_model_from_json(mj);
  const auto selected = cj.at("selected_forums").get<std::vector<std::string>>();
  if (selected.empty())
    throw StageError(Stage::Series, "no forum passes the selection thresholds (min_posts, min_span_days)");

  WeekRange range = global_week_range(corpus, selected);
  if (cfg.week_start) range.start_week = week_of_date(*cfg.week_start);
  if (cfg.week_end) range.end_week = week_of_date(*cfg.week_end);
  if (range.size() < 1) throw StageError(Stage::Series, "empty week range");

  const MatrixXd doc_topics = infer_corpus(model, corpus, cfg.fold_in_iterations, cfg.inference_seed());
  Json all = Json::array();
  std::vector<std::string> written;
  for (const auto& forum : selected) {
    const auto& docs = corpus.forum_index.at(forum);
    const bool any = std::any_of(docs.begin(), docs.end(), [&](std::size_t d) {
      return range.contains(iso_week_index(corpus.documents[d].timestamp));
    });
    if (!any) continue;
    const ForumSeries s = build_series(doc_topics, corpus, forum, range);
    write_file(dir / series_file(forum), series_csv(s));
    written.push_back(series_file(forum));
    all.push_back(to_json(s));
  }
  if (all.empty()) throw StageError(Stage::Series, "no selected forum has posts inside the week range");

  Json sj{{"format", "forumdyn.series_set/1"},
          {"series", std::move(all)},
          {"upstream", Json::array({upstream_entry(dir, kCorpus), upstream_entry(dir, kLda)})}};
  write_json(dir / kSeries, sj);
  written.insert(written.begin(), kSeries);
  ManifestUpdate up;
  up.counts = Json{{"series", sj.at("series").size()}, {"weeks", range.size()}};
  up.written = std::move(written);
  return up;
}

McmcConfig mcmc_params(const PipelineConfig& cfg) {
  McmcConfig m = cfg.mcmc;
  m.seed = cfg.stage_seed(Stage::Fit);
  return m;
}

ManifestUpdate stage_fit(const PipelineConfig& cfg, const RunOptions& opts) {
  const fs::path dir = cfg.output_dir;
  const auto series = load_series(read_artifact(Stage::Fit, dir, kSeries, opts));
  const BphmmModel model = fit_bphmm(series, mcmc_params(cfg));
  Json mj = to_json(model);
  mj["upstream"] = Json::array({upstream_entry(dir, kSeries)});
  write_json(dir / kModel, mj);
  write_file(dir / kSequences, state_sequences_csv(model, series));
  ManifestUpdate up;
  up.counts = Json{{"states", model.state_count()},
                   {"map_sweep", model.map_sweep},
                   {"log_posterior", model.log_posterior},
                   {"empty_state", model.empty_state ? Json(*model.empty_state) : Json(nullptr)}};
  up.written = {kModel, kSequences};
  return up;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
std::optional<double> optional_from(const Json& j) {
  return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

ManifestUpdate stage_analyze(const PipelineConfig& cfg, const RunOptions& opts) {
  const fs::path dir = cfg.output_dir;
  const auto series = load_series(read_artifact(Stage::Analyze, dir, kSeries, opts));
  const BphmmModel model = bphmm_model_from_json(read_artifact(Stage::Analyze, dir, kModel, opts));
  if (model.forum_ids.size() != series.size()) throw StageError(Stage::Analyze, "model and series disagree");

  const SimilarityMatrix sim = similarity_matrix(model, cfg.lambda);
  const Dendrogram tree = cluster(sim.values, cfg.linkage);
  const VolatilityReport vol = volatility_report(model, series, cfg.epsilon);
  const AnomalyReport anomalies = anomaly_report(model, series, cfg.rare_threshold, cfg.z_threshold);

  Json ce = Json::array();
  for (const auto& s : series) {
    bool any = false;
    for (Eigen::Index t = 0; t < s.length(); ++t) any = any || s.post_counts(t) > 0;
    if (!any) continue;
    const auto c = cross_entropy_series(s, cfg.epsilon);
    ce.push_back({{"forum_id", c.forum_id},
                  {"weeks", c.weeks},
                  {"values", c.values},
                  {"reference", std::vector<double>(c.reference.data(), c.reference.data() + c.reference.size())}});
  }
  Json vj = Json::array();
  for (const auto& e : vol.entries)
    vj.push_back({{"forum_id", e.forum_id},
                  {"hmm", optional_json(e.hmm)},
                  {"cross_entropy", optional_json(e.cross_entropy)},
                  {"hmm_rank", e.hmm_rank},
                  {"ce_rank", e.ce_rank}});

  Json aj{{"format", "forumdyn.analysis/1"},
          {"params", {{"lambda", cfg.lambda},
                      {"linkage", to_string(cfg.linkage)},
                      {"epsilon", cfg.epsilon},
                      {"window", cfg.window},
                      {"rare_threshold", cfg.rare_threshold},
                      {"z_threshold", cfg.z_threshold}}},
          {"similarity", {{"forum_ids", sim.forum_ids}, {"values", matrix_to_json(sim.values)}}},
          {"dendrogram", to_json(tree)},
          {"volatility", std::move(vj)},
          {"cross_entropy", std::move(ce)},
          {"anomalies", to_json(anomalies)},
          {"upstream", Json::array({upstream_entry(dir, kSeries), upstream_entry(dir, kModel)})}};
  write_json(dir / kAnalysis, aj);
  ManifestUpdate up;
  up.counts = Json{{"rare_states", anomalies.rare.size()},
                   {"transition_events", anomalies.events.size()},
                   {"activity_peaks", anomalies.peaks.size()}};
  up.written = {kAnalysis};
  return up;
}

// Renders every CSV and report file from the persisted artifacts.
ManifestUpdate stage_report(const PipelineConfig& cfg, const RunOptions& opts) {
  const fs::path dir = cfg.output_dir;
  const Json aj = read_artifact(Stage::Report, dir, kAnalysis, opts);
  const auto series = load_series(read_artifact(Stage::Report, dir, kSeries, opts));
  const TopicModel lda = topic_model_from_json(read_artifact(Stage::Report, dir, kLda, opts));
  const BphmmModel model = bphmm_model_from_json(read_artifact(Stage::Report, dir, kModel, opts));
  const int window = aj.at("params").at("window").get<int>();

  SimilarityMatrix sim;
  sim.forum_ids = aj.at("similarity").at("forum_ids").get<std::vector<std::string>>();
  sim.values = matrix_from_json(aj.at("similarity").at("values"));
  sim.lambda = aj.at("params").at("lambda").get<double>();
  const Dendrogram tree = dendrogram_from_json(aj.at("dendrogram"));

  VolatilityReport vol;
  for (const auto& e : aj.at("volatility"))
    vol.entries.push_back(VolatilityEntry{e.at("forum_id").get<std::string>(), optional_from(e.at("hmm")),
                                          optional_from(e.at("cross_entropy")), e.at("hmm_rank").get<int>(),
                                          e.at("ce_rank").get<int>()});
  std::vector<CrossEntropySeries> ce;
  for (const auto& c : aj.at("cross_entropy")) {
    CrossEntropySeries s;
    s.forum_id = c.at("forum_id").get<std::string>();
    s.weeks = c.at("weeks").get<std::vector<std::int64_t>>();
    s.values = c.at("values").get<std::vector<double>>();
    ce.push_back(std::move(s));
  }

  ManifestUpdate up;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    up.written.push_back(name);
  };
  emit(kTopWords, top_words_csv(lda, static_cast<std::size_t>(cfg.top_words)));
  for (const auto& s : series) emit(series_file(s.forum_id), series_csv(s));
  emit(kSequences, state_sequences_csv(model, series));
  emit("similarity.csv", similarity_csv(sim));
  emit("dendrogram.json", dendrogram_tree_json(tree, sim.forum_ids).dump(1) + "\n");
  emit("dendrogram.nwk", to_newick(tree, sim.forum_ids) + "\n");
  emit("volatility.csv", volatility_csv(vol));
  emit("cross_entropy.csv", cross_entropy_csv(ce, window));
  emit("anomalies.json", aj.at("anomalies").dump(1) + "\n");
  return up;
}

}  // namespace

std::string to_string(Stage s) { return kStageNames.at(static_cast<std::size_t>(s)); }

Stage stage_from_string(const std::string& s) {
  if (s == "bphmm") return Stage::Fit;
  for (std::size_t i = 0; i < kStageNames.size(); ++i)
    if (s == kStageNames[i]) return static_cast<Stage>(i);
  throw Error("unknown stage '" + s + "'");
}

StageError::StageError(Stage stage, const std::string& message)
    : Error(to_string(stage) + " stage: " + message), stage_(stage) {}

PipelineConfig PipelineConfig::from_json(const Json& j, const fs::path& base) {
  check_keys(j, "config", {"input", "preprocess", "forums", "lda", "weeks", "bphmm", "analysis", "output_dir", "seed"});
  PipelineConfig c;
  const Json& in = j.at("input");
  check_keys(in, "input", {"posts", "stopwords"});
  c.posts = resolve(base, in.at("posts").get<std::string>());
  if (in.contains("stopwords") && !in.at("stopwords").is_null())
    c.stopwords = resolve(base, in.at("stopwords").get<std::string>());
  if (j.contains("preprocess")) {
    const Json& p = j.at("preprocess");
    check_keys(p, "preprocess", {"min_df", "max_df"});
    c.preprocess.min_df = p.value("min_df", c.preprocess.min_df);
    c.preprocess.max_df = p.value("max_df", c.preprocess.max_df);
  }
  if (j.contains("forums")) {
    const Json& f = j.at("forums");
    check_keys(f, "forums", {"min_posts", "min_span_days"});
    c.min_posts = f.value("min_posts", c.min_posts);
    c.min_span_days = f.value("min_span_days", c.min_span_days);
  }
  if (j.contains("lda")) {
    const Json& l = j.at("lda");
    check_keys(l, "lda", {"topics", "alpha", "beta", "iterations", "fold_in_iterations", "top_words"});
    c.topics = l.value("topics", c.topics);
    if (l.contains("alpha") && !l.at("alpha").is_null()) c.lda_alpha = l.at("alpha").get<double>();
    c.lda_beta = l.value("beta", c.lda_beta);
    c.lda_iterations = l.value("iterations", c.lda_iterations);
    c.fold_in_iterations = l.value("fold_in_iterations", c.fold_in_iterations);
    c.top_words = l.value("top_words", c.top_words);
  }
  if (j.contains("weeks")) {
    const Json& w = j.at("weeks");
    check_keys(w, "weeks", {"start", "end"});
    if (w.contains("start") && !w.at("start").is_null()) c.week_start = w.at("start").get<std::string>();
    if (w.contains("end") && !w.at("end").is_null()) c.week_end = w.at("end").get<std::string>();
  }
  if (j.contains("bphmm")) {
    const Json& b = j.at("bphmm");
    check_keys(b, "bphmm",
               {"sweeps", "burn_in", "alpha", "covariance", "kappa0", "a0", "variance_floor",
                "transition_concentration", "init_concentration", "birth_window"});
    c.mcmc = mcmc_config_from_json(b, c.mcmc);
  }
  if (j.contains("analysis")) {
    const Json& a = j.at("analysis");
    check_keys(a, "analysis", {"lambda", "rare_threshold", "z_threshold", "epsilon", "window", "linkage"});
    c.lambda = a.value("lambda", c.lambda);
    c.rare_threshold = a.value("rare_threshold", c.rare_threshold);
    c.z_threshold = a.value("z_threshold", c.z_threshold);
    c.epsilon = a.value("epsilon", c.epsilon);
    c.window = a.value("window", c.window);
    if (a.contains("linkage")) c.linkage = linkage_from_string(a.at("linkage").get<std::string>());
  }
  if (j.contains("output_dir")) c.output_dir = resolve(base, j.at("output_dir").get<std::string>());
  c.seed = j.value("seed", c.seed);
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
  Json j;
  try {
    j = read_json(file);
  } catch (const std::exception& e) {
    throw Error("cannot read config " + file.string() + ": " + e.what());
  }
  // A manifest replays the configuration it records.
  if (j.is_object() && j.value("format", std::string{}) == "forumdyn.manifest/1") j = j.at("config");
  const fs::path base = fs::absolute(file).parent_path();
  try {
    return from_json(j, base);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + file.string() + ": " + e.what());
  }
}

Json PipelineConfig::to_json() const {
  Json mcmc_json = forumdyn::to_json(mcmc);
  mcmc_json.erase("seed");
  Json weeks = Json::object();
  if (week_start) weeks["start"] = *week_start;
  if (week_end) weeks["end"] = *week_end;
  return Json{
      {"input", {{"posts", posts.string()}, {"stopwords", stopwords.empty() ? Json(nullptr) : Json(stopwords.string())}}},
      {"preprocess", {{"min_df", preprocess.min_df}, {"max_df", preprocess.max_df}}},
      {"forums", {{"min_posts", min_posts}, {"min_span_days", min_span_days}}},
      {"lda", {{"topics", topics},
               {"alpha", lda_alpha.value_or(50.0 / topics)},
               {"beta", lda_beta},
               {"iterations", lda_iterations},
               {"fold_in_iterations", fold_in_iterations},
               {"top_words", top_words}}},
      {"weeks", std::move(weeks)},
      {"bphmm", std::move(mcmc_json)},
      {"analysis", {{"lambda", lambda},
                    {"rare_threshold", rare_threshold},
                    {"z_threshold", z_threshold},
                    {"epsilon", epsilon},
                    {"window", window},
                    {"linkage", to_string(linkage)}}},
      {"seed", seed}};
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& m) { throw StageError(Stage::Ingest, m); };
  if (posts.empty()) fail("no input posts file configured");
  if (!fs::is_regular_file(posts)) fail("input file not found: " + posts.string());
  if (!stopwords.empty() && !fs::is_regular_file(stopwords)) fail("stopword list not found: " + stopwords.string());
  if (preprocess.max_df <= 0.0 || preprocess.max_df > 1.0) fail("max_df must be in (0, 1]");
  if (topics < 1) fail("lda.topics must be positive");
  if (lambda <= 0.0 || lambda >= 1.0) fail("analysis.lambda must be in (0, 1)");
  if (window < 1) fail("analysis.window must be positive");
  if (epsilon <= 0.0) fail("analysis.epsilon must be positive");
  lda_params(*this).validate();
  mcmc.validate();
}

std::uint64_t PipelineConfig::stage_seed(Stage s) const {
  return derive_seed(seed, static_cast<std::uint64_t>(s));
}

std::uint64_t PipelineConfig::inference_seed() const { return derive_seed(seed, kStageNames.size()); }

std::vector<std::string> stage_outputs(Stage stage) {
  switch (stage) {
    case Stage::Ingest: return {kReport, kCorpus};
    case Stage::Lda: return {kLda, kTopWords};
    case Stage::Series: return {kSeries};
    case Stage::Fit: return {kModel, kSequences};
    case Stage::Analyze: return {kAnalysis};
    case Stage::Report:
      return {"similarity.csv", "dendrogram.json", "dendrogram.nwk", "volatility.csv", "cross_entropy.csv",
              "anomalies.json"};
  }
  return {};
}

void run_stage(Stage stage, const PipelineConfig& cfg, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const ManifestUpdate up = stage_guard(stage, [&] {
    if (stage == Stage::Ingest) cfg.validate();
    fs::create_directories(cfg.output_dir);
    switch (stage) {
      case Stage::Ingest: return stage_ingest(cfg);
      case Stage::Lda: return stage_lda(cfg, opts);
      case Stage::Series: return stage_series(cfg, opts);
      case Stage::Fit: return stage_fit(cfg, opts);
      case Stage::Analyze: return stage_analyze(cfg, opts);
      case Stage::Report: return stage_report(cfg, opts);
    }
    return ManifestUpdate{};
  });
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  stage_guard(stage, [&] {
    update_manifest(stage, cfg, up, seconds);
    return 0;
  });
}

void run_pipeline(const PipelineConfig& cfg, Stage from, const RunOptions& opts) {
  for (int s = static_cast<int>(from); s <= static_cast<int>(Stage::Report); ++s)
    run_stage(static_cast<Stage>(s), cfg, opts);
}

}  // namespace forumdyn
