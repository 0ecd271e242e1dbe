// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace forumdyn {

namespace {

void expect_format(const Json& j, const char* format) {
  if (!j.is_object() || j.value("format", std::string{}) != format)
    throw Error(std::string("expected a '") + format + "' container");
}

Json vector_to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vector_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json int_matrix_to_json(const MatrixXi& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXi int_matrix_from_json(const Json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
  MatrixXi m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<int>();
  return m;
}

Json height_json(double h) { return std::isfinite(h) ? Json(h) : Json(nullptr); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json matrix_to_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error("ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Json to_json(const IngestReport& r) {
  return Json{{"lines", r.lines},
              {"valid", r.valid},
              {"malformed", r.malformed},
              {"duplicates", r.duplicates},
              {"dropped_empty", r.dropped_empty}};
}

IngestReport ingest_report_from_json(const Json& j) {
  IngestReport r;
  r.lines = j.at("lines").get<std::size_t>();
  r.valid = j.at("valid").get<std::size_t>();
  r.malformed = j.at("malformed").get<std::size_t>();
  r.duplicates = j.at("duplicates").get<std::size_t>();
  r.dropped_empty = j.at("dropped_empty").get<std::size_t>();
  return r;
}

Json to_json(const ProcessedCorpus& c) {
  Json docs = Json::array();
  for (const auto& d : c.documents)
    docs.push_back({{"forum_id", d.forum_id}, {"post_id", d.post_id}, {"timestamp", d.timestamp}, {"tokens", d.tokens}});
  return Json{{"format", "forumdyn.corpus/1"},
              {"vocabulary", c.vocabulary.tokens},
              {"doc_frequency", c.vocabulary.doc_frequency},
              {"dropped_empty", c.dropped_empty},
              {"documents", std::move(docs)}};
}

ProcessedCorpus corpus_from_json(const Json& j) {
  expect_format(j, "forumdyn.corpus/1");
  ProcessedCorpus c;
  c.vocabulary.tokens = j.at("vocabulary").get<std::vector<std::string>>();
  c.vocabulary.doc_frequency = j.at("doc_frequency").get<std::vector<std::size_t>>();
  for (std::size_t i = 0; i < c.vocabulary.tokens.size(); ++i)
    c.vocabulary.index.emplace(c.vocabulary.tokens[i], static_cast<int>(i));
  c.dropped_empty = j.at("dropped_empty").get<std::size_t>();
  for (const auto& d : j.at("documents")) {
    Document doc{d.at("forum_id").get<std::string>(), d.at("post_id").get<std::string>(),
                 d.at("timestamp").get<Timestamp>(), d.at("tokens").get<std::vector<int>>()};
    for (int t : doc.tokens)
      if (t < 0 || static_cast<std::size_t>(t) >= c.vocabulary.size()) throw Error("corpus: token id out of range");
    c.forum_index[doc.forum_id].push_back(c.documents.size());
    c.documents.push_back(std::move(doc));
  }
  return c;
}

Json to_json(const TopicModel& m) {
  return Json{{"format", "forumdyn.lda/1"},
              {"hyperparams",
               {{"topics", m.hp.topics},
                {"alpha", m.hp.alpha},
                {"beta", m.hp.beta},
                {"iterations", m.hp.iterations},
                {"seed", m.hp.seed}}},
              {"vocabulary", m.vocabulary},
              {"phi", matrix_to_json(m.phi)},
              {"theta", matrix_to_json(m.theta)},
              {"assignments", m.assignments}};
}

TopicModel topic_model_from_json(const Json& j) {
  expect_format(j, "forumdyn.lda/1");
  TopicModel m;
  const auto& hp = j.at("hyperparams");
  m.hp.topics = hp.at("topics").get<int>();
  m.hp.alpha = hp.at("alpha").get<double>();
  m.hp.beta = hp.at("beta").get<double>();
  m.hp.iterations = hp.at("iterations").get<int>();
  m.hp.seed = hp.at("seed").get<std::uint64_t>();
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  m.phi = matrix_from_json(j.at("phi"));
  m.theta = matrix_from_json(j.at("theta"));
  m.assignments = j.at("assignments").get<std::vector<std::vector<int>>>();
  if (m.phi.rows() != m.hp.topics || m.phi.cols() != static_cast<Eigen::Index>(m.vocabulary.size()))
    throw Error("lda model: phi shape does not match hyperparameters and vocabulary");
  return m;
}

Json to_json(const ForumSeries& s) {
  std::vector<int> counts(s.post_counts.data(), s.post_counts.data() + s.post_counts.size());
  return Json{{"forum_id", s.forum_id},
              {"start_week", s.weeks.start_week},
              {"end_week", s.weeks.end_week},
              {"post_counts", counts},
              {"observations", matrix_to_json(s.observations)}};
}

ForumSeries series_from_json(const Json& j) {
  ForumSeries s;
  s.forum_id = j.at("forum_id").get<std::string>();
  s.weeks = {j.at("start_week").get<std::int64_t>(), j.at("end_week").get<std::int64_t>()};
  const auto counts = j.at("post_counts").get<std::vector<int>>();
  s.post_counts = Eigen::Map<const Eigen::VectorXi>(counts.data(), static_cast<Eigen::Index>(counts.size()));
  s.observations = matrix_from_json(j.at("observations"));
  if (s.observations.rows() != s.weeks.size() || s.post_counts.size() != s.weeks.size())
    throw Error("series " + s.forum_id + ": length does not match its week range");
  return s;
}

Json to_json(const McmcConfig& c) {
  return Json{{"sweeps", c.sweeps},
              {"burn_in", c.burn_in},
              {"seed", c.seed},
              {"alpha", c.alpha},
              {"covariance", to_string(c.covariance)},
              {"kappa0", c.kappa0},
              {"a0", c.a0},
              {"variance_floor", c.variance_floor},
              {"transition_concentration", c.transition_concentration},
              {"init_concentration", c.init_concentration},
              {"birth_window", c.birth_window}};
}

McmcConfig mcmc_config_from_json(const Json& j, McmcConfig c) {
  c.sweeps = j.value("sweeps", c.sweeps);
  c.burn_in = j.value("burn_in", c.burn_in);
  c.seed = j.value("seed", c.seed);
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("covariance")) c.covariance = covariance_kind_from_string(j.at("covariance").get<std::string>());
  c.kappa0 = j.value("kappa0", c.kappa0);
  c.a0 = j.value("a0", c.a0);
  c.variance_floor = j.value("variance_floor", c.variance_floor);
  c.transition_concentration = j.value("transition_concentration", c.transition_concentration);
  c.init_concentration = j.value("init_concentration", c.init_concentration);
  c.birth_window = j.value("birth_window", c.birth_window);
  return c;
}

Json to_json(const BphmmModel& m) {
  Json states = Json::array();
  for (const auto& s : m.states) {
    Json st{{"mean", vector_to_json(s.mean)}, {"variance", vector_to_json(s.var)}};
    if (s.cov.size()) st["covariance"] = matrix_to_json(s.cov);
    states.push_back(std::move(st));
  }
  Json transitions = Json::array();
  for (const auto& t : m.transitions)
    transitions.push_back({{"states", t.states}, {"init", vector_to_json(t.init)}, {"trans", matrix_to_json(t.trans)}});
  Json sequences = Json::array();
  for (const auto& s : m.sequences) sequences.push_back({{"forum_id", s.forum_id}, {"states", s.states}});
  return Json{{"format", "forumdyn.bphmm/1"},
              {"forum_ids", m.forum_ids},
              {"features", int_matrix_to_json(m.features)},
              {"states", std::move(states)},
              {"transitions", std::move(transitions)},
              {"sequences", std::move(sequences)},
              {"log_posterior", m.log_posterior},
              {"map_sweep", m.map_sweep},
              {"empty_state", m.empty_state ? Json(*m.empty_state) : Json(nullptr)},
              {"config", to_json(m.config)}};
}

BphmmModel bphmm_model_from_json(const Json& j) {
  expect_format(j, "forumdyn.bphmm/1");
  BphmmModel m;
  m.forum_ids = j.at("forum_ids").get<std::vector<std::string>>();
  for (const auto& s : j.at("states")) {
    GlobalState st;
    st.mean = vector_from_json(s.at("mean"));
    st.var = vector_from_json(s.at("variance"));
    if (s.contains("covariance")) st.cov = matrix_from_json(s.at("covariance"));
    m.states.push_back(std::move(st));
  }
  m.features = int_matrix_from_json(j.at("features"), static_cast<Eigen::Index>(m.states.size()));
  for (const auto& t : j.at("transitions")) {
    TransitionModel tm;
    tm.states = t.at("states").get<std::vector<int>>();
    tm.init = vector_from_json(t.at("init"));
    tm.trans = matrix_from_json(t.at("trans"));
    m.transitions.push_back(std::move(tm));
  }
  for (const auto& s : j.at("sequences"))
    m.sequences.push_back({s.at("forum_id").get<std::string>(), s.at("states").get<std::vector<int>>()});
  m.log_posterior = j.at("log_posterior").get<double>();
  m.map_sweep = j.at("map_sweep").get<int>();
  if (!j.at("empty_state").is_null()) m.empty_state = j.at("empty_state").get<int>();
  m.config = mcmc_config_from_json(j.at("config"));
  return m;
}

Json to_json(const Dendrogram& d) {
  Json merges = Json::array();
  for (const auto& m : d.merges)
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", height_json(m.height)}, {"size", m.size}});
  return Json{{"leaves", d.leaves}, {"merges", std::move(merges)}, {"leaf_order", d.leaf_order}};
}

Dendrogram dendrogram_from_json(const Json& j) {
  Dendrogram d;
  d.leaves = j.at("leaves").get<int>();
  for (const auto& m : j.at("merges"))
    d.merges.push_back({m.at("left").get<int>(), m.at("right").get<int>(),
                        m.at("height").is_null() ? std::numeric_limits<double>::infinity()
                                                 : m.at("height").get<double>(),
                        m.at("size").get<int>()});
  d.leaf_order = j.at("leaf_order").get<std::vector<int>>();
  return d;
}

Json dendrogram_tree_json(const Dendrogram& d, const std::vector<std::string>& labels) {
  auto node_json = [&](auto&& self, int node) -> Json {
    if (node < d.leaves)
      return Json{{"forum", labels.at(static_cast<std::size_t>(node))}, {"index", node}};
    const auto& m = d.merges[static_cast<std::size_t>(node - d.leaves)];
    return Json{{"height", height_json(m.height)},
                {"size", m.size},
                {"children", Json::array({self(self, m.left), self(self, m.right)})}};
  };
  return node_json(node_json, 2 * d.leaves - 2);
}

Json to_json(const AnomalyReport& r) {
  Json rare = Json::array();
  for (const auto& s : r.rare) {
    Json occ = Json::array();
    for (const auto& o : s.occurrences)
      occ.push_back({{"forum_id", o.forum_id}, {"week", o.week}, {"week_start_date", week_start_date(o.week)}});
    rare.push_back({{"state", s.state}, {"occupancy", s.occupancy}, {"occurrences", std::move(occ)}});
  }
  Json events = Json::array();
  for (const auto& e : r.events)
    events.push_back({{"forum_id", e.forum_id},
                      {"week", e.week},
                      {"week_start_date", week_start_date(e.week)},
                      {"from_state", e.from_state},
                      {"to_state", e.to_state},
                      {"volatility", e.volatility ? Json(*e.volatility) : Json(nullptr)}});
  Json peaks = Json::array();
  for (const auto& p : r.peaks)
    peaks.push_back({{"forum_id", p.forum_id},
                     {"week", p.week},
                     {"week_start_date", week_start_date(p.week)},
                     {"z_score", p.z_score}});
  return Json{{"rare_states", std::move(rare)}, {"transition_events", std::move(events)}, {"activity_peaks", std::move(peaks)}};
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::string top_words_csv(const TopicModel& model, std::size_t n) {
  std::string out = "topic,rank,token,probability\n";
  for (int k = 0; k < model.topics(); ++k) {
    const auto ids = top_words(model, k, n);
    for (std::size_t r = 0; r < ids.size(); ++r)
      out += std::to_string(k) + "," + std::to_string(r + 1) + "," +
             csv_field(model.vocabulary.at(static_cast<std::size_t>(ids[r]))) + "," +
             format_double(model.phi(k, ids[r])) + "\n";
  }
  return out;
}

std::string series_csv(const ForumSeries& s) {
  std::string out = "week_start_date,post_count";
  for (Eigen::Index k = 0; k < s.dim(); ++k) out += ",k" + std::to_string(k);
  out += "\n";
  for (Eigen::Index t = 0; t < s.length(); ++t) {
    out += week_start_date(s.weeks.start_week + t) + "," + std::to_string(s.post_counts(t));
    for (Eigen::Index k = 0; k < s.dim(); ++k) out += "," + format_double(s.observations(t, k));
    out += "\n";
  }
  return out;
}

std::string state_sequences_csv(const BphmmModel& model, const std::vector<ForumSeries>& series) {
  std::string out = "forum_id,week_start_date,state_id\n";
  for (std::size_t i = 0; i < model.sequences.size(); ++i) {
    const auto& seq = model.sequences[i];
    for (std::size_t t = 0; t < seq.states.size(); ++t)
      out += csv_field(seq.forum_id) + "," +
             week_start_date(series.at(i).weeks.start_week + static_cast<std::int64_t>(t)) + "," +
             std::to_string(seq.states[t]) + "\n";
  }
  return out;
}

std::string similarity_csv(const SimilarityMatrix& sim) {
  std::string out = "forum_id";
  for (const auto& f : sim.forum_ids) out += "," + csv_field(f);
  out += "\n";
  for (Eigen::Index i = 0; i < sim.values.rows(); ++i) {
    out += csv_field(sim.forum_ids.at(static_cast<std::size_t>(i)));
    for (Eigen::Index j = 0; j < sim.values.cols(); ++j) out += "," + format_double(sim.values(i, j));
    out += "\n";
  }
  return out;
}

// One row per rank: the forum holding that rank under each measure.
std::string volatility_csv(const VolatilityReport& rep) {
  const auto n = rep.entries.size();
  std::vector<const VolatilityEntry*> by_hmm(n), by_ce(n);
  for (const auto& e : rep.entries) {
    by_hmm.at(static_cast<std::size_t>(e.hmm_rank - 1)) = &e;
    by_ce.at(static_cast<std::size_t>(e.ce_rank - 1)) = &e;
  }
  std::string out = "rank,hmm_forum,hmm_volatility,ce_forum,ce_volatility\n";
  for (std::size_t r = 0; r < n; ++r)
    out += std::to_string(r + 1) + "," + csv_field(by_hmm[r]->forum_id) + "," + optional_field(by_hmm[r]->hmm) +
           "," + csv_field(by_ce[r]->forum_id) + "," + optional_field(by_ce[r]->cross_entropy) + "\n";
  return out;
}

std::string cross_entropy_csv(const std::vector<CrossEntropySeries>& ce, int window) {
  std::string out = "forum_id,week_start_date,raw,smoothed\n";
  for (const auto& s : ce) {
    const auto sm = smooth(s.values, window);
    for (std::size_t t = 0; t < s.values.size(); ++t)
      out += csv_field(s.forum_id) + "," + week_start_date(s.weeks[t]) + "," + format_double(s.values[t]) + "," +
             format_double(sm[t]) + "\n";
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
  if (!out) throw Error("failed writing " + p.string());
}

Json read_json(const std::filesystem::path& p) {
  const std::string text = read_file(p);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("invalid JSON in " + p.string());
  return j;
}

void write_json(const std::filesystem::path& p, const Json& j) { write_file(p, j.dump(1) + "\n"); }

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& p) { return content_hash(read_file(p)); }

}  // namespace forumdyn
