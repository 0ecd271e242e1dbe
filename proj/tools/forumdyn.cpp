// Apache License, Version 2.0, refer to LICENSE.txt

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "forumdyn/pipeline.hpp"
#include "forumdyn/synthetic.hpp"

namespace fs = std::filesystem;
using namespace forumdyn;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> topics, lda_iterations, sweeps, burn_in, window;
  std::optional<double> lambda, rare_threshold, z_threshold;
  std::optional<std::string> linkage;
  bool force = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "Configuration file (JSON), or a manifest to replay");
  app->add_option("-o,--output-dir", o.output_dir, "Output directory");
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--topics", o.topics, "Number of LDA topics");
  app->add_option("--lda-iterations", o.lda_iterations, "LDA Gibbs sweeps");
  app->add_option("--sweeps", o.sweeps, "BP-HMM sweeps");
  app->add_option("--burn-in", o.burn_in, "BP-HMM burn-in sweeps");
  app->add_option("--lambda", o.lambda, "Transition smoothing for similarity");
  app->add_option("--linkage", o.linkage, "single, complete or average");
  app->add_option("--rare-threshold", o.rare_threshold, "Occupancy below which a state is rare");
  app->add_option("--z-threshold", o.z_threshold, "Activity peak z-score threshold");
  app->add_option("--window", o.window, "Rolling mean window for cross-entropy");
  app->add_flag("--force", o.force, "Run even if upstream artifacts are stale");
}

PipelineConfig resolve_config(const Overrides& o) {
  PipelineConfig cfg;
  if (!o.config.empty()) {
    cfg = PipelineConfig::load(o.config);
  } else {
    // Reuse the configuration recorded by an earlier run.
    const fs::path dir = o.output_dir.value_or("out");
    if (!fs::exists(dir / "manifest.json")) throw Error("no --config given and no manifest.json in " + dir.string());
    cfg = PipelineConfig::load(dir / "manifest.json");
  }
  if (o.output_dir) cfg.output_dir = fs::absolute(*o.output_dir).lexically_normal();
  auto set = [&](const auto& opt, auto& field, const char* name) {
    if (opt) {
      field = *opt;
      cfg.overrides.emplace_back(name);
    }
  };
  set(o.seed, cfg.seed, "seed");
  set(o.topics, cfg.topics, "lda.topics");
  set(o.lda_iterations, cfg.lda_iterations, "lda.iterations");
  set(o.sweeps, cfg.mcmc.sweeps, "bphmm.sweeps");
  set(o.burn_in, cfg.mcmc.burn_in, "bphmm.burn_in");
  set(o.lambda, cfg.lambda, "analysis.lambda");
  set(o.rare_threshold, cfg.rare_threshold, "analysis.rare_threshold");
  set(o.z_threshold, cfg.z_threshold, "analysis.z_threshold");
  set(o.window, cfg.window, "analysis.window");
  if (o.linkage) {
    cfg.linkage = linkage_from_string(*o.linkage);
    cfg.overrides.emplace_back("analysis.linkage");
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forum topic dynamics: LDA topics, BP-HMM regimes and behavioral analysis"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string from = "ingest";
  auto* run = app.add_subcommand("run", "Run the pipeline end to end");
  add_common(run, run_o);
  run->add_option("--from", from, "Resume from this stage");

  const std::pair<const char*, const char*> stages[] = {
      {"ingest", "Ingest and preprocess posts, select forums"},
      {"lda", "Train the topic model"},
      {"series", "Build weekly topic series"},
      {"fit", "Fit the BP-HMM"},
      {"analyze", "Similarity, clustering, volatility and anomalies"},
      {"report", "Regenerate CSV and report files from saved artifacts"}};
  Overrides stage_o;
  std::string chosen;
  for (auto [name, desc] : stages) {
    auto* sub = app.add_subcommand(name, desc);
    add_common(sub, stage_o);
    sub->callback([&chosen, n = std::string(name)] { chosen = n; });
  }

  synthetic::FixtureSpec fx;
  std::string fixture_dir;
  auto* fixture = app.add_subcommand("fixture", "Write a synthetic post corpus with a matching config");
  fixture->add_option("output", fixture_dir, "Directory to write into")->required();
  fixture->add_option("--seed", fx.seed, "Generator seed");
  fixture->add_option("--forums", fx.forums, "Number of forums");
  fixture->add_option("--posts", fx.posts, "Total number of posts");
  fixture->add_option("--weeks", fx.weeks, "Number of weeks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const PipelineConfig cfg = resolve_config(run_o);
      run_pipeline(cfg, stage_from_string(from), RunOptions{run_o.force});
      std::printf("wrote %s\n", cfg.output_dir.string().c_str());
    } else if (fixture->parsed()) {
      const fs::path dir(fixture_dir);
      write_file(dir / "posts.jsonl", synthetic::to_jsonl(synthetic::fixture_posts(fx)));
      write_file(dir / "stopwords.txt", synthetic::fixture_stopwords());
      PipelineConfig cfg;
      cfg.min_posts = static_cast<std::size_t>(fx.posts / fx.forums / 2);
      cfg.topics = 4;
      cfg.lda_iterations = 200;
      cfg.mcmc.sweeps = 200;
      cfg.mcmc.burn_in = 100;
      Json j = cfg.to_json();
      j["input"] = Json{{"posts", "posts.jsonl"}, {"stopwords", "stopwords.txt"}};
      j["output_dir"] = "out";
      write_json(dir / "config.json", j);
      std::printf("wrote %s\n", dir.string().c_str());
    } else {
      const PipelineConfig cfg = resolve_config(stage_o);
      run_stage(stage_from_string(chosen), cfg, RunOptions{stage_o.force});
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
