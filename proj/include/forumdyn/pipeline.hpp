// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forumdyn/bphmm.hpp"
#include "forumdyn/clustering.hpp"
#include "forumdyn/corpus.hpp"
#include "forumdyn/io.hpp"

namespace forumdyn {

enum class Stage { Ingest = 0, Lda = 1, Series = 2, Fit = 3, Analyze = 4, Report = 5 };

std::string to_string(Stage s);
Stage stage_from_string(const std::string& s);  // accepts "bphmm" for Fit

/// Error raised inside a pipeline stage; what() is prefixed with the stage.
class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& message);
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

struct PipelineConfig {
  std::filesystem::path posts;
  std::filesystem::path stopwords;  // optional
  PreprocessOptions preprocess;
  std::size_t min_posts = 100;
  int min_span_days = 28;

  int topics = 100;
  std::optional<double> lda_alpha;  // default 50 / topics
  double lda_beta = 0.01;
  int lda_iterations = 500;
  int fold_in_iterations = 50;
  int top_words = 10;

  std::optional<std::string> week_start;  // "YYYY-MM-DD", default: union of forums
  std::optional<std::string> week_end;

  McmcConfig mcmc;  // seed is derived from `seed`

  double lambda = 1e-3;
  double rare_threshold = 0.01;
  double z_threshold = 3.0;
  double epsilon = 1e-10;
  int window = 4;
  Linkage linkage = Linkage::Average;

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 42;

  // Parameters overridden from the command line, recorded in the manifest.
  std::vector<std::string> overrides;

  /// Relative paths are resolved against `base_dir`.
  static PipelineConfig from_json(const Json& j, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& file);
  /// Everything except the output directory and overrides.
  Json to_json() const;
  void validate() const;

  std::uint64_t stage_seed(Stage s) const;
  std::uint64_t inference_seed() const;
};

struct RunOptions {
  bool force = false;  // run even when upstream artifacts are stale
};

/// Runs one stage against the artifacts already in cfg.output_dir.
void run_stage(Stage stage, const PipelineConfig& cfg, const RunOptions& opts = {});

/// Runs `from` and every later stage.
void run_pipeline(const PipelineConfig& cfg, Stage from = Stage::Ingest, const RunOptions& opts = {});

/// Artifact files (relative to the output directory) a stage writes.
std::vector<std::string> stage_outputs(Stage stage);

}  // namespace forumdyn
