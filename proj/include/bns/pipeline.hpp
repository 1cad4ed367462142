#pragma once

#include <string>
#include <vector>

#include "bns/classifier.hpp"
#include "bns/correlation.hpp"
#include "bns/price_series.hpp"

namespace bns {

struct SimSettings {
  ModelVariant model = ModelVariant::kRefined;
  VolMode vol_mode = VolMode::kDynamic;
  double horizon_years = 1.0;
  std::size_t n_steps = 252;
  std::size_t n_paths = 2000;
  std::string schedule = "hard";  // constant | hard | soft
  long horizon_days = 7;
  std::string format = "csv";  // csv | bin
};

struct CorrSettings {
  double s = 1.0;
  std::vector<double> t_grid = {1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0};
  VolMode vol_mode = VolMode::kFrozen;
  std::size_t n_steps = 1260;
  std::size_t n_paths = 20000;
};

struct PipelineConfig {
  std::string data_path;
  CsvSchema schema;
  double k_percent = 2.0;
  IndexRange train_range{100, 499};
  IndexRange test_range{500, 600};
  std::string model = "lr";
  TrainConfig train;
  BnsParams bns;
  SimSettings sim;
  CorrSettings corr;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 1;

  // every problem at once, not just the first
  std::vector<std::string> validate() const;
  // semantic content only (out_dir and threads are execution knobs)
  std::string canonical_json() const;
  std::uint64_t config_hash() const;

  static PipelineConfig from_json(const std::string& text);
};

// Each stage writes its artifacts under cfg.out_dir and returns the file
// names written (relative to out_dir).
std::vector<std::string> run_ingest(const PipelineConfig& cfg);
std::vector<std::string> run_stats(const PipelineConfig& cfg);
std::vector<std::string> run_label(const PipelineConfig& cfg);
std::vector<std::string> run_train(const PipelineConfig& cfg);
std::vector<std::string> run_evaluate(const PipelineConfig& cfg);
std::vector<std::string> run_simulate(const PipelineConfig& cfg);
std::vector<std::string> run_correlate(const PipelineConfig& cfg);
// ingest -> label -> train -> evaluate -> simulate -> correlate + manifest
std::vector<std::string> run_pipeline(const PipelineConfig& cfg);

void write_manifest(const PipelineConfig& cfg,
                    const std::vector<std::string>& artifacts);

}  // namespace bns
