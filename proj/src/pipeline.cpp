#include "bns/pipeline.hpp"

#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "bns/ensemble_io.hpp"
#include "bns/util.hpp"

namespace fs = std::filesystem;

namespace bns {

namespace {

nlohmann::json sim_to_json(const SimSettings& s) {
  return {{"model", to_string(s.model)},
          {"vol_mode", to_string(s.vol_mode)},
          {"horizon_years", s.horizon_years},
          {"n_steps", s.n_steps},
          {"n_paths", s.n_paths},
          {"schedule", s.schedule},
          {"horizon_days", s.horizon_days},
          {"format", s.format}};
}

nlohmann::json corr_to_json(const CorrSettings& c) {
  return {{"s", c.s},
          {"t_grid", c.t_grid},
          {"vol_mode", to_string(c.vol_mode)},
          {"n_steps", c.n_steps},
          {"n_paths", c.n_paths}};
}

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

PriceSeries load_series(const PipelineConfig& cfg) {
  return load_csv(cfg.data_path, cfg.schema);
}

struct LabeledData {
  WindowDataset full, train, test;
};

LabeledData labeled(const PipelineConfig& cfg, const PriceSeries& series) {
  LabeledData d;
  auto jumps = detect_jumps(series, cfg.k_percent);
  d.full = build_dataset(series, jumps);
  auto [tr, te] = split_by_range(d.full, series, cfg.train_range, cfg.test_range);
  d.train = std::move(tr);
  d.test = std::move(te);
  return d;
}

TrainConfig train_cfg_with_seed(const PipelineConfig& cfg) {
  TrainConfig tc = cfg.train;
  tc.rng_seed = cfg.seed;
  return tc;
}

std::string model_artifact(const PipelineConfig& cfg) {
  return "model_" + cfg.model + ".json";
}

ThetaSchedule build_schedule(const PipelineConfig& cfg,
                             const WindowDataset& test,
                             const Classifier& model) {
  if (cfg.sim.schedule == "constant")
    return ThetaSchedule::constant(cfg.bns.theta);
  auto preds = predict_theta(model, test);
  if (preds.empty()) return ThetaSchedule::constant(cfg.bns.theta);
  std::vector<ThetaPrediction> tps;
  // day 0 of simulated time = first test row's horizon start
  long base = static_cast<long>(test.rows.front().start_index);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    tps.push_back({static_cast<long>(test.rows[i].start_index) - base,
                   preds[i].prob_theta1});
  }
  auto mode = cfg.sim.schedule == "soft" ? ScheduleMode::kSoft
                                         : ScheduleMode::kHard;
  return schedule_from_predictions(tps, mode, cfg.sim.horizon_days,
                                   model.threshold());
}

}  // namespace

std::vector<std::string> PipelineConfig::validate() const {
  std::vector<std::string> issues;
  if (data_path.empty()) issues.push_back("data: path is empty");
  if (!(k_percent > 0.0)) issues.push_back("k_percent: must be > 0");
  if (model != "lr" && model != "rf" && model != "nn" && model != "lstm" &&
      model != "lstm-bn")
    issues.push_back("model: expected lr|rf|nn|lstm|lstm-bn, got '" + model + "'");
  try {
    train.validate();
  } catch (const std::exception& e) {
    issues.push_back(std::string("train: ") + e.what());
  }
  try {
    bns.validate(sim.model);
  } catch (const std::exception& e) {
    issues.push_back(std::string("bns: ") + e.what());
  }
  if (!(sim.horizon_years > 0.0)) issues.push_back("sim: horizon must be > 0");
  if (sim.n_steps < 1) issues.push_back("sim: n_steps must be >= 1");
  if (sim.n_paths < 1) issues.push_back("sim: n_paths must be >= 1");
  if (sim.schedule != "constant" && sim.schedule != "hard" &&
      sim.schedule != "soft")
    issues.push_back("sim: schedule must be constant|hard|soft");
  if (sim.format != "csv" && sim.format != "bin")
    issues.push_back("sim: format must be csv|bin");
  if (sim.horizon_days < 1) issues.push_back("sim: horizon_days must be >= 1");
  if (!(corr.s > 0.0)) issues.push_back("correlate: s must be > 0");
  for (double t : corr.t_grid)
    if (t <= corr.s) issues.push_back("correlate: t_grid entries must exceed s");
  if (out_dir.empty()) issues.push_back("out_dir: empty");
  if (threads < 1) issues.push_back("threads: must be >= 1");
  return issues;
}

std::string PipelineConfig::canonical_json() const {
  nlohmann::json j;
  j["data"] = data_path;
  j["columns"] = {{"date", schema.date_column}, {"close", schema.close_column}};
  j["k_percent"] = k_percent;
  j["train_range"] = {train_range.lo, train_range.hi};
  j["test_range"] = {test_range.lo, test_range.hi};
  j["model"] = model;
  j["train"] = nlohmann::json::parse(train.to_json());
  j["bns"] = nlohmann::json::parse(bns.to_json());
  j["sim"] = sim_to_json(sim);
  j["correlate"] = corr_to_json(corr);
  j["seed"] = seed;
  return j.dump(2);
}

std::uint64_t PipelineConfig::config_hash() const {
  return fnv1a64(canonical_json());
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  PipelineConfig c;
  if (j.contains("data")) c.data_path = j.at("data").get<std::string>();
  if (j.contains("columns")) {
    c.schema.date_column = j.at("columns").value("date", c.schema.date_column);
    c.schema.close_column =
        j.at("columns").value("close", c.schema.close_column);
  }
  if (j.contains("k_percent")) c.k_percent = j.at("k_percent").get<double>();
  auto range = [&](const char* key, IndexRange& r) {
    if (j.contains(key)) {
      r.lo = j.at(key).at(0).get<std::size_t>();
      r.hi = j.at(key).at(1).get<std::size_t>();
    }
  };
  range("train_range", c.train_range);
  range("test_range", c.test_range);
  if (j.contains("model")) c.model = j.at("model").get<std::string>();
  if (j.contains("train")) c.train = TrainConfig::from_json(j.at("train").dump());
  if (j.contains("bns")) c.bns = BnsParams::from_json(j.at("bns").dump());
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    if (s.contains("model"))
      c.sim.model = model_variant_from_string(s.at("model").get<std::string>());
    if (s.contains("vol_mode"))
      c.sim.vol_mode = vol_mode_from_string(s.at("vol_mode").get<std::string>());
    c.sim.horizon_years = s.value("horizon_years", c.sim.horizon_years);
    c.sim.n_steps = s.value("n_steps", c.sim.n_steps);
    c.sim.n_paths = s.value("n_paths", c.sim.n_paths);
    c.sim.schedule = s.value("schedule", c.sim.schedule);
    c.sim.horizon_days = s.value("horizon_days", c.sim.horizon_days);
    c.sim.format = s.value("format", c.sim.format);
  }
  if (j.contains("correlate")) {
    const auto& s = j.at("correlate");
    c.corr.s = s.value("s", c.corr.s);
    if (s.contains("t_grid"))
      c.corr.t_grid = s.at("t_grid").get<std::vector<double>>();
    if (s.contains("vol_mode"))
      c.corr.vol_mode = vol_mode_from_string(s.at("vol_mode").get<std::string>());
    c.corr.n_steps = s.value("n_steps", c.corr.n_steps);
    c.corr.n_paths = s.value("n_paths", c.corr.n_paths);
  }
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  return c;
}

std::vector<std::string> run_ingest(const PipelineConfig& cfg) {
  auto series = load_series(cfg);
  write_file(out_path(cfg, "series.csv"), series.to_csv());
  return {"series.csv"};
}

std::vector<std::string> run_stats(const PipelineConfig& cfg) {
  auto series = load_series(cfg);
  auto stats = summary_stats(series);
  write_file(out_path(cfg, "stats.json"), stats.to_json());
  return {"stats.json"};
}

std::vector<std::string> run_label(const PipelineConfig& cfg) {
  auto series = load_series(cfg);
  auto jumps = detect_jumps(series, cfg.k_percent);
  auto ds = build_dataset(series, jumps);
  write_file(out_path(cfg, "dataset.csv"), ds.to_csv());
  return {"dataset.csv"};
}

std::vector<std::string> run_train(const PipelineConfig& cfg) {
  auto series = load_series(cfg);
  auto data = labeled(cfg, series);
  if (data.train.rows.empty())
    throw std::runtime_error("train: empty training split");
  auto model = train_model(cfg.model, data.train, train_cfg_with_seed(cfg));
  write_file(out_path(cfg, model_artifact(cfg)), model->to_json());
  return {model_artifact(cfg)};
}

std::vector<std::string> run_evaluate(const PipelineConfig& cfg) {
  auto series = load_series(cfg);
  auto data = labeled(cfg, series);
  std::string model_file = out_path(cfg, model_artifact(cfg));
  std::unique_ptr<Classifier> model;
  if (fs::exists(model_file)) {
    model = classifier_from_json(read_file(model_file));
  } else {
    if (data.train.rows.empty())
      throw std::runtime_error("evaluate: empty training split");
    model = train_model(cfg.model, data.train, train_cfg_with_seed(cfg));
    write_file(model_file, model->to_json());
  }
  auto preds = predict_theta(*model, data.test);
  std::vector<int> y_true, y_pred;
  std::ostringstream pred_csv;
  pred_csv << "start_index,theta_true,prob_theta1,theta_pred\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    y_true.push_back(data.test.rows[i].theta);
    y_pred.push_back(preds[i].label);
    pred_csv << data.test.rows[i].start_index << ','
             << data.test.rows[i].theta << ','
             << fmt_double(preds[i].prob_theta1) << ',' << preds[i].label
             << '\n';
  }
  auto rep = report(y_true, y_pred);
  write_file(out_path(cfg, "report.json"), rep.to_json());
  write_file(out_path(cfg, "report.txt"), rep.to_text_table());
  write_file(out_path(cfg, "predictions.csv"), pred_csv.str());
  return {model_artifact(cfg), "report.json", "report.txt", "predictions.csv"};
}

std::vector<std::string> run_simulate(const PipelineConfig& cfg) {
  ThetaSchedule schedule = ThetaSchedule::constant(cfg.bns.theta);
  if (cfg.sim.schedule != "constant" &&
      cfg.sim.model == ModelVariant::kRefined) {
    auto series = load_series(cfg);
    auto data = labeled(cfg, series);
    if (data.train.rows.empty() || data.test.rows.empty())
      throw std::runtime_error("simulate: classifier schedule needs both splits");
    auto model = train_model(cfg.model, data.train, train_cfg_with_seed(cfg));
    schedule = build_schedule(cfg, data.test, *model);
  }
  auto ens = simulate_ensemble(cfg.bns, schedule, cfg.sim.model,
                               cfg.sim.horizon_years, cfg.sim.n_steps,
                               cfg.sim.n_paths, cfg.seed, cfg.threads,
                               cfg.sim.vol_mode);
  std::vector<std::string> written;
  if (cfg.sim.format == "bin") {
    write_ensemble_binary(ens, out_path(cfg, "ensemble.bin"));
    written.push_back("ensemble.bin");
  } else {
    write_file(out_path(cfg, "ensemble.csv"), ensemble_to_csv(ens));
    written.push_back("ensemble.csv");
  }
  write_file(out_path(cfg, "schedule.json"), schedule.to_json());
  written.push_back("schedule.json");
  return written;
}

std::vector<std::string> run_correlate(const PipelineConfig& cfg) {
  ThetaSchedule schedule = ThetaSchedule::constant(cfg.bns.theta);
  auto profile = decay_profile(cfg.bns, schedule, cfg.sim.model,
                               cfg.corr.vol_mode, cfg.corr.s, cfg.corr.t_grid,
                               cfg.corr.n_steps, cfg.corr.n_paths, cfg.seed,
                               cfg.threads);
  write_file(out_path(cfg, "decay.csv"), profile.to_csv());
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : profile.rows) {
    double gap = std::abs(r.formula_corr - r.mc_corr) / r.mc_se;
    worst = std::max(worst, gap);
    rows.push_back({{"t", r.t},
                    {"formula_corr", r.formula_corr},
                    {"mc_corr", r.mc_corr},
                    {"mc_se", r.mc_se},
                    {"gap_in_se", gap}});
  }
  nlohmann::json summary = {{"rows", rows}, {"max_gap_in_se", worst}};
  write_file(out_path(cfg, "correlation_summary.json"), summary.dump(2) + "\n");
  return {"decay.csv", "correlation_summary.json"};
}

void write_manifest(const PipelineConfig& cfg,
                    const std::vector<std::string>& artifacts) {
  nlohmann::json j;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(cfg.config_hash()));
  j["config_hash"] = hash;
  j["seed"] = cfg.seed;
  nlohmann::json arts = nlohmann::json::object();
  for (const auto& name : artifacts) {
    auto bytes = read_file((fs::path(cfg.out_dir) / name).string());
    char h[32];
    std::snprintf(h, sizeof(h), "0x%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    arts[name] = h;
  }
  j["artifacts"] = arts;
  j["config"] = nlohmann::json::parse(cfg.canonical_json());
  write_file(out_path(cfg, "manifest.json"), j.dump(2) + "\n");
}

std::vector<std::string> run_pipeline(const PipelineConfig& cfg) {
  std::vector<std::string> artifacts;
  auto append = [&](std::vector<std::string> names) {
    for (auto& n : names) artifacts.push_back(std::move(n));
  };
  append(run_ingest(cfg));
  append(run_stats(cfg));
  append(run_label(cfg));
  append(run_evaluate(cfg));  // trains and writes the model artifact too
  append(run_simulate(cfg));
  append(run_correlate(cfg));
  write_manifest(cfg, artifacts);
  artifacts.push_back("manifest.json");
  return artifacts;
}

}  // namespace bns
