#include "procaudit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "procaudit/csv.hpp"
#include "procaudit/error.hpp"
#include "procaudit/explain.hpp"
#include "procaudit/ingest.hpp"
#include "procaudit/rng.hpp"

namespace procaudit {

namespace fs = std::filesystem;

StageError::StageError(std::string stage, std::string cause, bool data_error)
    : std::runtime_error("stage '" + stage + "' failed: " + cause),
      stage_(std::move(stage)),
      data_error_(data_error) {}

void RunConfig::validate() const {
  if (!input && !generator) throw ConfigError("run needs an input file or a generator config");
  if (input && generator) throw ConfigError("input file and generator config are exclusive");
  if (generator) generator->validate();
  if (injection) injection->validate();
  if (strategies.empty()) throw ConfigError("at least one encoding strategy is required");
  if (k_min < 2 || k_max < k_min) throw ConfigError("k range must satisfy 2 <= k_min <= k_max");
  if (kmeans.max_iter == 0 || !(kmeans.tol >= 0.0)) throw ConfigError("invalid k-Means limits");
  if (!(silhouette_fraction > 0.0 && silhouette_fraction <= 1.0)) {
    throw ConfigError("silhouette fraction must be in (0, 1]");
  }
  if (!(univariate.z_threshold > 0.0)) throw ConfigError("z threshold must be > 0");
  if (!(univariate.dbscan_eps > 0.0)) throw ConfigError("DBSCAN eps must be > 0");
  if (univariate.dbscan_min_neighbors == 0) throw ConfigError("DBSCAN min_neighbors must be >= 1");
  if (forest.n_trees == 0 || forest.sample_size < 2) {
    throw ConfigError("isolation forest needs n_trees >= 1 and sample_size >= 2");
  }
  if (!(iforest_quantile > 0.0 && iforest_quantile < 1.0)) {
    throw ConfigError("isolation forest quantile must be in (0, 1)");
  }
  if (iforest_cap == 0) throw ConfigError("isolation forest cap must be >= 1");
  if (!(cluster_min_fraction >= 0.0 && cluster_min_fraction < 1.0)) {
    throw ConfigError("cluster min fraction must be in [0, 1)");
  }
  if (shapley_permutations == 0) throw ConfigError("shapley_permutations must be >= 1");
}

namespace {

const std::set<std::string> kConfigKeys = {
    "input",          "generator",        "injection",          "strategies",
    "k_min",          "k_max",            "max_iter",           "tol",
    "silhouette_fraction", "z_threshold", "dbscan_eps",         "dbscan_min_neighbors",
    "n_trees",        "sample_size",      "iforest_quantile",   "iforest_cap",
    "cluster_min_fraction", "segregate_univariate", "order",    "explain_top",
    "shapley_permutations", "seed",       "output_dir"};

SecondaryOrder parse_order(const std::string& s) {
  for (auto o : {SecondaryOrder::SilhouetteAsc, SecondaryOrder::IforestDesc, SecondaryOrder::RowId}) {
    if (to_string(o) == s) return o;
  }
  throw ConfigError("unknown order '" + s + "'");
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kConfigKeys.count(key)) throw ConfigError("unknown run config key '" + key + "'");
  }
  RunConfig cfg;
  try {
    if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
    if (j.contains("generator")) cfg.generator = gen_config_from_json(j.at("generator"));
    if (j.contains("injection")) {
      const auto& in = j.at("injection");
      AnomalySpec spec;
      spec.rate_point = in.value("rate_point", spec.rate_point);
      spec.rate_contextual = in.value("rate_contextual", spec.rate_contextual);
      spec.multiplier_low = in.value("multiplier_low", spec.multiplier_low);
      spec.multiplier_high = in.value("multiplier_high", spec.multiplier_high);
      cfg.injection = spec;
    }
    if (j.contains("strategies")) {
      cfg.strategies.clear();
      for (const auto& s : j.at("strategies")) {
        const auto parsed = parse_strategy(s.get<std::string>());
        if (!parsed) throw ConfigError("unknown strategy " + s.get<std::string>());
        cfg.strategies.push_back(*parsed);
      }
    }
    cfg.k_min = j.value("k_min", cfg.k_min);
    cfg.k_max = j.value("k_max", cfg.k_max);
    cfg.kmeans.max_iter = j.value("max_iter", cfg.kmeans.max_iter);
    cfg.kmeans.tol = j.value("tol", cfg.kmeans.tol);
    cfg.silhouette_fraction = j.value("silhouette_fraction", cfg.silhouette_fraction);
    cfg.univariate.z_threshold = j.value("z_threshold", cfg.univariate.z_threshold);
    cfg.univariate.dbscan_eps = j.value("dbscan_eps", cfg.univariate.dbscan_eps);
    cfg.univariate.dbscan_min_neighbors =
        j.value("dbscan_min_neighbors", cfg.univariate.dbscan_min_neighbors);
    cfg.forest.n_trees = j.value("n_trees", cfg.forest.n_trees);
    cfg.forest.sample_size = j.value("sample_size", cfg.forest.sample_size);
    cfg.iforest_quantile = j.value("iforest_quantile", cfg.iforest_quantile);
    cfg.iforest_cap = j.value("iforest_cap", cfg.iforest_cap);
    cfg.cluster_min_fraction = j.value("cluster_min_fraction", cfg.cluster_min_fraction);
    cfg.segregate_univariate = j.value("segregate_univariate", cfg.segregate_univariate);
    if (j.contains("order")) cfg.order = parse_order(j.at("order").get<std::string>());
    cfg.explain_top = j.value("explain_top", cfg.explain_top);
    cfg.shapley_permutations = j.value("shapley_permutations", cfg.shapley_permutations);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  if (cfg.input) j["input"] = cfg.input->string();
  if (cfg.generator) j["generator"] = to_json(*cfg.generator);
  if (cfg.injection) {
    j["injection"] = {{"rate_point", cfg.injection->rate_point},
                      {"rate_contextual", cfg.injection->rate_contextual},
                      {"multiplier_low", cfg.injection->multiplier_low},
                      {"multiplier_high", cfg.injection->multiplier_high}};
  }
  auto& s = j["strategies"] = nlohmann::json::array();
  for (auto st : cfg.strategies) s.push_back(to_string(st));
  j["k_min"] = cfg.k_min;
  j["k_max"] = cfg.k_max;
  j["max_iter"] = cfg.kmeans.max_iter;
  j["tol"] = cfg.kmeans.tol;
  j["silhouette_fraction"] = cfg.silhouette_fraction;
  j["z_threshold"] = cfg.univariate.z_threshold;
  j["dbscan_eps"] = cfg.univariate.dbscan_eps;
  j["dbscan_min_neighbors"] = cfg.univariate.dbscan_min_neighbors;
  j["n_trees"] = cfg.forest.n_trees;
  j["sample_size"] = cfg.forest.sample_size;
  j["iforest_quantile"] = cfg.iforest_quantile;
  j["iforest_cap"] = cfg.iforest_cap;
  j["cluster_min_fraction"] = cfg.cluster_min_fraction;
  j["segregate_univariate"] = cfg.segregate_univariate;
  j["order"] = to_string(cfg.order);
  j["explain_top"] = cfg.explain_top;
  j["shapley_permutations"] = cfg.shapley_permutations;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir.string();
  return j;
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json j;
  auto& t = j["timings_seconds"] = nlohmann::json::object();
  for (const auto& [stage, sec] : report.timings) t[stage] = sec;
  j["records_loaded"] = report.records_loaded;
  j["records_removed"] = report.records_removed;
  auto& u = j["univariate"] = nlohmann::json::array();
  for (const auto& s : report.univariate) u.push_back(to_json(s));
  j["selection"] = {{"strategy", to_string(report.selection.strategy)},
                    {"k", report.selection.k},
                    {"silhouette", report.selection.silhouette},
                    {"structure", to_string(report.selection.structure)}};
  j["scored_rows"] = report.scored_rows;
  j["iforest_flagged"] = report.iforest_flagged;
  j["groups"] = to_json(report.groups);
  j["log"] = report.log;
  auto& m = j["manifest"] = nlohmann::json::array();
  for (const auto& e : report.manifest) {
    m.push_back({{"file", e.file}, {"bytes", e.bytes}, {"fnv1a64", e.fnv1a64}});
  }
  return j;
}

std::vector<ManifestEntry> build_manifest(const fs::path& dir) {
  std::vector<ManifestEntry> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == "run_report.json" || rel == "manifest.json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    out.push_back({rel, bytes.size(), hex});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.file < b.file; });
  return out;
}

namespace {

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  body(out);
  if (!out) throw DataError("write failed for " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_file(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

void write_features_csv(std::ostream& out, const FeatureMatrix& x) {
  CsvRow header = {"row_id"};
  header.insert(header.end(), x.names().begin(), x.names().end());
  write_csv_row(out, header);
  CsvRow row(x.cols() + 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    row[0] = std::to_string(x.row_ids()[r]);
    for (std::size_t f = 0; f < x.cols(); ++f) row[f + 1] = format_double(x.at(r, f));
    write_csv_row(out, row);
  }
}

FeatureMatrix read_features_csv(const fs::path& path) {
  const auto table = read_csv_file(path);
  if (table.header.empty() || table.header.front() != "row_id") {
    throw DataError(path.string() + ": expected a row_id column first");
  }
  FeatureMatrix x(table.rows.size(), {table.header.begin() + 1, table.header.end()});
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    x.row_ids()[r] = std::stoll(table.rows[r][0]);
    for (std::size_t f = 0; f < x.cols(); ++f) {
      const auto v = parse_amount(table.rows[r][f + 1]);
      if (!v) throw DataError(path.string() + ": bad value on line " + std::to_string(table.lines[r]));
      x.at(r, f) = *v;
    }
  }
  return x;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

ShapleyMode row_mode(const ShapleyMode& base, std::int64_t row_id) {
  auto m = base;
  m.seed = derive_seed(base.seed, "shapley-row", static_cast<std::uint64_t>(row_id));
  return m;
}

std::vector<fs::path> write_attributions(const fs::path& dir, const ForestModel& forest,
                                         double max_mean, double min_mean, const FeatureMatrix& x,
                                         std::span<const std::size_t> positions,
                                         std::span<const double> reference,
                                         const ShapleyMode& mode) {
  std::vector<fs::path> written;
  const auto score = forest_scoring_function(forest, max_mean, min_mean);
  for (auto p : positions) {
    const auto row_id = x.row_ids()[p];
    auto a = shapley_attributions(score, x.row(p), reference, x.names(), row_mode(mode, row_id));
    a.row_id = row_id;
    auto j = to_json(a);
    nlohmann::json top = nlohmann::json::array();
    for (const auto& [f, v] : top_contributors(a, 3)) top.push_back({{"feature", f}, {"value", v}});
    j["top_contributors"] = top;
    const auto path = dir / ("row_" + std::to_string(row_id) + ".json");
    write_json(path, j);
    written.push_back(path);
  }
  return written;
}

ShapleyMode choose_mode(std::size_t features, std::size_t permutations, std::uint64_t seed) {
  if (features <= kMaxExactFeatures) {
    auto m = ShapleyMode::exact();
    m.seed = seed;
    return m;
  }
  return ShapleyMode::sampled(permutations, seed);
}

class Runner {
 public:
  Runner(const RunConfig& cfg, RunReport& report) : cfg_(cfg), report_(report) {}

  template <typename F>
  auto stage(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        finish(name, start);
        return;
      } else {
        auto result = body();
        finish(name, start);
        return result;
      }
    } catch (const StageError&) {
      throw;
    } catch (const DataError& e) {
      fail(name, e.what(), true);
    } catch (const ConfigError& e) {
      fail(name, e.what(), true);
    } catch (const std::exception& e) {
      fail(name, e.what(), false);
    }
    throw std::logic_error("unreachable");
  }

  void log(std::string line) { report_.log.push_back(std::move(line)); }
  fs::path path(const std::string& file) const { return cfg_.output_dir / file; }

 private:
  void finish(const std::string& name, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    report_.timings.emplace_back(name, dt.count());
  }

  [[noreturn]] void fail(const std::string& name, const std::string& cause, bool data_error) {
    std::ofstream marker(path("FAILED"));
    marker << "stage: " << name << "\ncause: " << cause << '\n';
    throw StageError(name, cause, data_error);
  }

  const RunConfig& cfg_;
  RunReport& report_;
};

struct StrategyRun {
  EncodingStrategy strategy;
  Normalized full;
  std::vector<bool> univariate_union;
  // Matrix the clustering and scoring stages use (full or segregated).
  FeatureMatrix modelled;
  SweepResult sweep;
  std::vector<double> sampled_silhouette;
};

}  // namespace

RunReport run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  RunReport report;
  Runner run(cfg, report);
  fs::create_directories(cfg.output_dir);
  fs::remove(run.path("FAILED"));
  const auto seed = cfg.seed;

  Dataset raw = run.stage("ingest", [&] {
    if (cfg.input) return load_transactions(*cfg.input);
    auto gen = *cfg.generator;
    gen.seed = derive_seed(seed, "generate");
    return generate(gen);
  });
  report.records_loaded = raw.size();

  Dataset data = run.stage("clean", [&] {
    auto c = clean(raw);
    report.records_removed = c.removed;
    run.log("clean: removed " + std::to_string(c.removed) + " incomplete records, kept " +
            std::to_string(c.dataset.size()));
    return std::move(c.dataset);
  });
  raw = {};

  if (cfg.injection) {
    data = run.stage("inject", [&] {
      auto injected = inject_anomalies(data, *cfg.injection, derive_seed(seed, "inject"));
      for (const auto& w : injected.truth.warnings) run.log("inject: " + w);
      for (const auto& n : injected.truth.notes) run.log("inject: " + n);
      write_file(run.path("ground_truth.csv"), [&](std::ostream& out) {
        write_ground_truth(out, injected.dataset, injected.truth);
      });
      return std::move(injected.dataset);
    });
  }
  if (cfg.generator) {
    run.stage("write-dataset", [&] { save_transactions(run.path("dataset.csv"), data); });
  }

  run.stage("profile", [&] {
    const auto p = profile(data);
    write_json(run.path("profile.json"), to_json(p));
    write_file(run.path("profile.csv"), [&](std::ostream& out) { write_profile_csv(out, p); });
  });

  std::vector<StrategyRun> runs;
  for (auto s : cfg.strategies) {
    const std::string name(to_string(s));
    StrategyRun sr{s, {}, {}, {}, {}, {}};
    run.stage("encode:" + name, [&] {
      const auto map = fit_target_encoding(data, s);
      write_json(run.path("encoders/" + name + ".json"), to_json(map));
      auto encoded = apply_encoding(data, map);
      sr.full = gaussian_normalize(encoded.matrix);
    });
    run.stage("univariate:" + name, [&] {
      std::vector<std::string> warnings;
      const auto table = detect_univariate(sr.full.matrix, cfg.univariate, &warnings);
      for (const auto& w : warnings) run.log("univariate " + name + ": " + w);
      sr.univariate_union = univariate_union(table);
      report.univariate.push_back(summarize(name, table));
      write_file(run.path("univariate/flags_" + name + ".csv"),
                 [&](std::ostream& out) { write_flag_table_csv(out, table); });
    });
    runs.push_back(std::move(sr));
  }
  run.stage("univariate-summary", [&] {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& u : report.univariate) j.push_back(to_json(u));
    write_json(run.path("univariate/summary.json"), j);
    write_file(run.path("univariate/summary.csv"), [&](std::ostream& out) {
      out << "encoding,univariate_outliers,normal_elements,total\n";
      for (const auto& u : report.univariate) {
        out << u.encoding << ',' << u.outliers << ',' << u.normal << ',' << u.total << '\n';
      }
    });
  });

  std::vector<ModelCandidate> candidates;
  std::vector<std::pair<std::size_t, std::size_t>> candidate_origin;  // (run, model)
  for (std::size_t ri = 0; ri < runs.size(); ++ri) {
    auto& sr = runs[ri];
    const std::string name(to_string(sr.strategy));
    if (cfg.segregate_univariate) {
      run.stage("segregate:" + name, [&] {
        Dataset kept;
        kept.schema = data.schema;
        for (std::size_t i = 0; i < data.size(); ++i) {
          if (!sr.univariate_union[i]) kept.records.push_back(data.records[i]);
        }
        if (kept.records.empty()) throw DataError("every row is a univariate outlier");
        const auto map = fit_target_encoding(kept, sr.strategy);
        write_json(run.path("encoders/" + name + "_segregated.json"), to_json(map));
        sr.modelled = gaussian_normalize(apply_encoding(kept, map).matrix).matrix;
        run.log("segregate " + name + ": re-encoded categorical features after removing " +
                std::to_string(data.size() - kept.size()) + " univariate outliers");
      });
    } else {
      sr.modelled = sr.full.matrix;
    }
    run.stage("cluster:" + name, [&] {
      sr.sweep = kmeans_sweep(sr.modelled, cfg.k_min, cfg.k_max,
                              derive_seed(seed, "kmeans:" + name), cfg.kmeans);
      for (std::size_t mi = 0; mi < sr.sweep.models.size(); ++mi) {
        const auto& m = sr.sweep.models[mi];
        const auto sil = silhouette_sampled(sr.modelled, m.assignments, cfg.silhouette_fraction,
                                            derive_seed(seed, "silhouette:" + name, m.k));
        sr.sampled_silhouette.push_back(sil.overall);
        candidates.push_back({sr.strategy, m.k, sil.overall});
        candidate_origin.emplace_back(ri, mi);
      }
    });
  }
  run.stage("elbow-report", [&] {
    write_file(run.path("elbow_silhouette.csv"), [&](std::ostream& out) {
      out << "strategy,k,sse,silhouette_sampled,iterations\n";
      for (const auto& sr : runs) {
        for (std::size_t mi = 0; mi < sr.sweep.models.size(); ++mi) {
          const auto& m = sr.sweep.models[mi];
          out << to_string(sr.strategy) << ',' << m.k << ',' << format_double(m.sse) << ','
              << format_double(sr.sampled_silhouette[mi]) << ',' << m.iterations_run << '\n';
        }
      }
    });
  });

  report.selection = run.stage("select", [&] {
    const auto sel = select_model(candidates);
    write_json(run.path("model_selection.json"),
               {{"strategy", to_string(sel.strategy)},
                {"k", sel.k},
                {"silhouette_sampled", sel.silhouette},
                {"structure", to_string(sel.structure)},
                {"segregated", cfg.segregate_univariate}});
    run.log("select: " + std::string(to_string(sel.strategy)) + " k=" + std::to_string(sel.k) +
            " silhouette=" + format_double(sel.silhouette) + " (" +
            std::string(to_string(sel.structure)) + ")");
    return sel;
  });
  const auto [run_index, model_index] = candidate_origin[report.selection.index];
  const auto& chosen = runs[run_index];
  const FeatureMatrix& x = chosen.modelled;
  const ClusterModel& model = chosen.sweep.models[model_index];
  report.scored_rows = x.rows();

  const auto silhouette = run.stage("silhouette", [&] {
    return silhouette_full(x, model.assignments);
  });

  ForestModel forest;
  ScoreTable scores;
  ThresholdResult threshold;
  run.stage("iforest", [&] {
    forest = iforest_train(x, derive_seed(seed, "iforest"), cfg.forest);
    scores = predict_scores(forest, x);
    threshold = iforest_threshold(scores, cfg.iforest_quantile, cfg.iforest_cap);
    for (const auto& w : threshold.warnings) run.log("iforest: " + w);
    report.iforest_flagged = threshold.flagged;
    write_file(run.path("scores.csv"),
               [&](std::ostream& out) { write_score_table_csv(out, scores, threshold.flags); });
    write_json(run.path("forest.json"), to_json(forest));
    write_file(run.path("features.csv"), [&](std::ostream& out) { write_features_csv(out, x); });
  });

  std::vector<AnomalyScorecard> ordered;
  run.stage("ensemble", [&] {
    const auto kflags = kmeans_anomaly_flags(model, cfg.cluster_min_fraction);
    const auto sflags = silhouette_anomaly_flags(silhouette);
    const std::vector<bool> uflags =
        cfg.segregate_univariate ? std::vector<bool>(x.rows(), false) : chosen.univariate_union;
    const auto cards = build_scorecards(kflags, sflags, threshold.flags, uflags, x.row_ids(),
                                        silhouette.values, scores.prediction);
    ordered = prioritise(cards, cfg.order);
    report.groups = group_distribution(cards, model.assignments, model.k);
    write_file(run.path("groups.csv"),
               [&](std::ostream& out) { write_group_table_csv(out, report.groups); });
    write_json(run.path("groups.json"), to_json(report.groups));
    write_file(run.path("scorecards.csv"), [&](std::ostream& out) {
      write_review_list_csv(out, cards, model.assignments, Dataset{data.schema, {}}, true);
    });
    write_file(run.path("review_list.csv"), [&](std::ostream& out) {
      write_review_list_csv(out, ordered, model.assignments, data);
    });
  });

  run.stage("explain", [&] {
    const auto bg_positions = background_positions(model.assignments, derive_seed(seed, "background"));
    const auto background = x.select_rows(bg_positions);
    const auto reference = background_mean(background);
    const auto mode = choose_mode(x.cols(), cfg.shapley_permutations, derive_seed(seed, "shapley"));

    std::vector<std::size_t> top;
    for (const auto& c : ordered) {
      if (top.size() >= cfg.explain_top || c.priority == 0) break;
      top.push_back(c.position);
    }
    write_attributions(run.path("attributions"), forest, scores.max_mean_path_length,
                       scores.min_mean_path_length, x, top, reference, mode);

    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < threshold.flags.size(); ++i) {
      if (threshold.flags[i]) flagged.push_back(i);
    }
    if (!flagged.empty()) {
      const auto summary = global_attribution_summary(forest, scores, x, flagged, background, mode);
      write_file(run.path("attribution_summary.csv"),
                 [&](std::ostream& out) { write_importance_csv(out, summary); });
    }
    write_json(run.path("explain_context.json"),
               {{"strategy", to_string(chosen.strategy)},
                {"features", x.names()},
                {"background_rows", bg_positions.size()},
                {"background_mean", reference},
                {"max_mean_path_length", scores.max_mean_path_length},
                {"min_mean_path_length", scores.min_mean_path_length},
                {"mode", mode.kind == ShapleyMode::Kind::Exact ? "exact" : "sampled"},
                {"permutations", mode.n_permutations},
                {"seed", mode.seed}});
  });

  run.stage("manifest", [&] {
    write_file(run.path("run.log"), [&](std::ostream& out) {
      for (const auto& line : report.log) out << line << '\n';
    });
    auto written_cfg = to_json(cfg);
    written_cfg.erase("output_dir");
    write_json(run.path("config.json"), written_cfg);
    report.manifest = build_manifest(cfg.output_dir);
    nlohmann::json m = nlohmann::json::array();
    for (const auto& e : report.manifest) {
      if (e.bytes == 0) throw std::runtime_error("empty output file " + e.file);
      m.push_back({{"file", e.file}, {"bytes", e.bytes}, {"fnv1a64", e.fnv1a64}});
    }
    write_json(run.path("manifest.json"), m);
  });
  write_json(run.path("run_report.json"), to_json(report));
  return report;
}

std::vector<fs::path> explain_run(const fs::path& run_dir, std::size_t top) {
  const auto context = read_json(run_dir / "explain_context.json");
  const auto forest = forest_from_json(read_json(run_dir / "forest.json"));
  const auto x = read_features_csv(run_dir / "features.csv");
  const auto review = read_csv_file(run_dir / "review_list.csv");

  std::map<std::int64_t, std::size_t> position;
  for (std::size_t i = 0; i < x.rows(); ++i) position[x.row_ids()[i]] = i;
  std::vector<std::size_t> rows;
  for (const auto& r : review.rows) {
    if (rows.size() >= top) break;
    const auto it = position.find(std::stoll(r.at(0)));
    if (it == position.end()) throw DataError("review list row " + r.at(0) + " not in features");
    rows.push_back(it->second);
  }
  const auto reference = context.at("background_mean").get<std::vector<double>>();
  const auto mode = choose_mode(x.cols(), context.at("permutations").get<std::size_t>(),
                                context.at("seed").get<std::uint64_t>());
  return write_attributions(run_dir / "explain", forest,
                            context.at("max_mean_path_length").get<double>(),
                            context.at("min_mean_path_length").get<double>(), x, rows, reference,
                            mode);
}

}  // namespace procaudit
