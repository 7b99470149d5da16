#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "procaudit/error.hpp"
#include "procaudit/ingest.hpp"
#include "procaudit/pipeline.hpp"
#include "procaudit/rng.hpp"
#include "procaudit/simd.hpp"
#include "procaudit/synthgen.hpp"

namespace {

using namespace procaudit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

struct GeneratorFlags {
  std::string config;
  std::string preset;
  std::size_t records = 0;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--gen-config", config, "Generator config JSON");
    app->add_option("--preset", preset, "Generator preset")->check(CLI::IsMember({"default", "company1"}));
    app->add_option("--records", records, "Number of records");
    app->add_option("--seed", seed, "Master seed");
  }

  GenConfig build() const {
    GenConfig cfg = preset == "company1" ? GenConfig::company1_like() : GenConfig{};
    if (!config.empty()) cfg = gen_config_from_json(read_json_file(config));
    if (records) cfg.n_records = records;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
  }
};

struct InjectionFlags {
  double rate_point = 0.01;
  double rate_contextual = 0.0;
  double mult_low = 10.0;
  double mult_high = 20.0;
  bool none = false;

  void add(CLI::App* app) {
    app->add_option("--rate-point", rate_point, "Share of rows with an inflated amount");
    app->add_option("--rate-contextual", rate_contextual, "Share of rows with an unusual vendor");
    app->add_option("--mult-low", mult_low, "Lowest amount multiplier");
    app->add_option("--mult-high", mult_high, "Highest amount multiplier (exclusive)");
    app->add_flag("--no-inject", none, "Skip anomaly injection");
  }

  std::optional<AnomalySpec> build() const {
    if (none) return std::nullopt;
    AnomalySpec spec{rate_point, rate_contextual, mult_low, mult_high};
    spec.validate();
    return spec;
  }
};

int run_generate(const GeneratorFlags& gen, const InjectionFlags& inj, const std::string& out,
                 const std::string& truth_path) {
  auto cfg = gen.build();
  Dataset d = generate(cfg);
  if (const auto spec = inj.build()) {
    auto injected = inject_anomalies(d, *spec, derive_seed(cfg.seed, "inject"));
    for (const auto& w : injected.truth.warnings) std::cerr << "warning: " << w << '\n';
    d = std::move(injected.dataset);
    if (!truth_path.empty()) {
      std::ofstream t(truth_path);
      if (!t) throw DataError("cannot write " + truth_path);
      write_ground_truth(t, d, injected.truth);
    }
  }
  save_transactions(out, d);
  std::cout << "wrote " << d.size() << " records to " << out << '\n';
  return kExitOk;
}

int run_profile(const std::string& input, const std::string& json_out) {
  const auto cleaned = clean(load_transactions(input));
  const auto report = profile(cleaned.dataset);
  write_profile_csv(std::cout, report);
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    if (!out) throw DataError("cannot write " + json_out);
    out << to_json(report).dump(2) << '\n';
  }
  return kExitOk;
}

int run_report(const std::string& run_dir) {
  const auto j = read_json_file(run_dir + "/run_report.json");
  const auto& sel = j.at("selection");
  std::cout << "records loaded:   " << j.at("records_loaded") << '\n'
            << "records removed:  " << j.at("records_removed") << '\n'
            << "selected model:   " << sel.at("strategy").get<std::string>() << ", k="
            << sel.at("k") << ", silhouette=" << sel.at("silhouette") << " ("
            << sel.at("structure").get<std::string>() << ")\n"
            << "scored rows:      " << j.at("scored_rows") << '\n'
            << "iforest flagged:  " << j.at("iforest_flagged") << '\n';
  std::cout << "priority groups:\n";
  for (const auto& g : j.at("groups").at("groups")) {
    std::cout << "  priority " << g.at("priority") << " (kmeans=" << g.at("kmeans") << " silhouette=" << g.at("silhouette")
              << " iforest=" << g.at("iforest") << " univariate=" << g.at("univariate") << "): "
              << g.at("total") << '\n';
  }
  std::cout << "stage timings (s):\n";
  for (const auto& [stage, sec] : j.at("timings_seconds").items()) {
    std::cout << "  " << stage << ' ' << sec.get<double>() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procurement transaction anomaly audit"};
  app.require_subcommand(1);
  bool show_isa = false;
  app.add_flag("--isa", show_isa, "Print the selected distance kernel ISA to stderr");

  auto* gen_cmd = app.add_subcommand("generate", "Generate a synthetic transaction CSV");
  GeneratorFlags gen_flags;
  InjectionFlags gen_inject;
  std::string gen_out, gen_truth;
  gen_flags.add(gen_cmd);
  gen_inject.add(gen_cmd);
  gen_cmd->add_option("--out,-o", gen_out, "Output CSV")->required();
  gen_cmd->add_option("--truth", gen_truth, "Ground-truth label CSV");

  auto* prof_cmd = app.add_subcommand("profile", "Print per-column and per-entity statistics");
  std::string prof_input, prof_json;
  prof_cmd->add_option("--input,-i", prof_input, "Transaction CSV")->required();
  prof_cmd->add_option("--json", prof_json, "Also write the profile as JSON");

  auto* det_cmd = app.add_subcommand("detect", "Run the full anomaly detection pipeline");
  std::string det_config, det_input, det_out;
  bool det_generate = false;
  GeneratorFlags det_gen;
  InjectionFlags det_inject;
  std::vector<std::string> det_strategies;
  std::size_t k_min = 0, k_max = 0, top = 0, trees = 0, permutations = 0;
  std::string order;
  bool segregate = false;
  det_cmd->add_option("--config,-c", det_config, "Run config JSON");
  det_cmd->add_option("--input,-i", det_input, "Transaction CSV");
  det_cmd->add_flag("--generate", det_generate, "Generate and inject a synthetic dataset");
  det_gen.add(det_cmd);
  det_inject.add(det_cmd);
  det_cmd->add_option("--out,-o", det_out, "Output directory");
  det_cmd->add_option("--strategies", det_strategies, "Encoding strategies")
      ->delimiter(',')
      ->check(CLI::IsMember({"count", "mean", "median", "mode"}));
  det_cmd->add_option("--k-min", k_min, "Smallest k in the sweep");
  det_cmd->add_option("--k-max", k_max, "Largest k in the sweep");
  det_cmd->add_option("--trees", trees, "Isolation trees");
  det_cmd->add_option("--explain-top", top, "Review-list rows to explain");
  det_cmd->add_option("--permutations", permutations, "Shapley permutations when sampling");
  det_cmd->add_option("--order", order, "Secondary ordering")
      ->check(CLI::IsMember({"silhouette_asc", "iforest_desc", "row_id"}));
  det_cmd->add_flag("--segregate", segregate, "Remove univariate outliers before clustering");

  auto* exp_cmd = app.add_subcommand("explain", "Shapley attributions for a finished run");
  std::string exp_dir;
  std::size_t exp_top = 10;
  exp_cmd->add_option("--run-dir,-r", exp_dir, "Run output directory")->required();
  exp_cmd->add_option("--top,-n", exp_top, "Review-list rows to explain");

  auto* rep_cmd = app.add_subcommand("report", "Summarise a finished run");
  std::string rep_dir;
  rep_cmd->add_option("--run-dir,-r", rep_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (show_isa) std::cerr << "distance kernels: " << simd::to_string(simd::active_kernels().isa) << '\n';

  try {
    if (*gen_cmd) return run_generate(gen_flags, gen_inject, gen_out, gen_truth);
    if (*prof_cmd) return run_profile(prof_input, prof_json);
    if (*rep_cmd) return run_report(rep_dir);
    if (*exp_cmd) {
      for (const auto& p : explain_run(exp_dir, exp_top)) std::cout << p.string() << '\n';
      return kExitOk;
    }

    RunConfig cfg;
    if (!det_config.empty()) cfg = run_config_from_json(read_json_file(det_config));
    if (!det_input.empty()) {
      cfg.input = det_input;
      cfg.generator.reset();
    }
    if (det_generate) {
      cfg.generator = det_gen.build();
      cfg.input.reset();
      if (det_gen.seed) cfg.seed = *det_gen.seed;
    }
    if (det_generate || det_cmd->count("--rate-point") || det_cmd->count("--no-inject")) {
      cfg.injection = det_inject.build();
    }
    if (!cfg.input && !cfg.generator) {
      std::cerr << "detect: one of --input, --generate or --config is required\n"
                << det_cmd->help();
      return kExitUsage;
    }
    if (!det_strategies.empty()) {
      cfg.strategies.clear();
      for (const auto& s : det_strategies) cfg.strategies.push_back(*parse_strategy(s));
    }
    if (k_min) cfg.k_min = k_min;
    if (k_max) cfg.k_max = k_max;
    if (trees) cfg.forest.n_trees = trees;
    if (det_cmd->count("--explain-top")) cfg.explain_top = top;
    if (permutations) cfg.shapley_permutations = permutations;
    if (order == "silhouette_asc") cfg.order = SecondaryOrder::SilhouetteAsc;
    if (order == "iforest_desc") cfg.order = SecondaryOrder::IforestDesc;
    if (order == "row_id") cfg.order = SecondaryOrder::RowId;
    if (segregate) cfg.segregate_univariate = true;
    if (!det_out.empty()) cfg.output_dir = det_out;

    const auto report = run_pipeline(cfg);
    std::cout << "selected " << to_string(report.selection.strategy) << " k=" << report.selection.k
              << " silhouette=" << report.selection.silhouette << '\n'
              << "iforest flagged " << report.iforest_flagged << " of " << report.scored_rows
              << " rows; outputs in " << cfg.output_dir.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.data_error() ? kExitData : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
