// Command-line front end: reproducible experiment runners over the mplc core.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mplc/experiments.hpp"
#include "mplc/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "mplc-out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool matrix_level = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file (defaults used if omitted)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "RNG seed override");
  cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
  cmd->add_flag("--matrix-level", args.matrix_level,
                "bypass the optics and use exact target unitaries");
}

mplc::ExperimentConfig resolve_config(const CommonArgs& args) {
  mplc::ExperimentConfig config;
  if (!args.config_path.empty()) config = mplc::ExperimentConfig::load(args.config_path);
  if (args.seed) config.seed = *args.seed;
  if (args.threads) config.threads = *args.threads;
  if (args.matrix_level) config.matrix_level = true;
  return config;
}

class RunDirectory {
 public:
  RunDirectory(const CommonArgs& args, const mplc::ExperimentConfig& config,
               const std::string& command)
      : dir_(args.out_dir), command_(command), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
    config.save(dir_ / "config.json");
    seed_ = config.seed;
  }

  const fs::path& path() const { return dir_; }

  void write_summary(const json& summary) {
    json j = summary;
    j["schema"] = mplc::kRunSchemaVersion;
    j["command"] = command_;
    std::ofstream out(dir_ / "summary.json");
    out << j.dump(2) << "\n";
  }

  // wall clock lives only here; the numeric outputs stay reproducible
  void write_manifest() {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    json j;
    j["schema"] = mplc::kRunSchemaVersion;
    j["command"] = command_;
    j["seed"] = seed_;
    j["wall_clock_ms"] = elapsed;
    std::ofstream out(dir_ / "manifest.json");
    out << j.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t seed_ = 0;
};

json fidelity_stats(const Eigen::VectorXd& v) {
  json j;
  j["count"] = v.size();
  j["mean"] = v.mean();
  if (v.size() > 1)
    j["std"] = std::sqrt((v.array() - v.mean()).square().sum() / (v.size() - 1));
  return j;
}

int cmd_design(const CommonArgs& args, const std::string& task_name) {
  const mplc::ExperimentConfig config = resolve_config(args);
  RunDirectory run_dir(args, config, "design");
  const mplc::DesignTask task = mplc::make_design_task(config, task_name);
  const mplc::DesignRun device = mplc::design_device(config, task.inputs, task.outputs, task.target);

  json creation;
  creation["task"] = task_name;
  creation["seed"] = config.seed;
  creation["iterations"] = config.designer.iterations;
  creation["angle_fraction"] = config.designer.angle_fraction;
  mplc::save_mask_stack(device.stack, run_dir.path() / (task_name + ".mplc"), creation.dump());
  {
    std::ofstream out(run_dir.path() / "design_report.json");
    out << device.report.to_json() << "\n";
  }
  task.target.save(run_dir.path() / "target_unitary.json");

  json summary;
  summary["task"] = task_name;
  summary["efficiency"] = device.transfer.efficiency;
  summary["unitarity_deviation"] = device.transfer.unitarity_deviation;
  summary["final_mean_fidelity"] = device.report.fidelity_trace.back();
  summary["matrix_statistical_fidelity"] = device.report.matrix_statistical_fidelity;
  run_dir.write_summary(summary);
  run_dir.write_manifest();
  std::cout << "design " << task_name << ": mean mode fidelity "
            << device.report.fidelity_trace.back() << ", efficiency "
            << device.transfer.efficiency << "\n";
  return 0;
}

int cmd_certify(const CommonArgs& args) {
  const mplc::ExperimentConfig config = resolve_config(args);
  RunDirectory run_dir(args, config, "certify");
  const mplc::CertificationRun run = mplc::run_certification(config);

  mplc::save_coincidence_table(run.experiment.table_std, run_dir.path() / "table_std.tsv");
  mplc::save_coincidence_table(run.experiment.table_mub, run_dir.path() / "table_mub.tsv");
  {
    std::ofstream out(run_dir.path() / "certification.json");
    out << run.experiment.result.to_json() << "\n";
  }

  json summary;
  summary["d"] = run.experiment.result.d;
  summary["F_bound"] = run.experiment.result.F_bound;
  summary["F1"] = run.experiment.result.F1;
  summary["certified_dimension"] = run.experiment.result.certified_dimension;
  summary["matrix_level"] = config.matrix_level;
  if (!config.matrix_level) {
    summary["efficiency_std"] = run.efficiency_std;
    summary["efficiency_mub"] = run.efficiency_mub;
  }
  run_dir.write_summary(summary);
  run_dir.write_manifest();
  std::cout << "certify d=" << config.dimension << ": F_bound = "
            << run.experiment.result.F_bound << ", certified dimension "
            << run.experiment.result.certified_dimension << "\n";
  return 0;
}

int cmd_phase_scan(const CommonArgs& args) {
  const mplc::ExperimentConfig config = resolve_config(args);
  RunDirectory run_dir(args, config, "phase-scan");
  const mplc::PhaseScanRun run = mplc::run_phase_scan(config);

  mplc::write_table(run_dir.path() / "fringes.tsv",
                    {"coincidence rate vs scanned input phase(s), MUB measurement"},
                    run.columns, run.rows);
  json summary;
  summary["d"] = config.dimension;
  summary["matrix_level"] = config.matrix_level;
  summary["mean_visibility"] = run.mean_visibility;
  summary["pair_visibility"] = std::vector<double>(
      run.pair_visibility.data(), run.pair_visibility.data() + run.pair_visibility.size());
  run_dir.write_summary(summary);
  run_dir.write_manifest();
  std::cout << "phase-scan d=" << config.dimension << ": mean visibility "
            << run.mean_visibility << "\n";
  return 0;
}

int cmd_haar_bench(const CommonArgs& args) {
  const mplc::ExperimentConfig config = resolve_config(args);
  RunDirectory run_dir(args, config, "haar-bench");
  const mplc::HaarBenchRun run = mplc::run_haar_bench(config);

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < run.statistical_fidelity.size(); ++i)
    rows.push_back({static_cast<double>(i), run.statistical_fidelity(i), run.efficiency(i)});
  mplc::write_table(run_dir.path() / "statistical_fidelity.tsv",
                    {"per-unitary two-photon statistical fidelity"},
                    {"index", "F_s", "efficiency"}, rows);

  std::vector<std::vector<double>> pooled_rows;
  for (int i = 0; i < run.pooled_normalized.size(); ++i)
    pooled_rows.push_back({run.pooled_normalized(i)});
  mplc::write_table(run_dir.path() / "pooled_coincidences.tsv",
                    {"pooled coincidence probabilities normalized by their mean"},
                    {"normalized_rate"}, pooled_rows);

  json summary = fidelity_stats(run.statistical_fidelity);
  summary["porter_thomas_ks"] = run.porter_thomas.ks_statistic;
  summary["porter_thomas_pass"] = run.porter_thomas.pass;
  summary["matrix_level"] = config.matrix_level;
  run_dir.write_summary(summary);
  run_dir.write_manifest();
  std::cout << "haar-bench: mean F_s = " << run.mean_fs << " +- " << run.std_fs
            << ", Porter-Thomas KS = " << run.porter_thomas.ks_statistic << "\n";
  return 0;
}

int cmd_planes_sweep(const CommonArgs& args) {
  const mplc::ExperimentConfig config = resolve_config(args);
  RunDirectory run_dir(args, config, "planes-sweep");
  const auto points = mplc::run_planes_sweep(config);

  std::vector<std::vector<double>> rows;
  json summary_points = json::array();
  for (const auto& p : points) {
    rows.push_back({static_cast<double>(p.planes), p.mean_fs, p.std_fs});
    summary_points.push_back({{"planes", p.planes}, {"mean_fs", p.mean_fs}, {"std_fs", p.std_fs}});
    std::cout << "planes=" << p.planes << ": mean F_s = " << p.mean_fs << " +- " << p.std_fs
              << "\n";
  }
  mplc::write_table(run_dir.path() / "planes_sweep.tsv",
                    {"mean two-photon statistical fidelity vs plane count"},
                    {"planes", "mean_fs", "std_fs"}, rows);
  json summary;
  summary["points"] = summary_points;
  summary["samples_per_point"] = config.samples_per_point;
  run_dir.write_summary(summary);
  run_dir.write_manifest();
  return 0;
}

int cmd_mode_convert(const CommonArgs& args) {
  const mplc::ExperimentConfig config = resolve_config(args);
  RunDirectory run_dir(args, config, "mode-convert");
  const mplc::ModeConvertRun run = mplc::run_mode_convert(config);

  mplc::save_cfd(run.conditional_field_a1, run_dir.path() / "conditional_b_given_a1.cfd");
  mplc::save_cfd(run.conditional_field_a2, run_dir.path() / "conditional_b_given_a2.cfd");
  mplc::write_table(run_dir.path() / "conditional_table.tsv",
                    {"coincidence probabilities, Alice spots x Bob LP modes"},
                    {"P_a1_lp01", "P_a1_lp11", "P_a2_lp01", "P_a2_lp11"},
                    {{run.conditional_table(0, 0), run.conditional_table(0, 1),
                      run.conditional_table(1, 0), run.conditional_table(1, 1)}});

  json summary;
  summary["spot_overlap_a1"] = run.spot_overlap_a1;
  summary["spot_overlap_a2"] = run.spot_overlap_a2;
  summary["lp01_overlap"] = run.lp01_overlap;
  summary["lp11_overlap"] = run.lp11_overlap;
  summary["crosstalk_a1"] = run.crosstalk_a1;
  summary["crosstalk_a2"] = run.crosstalk_a2;
  run_dir.write_summary(summary);
  run_dir.write_manifest();
  std::cout << "mode-convert: LP01 overlap " << run.lp01_overlap << ", LP11 overlap "
            << run.lp11_overlap << ", crosstalk " << run.crosstalk_a1 << "/" << run.crosstalk_a2
            << "\n";
  return 0;
}

int cmd_efficiency(const CommonArgs& args) {
  const mplc::ExperimentConfig config = resolve_config(args);
  RunDirectory run_dir(args, config, "efficiency");
  const mplc::EfficiencyRun run = mplc::run_efficiency(config);

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < run.efficiency.size(); ++i)
    rows.push_back({static_cast<double>(i), run.efficiency(i)});
  mplc::write_table(run_dir.path() / "efficiency.tsv",
                    {"transformation efficiency per Haar design"}, {"index", "efficiency"}, rows);

  json summary;
  summary["mean_efficiency"] = run.mean;
  summary["std_efficiency"] = run.stddev;
  summary["max_singular_value"] = run.max_singular_value;
  summary["count"] = run.efficiency.size();
  run_dir.write_summary(summary);
  run_dir.write_manifest();
  std::cout << "efficiency: mean " << run.mean << " +- " << run.stddev << " over "
            << run.efficiency.size() << " designs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPLC design and two-photon simulation toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string design_task = "identity";

  auto* design = app.add_subcommand("design", "synthesize a mask stack for a target transformation");
  add_common(design, args);
  design->add_option("--task", design_task, "identity | dft | haar")
      ->check(CLI::IsMember({"identity", "dft", "haar"}));

  auto* certify = app.add_subcommand("certify", "two-basis entanglement certification");
  add_common(certify, args);
  auto* phase_scan = app.add_subcommand("phase-scan", "input-phase interference fringes");
  add_common(phase_scan, args);
  auto* haar_bench = app.add_subcommand("haar-bench", "Haar-random transformation benchmark");
  add_common(haar_bench, args);
  auto* planes_sweep = app.add_subcommand("planes-sweep", "statistical fidelity vs plane count");
  add_common(planes_sweep, args);
  auto* mode_convert = app.add_subcommand("mode-convert", "pixel-to-LP-mode conversion task");
  add_common(mode_convert, args);
  auto* efficiency = app.add_subcommand("efficiency", "transformation efficiency statistics");
  add_common(efficiency, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed()) return cmd_design(args, design_task);
    if (certify->parsed()) return cmd_certify(args);
    if (phase_scan->parsed()) return cmd_phase_scan(args);
    if (haar_bench->parsed()) return cmd_haar_bench(args);
    if (planes_sweep->parsed()) return cmd_planes_sweep(args);
    if (mode_convert->parsed()) return cmd_mode_convert(args);
    if (efficiency->parsed()) return cmd_efficiency(args);
  } catch (const std::exception& e) {
    json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 1;
}
