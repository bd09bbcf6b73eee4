#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tmpfc/app/batch.hpp"
#include "tmpfc/app/config.hpp"
#include "tmpfc/app/pipeline.hpp"
#include "tmpfc/app/report.hpp"
#include "tmpfc/app/stats_cmd.hpp"
#include "tmpfc/app/synth_io.hpp"
#include "tmpfc/app/table.hpp"
#include "tmpfc/error.hpp"
#include "tmpfc/synth.hpp"

namespace fs = std::filesystem;
using namespace tmpfc;

namespace {

constexpr const char* kExitCodes =
    "Exit codes: 0 success (compute: QC pass), 2 compute finished but the case was QC-excluded, 1 error.";

// Flags shared by compute and batch; unset flags leave the config file value.
struct Overrides {
  std::optional<fs::path> config;
  std::optional<int> border_band;
  std::optional<std::int64_t> min_area;
  std::optional<std::int64_t> min_peak;
  std::optional<std::int64_t> min_tmpfc;
  std::optional<double> threshold;
  std::optional<int> jobs;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "run configuration (INI-style sections)")->check(CLI::ExistingFile);
    cmd->add_option("--border-band", border_band, "border band width in pixels");
    cmd->add_option("--min-component-area", min_area, "smallest retained component (pixels)");
    cmd->add_option("--min-peak", min_peak, "QC: minimum peak pixel count");
    cmd->add_option("--min-tmpfc", min_tmpfc, "QC: minimum raw frame count");
    cmd->add_option("--threshold", threshold, "CMVD threshold on the 30 fps count");
  }

  app::RunConfig resolve() const {
    app::RunConfig cfg = config ? app::load_config(*config) : app::RunConfig{};
    if (border_band) cfg.preprocess.border_band_px = *border_band;
    if (min_area) cfg.preprocess.min_component_area_px = *min_area;
    if (min_peak) cfg.qc.min_peak = *min_peak;
    if (min_tmpfc) cfg.qc.min_tmpfc = *min_tmpfc;
    if (threshold) cfg.classification.threshold = *threshold;
    if (jobs) cfg.jobs = *jobs;
    cfg.validate();
    return cfg;
  }
};

int report_error(const Error& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return 1;
}

int cmd_compute(const fs::path& manifest_path, const Overrides& ov, const std::optional<fs::path>& out_dir, bool svg) {
  const auto cfg = ov.resolve();
  const auto manifest = load_manifest(manifest_path);
  const auto outcome = app::run_case(manifest, cfg);
  std::cout << app::csv_header() << '\n' << app::to_csv_line(app::make_row(outcome)) << '\n';
  const fs::path dir = out_dir.value_or(cfg.output_dir);
  fs::create_directories(dir);
  app::write_atomic(dir / (manifest.case_id + ".json"), app::case_json(outcome));
  if (svg) app::write_atomic(dir / (manifest.case_id + ".svg"), app::curve_svg(outcome));
  return outcome.result.qc.verdict == QcVerdict::Pass ? 0 : 2;
}

int cmd_batch(const fs::path& dir, const std::optional<fs::path>& detections, const Overrides& ov,
              const std::optional<fs::path>& out_dir, bool plots) {
  const auto cfg = ov.resolve();
  const auto paths = app::find_manifests(dir);
  std::optional<std::vector<DetectionRecord>> records;
  if (detections) records = load_detection_records(*detections);
  const auto result = app::run_batch(paths, records, cfg, app::BatchOutputs{out_dir.value_or(cfg.output_dir), plots});
  std::fprintf(stderr, "%zu cases: %zu processed, %zu gate-excluded, %zu failed\n", result.rows.size(),
               result.processed, result.gated.size(), result.failures.size());
  for (const auto& f : result.failures)
    std::fprintf(stderr, "  %s: %s %s\n", f.case_id.c_str(), f.code.c_str(), f.message.c_str());
  return result.succeeded() > 0 ? 0 : 1;
}

int cmd_synth(int n, double fraction, double fps, std::uint64_t seed, const fs::path& out, int width, int height) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(ErrorCode::InvalidParams, "cmvd fraction must lie in (0,1)");
  synth::CohortOptions opts;
  opts.width = width;
  opts.height = height;
  const auto cohort = synth::gen_cohort(n, fraction, fps, seed, opts);
  app::write_cohort(out, cohort, opts);
  std::fprintf(stderr, "wrote %d cases to %s\n", n, out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Perfusion frame counting from segmented angiography mask sequences.\n" + std::string(kExitCodes)};
  cli.require_subcommand(1);

  Overrides compute_ov, batch_ov;

  fs::path manifest_path;
  std::optional<fs::path> compute_out;
  bool compute_svg = false;
  auto* compute = cli.add_subcommand("compute", "process one case");
  compute->add_option("manifest", manifest_path, "case manifest (JSON)")->required();
  compute_ov.attach(compute);
  compute->add_option("--out", compute_out, "directory for <case>.json and <case>.svg");
  compute->add_flag("--svg", compute_svg, "also write the curve plot");
  compute->footer(kExitCodes);

  fs::path batch_dir;
  std::optional<fs::path> batch_out, detections;
  bool batch_plots = false;
  auto* batch = cli.add_subcommand("batch", "process every manifest in a directory");
  batch->add_option("manifest_dir", batch_dir, "directory of case manifests")->required();
  batch->add_option("--detections", detections, "lesion detection records for obstructive routing");
  batch_ov.attach(batch);
  batch->add_option("--jobs", batch_ov.jobs, "worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--out", batch_out, "output directory");
  batch->add_flag("--svg", batch_plots, "write plots/<case>.svg");
  batch->footer("Exit code 1 only when no case succeeds.");

  int synth_n = 20, synth_w = 256, synth_h = 256;
  double synth_fraction = 0.5, synth_fps = 15.0;
  std::uint64_t synth_seed = 42;
  fs::path synth_out;
  auto* synth_cmd = cli.add_subcommand("synth", "generate a synthetic cohort on disk");
  synth_cmd->add_option("--n", synth_n, "number of cases")->check(CLI::Range(2, 100000));
  synth_cmd->add_option("--fraction", synth_fraction, "CMVD-positive fraction, in (0,1)");
  synth_cmd->add_option("--fps", synth_fps, "acquisition frame rate")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--width", synth_w, "frame width")->check(CLI::Range(16, 8192));
  synth_cmd->add_option("--height", synth_h, "frame height")->check(CLI::Range(16, 8192));
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  auto* stats_cmd = cli.add_subcommand("stats", "validation statistics on a CSV");
  stats_cmd->require_subcommand(1);
  fs::path stats_input;
  std::optional<fs::path> stats_join, stats_out, stats_svg;
  std::string covariate, alternative = "increasing", method = "auto";
  double diag_threshold = 87.0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", stats_input, "input CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--join", stats_join, "CSV left-joined on case_id")->check(CLI::ExistingFile);
    sub->add_option("--out", stats_out, "report JSON path (default stdout)");
  };
  auto* agreement = stats_cmd->add_subcommand("agreement", "Bland-Altman and correlation, automatic vs manual");
  auto* roc = stats_cmd->add_subcommand("roc", "ROC curve and Youden threshold");
  auto* diagnostic = stats_cmd->add_subcommand("diagnostic", "sensitivity, specificity, PPV, NPV at a threshold");
  auto* trend = stats_cmd->add_subcommand("trend", "Jonckheere-Terpstra trend of a covariate across bands");
  auto* correlate = stats_cmd->add_subcommand("correlate", "correlation and regression against a covariate");
  for (auto* sub : {agreement, roc, diagnostic, trend, correlate}) add_common(sub);
  for (auto* sub : {agreement, roc, trend, correlate}) sub->add_option("--svg", stats_svg, "plot output path");
  diagnostic->add_option("--threshold", diag_threshold, "positive when tmpfc_normalized >= threshold");
  trend->add_option("--covariate", covariate, "covariate column")->required();
  trend->add_option("--alternative", alternative, "increasing or decreasing");
  trend->add_option("--method", method, "auto, exact or normal");
  correlate->add_option("--covariate", covariate, "covariate column")->required();

  CLI11_PARSE(cli, argc, argv);

  try {
    if (*compute) return cmd_compute(manifest_path, compute_ov, compute_out, compute_svg);
    if (*batch) return cmd_batch(batch_dir, detections, batch_ov, batch_out, batch_plots);
    if (*synth_cmd) return cmd_synth(synth_n, synth_fraction, synth_fps, synth_seed, synth_out, synth_w, synth_h);

    app::Table table = app::read_csv(stats_input);
    if (stats_join) table = app::left_join(table, app::read_csv(*stats_join), "case_id");
    app::StatsOutput out;
    if (*agreement) out = app::stats_agreement(table);
    else if (*roc) out = app::stats_roc(table);
    else if (*diagnostic) out = app::stats_diagnostic(table, diag_threshold);
    else if (*trend)
      out = app::stats_trend(table, covariate, app::parse_alternative(alternative), app::parse_trend_method(method));
    else out = app::stats_correlate(table, covariate);
    if (stats_out) app::write_atomic(*stats_out, out.json);
    else std::cout << out.json;
    if (stats_svg && !out.svg.empty()) app::write_atomic(*stats_svg, out.svg);
    return 0;
  } catch (const Error& e) {
    return report_error(e);
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error [IO_ERROR]: %s\n", e.what());
    return 1;
  }
}
