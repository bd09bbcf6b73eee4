#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "tmpfc/app/batch.hpp"
#include "tmpfc/app/config.hpp"
#include "tmpfc/app/pipeline.hpp"
#include "tmpfc/app/report.hpp"
#include "tmpfc/app/stats_cmd.hpp"
#include "tmpfc/app/synth_io.hpp"
#include "tmpfc/app/table.hpp"
#include "tmpfc/error.hpp"
#include "tmpfc/synth.hpp"

using namespace tmpfc;
using namespace tmpfc::app;
namespace fs = std::filesystem;

namespace {

const std::vector<std::int64_t> kFixture = {5,  8,  100, 800, 950, 1000, 990, 980, 600, 200, 90,
                                            50, 30, 15,  10,  8,   6,    5,   4,   4,   3};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd =
      std::string(TMPFC_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

// Writes a curve to disk as rendered masks and returns the manifest path.
fs::path write_curve(const fs::path& root, const std::string& id, std::vector<std::int64_t> a, double fps = 15.0,
                     int size = 128) {
  synth::SynthSequence seq;
  seq.curve = testkit::make_curve(std::move(a), Territory::LAD, fps, id);
  synth::RenderParams r;
  r.width = r.height = size;
  return write_sequence(root, synth::render_masks(seq, r));
}

RunConfig loose_config() {
  RunConfig cfg;
  cfg.preprocess.min_component_area_px = 1;  // keep the fixture's single-digit tail
  return cfg;
}

}  // namespace

TEST(Config, ParsesAllSections) {
  const auto cfg = parse_config(R"(
# site overrides
[preprocess]
border_band = 6
min_component_area = 40

[detect]
n1 = 10
q_fill = 0.25

[detect.RCA]
delta1 = 0.8     # RCA fills less uniformly

[qc]
min_peak = 1200
min_tmpfc = 8

[classify]
threshold = 90
bands = [90, 110, 130]

[run]
jobs = 4
output_dir = "out dir"
)");
  EXPECT_EQ(cfg.preprocess.border_band_px, 6);
  EXPECT_EQ(cfg.preprocess.min_component_area_px, 40);
  EXPECT_EQ(cfg.profile[Territory::LAD].n1, 10);
  EXPECT_EQ(cfg.profile[Territory::RCA].n1, 10);
  EXPECT_DOUBLE_EQ(cfg.profile[Territory::LCX].q_fill, 0.25);
  EXPECT_DOUBLE_EQ(cfg.profile[Territory::RCA].delta1, 0.8);
  EXPECT_DOUBLE_EQ(cfg.profile[Territory::LAD].delta1, 0.9);
  EXPECT_EQ(cfg.qc.min_peak, 1200);
  EXPECT_EQ(cfg.qc.min_tmpfc, 8);
  EXPECT_DOUBLE_EQ(cfg.classification.threshold, 90);
  EXPECT_EQ(cfg.classification.bands, (BandBounds{90, 110, 130}));
  EXPECT_EQ(cfg.jobs, 4);
  EXPECT_EQ(cfg.output_dir, fs::path("out dir"));
}

TEST(Config, DefaultsAndErrors) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.profile[Territory::LAD], DetectionParams{});
  EXPECT_EQ(cfg.qc.min_peak, 800);
  EXPECT_EQ(cfg.qc.min_tmpfc, 10);
  EXPECT_DOUBLE_EQ(cfg.classification.threshold, 87);
  EXPECT_EQ(cfg.classification.bands, (BandBounds{87, 114, 124}));

  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
      return std::string(e.what());
    }
    ADD_FAILURE() << "accepted: " << text;
    return std::string();
  };
  EXPECT_NE(message("[detect]\nn3 = 4\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("[nonsense]\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("[qc]\nmin_peak = lots\n").find("expected an integer"), std::string::npos);
  message("[detect]\ndelta2 = 0.95\n");
  message("[classify]\nbands = [87, 114]\n");
  message("[run]\njobs = 0\n");
  message("min_peak = 3\n");
}

TEST(Table, ParseQuotedAndJoin) {
  const auto t = parse_csv("case_id,note,value\na,\"x, y\",1.5\nb,\"say \"\"hi\"\"\",\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][1], "x, y");
  EXPECT_EQ(t.rows[1][1], "say \"hi\"");
  EXPECT_EQ(parse_real(t.rows[0][2]), 1.5);
  EXPECT_FALSE(parse_real(t.rows[1][2]));
  EXPECT_EQ(parse_csv(write_csv(t)).rows, t.rows);

  const auto right = parse_csv("case_id,value,extra\nb,9,true\nc,3,false\n");
  const auto j = left_join(t, right, "case_id");
  EXPECT_EQ(j.header, (std::vector<std::string>{"case_id", "note", "value", "extra"}));
  EXPECT_EQ(j.rows[0][3], "");
  EXPECT_EQ(j.rows[1][3], "true");
  try {
    t.require("tmpfc_manual");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingColumn);
    EXPECT_NE(std::string(e.what()).find("tmpfc_manual"), std::string::npos);
  }
  EXPECT_THROW(parse_csv("a,b\n1\n"), Error);
  EXPECT_THROW(parse_real("12abc"), Error);
  EXPECT_EQ(parse_bool("true"), true);
  EXPECT_THROW(parse_bool("maybe"), Error);
}

TEST(Report, RealFormatting) {
  EXPECT_EQ(format_real(28.0), "28.0");
  EXPECT_EQ(format_real(0.0), "0.0");
  EXPECT_EQ(format_real(26.4), "26.4");
  EXPECT_EQ(format_real(-3.0), "-3.0");
  EXPECT_EQ(format_real(1e300), "1e+300");
}

TEST(Report, RowForWorkedFixture) {
  MaskSequence seq = synth::render_masks({testkit::make_curve(kFixture, Territory::LAD, 15.0, "fixture")}, {64, 64});
  const auto outcome = run_case(seq, loose_config());
  EXPECT_EQ(outcome.curve.a, kFixture);
  EXPECT_EQ(csv_header(),
            "case_id,territory,fps_raw,f_max,a_max,f1,f2,t_f1,t_f2,tmpfc_raw,tmpfc_normalized,qc_verdict,"
            "low_confidence,cmvd_positive,band");
  EXPECT_EQ(to_csv_line(make_row(outcome)), "fixture,LAD,15.0,5,1000,4,18,900.0,4.0,14,28.0,PASS,true,false,BELOW_THRESHOLD");

  const auto doc = nlohmann::json::parse(case_json(outcome));
  EXPECT_EQ(doc["detection"]["median_window"], 3);
  EXPECT_EQ(doc["detection"]["w_max"], nlohmann::json::array({0, 10}));
  EXPECT_DOUBLE_EQ(doc["detection"]["t1"].get<double>(), 26.4);
  EXPECT_EQ(doc["result"]["tmpfc_raw"], 14);
  EXPECT_EQ(doc["curve"]["a"].size(), 21u);

  const auto svg = curve_svg(outcome);
  EXPECT_EQ(svg, curve_svg(outcome));
  EXPECT_NE(svg.find("F1 = 4"), std::string::npos);
  EXPECT_NE(svg.find("F2 = 18"), std::string::npos);
  EXPECT_NE(svg.find("T_F1 = 900.0"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
}

TEST(Report, GateAndErrorRows) {
  Manifest m;
  m.case_id = "g1";
  m.territory = Territory::RCA;
  m.fps_raw = 30;
  EXPECT_EQ(to_csv_line(gate_row(m, {"g1", Route::ExcludeObstructive, "x"})),
            "g1,RCA,30.0,,,,,,,,,EXCLUDE_OBSTRUCTIVE,,,");
  EXPECT_EQ(to_csv_line(error_row("e1", ErrorCode::IoError)), "e1,,,,,,,,,,,ERROR_IO_ERROR,,,");
}

TEST(Report, AtomicWriteReplaces) {
  testkit::TempDir dir("atomic");
  write_atomic(dir / "f.txt", "one");
  write_atomic(dir / "f.txt", "two");
  EXPECT_EQ(slurp(dir / "f.txt"), "two");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1u);
  EXPECT_THROW(write_atomic(dir / "missing" / "f.txt", "x"), Error);
}

TEST(Batch, GateRoutingAndParallelDeterminism) {
  testkit::TempDir dir("batch");
  std::string detections = "[";
  for (int i = 0; i < 10; ++i) {
    const std::string id = "c" + std::to_string(i);
    auto a = kFixture;
    for (auto& v : a) v *= 1 + i % 3;
    write_curve(dir.path(), id, a);
    if (i) detections += ",";
    const char* sev = (i == 2 || i == 5 || i == 7) ? "obstructive" : "non_obstructive";
    detections += R"({"case_id":")" + id + R"(","lesions":[{"box":[1,1,9,9],"severity_class":")" + sev +
                  R"(","confidence":0.7}]})";
  }
  detections += "]";
  const auto records = parse_detection_records(detections);
  const auto paths = find_manifests(dir / "manifests");
  ASSERT_EQ(paths.size(), 10u);

  auto cfg = loose_config();
  cfg.jobs = 1;
  const auto serial = run_batch(paths, records, cfg, BatchOutputs{dir / "serial", true});
  cfg.jobs = 8;
  const auto parallel = run_batch(paths, records, cfg, BatchOutputs{dir / "parallel", false});
  EXPECT_EQ(serial.gated.size(), 3u);
  EXPECT_EQ(serial.processed, 7u);
  EXPECT_EQ(serial.rows.size(), 10u);
  EXPECT_EQ(slurp(dir / "serial" / "results.csv"), slurp(dir / "parallel" / "results.csv"));
  EXPECT_EQ(slurp(dir / "serial" / "summary.json"), slurp(dir / "parallel" / "summary.json"));
  EXPECT_EQ(serial.csv(), parallel.csv());

  int gated = 0;
  for (const auto& r : serial.rows) {
    if (r.qc_verdict == "EXCLUDE_OBSTRUCTIVE") {
      ++gated;
      EXPECT_FALSE(r.tmpfc_raw);
    }
  }
  EXPECT_EQ(gated, 3);
  EXPECT_TRUE(fs::exists(dir / "serial" / "cases" / "c0.json"));
  EXPECT_FALSE(fs::exists(dir / "serial" / "cases" / "c2.json"));
  EXPECT_TRUE(fs::exists(dir / "serial" / "plots" / "c0.svg"));
  const auto summary = nlohmann::json::parse(slurp(dir / "serial" / "summary.json"));
  EXPECT_EQ(summary["gate_excluded"], 3);
  EXPECT_EQ(summary["by_verdict"]["PASS"], 7);
  EXPECT_EQ(summary["excluded"].size(), 3u);
}

TEST(Batch, FailuresAreRecordedAndRunContinues) {
  testkit::TempDir dir("batchfail");
  write_curve(dir.path(), "good", kFixture);
  write_curve(dir.path(), "broken", kFixture);
  fs::remove(dir / "frames" / "broken" / "frame_003.pgm");
  std::ofstream(dir / "manifests" / "zz_bad.json") << R"({"case_id":"bad","territory":"LAD","fps_raw":0,"width":4,"height":4,"frames":["a"]})";
  std::ofstream(dir / "manifests" / "zz_dup.json") << slurp(dir / "manifests" / "good.json");

  const auto result = run_batch(find_manifests(dir / "manifests"), std::nullopt, loose_config());
  EXPECT_EQ(result.processed, 1u);
  EXPECT_EQ(result.failures.size(), 3u);
  std::map<std::string, std::vector<std::string>> verdicts;
  for (const auto& r : result.rows) verdicts[r.case_id].push_back(r.qc_verdict);
  EXPECT_EQ(verdicts["broken"], std::vector<std::string>{"ERROR_IO_ERROR"});
  EXPECT_EQ(verdicts["zz_bad"], std::vector<std::string>{"ERROR_BAD_FPS"});
  EXPECT_EQ(verdicts["good"], (std::vector<std::string>{"PASS", "ERROR_DUPLICATE_CASE"}));
}

TEST(Batch, EmptyDirectory) {
  testkit::TempDir dir("empty");
  try {
    find_manifests(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no manifests found"), std::string::npos);
  }
}

TEST(Batch, InMemoryMatchesOnDisk) {
  testkit::TempDir dir("mem");
  std::vector<MaskSequence> seqs;
  std::vector<fs::path> paths;
  for (int i = 0; i < 4; ++i) {
    synth::SynthParams p;
    p.case_id = "m" + std::to_string(i);
    p.length = 40;
    p.peak = 900 + 100 * i;
    p.noise_sd = 5;
    p.seed = static_cast<std::uint64_t>(i);
    seqs.push_back(synth::render_masks(synth::gen_curve(p), {64, 64}));
    paths.push_back(write_sequence(dir.path(), seqs.back()));
  }
  RunConfig cfg;
  EXPECT_EQ(run_batch(seqs, cfg).csv(), run_batch(paths, std::nullopt, cfg).csv());
}

TEST(StatsCommands, AgreementIdentityAndRoc) {
  Table t{{"case_id", "tmpfc_auto", "tmpfc_manual", "tmpfc_normalized", "cmvd_label"}, {}};
  for (int i = 0; i < 8; ++i) {
    const double v = 50 + 10 * i;
    t.rows.push_back({"c" + std::to_string(i), format_real(v), format_real(v), format_real(v), i >= 4 ? "true" : "false"});
  }
  const auto ag = stats_agreement(t);
  const auto j = nlohmann::json::parse(ag.json);
  EXPECT_EQ(j["bias"], 0.0);
  EXPECT_EQ(j["loa_low"], 0.0);
  EXPECT_EQ(j["loa_high"], 0.0);
  EXPECT_NE(ag.svg.find("Bland-Altman"), std::string::npos);

  const auto roc = nlohmann::json::parse(stats_roc(t).json);
  EXPECT_EQ(roc["auc"], 1.0);
  EXPECT_EQ(roc["youden_threshold"], 90.0);
  const auto diag = nlohmann::json::parse(stats_diagnostic(t, 87).json);
  EXPECT_EQ(diag["tp"], 4);
  EXPECT_EQ(diag["fp"], 0);
}

TEST(StatsCommands, TrendAndCorrelate) {
  Table t{{"case_id", "band", "tmpfc_normalized", "ea"}, {}};
  const char* bands[] = {"LOW", "INTERMEDIATE", "HIGH", "BELOW_THRESHOLD"};
  for (int i = 0; i < 16; ++i) {
    const int b = i % 4;
    t.rows.push_back({"c" + std::to_string(i), bands[b], format_real(90 + 15 * b + i), format_real(1.5 - 0.2 * b - 0.01 * i)});
  }
  const auto tr = nlohmann::json::parse(stats_trend(t, "ea", stats::Alternative::Decreasing, stats::TrendMethod::Auto).json);
  EXPECT_EQ(tr["groups"].size(), 3u);
  EXPECT_EQ(tr["groups"][0]["n"], 4);
  EXPECT_EQ(tr["method"], "EXACT_PERMUTATION");
  EXPECT_EQ(tr["jt_statistic"], 0.0);
  EXPECT_LT(tr["p_trend"].get<double>(), 0.001);

  const auto co = stats_correlate(t, "ea");
  EXPECT_LT(nlohmann::json::parse(co.json)["r"].get<double>(), 0);
  EXPECT_NE(co.svg.find("<polygon"), std::string::npos);
  EXPECT_THROW(stats_trend(t, "missing", stats::Alternative::Increasing, stats::TrendMethod::Auto), Error);
}

TEST(Cli, ComputeExitCodes) {
  testkit::TempDir dir("cli");
  const auto good = write_curve(dir.path(), "fixture", kFixture);
  auto r = run_cli("compute " + good.string() + " --min-component-area 1 --svg --out " + (dir / "out").string(), dir.path());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("fixture,LAD,15.0,5,1000,4,18,900.0,4.0,14,28.0,PASS"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir / "out" / "fixture.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "fixture.svg"));

  auto low = kFixture;
  for (auto& v : low) v /= 2;
  const auto low_path = write_curve(dir.path(), "lowpeak", low);
  r = run_cli("compute " + low_path.string() + " --min-component-area 1 --out " + (dir / "out").string(), dir.path());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("EXCLUDE_LOW_PEAK"), std::string::npos);

  fs::remove(dir / "frames" / "fixture" / "frame_010.pgm");
  r = run_cli("compute " + good.string() + " --out " + (dir / "out2").string(), dir.path());
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "");
  EXPECT_NE(r.err.find("IO_ERROR"), std::string::npos);
}

TEST(Cli, BatchEmptyAndSynthChecks) {
  testkit::TempDir dir("cli2");
  fs::create_directories(dir / "none");
  auto r = run_cli("batch " + (dir / "none").string(), dir.path());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no manifests found"), std::string::npos);

  r = run_cli("synth --n 4 --fraction 0 --out " + (dir / "s").string(), dir.path());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("(0,1)"), std::string::npos);

  r = run_cli("stats roc " + (dir / "stdout.txt").string(), dir.path());
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, SynthIsReproducibleAndFeedsBatchAndStats) {
  testkit::TempDir dir("cli3");
  for (const char* sub : {"a", "b"}) {
    auto r = run_cli("synth --n 20 --seed 42 --fps 15 --width 128 --height 128 --out " + (dir / sub).string(), dir.path());
    ASSERT_EQ(r.code, 0) << r.err;
  }
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a"))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir / "a").string());
  EXPECT_EQ(files.size(), 20u + 2u + [&] {
    std::size_t frames = 0;
    for (const auto& f : files) frames += f.ends_with(".pgm");
    return frames;
  }());
  for (const auto& f : files) ASSERT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;

  const auto m = load_manifest(dir / "a" / "manifests" / "case_0000.json");
  EXPECT_DOUBLE_EQ(m.fps_raw, 15.0);
  const auto truth = read_csv(dir / "a" / "truth.csv");
  EXPECT_EQ(truth.header, (std::vector<std::string>{"case_id", "truth_f1", "truth_f2", "target_normalized", "cmvd_label"}));
  EXPECT_EQ(truth.rows.size(), 20u);

  auto r = run_cli("batch " + (dir / "a" / "manifests").string() + " --jobs 3 --out " + (dir / "res").string(), dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli("stats roc " + (dir / "res" / "results.csv").string() + " --join " + (dir / "a" / "covariates.csv").string() +
                  " --svg " + (dir / "roc.svg").string(),
              dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(nlohmann::json::parse(r.out)["auc"].get<double>(), 0.95);
  EXPECT_TRUE(fs::exists(dir / "roc.svg"));
  r = run_cli("stats agreement " + (dir / "res" / "results.csv").string(), dir.path());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("tmpfc_manual"), std::string::npos);
}
