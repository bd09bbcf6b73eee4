#include "tmpfc/app/stats_cmd.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "tmpfc/app/report.hpp"
#include "tmpfc/app/svg.hpp"
#include "tmpfc/detect.hpp"
#include "tmpfc/error.hpp"
#include "tmpfc/quantify.hpp"

namespace tmpfc::app {
namespace {

using nlohmann::ordered_json;

ordered_json interval_json(const stats::Interval& i) { return ordered_json::array({i.low, i.high}); }

ordered_json proportion_json(const std::optional<stats::Proportion>& p) {
  if (!p) return nullptr;
  return {{"estimate", p->estimate},
          {"ci", interval_json(p->ci)},
          {"successes", p->successes},
          {"trials", p->trials}};
}

// Paired numeric columns, skipping rows where either cell is empty.
void paired(const Table& t, std::size_t cx, std::size_t cy, std::vector<double>& xs, std::vector<double>& ys) {
  for (const auto& row : t.rows) {
    auto x = parse_real(row[cx]);
    auto y = parse_real(row[cy]);
    if (x && y) {
      xs.push_back(*x);
      ys.push_back(*y);
    }
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

stats::Alternative parse_alternative(const std::string& s) {
  if (s == "increasing") return stats::Alternative::Increasing;
  if (s == "decreasing") return stats::Alternative::Decreasing;
  throw Error(ErrorCode::InvalidParams, "alternative must be increasing or decreasing, got '" + s + "'");
}

stats::TrendMethod parse_trend_method(const std::string& s) {
  if (s == "auto") return stats::TrendMethod::Auto;
  if (s == "exact") return stats::TrendMethod::ExactPermutation;
  if (s == "normal") return stats::TrendMethod::NormalApprox;
  throw Error(ErrorCode::InvalidParams, "method must be auto, exact or normal, got '" + s + "'");
}

StatsOutput stats_agreement(const Table& table) {
  const std::size_t ca = table.find("tmpfc_auto") ? *table.find("tmpfc_auto")
                         : table.find("tmpfc_normalized") ? *table.find("tmpfc_normalized")
                                                          : table.require("tmpfc_auto");
  const std::size_t cm = table.require("tmpfc_manual");
  std::vector<double> a, m;
  paired(table, ca, cm, a, m);
  const auto rep = stats::bland_altman(a, m);

  ordered_json j;
  j["n"] = rep.n;
  j["bias"] = rep.bias;
  j["sd_diff"] = rep.sd_diff;
  j["loa_low"] = rep.loa_low;
  j["loa_high"] = rep.loa_high;
  j["prop_bias_slope"] = rep.prop_bias_slope;
  j["prop_bias_p"] = rep.prop_bias_p;
  if (rep.pearson) {
    j["pearson_r"] = rep.pearson->r;
    j["pearson_p"] = rep.pearson->p;
    j["r_ci"] = interval_json(rep.pearson->ci);
  } else {
    j["pearson_r"] = nullptr;
    j["pearson_p"] = nullptr;
    j["r_ci"] = nullptr;
  }

  std::vector<double> mean(a.size()), diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean[i] = 0.5 * (a[i] + m[i]);
    diff[i] = a[i] - m[i];
  }
  Plot ba(520, 400, "Bland-Altman", "mean of automatic and manual (frames)", "automatic - manual (frames)");
  ba.include(mean, diff);
  ba.points(mean, diff, "#1f77b4");
  ba.hline(rep.bias, "#333333", "bias " + format_real(std::round(rep.bias * 100) / 100), false);
  ba.hline(rep.loa_low, "#d62728", "-1.96 SD " + format_real(std::round(rep.loa_low * 100) / 100));
  ba.hline(rep.loa_high, "#d62728", "+1.96 SD " + format_real(std::round(rep.loa_high * 100) / 100));

  Plot sc(520, 400, "Automatic vs manual", "manual (frames)", "automatic (frames)");
  sc.include(m, a);
  sc.points(m, a, "#1f77b4");
  if (!m.empty()) {
    const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
    const std::vector<double> ends = {*lo, *hi};
    sc.polyline(ends, ends, "#999999", true);
    if (rep.pearson) {
      const auto fit = stats::ols(m, a);
      const std::vector<double> fitted = {fit.predict(*lo), fit.predict(*hi)};
      sc.polyline(ends, fitted, "#d62728");
      sc.note("r = " + format_real(std::round(rep.pearson->r * 1000) / 1000));
    }
  }
  return {dump(j), svg_document({ba, sc})};
}

StatsOutput stats_roc(const Table& table) {
  const std::size_t cs = table.require("tmpfc_normalized");
  const std::size_t cl = table.require("cmvd_label");
  std::vector<double> scores;
  std::vector<bool> labels;
  for (const auto& row : table.rows) {
    auto s = parse_real(row[cs]);
    auto l = parse_bool(row[cl]);
    if (s && l) {
      scores.push_back(*s);
      labels.push_back(*l);
    }
  }
  const auto roc = stats::roc_auc(scores, labels);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));

  ordered_json j;
  j["n"] = scores.size();
  j["positives"] = positives;
  j["negatives"] = scores.size() - positives;
  j["auc"] = roc.auc;
  j["youden_threshold"] = roc.youden_threshold;
  j["youden_value"] = roc.youden_value;
  ordered_json pts = ordered_json::array();
  for (const auto& p : roc.points)
    pts.push_back({{"threshold", p.threshold}, {"sensitivity", p.sensitivity}, {"specificity", p.specificity}});
  j["points"] = std::move(pts);

  // Curve from (0,0) through descending thresholds to (1,1).
  std::vector<double> fpr = {0.0}, tpr = {0.0};
  for (auto it = roc.points.rbegin(); it != roc.points.rend(); ++it) {
    fpr.push_back(1.0 - it->specificity);
    tpr.push_back(it->sensitivity);
  }
  fpr.push_back(1.0);
  tpr.push_back(1.0);
  Plot plot(460, 440, "ROC", "1 - specificity", "sensitivity");
  const std::vector<double> unit = {0.0, 1.0};
  plot.include(unit, unit);
  plot.polyline(unit, unit, "#999999", true);
  plot.polyline(fpr, tpr, "#1f77b4");
  for (const auto& p : roc.points) {
    if (p.threshold == roc.youden_threshold) {
      const std::vector<double> px = {1.0 - p.specificity}, py = {p.sensitivity};
      plot.points(px, py, "#d62728");
    }
  }
  plot.note("AUC " + format_real(std::round(roc.auc * 1000) / 1000));
  plot.note("Youden threshold " + format_real(roc.youden_threshold) + " (J = " +
            format_real(std::round(roc.youden_value * 1000) / 1000) + ")");
  return {dump(j), svg_document({plot})};
}

StatsOutput stats_diagnostic(const Table& table, double threshold) {
  const std::size_t cs = table.require("tmpfc_normalized");
  const std::size_t cl = table.require("cmvd_label");
  std::vector<bool> predicted, actual;
  for (const auto& row : table.rows) {
    auto s = parse_real(row[cs]);
    auto l = parse_bool(row[cl]);
    if (s && l) {
      predicted.push_back(classify_cmvd(*s, threshold));
      actual.push_back(*l);
    }
  }
  const auto rep = stats::diagnostic_metrics(predicted, actual);
  ordered_json j;
  j["threshold"] = threshold;
  j["n"] = predicted.size();
  j["tp"] = rep.tp;
  j["fp"] = rep.fp;
  j["tn"] = rep.tn;
  j["fn"] = rep.fn;
  j["sensitivity"] = proportion_json(rep.sensitivity);
  j["specificity"] = proportion_json(rep.specificity);
  j["ppv"] = proportion_json(rep.ppv);
  j["npv"] = proportion_json(rep.npv);
  return {dump(j), {}};
}

StatsOutput stats_trend(const Table& table, const std::string& covariate, stats::Alternative alternative,
                        stats::TrendMethod method) {
  const std::size_t cb = table.require("band");
  const std::size_t cv = table.require(covariate);
  constexpr std::array<Band, 3> order = {Band::Low, Band::Intermediate, Band::High};
  std::vector<std::vector<double>> groups(order.size());
  for (const auto& row : table.rows) {
    auto band = parse_band(row[cb]);
    auto v = parse_real(row[cv]);
    if (!band || !v) continue;
    auto it = std::find(order.begin(), order.end(), *band);
    if (it != order.end()) groups[static_cast<std::size_t>(it - order.begin())].push_back(*v);
  }
  const auto rep = stats::jonckheere_terpstra(groups, alternative, method);

  ordered_json j;
  j["covariate"] = covariate;
  j["groups"] = ordered_json::array();
  for (std::size_t g = 0; g < order.size(); ++g) {
    ordered_json entry = {{"band", std::string(to_string(order[g]))}, {"n", groups[g].size()}};
    entry["median"] = quantile(groups[g], 0.5);
    j["groups"].push_back(std::move(entry));
  }
  j["alternative"] = std::string(stats::to_string(alternative));
  j["method"] = std::string(stats::to_string(rep.method));
  j["jt_statistic"] = rep.jt_statistic;
  j["null_mean"] = rep.null_mean;
  j["null_variance"] = rep.null_variance;
  j["z"] = rep.z;
  j["p_trend"] = rep.p_trend;

  Plot plot(520, 400, covariate + " by TMPFC band", "band", covariate);
  for (std::size_t g = 0; g < order.size(); ++g) {
    const std::vector<double> xs(groups[g].size(), static_cast<double>(g + 1));
    plot.include(xs, groups[g]);
  }
  plot.include_point(0.4, groups[0].front());
  plot.include_point(3.6, groups[0].front());
  for (std::size_t g = 0; g < order.size(); ++g) {
    const auto& v = groups[g];
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    plot.box(static_cast<double>(g + 1), 0.25, *lo, quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75), *hi,
             "#1f77b4");
    plot.tick_label(static_cast<double>(g + 1), std::string(to_string(order[g])));
  }
  char p_text[48];
  std::snprintf(p_text, sizeof p_text, "p for trend %.4g", rep.p_trend);
  plot.note(p_text);
  return {dump(j), svg_document({plot})};
}

StatsOutput stats_correlate(const Table& table, const std::string& covariate) {
  const std::size_t cx = table.require("tmpfc_normalized");
  const std::size_t cy = table.require(covariate);
  std::vector<double> x, y;
  paired(table, cx, cy, x, y);
  const auto r = stats::pearson(x, y);
  const auto fit = stats::ols(x, y);

  ordered_json j;
  j["covariate"] = covariate;
  j["n"] = r.n;
  j["r"] = r.r;
  j["p"] = r.p;
  j["r_ci"] = interval_json(r.ci);
  j["intercept"] = fit.intercept;
  j["slope"] = fit.slope;
  j["slope_p"] = fit.slope_p;

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  constexpr int kSteps = 50;
  std::vector<double> gx(kSteps + 1), gy(kSteps + 1), band_lo(kSteps + 1), band_hi(kSteps + 1);
  for (int i = 0; i <= kSteps; ++i) {
    gx[i] = *lo + (*hi - *lo) * i / kSteps;
    gy[i] = fit.predict(gx[i]);
    const double h = fit.mean_ci_halfwidth(gx[i]);
    band_lo[i] = gy[i] - h;
    band_hi[i] = gy[i] + h;
  }
  Plot plot(520, 400, covariate + " vs TMPFC", "TMPFC (frames @30fps)", covariate);
  plot.include(x, y);
  plot.include(gx, band_lo);
  plot.include(gx, band_hi);
  plot.fill_between(gx, band_lo, band_hi, "#1f77b4");
  plot.points(x, y, "#333333");
  plot.polyline(gx, gy, "#d62728");
  plot.note("r = " + format_real(std::round(r.r * 1000) / 1000));
  return {dump(j), svg_document({plot})};
}

}  // namespace tmpfc::app
