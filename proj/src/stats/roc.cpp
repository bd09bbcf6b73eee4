#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tmpfc/error.hpp"
#include "tmpfc/stats.hpp"

namespace tmpfc::stats {
namespace {

void require_labels(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if (pos == 0 || pos == labels.size()) throw Error(ErrorCode::SingleClass, "ROC needs both positive and negative labels");
}

}  // namespace

RocReport roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  require_labels(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });

  const auto n_pos = static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), true));
  const std::uint64_t n_neg = labels.size() - n_pos;

  // Sweep ascending; pos_below/neg_below count samples strictly below the threshold.
  struct Step {
    double threshold;
    std::uint64_t pos_at_or_above;
    std::uint64_t neg_at_or_above;
  };
  std::vector<Step> steps;
  std::uint64_t pos_below = 0, neg_below = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double thr = scores[order[k]];
    steps.push_back({thr, n_pos - pos_below, n_neg - neg_below});
    while (k < order.size() && scores[order[k]] == thr) {
      if (labels[order[k]]) ++pos_below;
      else ++neg_below;
      ++k;
    }
  }

  RocReport rep;
  rep.points.reserve(steps.size());
  for (const auto& s : steps) {
    rep.points.push_back({s.threshold, static_cast<double>(s.pos_at_or_above) / static_cast<double>(n_pos),
                          1.0 - static_cast<double>(s.neg_at_or_above) / static_cast<double>(n_neg)});
  }

  // Trapezoids from (0,0) through descending thresholds, in integer half-units
  // of (neg count) x (pos count) so the area is exact.
  std::uint64_t twice_area = 0;
  std::uint64_t prev_pos = 0, prev_neg = 0;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    twice_area += (it->neg_at_or_above - prev_neg) * (it->pos_at_or_above + prev_pos);
    prev_pos = it->pos_at_or_above;
    prev_neg = it->neg_at_or_above;
  }
  rep.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));

  double j = 0.0;
  rep.youden_threshold = youden_threshold(rep, &j).threshold;
  rep.youden_value = j;
  return rep;
}

RocPoint youden_threshold(const RocReport& roc, double* youden_value) {
  if (roc.points.empty()) throw Error(ErrorCode::EmptyInput, "ROC has no points");
  constexpr double kTieTolerance = 1e-12;
  const RocPoint* best = &roc.points.front();
  double best_j = best->sensitivity + best->specificity - 1.0;
  for (const auto& p : roc.points) {
    const double j = p.sensitivity + p.specificity - 1.0;
    if (j > best_j + kTieTolerance) {  // ascending order: first maximiser is the lowest threshold
      best = &p;
      best_j = j;
    }
  }
  if (youden_value) *youden_value = best_j;
  return *best;
}

double concordance(std::span<const double> scores, const std::vector<bool>& labels) {
  require_labels(scores, labels);
  double wins = 0.0;
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

DiagnosticReport diagnostic_metrics(const std::vector<bool>& predicted, const std::vector<bool>& actual) {
  if (predicted.size() != actual.size()) throw Error(ErrorCode::LengthMismatch, "predicted and actual differ in length");
  DiagnosticReport r;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && actual[i]) ++r.tp;
    else if (predicted[i]) ++r.fp;
    else if (actual[i]) ++r.fn;
    else ++r.tn;
  }
  auto prop = [](std::uint64_t k, std::uint64_t n) -> std::optional<Proportion> {
    if (n == 0) return std::nullopt;
    return Proportion{static_cast<double>(k) / static_cast<double>(n), clopper_pearson(k, n), k, n};
  };
  r.sensitivity = prop(r.tp, r.tp + r.fn);
  r.specificity = prop(r.tn, r.tn + r.fp);
  r.ppv = prop(r.tp, r.tp + r.fp);
  r.npv = prop(r.tn, r.tn + r.fn);
  return r;
}

}  // namespace tmpfc::stats
