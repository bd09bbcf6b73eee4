#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tmpfc/quantify.hpp"
#include "tmpfc/types.hpp"

namespace tmpfc::stats {

struct StudyRecord {
  std::string case_id;
  std::optional<double> tmpfc_auto;
  std::optional<double> tmpfc_manual;
  std::optional<bool> cmvd_label;
  std::optional<GroupLabel> group_label;
  std::optional<double> ea_ratio;        // mitral E/A
  std::optional<double> ea_prime_ratio;  // tissue Doppler e'/a'
  std::optional<Band> band;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;   // two-sided, Student t with n-2 df
  Interval ci;      // 95%, Fisher z
  std::size_t n = 0;
};

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_p = 1.0;  // two-sided t-test of slope == 0
  double residual_sd = 0.0;
  double x_mean = 0.0;
  double sxx = 0.0;
  std::size_t n = 0;

  double predict(double x) const { return intercept + slope * x; }
  /// Half-width of the 95% confidence band for the mean response at x.
  double mean_ci_halfwidth(double x) const;
};

struct AgreementReport {
  std::size_t n = 0;
  double bias = 0.0;
  double sd_diff = 0.0;
  double loa_low = 0.0;
  double loa_high = 0.0;
  double prop_bias_slope = 0.0;
  double prop_bias_p = 1.0;
  std::optional<CorrelationResult> pearson;  // absent when either side has zero variance
};

struct RocPoint {
  double threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
};

struct RocReport {
  std::vector<RocPoint> points;  // ascending threshold; rule: score >= threshold -> positive
  double auc = 0.0;
  double youden_threshold = 0.0;
  double youden_value = 0.0;
};

struct Proportion {
  double estimate = 0.0;
  Interval ci;  // Clopper-Pearson 95%
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

struct DiagnosticReport {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<Proportion> sensitivity, specificity, ppv, npv;  // absent when the denominator is zero
};

enum class Alternative { Increasing, Decreasing };
enum class TrendMethod { Auto, ExactPermutation, NormalApprox };

struct TrendReport {
  std::vector<std::size_t> group_sizes;
  double jt_statistic = 0.0;
  double null_mean = 0.0;
  double null_variance = 0.0;
  double z = 0.0;
  double p_trend = 1.0;
  TrendMethod method = TrendMethod::NormalApprox;
};

inline constexpr double kLoaMultiplier = 1.96;
inline constexpr std::size_t kExactTrendMaxN = 12;

// Distribution helpers (Boost.Math underneath).
double normal_cdf(double z);
double student_t_sf_two_sided(double t, double df);
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double level = 0.95);

/// Difference orientation a - b (automatic - manual). Requires n >= 3.
AgreementReport bland_altman(std::span<const double> a, std::span<const double> b);

CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

LinearFit ols(std::span<const double> x, std::span<const double> y);

RocReport roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

/// Max sensitivity+specificity-1 over the ROC points; ties go to the lowest threshold.
RocPoint youden_threshold(const RocReport& roc, double* youden_value = nullptr);

/// Mann-Whitney concordance P(score_pos > score_neg) + 0.5 P(tie).
double concordance(std::span<const double> scores, const std::vector<bool>& labels);

DiagnosticReport diagnostic_metrics(const std::vector<bool>& predicted, const std::vector<bool>& actual);

double jt_statistic(const std::vector<std::vector<double>>& groups);

TrendReport jonckheere_terpstra(const std::vector<std::vector<double>>& groups, Alternative alternative,
                                TrendMethod method = TrendMethod::Auto);

std::string_view to_string(TrendMethod m);
std::string_view to_string(Alternative a);

}  // namespace tmpfc::stats
