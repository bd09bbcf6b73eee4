#pragma once

#include <optional>
#include <string>

#include "tmpfc/app/table.hpp"
#include "tmpfc/stats.hpp"

namespace tmpfc::app {

struct StatsOutput {
  std::string json;
  std::string svg;
};

/// Needs tmpfc_auto (or tmpfc_normalized from a results file) and tmpfc_manual.
StatsOutput stats_agreement(const Table& table);

/// Needs tmpfc_normalized and cmvd_label.
StatsOutput stats_roc(const Table& table);

/// Predicted positive when tmpfc_normalized >= threshold.
StatsOutput stats_diagnostic(const Table& table, double threshold);

/// Groups LOW < INTERMEDIATE < HIGH from the band column; rows below the
/// threshold or without a band are left out.
StatsOutput stats_trend(const Table& table, const std::string& covariate, stats::Alternative alternative,
                        stats::TrendMethod method);

StatsOutput stats_correlate(const Table& table, const std::string& covariate);

stats::Alternative parse_alternative(const std::string& s);
stats::TrendMethod parse_trend_method(const std::string& s);

}  // namespace tmpfc::app
