#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mta/log_io.hpp"
#include "mta/simulator.hpp"
#include "mta/types.hpp"

namespace mta {

/// Spend-efficiency triple. eCPA and eCPC are empty when their denominator
/// is zero; ROI follows the value/cost convention (0 at 0/0, infinite for
/// value at zero spend).
struct Metrics {
  double roi = 0.0;
  std::optional<double> ecpa;  // minor units per action
  std::optional<double> ecpc;  // minor units per click
};

Metrics compute_metrics(Money spend, double actions, std::int64_t clicks, Money action_value);

/// Spearman rank correlation with average ranks on ties. Returns 0 for
/// fewer than two points or when either side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Two-sided sign test p-value: probability of a split at least this uneven
/// under a fair coin. Ties are excluded by the caller.
double sign_test_p(int wins, int losses);

/// Ground-truth ROI of one line item in a finished arm: causally credited
/// value over actual spend.
double realized_roi(const ArmResult& arm, const std::string& line_item_id);

/// Budget share of one line item over the whole run.
double budget_share(const ArmResult& arm, const std::string& line_item_id);

/// Cumulative spend-efficiency of a finished arm.
Metrics arm_metrics(const ArmResult& arm);

/// Per-day CSV for both arms: arm, day, spend, impressions, clicks,
/// actions, value, cumulative roi/ecpa/ecpc. Money columns appear in minor
/// units and in decimal form.
void write_experiment_csv(std::ostream& os, const ExperimentResult& result);

/// Final per-line-item comparison: budget shares, realized ROI and the
/// attribution each arm believed.
void write_budget_share_csv(std::ostream& os, const ExperimentResult& result);

/// Human-oriented experiment summary.
void write_experiment_summary(std::ostream& os, const ExperimentResult& result);

struct LogReportRow {
  std::string advertiser_id;
  std::string insertion_order_id;
  std::int64_t day = 0;  // days since epoch, UTC
  Money spend = 0;
  std::int64_t impressions = 0;
  std::int64_t clicks = 0;
  std::int64_t actions = 0;
  Money action_value = 0;
};

/// Daily spend/delivery rollup of a raw event log, grouped by
/// (advertiser, insertion order, day), plus a trailing total row per pair.
std::vector<LogReportRow> summarize_log(const EventLog& log);

void write_log_report_csv(std::ostream& os, const std::vector<LogReportRow>& rows);

}  // namespace mta
