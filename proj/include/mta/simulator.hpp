#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mta/allocation.hpp"
#include "mta/attribution.hpp"
#include "mta/types.hpp"

namespace mta {

/// How one simulated line item behaves. Lift and click rate are ground
/// truth the optimizer never sees directly; it only sees the event log.
struct LineItemProfile {
  std::string id;
  double reach = 1.0;         // fraction of the population it can target
  Money cost_min = 0;         // per-impression cost range, inclusive
  Money cost_max = 0;
  double true_lift = 0.0;     // log-odds added per cumulative exposure
  double click_rate = 0.0;    // click probability at neutral affinity
  bool retargeting = false;   // serves only users with a prior click/action
  Money value_min = 0;        // action value range when this item dominates
  Money value_max = 0;
};

struct MarketConfig {
  std::uint64_t seed = 1;
  int days = 12;
  int user_population = 1000;
  Money io_budget_per_day = 0;
  std::string advertiser_id = "adv1";
  std::string insertion_order_id = "io1";
  Timestamp start_time = 1735689600;  // 2025-01-01T00:00:00Z
  std::int64_t t_action_days = 7;
  std::int64_t t_association_days = 30;
  double base_conversion_logit = -6.0;
  double affinity_sigma = 1.0;
  double affinity_click_weight = 1.0;
  int frequency_cap = 5;  // impressions per (user, line item, day)
  Money organic_value_min = 0;  // conversions untouched by any exposure
  Money organic_value_max = 0;
  WeightOrder weight_order = WeightOrder::first;
  AllocationConfig allocation;
  std::vector<LineItemProfile> line_items;
};

/// Parses the JSON scenario format. Unknown or mistyped fields throw
/// std::runtime_error naming the offending field.
MarketConfig load_market_config(std::istream& is);
MarketConfig load_market_config_file(const std::string& path);

enum class Arm { lta, mta };

struct DayStats {
  int day = 0;
  Money planned = 0;
  Money spend = 0;
  std::int64_t impressions = 0;
  std::int64_t clicks = 0;
  std::int64_t actions = 0;
  Money action_value = 0;
  std::map<std::string, Money> li_budget;
  std::map<std::string, Money> li_spend;
};

struct ArmResult {
  Arm arm = Arm::lta;
  std::vector<DayStats> days;
  std::vector<AllocationPlan> plans;  // one per day
  std::vector<TouchPoint> touches;    // the simulated event log
  std::vector<ActionEvent> actions;
  std::map<std::string, Money> cum_budget;
  std::map<std::string, Money> cum_spend;
  // Ground-truth value credit: each conversion's value split over line items
  // proportionally to exposures * true_lift at conversion time.
  std::map<std::string, double> realized_value;
  Money organic_value = 0;  // conversions with no exposure influence
  WeightTable final_weights;
  AttributionResult final_attribution;
};

struct ExperimentResult {
  ArmResult lta;
  ArmResult mta;
};

/// Runs one arm: allocate with yesterday's attribution (last-touch or
/// multi-touch), serve the market, log events, repeat for config.days.
/// Identical seeds share every market-side random draw across arms, so arm
/// differences come from allocation alone.
ArmResult simulate_arm(const MarketConfig& config, Arm arm);

/// Both arms under common random numbers.
ExperimentResult run_experiment(const MarketConfig& config);

/// Groups a simulated event stream into per-user histories sorted by user
/// id, events per user in (timestamp, ingest) order. The simulator's
/// in-memory equivalent of re-reading its own log.
std::vector<UserHistory> build_users(const std::vector<TouchPoint>& touches,
                                     const std::vector<ActionEvent>& actions);

}  // namespace mta
