#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mta/attribution.hpp"
#include "mta/types.hpp"

namespace mta {

struct AllocationConfig {
  // Daily budget for line items without a usable spend history. Unset means
  // 5% of the order budget, capped at learning_budget_cap.
  std::optional<Money> learning_budget;
  Money learning_budget_cap = 1'000'000;
  double explore_rate = 0.10;  // headroom over yesterday's spend
  Money min_budget = 0;        // capability floor for known line items
};

struct LineItemBudgetState {
  std::string line_item_id;
  double roi_estimate = 0.0;  // may be +infinity (value at zero cost)
  Money yesterday_budget = 0;
  Money yesterday_spend = 0;
  bool is_new = true;
  bool overdelivered = false;  // spend exceeded budget and was clipped
};

struct AllocationPlan {
  std::string insertion_order_id;
  Money total_budget = 0;
  std::vector<std::pair<std::string, Money>> allocated;  // line-item order
  Money residual = 0;  // budget no capability absorbed
  std::vector<std::string> roi_order;   // descending-ROI visit order
  std::vector<std::string> caps_hit;    // line items capped at capability
  bool uniform_fallback = false;        // residual split evenly (all-zero plan)
};

Money resolved_learning_budget(const AllocationConfig& cfg, Money io_budget);

/// Tomorrow's spend capability: the learning budget for new line items,
/// otherwise yesterday's (clipped) spend plus explore_rate headroom, floored
/// at min_budget.
Money estimate_capability(const LineItemBudgetState& state, const AllocationConfig& cfg,
                          Money learning_budget);

/// Greedy assignment: visit line items by descending ROI (ties by id) and
/// give each min(remaining, capability). Unassignable budget lands in
/// residual.
AllocationPlan greedy_allocate(const std::vector<LineItemBudgetState>& items,
                               const std::vector<Money>& capabilities, Money io_budget,
                               const std::string& insertion_order_id);

/// Spreads the residual proportionally to what greedy assigned, conserving
/// the total exactly (largest-remainder rounding). An all-zero plan splits
/// evenly instead and sets uniform_fallback.
void redistribute_residual(AllocationPlan& plan);

/// One day's full decision for an insertion order: merge prior states with
/// fresh attribution ROI (line items absent from the attribution count as
/// new), clip overdelivery, estimate capabilities, run greedy, redistribute.
AllocationPlan daily_allocation(Money io_budget, const std::string& insertion_order_id,
                                const AttributionResult& attribution,
                                const std::vector<LineItemBudgetState>& prior_states,
                                const AllocationConfig& cfg);

}  // namespace mta
