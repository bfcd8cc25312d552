#include "mta/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mta {

Money resolved_learning_budget(const AllocationConfig& cfg, Money io_budget) {
  if (cfg.learning_budget) return *cfg.learning_budget;
  return std::min(io_budget / 20, cfg.learning_budget_cap);
}

Money estimate_capability(const LineItemBudgetState& state, const AllocationConfig& cfg,
                          Money learning_budget) {
  if (state.is_new) return learning_budget;
  Money spend = state.yesterday_spend;
  if (spend > state.yesterday_budget) spend = state.yesterday_budget;
  if (spend < 0) spend = 0;
  const Money headroom = static_cast<Money>(
      std::floor(static_cast<double>(spend) * cfg.explore_rate));
  return std::max(spend + headroom, cfg.min_budget);
}

AllocationPlan greedy_allocate(const std::vector<LineItemBudgetState>& items,
                               const std::vector<Money>& capabilities, Money io_budget,
                               const std::string& insertion_order_id) {
  AllocationPlan plan;
  plan.insertion_order_id = insertion_order_id;
  plan.total_budget = io_budget;
  plan.allocated.reserve(items.size());
  for (const LineItemBudgetState& s : items) plan.allocated.emplace_back(s.line_item_id, 0);

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].roi_estimate != items[b].roi_estimate) {
      return items[a].roi_estimate > items[b].roi_estimate;
    }
    return items[a].line_item_id < items[b].line_item_id;
  });

  Money remaining = io_budget;
  for (std::size_t idx : order) {
    plan.roi_order.push_back(items[idx].line_item_id);
    Money cap = capabilities[idx];
    if (cap < 0) cap = 0;
    const Money assigned = std::min(remaining, cap);
    plan.allocated[idx].second = assigned;
    remaining -= assigned;
    if (cap > 0 && assigned == cap) plan.caps_hit.push_back(items[idx].line_item_id);
  }
  plan.residual = remaining;
  return plan;
}

void redistribute_residual(AllocationPlan& plan) {
  if (plan.residual == 0 || plan.allocated.empty()) return;
  Money total_assigned = 0;
  for (const auto& [li, amount] : plan.allocated) total_assigned += amount;

  const Money residual = plan.residual;
  const std::size_t n = plan.allocated.size();
  if (total_assigned > 0) {
    // Proportional shares with largest-remainder rounding; exact by
    // construction since extras floor the ideal share.
    std::vector<Money> extra(n, 0);
    std::vector<__int128> remainder(n, 0);
    Money handed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const __int128 num = static_cast<__int128>(residual) * plan.allocated[i].second;
      extra[i] = static_cast<Money>(num / total_assigned);
      remainder[i] = num % total_assigned;
      handed += extra[i];
    }
    Money leftover = residual - handed;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
      return a < b;  // entries sit in line-item order already
    });
    for (std::size_t k = 0; leftover > 0 && k < n; ++k) {
      ++extra[order[k]];
      --leftover;
    }
    for (std::size_t i = 0; i < n; ++i) plan.allocated[i].second += extra[i];
  } else {
    const Money each = residual / static_cast<Money>(n);
    Money leftover = residual % static_cast<Money>(n);
    for (std::size_t i = 0; i < n; ++i) {
      plan.allocated[i].second += each + (static_cast<Money>(i) < leftover ? 1 : 0);
    }
    plan.uniform_fallback = true;
  }
  plan.residual = 0;
}

AllocationPlan daily_allocation(Money io_budget, const std::string& insertion_order_id,
                                const AttributionResult& attribution,
                                const std::vector<LineItemBudgetState>& prior_states,
                                const AllocationConfig& cfg) {
  if (io_budget < 0) throw std::invalid_argument("insertion order budget must be non-negative");

  std::set<std::string> ids;
  for (const LineItemBudgetState& s : prior_states) ids.insert(s.line_item_id);
  for (const auto& [li, entry] : attribution.items) {
    (void)entry;
    ids.insert(li);
  }

  const Money learning = resolved_learning_budget(cfg, io_budget);
  std::vector<LineItemBudgetState> states;
  std::vector<Money> capabilities;
  states.reserve(ids.size());
  for (const std::string& li : ids) {
    LineItemBudgetState state;
    auto prior = std::find_if(prior_states.begin(), prior_states.end(),
                              [&](const LineItemBudgetState& s) { return s.line_item_id == li; });
    if (prior != prior_states.end()) state = *prior;
    state.line_item_id = li;
    auto attr = attribution.items.find(li);
    if (attr != attribution.items.end()) {
      state.roi_estimate = attr->second.roi;
    } else {
      state.roi_estimate = 0.0;
      state.is_new = true;  // no fresh evidence, relearn its capability
    }
    if (state.yesterday_spend > state.yesterday_budget) {
      state.yesterday_spend = state.yesterday_budget;
      state.overdelivered = true;
    }
    capabilities.push_back(estimate_capability(state, cfg, learning));
    states.push_back(std::move(state));
  }

  AllocationPlan plan = greedy_allocate(states, capabilities, io_budget, insertion_order_id);
  redistribute_residual(plan);
  return plan;
}

}  // namespace mta
