#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mta/sequencing.hpp"
#include "mta/types.hpp"

namespace mta {

enum class WeightOrder { first, second };
enum class AttributionMode { lta, mta };

struct MixedAdvertiserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LineItemStats {
  std::int64_t n_plus = 0;   // sequences containing the line item that converted
  std::int64_t n_minus = 0;  // sequences containing it that did not
  double weight = 0.0;
  Money total_cost = 0;  // window spend, each touch-point counted once
  bool cold_start = false;  // no observations when the weight was computed
};

struct PairStats {
  std::int64_t n_plus = 0;
  std::int64_t n_minus = 0;
};

struct WeightTable {
  std::string advertiser_id;
  WeightOrder order = WeightOrder::first;
  std::map<std::string, LineItemStats> items;
  // Joint counts keyed by (lo, hi) with lo < hi; second order only.
  std::map<std::pair<std::string, std::string>, PairStats> pairs;
};

/// Empirical action probability n+/(n+ + n-); 0 when unobserved.
double first_order_weight(std::int64_t n_plus, std::int64_t n_minus);

/// Action probability of a line item corrected by its average pairwise
/// interaction, clamped below at zero. Falls back to the first-order value
/// when the table has fewer than two line items. Pairs never observed
/// together contribute nothing to the correction term.
double second_order_weight(const std::string& line_item_id, const WeightTable& table);

/// Counts per-line-item (and per-pair, for second order) conversion
/// statistics over records of a single advertiser. member_costs accumulate
/// into total_cost. Throws MixedAdvertiserError on mixed input. Weights are
/// left at zero; call compute_weights afterwards.
WeightTable accumulate_stats(const std::vector<SequenceRecord>& records, WeightOrder order);

/// Fills in every item's weight (in line-item order) and cold_start flags.
void compute_weights(WeightTable& table);

struct AttributionFractions {
  // One entry per member line item, summing to 1 (uniform 1/k when every
  // member weight is zero).
  std::vector<std::pair<std::string, double>> fractions;
  bool uniform_fallback = false;
  std::size_t missing_members = 0;  // members absent from the weight table
};

/// Fractional attribution of one converted sequence: each member line item
/// receives weight / sum-of-member-weights.
AttributionFractions attribute_action_sequence(const SequenceRecord& record,
                                               const WeightTable& table);

/// Last-touch attribution: the full fraction goes to the line item of the
/// latest contributing touch-point ((timestamp, ingest) order).
AttributionFractions attribute_lta(const SequenceRecord& record,
                                   const std::vector<TouchPoint>& window_touch_points,
                                   const std::vector<std::size_t>& contributing);

/// value / cost. Zero cost yields 0 for zero value and +infinity otherwise.
double compute_roi(Money value, Money cost);

/// Splits an integer amount by fractions without losing a unit: floor the
/// ideal shares, then hand the remainder out by largest fractional part
/// (ties to the earlier entry). Output is parallel to fractions.
std::vector<Money> split_value(Money value,
                               const std::vector<std::pair<std::string, double>>& fractions);

struct InclusionExclusionCheck {
  bool refused = false;  // too many line items to enumerate
  std::size_t n_line_items = 0;
  double direct = 0.0;      // observed action probability
  double decomposed = 0.0;  // alternating sum over non-empty subsets
  double abs_diff = 0.0;
};

/// Verifies that the alternating-sign subset decomposition of the action
/// probability reproduces the direct estimate. Subsets count records whose
/// line-item set contains them. Refuses above max_line_items.
InclusionExclusionCheck verify_inclusion_exclusion(const std::vector<SequenceRecord>& records,
                                                   std::size_t max_line_items = 12);

struct AttributionEntry {
  double attributed = 0.0;  // fractional actions
  Money value = 0;          // integer value share, conserved per action
  double roi = 0.0;
};

struct AttributionResult {
  std::string advertiser_id;
  AttributionMode mode = AttributionMode::mta;
  std::map<std::string, AttributionEntry> items;
  std::size_t attributed_actions = 0;
  std::size_t unattributable = 0;
  std::size_t uniform_fallbacks = 0;
  std::size_t missing_members = 0;
};

/// Serial reference for the sharded pipeline: computes one advertiser's
/// weight table directly from user histories. Users must arrive sorted by
/// user id; every event must belong to advertiser_id. total_cost counts each
/// in-window touch-point exactly once (member_costs of overlapping action
/// windows double-count, so stats costs are replaced by raw window costs).
WeightTable compute_weight_table(const std::vector<UserHistory>& users, const WindowConfig& w,
                                 const std::string& advertiser_id, WeightOrder order);

/// Serial reference attribution over the same corpus. Iterates users in
/// order and each user's action records in time order, accumulating
/// fractions and integer value shares per line item, then derives ROI from
/// the table's total_cost.
AttributionResult attribute_all(const std::vector<UserHistory>& users, const WindowConfig& w,
                                const WeightTable& table, AttributionMode mode);

}  // namespace mta
