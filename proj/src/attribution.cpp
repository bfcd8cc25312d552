#include "mta/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>

namespace mta {

double first_order_weight(std::int64_t n_plus, std::int64_t n_minus) {
  const std::int64_t total = n_plus + n_minus;
  if (total == 0) return 0.0;
  return static_cast<double>(n_plus) / static_cast<double>(total);
}

double second_order_weight(const std::string& line_item_id, const WeightTable& table) {
  auto self = table.items.find(line_item_id);
  if (self == table.items.end()) return 0.0;
  const double p_i = first_order_weight(self->second.n_plus, self->second.n_minus);
  const std::size_t n = table.items.size();
  if (n < 2) return p_i;

  double correction = 0.0;
  for (const auto& [other_id, other] : table.items) {
    if (other_id == line_item_id) continue;
    const auto key = line_item_id < other_id ? std::make_pair(line_item_id, other_id)
                                             : std::make_pair(other_id, line_item_id);
    auto pair_it = table.pairs.find(key);
    if (pair_it == table.pairs.end()) continue;  // never co-observed
    const PairStats& ps = pair_it->second;
    if (ps.n_plus + ps.n_minus == 0) continue;
    const double p_ij = first_order_weight(ps.n_plus, ps.n_minus);
    const double p_j = first_order_weight(other.n_plus, other.n_minus);
    correction += p_ij - p_i - p_j;
  }
  const double w = p_i + correction / (2.0 * static_cast<double>(n - 1));
  return w < 0.0 ? 0.0 : w;
}

WeightTable accumulate_stats(const std::vector<SequenceRecord>& records, WeightOrder order) {
  WeightTable table;
  table.order = order;
  for (const SequenceRecord& rec : records) {
    if (table.advertiser_id.empty()) {
      table.advertiser_id = rec.advertiser_id;
    } else if (table.advertiser_id != rec.advertiser_id) {
      throw MixedAdvertiserError("weight table mixes advertisers " + table.advertiser_id +
                                 " and " + rec.advertiser_id);
    }
    const bool converted = rec.label == SequenceLabel::action;
    for (const std::string& li : rec.line_items) {
      LineItemStats& s = table.items[li];
      if (converted) {
        ++s.n_plus;
      } else {
        ++s.n_minus;
      }
    }
    for (const auto& [li, cost] : rec.member_costs) table.items[li].total_cost += cost;
    if (order == WeightOrder::second) {
      for (std::size_t i = 0; i < rec.line_items.size(); ++i) {
        for (std::size_t j = i + 1; j < rec.line_items.size(); ++j) {
          PairStats& ps = table.pairs[{rec.line_items[i], rec.line_items[j]}];
          if (converted) {
            ++ps.n_plus;
          } else {
            ++ps.n_minus;
          }
        }
      }
    }
  }
  return table;
}

void compute_weights(WeightTable& table) {
  for (auto& [li, stats] : table.items) {
    stats.cold_start = (stats.n_plus + stats.n_minus) == 0;
    if (table.order == WeightOrder::first) {
      stats.weight = first_order_weight(stats.n_plus, stats.n_minus);
    } else {
      stats.weight = second_order_weight(li, table);
    }
  }
}

AttributionFractions attribute_action_sequence(const SequenceRecord& record,
                                               const WeightTable& table) {
  AttributionFractions out;
  out.fractions.reserve(record.line_items.size());
  double weight_sum = 0.0;
  for (const std::string& li : record.line_items) {
    auto it = table.items.find(li);
    double w = 0.0;
    if (it == table.items.end()) {
      ++out.missing_members;
    } else {
      w = it->second.weight;
    }
    out.fractions.emplace_back(li, w);
    weight_sum += w;
  }
  if (weight_sum > 0.0) {
    for (auto& [li, w] : out.fractions) w /= weight_sum;
  } else {
    out.uniform_fallback = true;
    const double uniform = 1.0 / static_cast<double>(out.fractions.size());
    for (auto& [li, w] : out.fractions) w = uniform;
  }
  return out;
}

AttributionFractions attribute_lta(const SequenceRecord& record,
                                   const std::vector<TouchPoint>& window_touch_points,
                                   const std::vector<std::size_t>& contributing) {
  (void)record;
  AttributionFractions out;
  // window_touch_points is (timestamp, ingest)-ordered and contributing holds
  // ascending indices, so the last index is the latest touch.
  const TouchPoint& last = window_touch_points.at(contributing.back());
  out.fractions.emplace_back(last.line_item_id, 1.0);
  return out;
}

double compute_roi(Money value, Money cost) {
  if (cost == 0) {
    return value == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(value) / static_cast<double>(cost);
}

std::vector<Money> split_value(Money value,
                               const std::vector<std::pair<std::string, double>>& fractions) {
  std::vector<Money> shares(fractions.size(), 0);
  if (fractions.empty() || value == 0) return shares;
  std::vector<double> remainders(fractions.size(), 0.0);
  Money assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double ideal = fractions[i].second * static_cast<double>(value);
    Money base = static_cast<Money>(std::floor(ideal));
    if (base < 0) base = 0;
    if (base > value) base = value;
    shares[i] = base;
    remainders[i] = ideal - static_cast<double>(base);
    assigned += base;
  }
  Money leftover = value - assigned;
  std::vector<std::size_t> order(fractions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    return a < b;
  });
  for (std::size_t k = 0; leftover > 0; k = (k + 1) % order.size()) {
    ++shares[order[k]];
    --leftover;
  }
  // Floating-point drift in the ideal shares cannot overshoot the total for
  // realistic magnitudes, but stay exact regardless.
  for (std::size_t k = 0; leftover < 0; k = (k + 1) % order.size()) {
    std::size_t idx = order[order.size() - 1 - k];
    if (shares[idx] > 0) {
      --shares[idx];
      ++leftover;
    }
  }
  return shares;
}

InclusionExclusionCheck verify_inclusion_exclusion(const std::vector<SequenceRecord>& records,
                                                   std::size_t max_line_items) {
  InclusionExclusionCheck out;
  std::vector<std::string> lis;
  for (const SequenceRecord& rec : records) {
    lis.insert(lis.end(), rec.line_items.begin(), rec.line_items.end());
  }
  std::sort(lis.begin(), lis.end());
  lis.erase(std::unique(lis.begin(), lis.end()), lis.end());
  out.n_line_items = lis.size();
  if (lis.size() > max_line_items) {
    out.refused = true;
    return out;
  }
  if (records.empty() || lis.empty()) return out;

  std::vector<std::uint32_t> masks;
  std::vector<bool> converted;
  masks.reserve(records.size());
  converted.reserve(records.size());
  for (const SequenceRecord& rec : records) {
    std::uint32_t m = 0;
    for (const std::string& li : rec.line_items) {
      const auto pos = std::lower_bound(lis.begin(), lis.end(), li) - lis.begin();
      m |= 1u << pos;
    }
    masks.push_back(m);
    converted.push_back(rec.label == SequenceLabel::action);
  }

  const double total = static_cast<double>(records.size());
  std::int64_t n_plus = 0;
  for (bool c : converted) n_plus += c ? 1 : 0;
  out.direct = static_cast<double>(n_plus) / total;

  const std::uint32_t full = (lis.size() >= 32) ? ~0u : ((1u << lis.size()) - 1);
  for (std::uint32_t subset = 1; subset <= full; ++subset) {
    std::int64_t sub_plus = 0;
    std::int64_t sub_total = 0;
    for (std::size_t r = 0; r < masks.size(); ++r) {
      if ((masks[r] & subset) == subset) {
        ++sub_total;
        if (converted[r]) ++sub_plus;
      }
    }
    if (sub_total == 0) continue;
    const double p_a_given_s = static_cast<double>(sub_plus) / static_cast<double>(sub_total);
    const double p_s = static_cast<double>(sub_total) / total;
    const double sign = (std::popcount(subset) % 2 == 1) ? 1.0 : -1.0;
    out.decomposed += sign * p_a_given_s * p_s;
  }
  out.abs_diff = std::abs(out.direct - out.decomposed);
  return out;
}

WeightTable compute_weight_table(const std::vector<UserHistory>& users, const WindowConfig& w,
                                 const std::string& advertiser_id, WeightOrder order) {
  WeightTable table;
  table.advertiser_id = advertiser_id;
  table.order = order;
  std::map<std::string, Money> raw_costs;
  for (const UserHistory& user : users) {
    const UserHistory filtered = filter_window(user, w);
    for (const AdvertiserSequences& group : extract_sequences(filtered, w)) {
      if (group.advertiser_id != advertiser_id) continue;
      for (const SequenceRecord& rec : group.records) {
        const bool conv = rec.label == SequenceLabel::action;
        for (const std::string& li : rec.line_items) {
          LineItemStats& s = table.items[li];
          if (conv) {
            ++s.n_plus;
          } else {
            ++s.n_minus;
          }
        }
        if (order == WeightOrder::second) {
          for (std::size_t i = 0; i < rec.line_items.size(); ++i) {
            for (std::size_t j = i + 1; j < rec.line_items.size(); ++j) {
              PairStats& ps = table.pairs[{rec.line_items[i], rec.line_items[j]}];
              if (conv) {
                ++ps.n_plus;
              } else {
                ++ps.n_minus;
              }
            }
          }
        }
      }
      for (const auto& [li, cost] : raw_line_item_costs(group.window_touch_points)) {
        raw_costs[li] += cost;
      }
    }
  }
  for (auto& [li, cost] : raw_costs) table.items[li].total_cost = cost;
  compute_weights(table);
  return table;
}

AttributionResult attribute_all(const std::vector<UserHistory>& users, const WindowConfig& w,
                                const WeightTable& table, AttributionMode mode) {
  AttributionResult result;
  result.advertiser_id = table.advertiser_id;
  result.mode = mode;
  for (const auto& [li, stats] : table.items) {
    (void)stats;
    result.items[li];  // every known line item reports, attributed or not
  }
  for (const UserHistory& user : users) {
    const UserHistory filtered = filter_window(user, w);
    for (const AdvertiserSequences& group : extract_sequences(filtered, w)) {
      if (group.advertiser_id != table.advertiser_id) continue;
      result.unattributable += group.unattributable;
      for (std::size_t r = 0; r < group.records.size(); ++r) {
        const SequenceRecord& rec = group.records[r];
        if (rec.label != SequenceLabel::action) continue;
        const AttributionFractions f =
            mode == AttributionMode::mta
                ? attribute_action_sequence(rec, table)
                : attribute_lta(rec, group.window_touch_points, group.record_touch_indices[r]);
        result.uniform_fallbacks += f.uniform_fallback ? 1 : 0;
        result.missing_members += f.missing_members;
        const std::vector<Money> shares = split_value(rec.action_value, f.fractions);
        for (std::size_t i = 0; i < f.fractions.size(); ++i) {
          AttributionEntry& e = result.items[f.fractions[i].first];
          e.attributed += f.fractions[i].second;
          e.value += shares[i];
        }
        ++result.attributed_actions;
      }
    }
  }
  for (auto& [li, entry] : result.items) {
    auto it = table.items.find(li);
    const Money cost = it == table.items.end() ? 0 : it->second.total_cost;
    entry.roi = compute_roi(entry.value, cost);
  }
  return result;
}

}  // namespace mta
