#include "mta/sequencing.hpp"

#include <algorithm>

namespace mta {

UserHistory filter_window(const UserHistory& history, const WindowConfig& w) {
  UserHistory out;
  out.user_id = history.user_id;
  const Timestamp touch_lo = w.touch_window_start();
  const Timestamp action_lo = w.action_window_start();
  for (const TouchPoint& tp : history.touch_points) {
    if (tp.timestamp >= touch_lo && tp.timestamp <= w.as_of) out.touch_points.push_back(tp);
  }
  for (const ActionEvent& a : history.actions) {
    if (a.timestamp >= action_lo && a.timestamp <= w.as_of) out.actions.push_back(a);
  }
  return out;
}

namespace {

std::vector<std::string> sorted_line_items(const std::vector<TouchPoint>& tps,
                                           const std::vector<std::size_t>& indices) {
  std::vector<std::string> lis;
  lis.reserve(indices.size());
  for (std::size_t i : indices) lis.push_back(tps[i].line_item_id);
  std::sort(lis.begin(), lis.end());
  lis.erase(std::unique(lis.begin(), lis.end()), lis.end());
  return lis;
}

std::map<std::string, Money> member_cost_sums(const std::vector<TouchPoint>& tps,
                                              const std::vector<std::size_t>& indices) {
  std::map<std::string, Money> costs;
  for (std::size_t i : indices) costs[tps[i].line_item_id] += tps[i].cost;
  return costs;
}

}  // namespace

std::vector<AdvertiserSequences> extract_sequences(const UserHistory& history,
                                                   const WindowConfig& w) {
  // Group the (already window-filtered) history per advertiser, preserving
  // the (timestamp, ingest) order within each group.
  std::map<std::string, AdvertiserSequences> groups;
  for (const TouchPoint& tp : history.touch_points) {
    AdvertiserSequences& g = groups[tp.advertiser_id];
    g.advertiser_id = tp.advertiser_id;
    g.window_touch_points.push_back(tp);
  }
  std::map<std::string, std::vector<const ActionEvent*>> actions_by_adv;
  for (const ActionEvent& a : history.actions) {
    actions_by_adv[a.advertiser_id].push_back(&a);
    AdvertiserSequences& g = groups[a.advertiser_id];
    g.advertiser_id = a.advertiser_id;  // advertiser may have actions only
  }

  const std::int64_t assoc = w.association_seconds();
  std::vector<AdvertiserSequences> out;
  out.reserve(groups.size());
  for (auto& [adv, group] : groups) {
    const std::vector<TouchPoint>& tps = group.window_touch_points;
    std::vector<bool> in_any_window(tps.size(), false);
    auto it = actions_by_adv.find(adv);
    if (it != actions_by_adv.end()) {
      for (const ActionEvent* a : it->second) {
        const Timestamp lo = a->timestamp - assoc;
        std::vector<std::size_t> contributing;
        for (std::size_t i = 0; i < tps.size(); ++i) {
          if (tps[i].timestamp >= lo && tps[i].timestamp <= a->timestamp) {
            contributing.push_back(i);
            in_any_window[i] = true;
          }
        }
        if (contributing.empty()) {
          ++group.unattributable;
          continue;
        }
        SequenceRecord rec;
        rec.user_id = history.user_id;
        rec.advertiser_id = adv;
        rec.line_items = sorted_line_items(tps, contributing);
        rec.label = SequenceLabel::action;
        rec.action_value = a->value;
        rec.action_timestamp = a->timestamp;
        rec.member_costs = member_cost_sums(tps, contributing);
        group.records.push_back(std::move(rec));
        group.record_touch_indices.push_back(std::move(contributing));
      }
    }
    std::vector<std::size_t> residual;
    for (std::size_t i = 0; i < tps.size(); ++i) {
      if (!in_any_window[i]) residual.push_back(i);
    }
    if (!residual.empty()) {
      SequenceRecord rec;
      rec.user_id = history.user_id;
      rec.advertiser_id = adv;
      rec.line_items = sorted_line_items(tps, residual);
      rec.label = SequenceLabel::no_action;
      rec.member_costs = member_cost_sums(tps, residual);
      group.records.push_back(std::move(rec));
      group.record_touch_indices.push_back(std::move(residual));
    }
    if (!group.records.empty() || group.unattributable > 0) {
      out.push_back(std::move(group));
    }
  }
  return out;
}

std::vector<SequenceRecord> extract_sequence_records(const UserHistory& history,
                                                     const WindowConfig& w) {
  std::vector<SequenceRecord> out;
  for (AdvertiserSequences& g : extract_sequences(history, w)) {
    for (SequenceRecord& rec : g.records) out.push_back(std::move(rec));
  }
  return out;
}

std::size_t count_unattributable(const UserHistory& history, const WindowConfig& w) {
  std::size_t n = 0;
  for (const AdvertiserSequences& g : extract_sequences(history, w)) n += g.unattributable;
  return n;
}

std::map<std::string, Money> raw_line_item_costs(
    const std::vector<TouchPoint>& window_touch_points) {
  std::map<std::string, Money> costs;
  for (const TouchPoint& tp : window_touch_points) costs[tp.line_item_id] += tp.cost;
  return costs;
}

}  // namespace mta
