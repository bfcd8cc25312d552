#include "mta/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <utility>

#include "mta/sequencing.hpp"

namespace mta {

namespace {

std::vector<std::vector<std::size_t>> assign_shards(const std::vector<UserHistory>& users,
                                                    int shard_count) {
  std::vector<std::vector<std::size_t>> shards(static_cast<std::size_t>(shard_count));
  for (std::size_t i = 0; i < users.size(); ++i) {
    shards[static_cast<std::size_t>(shard_of_user(users[i].user_id, shard_count))].push_back(i);
  }
  return shards;
}

template <typename Fn>
void run_shards(int shard_count, Fn&& body) {
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(shard_count));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int s = 0; s < shard_count; ++s) {
    try {
      body(s);
    } catch (...) {
      failures[static_cast<std::size_t>(s)] = std::current_exception();
    }
  }
  for (int s = 0; s < shard_count; ++s) {
    if (!failures[static_cast<std::size_t>(s)]) continue;
    try {
      std::rethrow_exception(failures[static_cast<std::size_t>(s)]);
    } catch (const std::exception& e) {
      throw PipelineError(s, e.what());
    } catch (...) {
      throw PipelineError(s, "unknown failure");
    }
  }
}

void check_shard_count(int shard_count) {
  if (shard_count < 1) throw std::invalid_argument("shard count must be positive");
}

}  // namespace

WeightTable run_step1(const std::vector<UserHistory>& users, const WindowConfig& w,
                      const std::string& advertiser_id, WeightOrder order, int shard_count) {
  check_shard_count(shard_count);
  const auto shards = assign_shards(users, shard_count);

  struct ShardTally {
    std::vector<Step1Emit> emits;
    std::map<std::pair<std::string, std::string>, PairStats> pairs;
  };
  std::vector<ShardTally> tallies(static_cast<std::size_t>(shard_count));

  run_shards(shard_count, [&](int s) {
    ShardTally& tally = tallies[static_cast<std::size_t>(s)];
    for (std::size_t ui : shards[static_cast<std::size_t>(s)]) {
      const UserHistory filtered = filter_window(users[ui], w);
      for (const AdvertiserSequences& group : extract_sequences(filtered, w)) {
        if (group.advertiser_id != advertiser_id) continue;
        const std::map<std::string, Money> raw = raw_line_item_costs(group.window_touch_points);
        std::set<std::string> cost_emitted;
        for (const SequenceRecord& rec : group.records) {
          const bool conv = rec.label == SequenceLabel::action;
          for (const std::string& li : rec.line_items) {
            Step1Emit emit;
            emit.line_item_id = li;
            if (cost_emitted.insert(li).second) emit.cost = raw.at(li);
            emit.action_seq = conv ? 1 : 0;
            emit.no_action_seq = conv ? 0 : 1;
            tally.emits.push_back(std::move(emit));
          }
          if (order == WeightOrder::second) {
            for (std::size_t i = 0; i < rec.line_items.size(); ++i) {
              for (std::size_t j = i + 1; j < rec.line_items.size(); ++j) {
                PairStats& ps = tally.pairs[{rec.line_items[i], rec.line_items[j]}];
                if (conv) {
                  ++ps.n_plus;
                } else {
                  ++ps.n_minus;
                }
              }
            }
          }
        }
      }
    }
  });

  // Integer aggregates are order-free; merging shard by shard is exact.
  WeightTable table;
  table.advertiser_id = advertiser_id;
  table.order = order;
  for (const ShardTally& tally : tallies) {
    for (const Step1Emit& emit : tally.emits) {
      LineItemStats& s = table.items[emit.line_item_id];
      s.n_plus += emit.action_seq;
      s.n_minus += emit.no_action_seq;
      s.total_cost += emit.cost;
    }
    for (const auto& [key, ps] : tally.pairs) {
      PairStats& merged = table.pairs[key];
      merged.n_plus += ps.n_plus;
      merged.n_minus += ps.n_minus;
    }
  }
  compute_weights(table);
  return table;
}

AttributionResult run_step2(const std::vector<UserHistory>& users, const WindowConfig& w,
                            const WeightTable& table, AttributionMode mode, int shard_count) {
  check_shard_count(shard_count);
  const auto shards = assign_shards(users, shard_count);

  struct ShardOutput {
    std::vector<Step2Emit> emits;
    std::size_t attributed_actions = 0;
    std::size_t unattributable = 0;
    std::size_t uniform_fallbacks = 0;
    std::size_t missing_members = 0;
  };
  std::vector<ShardOutput> outputs(static_cast<std::size_t>(shard_count));

  run_shards(shard_count, [&](int s) {
    ShardOutput& out = outputs[static_cast<std::size_t>(s)];
    for (std::size_t ui : shards[static_cast<std::size_t>(s)]) {
      const UserHistory filtered = filter_window(users[ui], w);
      for (const AdvertiserSequences& group : extract_sequences(filtered, w)) {
        if (group.advertiser_id != table.advertiser_id) continue;
        out.unattributable += group.unattributable;
        std::uint32_t seq_ord = 0;
        for (std::size_t r = 0; r < group.records.size(); ++r) {
          const SequenceRecord& rec = group.records[r];
          if (rec.label != SequenceLabel::action) continue;
          const AttributionFractions f =
              mode == AttributionMode::mta
                  ? attribute_action_sequence(rec, table)
                  : attribute_lta(rec, group.window_touch_points, group.record_touch_indices[r]);
          out.uniform_fallbacks += f.uniform_fallback ? 1 : 0;
          out.missing_members += f.missing_members;
          const std::vector<Money> shares = split_value(rec.action_value, f.fractions);
          for (std::size_t i = 0; i < f.fractions.size(); ++i) {
            Step2Emit emit;
            emit.line_item_id = f.fractions[i].first;
            emit.user_ord = static_cast<std::uint32_t>(ui);
            emit.seq_ord = seq_ord;
            emit.fraction = f.fractions[i].second;
            emit.value_share = shares[i];
            out.emits.push_back(std::move(emit));
          }
          ++out.attributed_actions;
          ++seq_ord;
        }
      }
    }
  });

  std::vector<Step2Emit> all;
  std::size_t total = 0;
  for (const ShardOutput& out : outputs) total += out.emits.size();
  all.reserve(total);
  for (ShardOutput& out : outputs) {
    std::move(out.emits.begin(), out.emits.end(), std::back_inserter(all));
  }
  // Canonical accumulation order: floating-point sums repeat the serial
  // reference's additions one for one, whatever the shard count was.
  std::sort(all.begin(), all.end(), [](const Step2Emit& a, const Step2Emit& b) {
    if (a.line_item_id != b.line_item_id) return a.line_item_id < b.line_item_id;
    if (a.user_ord != b.user_ord) return a.user_ord < b.user_ord;
    return a.seq_ord < b.seq_ord;
  });

  AttributionResult result;
  result.advertiser_id = table.advertiser_id;
  result.mode = mode;
  for (const auto& [li, stats] : table.items) {
    (void)stats;
    result.items[li];
  }
  for (const Step2Emit& emit : all) {
    AttributionEntry& e = result.items[emit.line_item_id];
    e.attributed += emit.fraction;
    e.value += emit.value_share;
  }
  for (const ShardOutput& out : outputs) {
    result.attributed_actions += out.attributed_actions;
    result.unattributable += out.unattributable;
    result.uniform_fallbacks += out.uniform_fallbacks;
    result.missing_members += out.missing_members;
  }
  for (auto& [li, entry] : result.items) {
    auto it = table.items.find(li);
    const Money cost = it == table.items.end() ? 0 : it->second.total_cost;
    entry.roi = compute_roi(entry.value, cost);
  }
  return result;
}

std::map<std::string, AdvertiserOutputs> run_pipeline(const EventLog& log, const WindowConfig& w,
                                                      WeightOrder order, AttributionMode mode,
                                                      int shard_count) {
  std::set<std::string> advertisers;
  for (const UserHistory& user : log.users) {
    for (const TouchPoint& tp : user.touch_points) advertisers.insert(tp.advertiser_id);
    for (const ActionEvent& a : user.actions) advertisers.insert(a.advertiser_id);
  }
  std::map<std::string, AdvertiserOutputs> out;
  for (const std::string& adv : advertisers) {
    AdvertiserOutputs& o = out[adv];
    o.weights = run_step1(log.users, w, adv, order, shard_count);
    o.attribution = run_step2(log.users, w, o.weights, mode, shard_count);
  }
  return out;
}

}  // namespace mta
