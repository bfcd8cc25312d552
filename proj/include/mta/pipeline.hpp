#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mta/attribution.hpp"
#include "mta/log_io.hpp"
#include "mta/types.hpp"

namespace mta {

/// A shard worker failed; carries the shard index. No partial output escapes.
struct PipelineError : std::runtime_error {
  int shard;
  PipelineError(int shard_index, const std::string& message)
      : std::runtime_error("shard " + std::to_string(shard_index) + ": " + message),
        shard(shard_index) {}
};

inline int shard_of_user(const std::string& user_id, int shard_count) {
  return static_cast<int>(fnv1a64(user_id) % static_cast<std::uint64_t>(shard_count));
}

/// Counting-step emission: one per (sequence record, member line item).
/// cost carries the line item's raw window spend exactly once per
/// (user, advertiser), on the first record that mentions the item.
struct Step1Emit {
  std::string line_item_id;
  Money cost = 0;
  std::uint8_t action_seq = 0;
  std::uint8_t no_action_seq = 0;
};

/// Attribution-step emission: one per (converted record, member line item).
/// (user_ord, seq_ord) pin the canonical accumulation order so results do
/// not depend on how users were sharded.
struct Step2Emit {
  std::string line_item_id;
  std::uint32_t user_ord = 0;
  std::uint32_t seq_ord = 0;
  double fraction = 0.0;
  Money value_share = 0;
};

/// Sharded counting step over users sorted by id. Shard-local tallies merge
/// in shard-index order; every aggregate is an integer, so the table is
/// identical for any shard count. Weights are computed on the merged table.
WeightTable run_step1(const std::vector<UserHistory>& users, const WindowConfig& w,
                      const std::string& advertiser_id, WeightOrder order, int shard_count);

/// Sharded attribution step. Emissions are sorted by (line item, user_ord,
/// seq_ord) before the floating-point accumulation, which makes the result
/// byte-identical across shard counts and equal to attribute_all.
AttributionResult run_step2(const std::vector<UserHistory>& users, const WindowConfig& w,
                            const WeightTable& table, AttributionMode mode, int shard_count);

struct AdvertiserOutputs {
  WeightTable weights;
  AttributionResult attribution;
};

/// Both steps for every advertiser present in the log.
std::map<std::string, AdvertiserOutputs> run_pipeline(const EventLog& log, const WindowConfig& w,
                                                      WeightOrder order, AttributionMode mode,
                                                      int shard_count);

}  // namespace mta
