#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mta/types.hpp"

namespace mta {

enum class SequenceLabel { action, no_action };

/// A deduplicated set of line items extracted from one touch-point sequence,
/// labeled by whether the sequence ended in an action.
struct SequenceRecord {
  std::string user_id;
  std::string advertiser_id;
  std::vector<std::string> line_items;  // sorted, deduplicated, non-empty
  SequenceLabel label = SequenceLabel::no_action;
  Money action_value = 0;          // label == action only
  Timestamp action_timestamp = 0;  // label == action only
  // Cost of every contributing touch-point, summed per line item. A
  // touch-point inside two overlapping action windows contributes to both
  // records' member_costs; physical spend totals are derived from
  // raw_line_item_costs instead.
  std::map<std::string, Money> member_costs;
};

/// Sequences of one (user, advertiser): action records in action-time order
/// followed by at most one residual no-action record.
struct AdvertiserSequences {
  std::string advertiser_id;
  // The advertiser's window-filtered touch-points, (timestamp, ingest) order.
  std::vector<TouchPoint> window_touch_points;
  std::vector<SequenceRecord> records;
  // Parallel to records: indices into window_touch_points that contributed.
  std::vector<std::vector<std::size_t>> record_touch_indices;
  std::size_t unattributable = 0;  // in-window actions with empty windows
};

/// Retains actions in [as_of - t_action, as_of] and touch-points in
/// [as_of - (t_action + t_association), as_of], both endpoints inclusive.
UserHistory filter_window(const UserHistory& history, const WindowConfig& w);

/// Extracts labeled sequences from a window-filtered history, one group per
/// advertiser (sorted by advertiser id). Each action of advertiser A yields
/// one action record over A's touch-points within [a.ts - t_association,
/// a.ts]; touch-points of A in no action window collapse into a single
/// residual no-action record.
std::vector<AdvertiserSequences> extract_sequences(const UserHistory& history,
                                                   const WindowConfig& w);

/// Flattened records of extract_sequences, for single-stream consumers.
std::vector<SequenceRecord> extract_sequence_records(const UserHistory& history,
                                                     const WindowConfig& w);

std::size_t count_unattributable(const UserHistory& history, const WindowConfig& w);

/// Per-line-item cost over a window-filtered touch list, each touch-point
/// counted exactly once. This is the "money spent" aggregate.
std::map<std::string, Money> raw_line_item_costs(
    const std::vector<TouchPoint>& window_touch_points);

}  // namespace mta
