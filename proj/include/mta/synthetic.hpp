#pragma once

#include <cstdint>
#include <vector>

#include "mta/types.hpp"

namespace mta {

/// Shape of a randomly generated corpus. The defaults give mixed converting
/// and non-converting users over a span wider than the default windows, so
/// boundary behavior gets exercised too.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  int n_users = 100;
  int n_line_items = 6;
  int n_advertisers = 1;
  int max_touches = 8;       // per (user, advertiser), uniform 0..max
  int max_actions = 2;       // per (user, advertiser)
  double action_prob = 0.3;  // chance of each potential action
  Money cost_min = 1;
  Money cost_max = 200;
  Money value_min = 0;
  Money value_max = 10000;
  Timestamp t0 = 1735689600;
  std::int64_t span_seconds = 40 * 86400;
};

/// Deterministic random corpus, users sorted by id, per-user events in
/// (timestamp, ingest) order: the same invariants ingestion guarantees.
std::vector<UserHistory> synthetic_corpus(const SyntheticSpec& spec);

}  // namespace mta
