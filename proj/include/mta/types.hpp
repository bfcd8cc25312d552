#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mta {

/// Money is a count of minor currency units (cents). All aggregation is
/// integer-exact; floating point enters only for weights, fractions and ROI.
using Money = std::int64_t;

/// UTC epoch seconds.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

enum class TouchKind { impression, click };

struct TouchPoint {
  std::string user_id;
  Timestamp timestamp = 0;
  TouchKind kind = TouchKind::impression;
  std::string line_item_id;
  std::string insertion_order_id;
  std::string advertiser_id;
  Money cost = 0;
  // Breaks equal-timestamp ties so "last touch" is unique.
  std::uint64_t ingest_seq = 0;
};

struct ActionEvent {
  std::string user_id;
  Timestamp timestamp = 0;
  std::string advertiser_id;
  std::string insertion_order_id;
  Money value = 0;
  std::uint64_t ingest_seq = 0;
};

/// Attribution window parameters. Durations are whole days; the windows
/// themselves are closed intervals ending at as_of.
struct WindowConfig {
  std::int64_t t_action_days = 7;
  std::int64_t t_association_days = 30;
  Timestamp as_of = 0;

  Timestamp action_window_start() const {
    return as_of - t_action_days * kSecondsPerDay;
  }
  Timestamp touch_window_start() const {
    return as_of - (t_action_days + t_association_days) * kSecondsPerDay;
  }
  std::int64_t association_seconds() const {
    return t_association_days * kSecondsPerDay;
  }
};

/// One user's events, both lists ordered by (timestamp, ingest_seq).
struct UserHistory {
  std::string user_id;
  std::vector<TouchPoint> touch_points;
  std::vector<ActionEvent> actions;
};

struct LineItemMeta {
  std::string line_item_id;
  std::string insertion_order_id;
  std::string advertiser_id;
  std::string display_name;
};

struct CatalogViolation {
  enum class Kind { duplicate_line_item, orphan_insertion_order };
  Kind kind;
  std::string id;
  std::string detail;
};

struct CatalogValidation {
  std::vector<CatalogViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Accepts iff line_item -> (insertion_order, advertiser) is single-valued
/// and each insertion order maps to exactly one advertiser.
CatalogValidation validate_catalog(const std::vector<LineItemMeta>& catalog);

/// FNV-1a. Used wherever a stable, platform-independent hash is required
/// (user sharding, RNG stream derivation).
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 14695981039346656037ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 14695981039346656037ULL) {
  return fnv1a64(s.data(), s.size(), h);
}

}  // namespace mta
