#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mta/types.hpp"

namespace mta {

/// Parsed form of one event-log line. Exactly one of touch/action is set.
struct ParsedEvent {
  std::optional<TouchPoint> touch;
  std::optional<ActionEvent> action;
};

struct ParseStats {
  std::size_t total_lines = 0;       // non-blank, non-comment
  std::size_t malformed_lines = 0;
  std::size_t hierarchy_violations = 0;
  std::vector<std::string> samples;  // first few malformed lines, for reporting
};

/// An ingested corpus: per-user histories ordered by (timestamp, ingest_seq),
/// plus the line-item hierarchy observed in the log.
struct EventLog {
  std::vector<UserHistory> users;  // sorted by user_id
  std::vector<LineItemMeta> catalog;
  ParseStats stats;

  const UserHistory* find_user(const std::string& user_id) const;
};

// Event-log line format: space-separated key=value fields, one event per line.
//   type=imp|click user=U ts=T advertiser=A io=IO li=LI cost_minor=C
//   type=action    user=U ts=T advertiser=A io=IO value_minor=V
// Unknown keys are ignored; `#` starts a comment line. An action line
// carrying li, or an imp/click line missing it, is malformed.
std::optional<ParsedEvent> parse_event_line(std::string_view line);

std::string format_event_line(const TouchPoint& tp);
std::string format_event_line(const ActionEvent& action);

EventLog ingest_events(std::istream& in);
EventLog ingest_events_file(const std::string& path);

void write_event_log(std::ostream& out, const EventLog& log);

}  // namespace mta
