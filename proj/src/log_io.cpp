#include "mta/log_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mta {
namespace {

constexpr std::size_t kMaxMalformedSamples = 5;

std::optional<std::int64_t> parse_i64(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// Splits "k=v" tokens separated by runs of spaces or tabs.
bool tokenize_fields(std::string_view line,
                     std::unordered_map<std::string_view, std::string_view>& out) {
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t end = i;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    std::string_view token = line.substr(i, end - i);
    auto eq = token.find('=');
    if (eq == std::string_view::npos || eq == 0) return false;
    out[token.substr(0, eq)] = token.substr(eq + 1);
    i = end;
  }
  return true;
}

}  // namespace

std::optional<ParsedEvent> parse_event_line(std::string_view line) {
  std::unordered_map<std::string_view, std::string_view> fields;
  if (!tokenize_fields(line, fields)) return std::nullopt;

  auto get = [&](std::string_view key) -> std::optional<std::string_view> {
    auto it = fields.find(key);
    if (it == fields.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };

  auto type = get("type");
  auto user = get("user");
  auto ts_text = get("ts");
  auto advertiser = get("advertiser");
  auto io = get("io");
  if (!type || !user || !ts_text || !advertiser || !io) return std::nullopt;
  auto ts = parse_i64(*ts_text);
  if (!ts) return std::nullopt;

  ParsedEvent event;
  if (*type == "imp" || *type == "click") {
    auto li = get("li");
    auto cost = get("cost_minor");
    if (!li || !cost) return std::nullopt;
    auto cost_minor = parse_i64(*cost);
    if (!cost_minor || *cost_minor < 0) return std::nullopt;
    TouchPoint tp;
    tp.user_id = std::string(*user);
    tp.timestamp = *ts;
    tp.kind = (*type == "imp") ? TouchKind::impression : TouchKind::click;
    tp.line_item_id = std::string(*li);
    tp.insertion_order_id = std::string(*io);
    tp.advertiser_id = std::string(*advertiser);
    tp.cost = *cost_minor;
    event.touch = std::move(tp);
    return event;
  }
  if (*type == "action") {
    // Actions carry no line item; attribution supplies it.
    if (fields.count("li")) return std::nullopt;
    auto value = get("value_minor");
    if (!value) return std::nullopt;
    auto value_minor = parse_i64(*value);
    if (!value_minor || *value_minor < 0) return std::nullopt;
    ActionEvent action;
    action.user_id = std::string(*user);
    action.timestamp = *ts;
    action.advertiser_id = std::string(*advertiser);
    action.insertion_order_id = std::string(*io);
    action.value = *value_minor;
    event.action = std::move(action);
    return event;
  }
  return std::nullopt;
}

std::string format_event_line(const TouchPoint& tp) {
  std::string out = "type=";
  out += (tp.kind == TouchKind::impression) ? "imp" : "click";
  out += " user=" + tp.user_id;
  out += " ts=" + std::to_string(tp.timestamp);
  out += " advertiser=" + tp.advertiser_id;
  out += " io=" + tp.insertion_order_id;
  out += " li=" + tp.line_item_id;
  out += " cost_minor=" + std::to_string(tp.cost);
  return out;
}

std::string format_event_line(const ActionEvent& action) {
  std::string out = "type=action user=" + action.user_id;
  out += " ts=" + std::to_string(action.timestamp);
  out += " advertiser=" + action.advertiser_id;
  out += " io=" + action.insertion_order_id;
  out += " value_minor=" + std::to_string(action.value);
  return out;
}

const UserHistory* EventLog::find_user(const std::string& user_id) const {
  auto it = std::lower_bound(users.begin(), users.end(), user_id,
                             [](const UserHistory& u, const std::string& id) {
                               return u.user_id < id;
                             });
  if (it == users.end() || it->user_id != user_id) return nullptr;
  return &*it;
}

EventLog ingest_events(std::istream& in) {
  EventLog log;
  std::unordered_map<std::string, UserHistory> by_user;
  // line_item -> (io, advertiser); first sighting wins, conflicts rejected.
  std::unordered_map<std::string, std::pair<std::string, std::string>> hierarchy;

  std::string line;
  std::uint64_t seq = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ++log.stats.total_lines;
    auto event = parse_event_line(line);
    if (!event) {
      ++log.stats.malformed_lines;
      if (log.stats.samples.size() < kMaxMalformedSamples)
        log.stats.samples.push_back(line);
      continue;
    }
    if (event->touch) {
      TouchPoint& tp = *event->touch;
      auto [it, inserted] = hierarchy.emplace(
          tp.line_item_id,
          std::make_pair(tp.insertion_order_id, tp.advertiser_id));
      if (!inserted && (it->second.first != tp.insertion_order_id ||
                        it->second.second != tp.advertiser_id)) {
        ++log.stats.hierarchy_violations;
        continue;
      }
      tp.ingest_seq = seq++;
      by_user[tp.user_id].touch_points.push_back(std::move(tp));
    } else {
      ActionEvent& action = *event->action;
      action.ingest_seq = seq++;
      by_user[action.user_id].actions.push_back(std::move(action));
    }
  }

  log.users.reserve(by_user.size());
  for (auto& [user_id, history] : by_user) {
    history.user_id = user_id;
    auto event_order = [](const auto& a, const auto& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.ingest_seq < b.ingest_seq;
    };
    std::sort(history.touch_points.begin(), history.touch_points.end(), event_order);
    std::sort(history.actions.begin(), history.actions.end(), event_order);
    log.users.push_back(std::move(history));
  }
  std::sort(log.users.begin(), log.users.end(),
            [](const UserHistory& a, const UserHistory& b) {
              return a.user_id < b.user_id;
            });

  log.catalog.reserve(hierarchy.size());
  for (const auto& [li, io_adv] : hierarchy)
    log.catalog.push_back({li, io_adv.first, io_adv.second, ""});
  std::sort(log.catalog.begin(), log.catalog.end(),
            [](const LineItemMeta& a, const LineItemMeta& b) {
              return a.line_item_id < b.line_item_id;
            });
  return log;
}

EventLog ingest_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw std::runtime_error("cannot open event log: " + path);
  return ingest_events(in);
}

void write_event_log(std::ostream& out, const EventLog& log) {
  // Merge each user's streams back into (timestamp, ingest_seq) order.
  for (const auto& user : log.users) {
    std::size_t ti = 0, ai = 0;
    while (ti < user.touch_points.size() || ai < user.actions.size()) {
      bool take_touch;
      if (ti >= user.touch_points.size()) {
        take_touch = false;
      } else if (ai >= user.actions.size()) {
        take_touch = true;
      } else {
        const auto& tp = user.touch_points[ti];
        const auto& ac = user.actions[ai];
        take_touch = tp.timestamp != ac.timestamp
                         ? tp.timestamp < ac.timestamp
                         : tp.ingest_seq < ac.ingest_seq;
      }
      if (take_touch)
        out << format_event_line(user.touch_points[ti++]) << '\n';
      else
        out << format_event_line(user.actions[ai++]) << '\n';
    }
  }
}

}  // namespace mta
