#include "mta/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mta {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

namespace {

bool parse_i64(std::string_view text, std::int64_t& out) {
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

[[noreturn]] void bad_line(const char* what, std::size_t line_no, std::string_view line) {
  std::ostringstream msg;
  msg << what << " at line " << line_no << ": " << line;
  throw std::runtime_error(msg.str());
}

// Pulls "key=value" out of a header comment; empty when absent.
std::string header_field(std::string_view line, std::string_view key) {
  std::string needle(key);
  needle += '=';
  const std::size_t pos = line.find(needle);
  if (pos == std::string_view::npos) return {};
  const std::size_t start = pos + needle.size();
  std::size_t end = line.find(' ', start);
  if (end == std::string_view::npos) end = line.size();
  return std::string(line.substr(start, end - start));
}

struct LineReader {
  explicit LineReader(std::istream& stream) : is(stream) {}

  std::istream& is;
  std::size_t line_no = 0;
  std::string line;

  bool next() {
    while (std::getline(is, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return true;
    }
    return false;
  }
};

}  // namespace

void write_weight_table(std::ostream& os, const WeightTable& table) {
  os << "# weights advertiser=" << table.advertiser_id << " order="
     << (table.order == WeightOrder::first ? "first" : "second") << "\n";
  os << "# columns: li <id> <n_plus> <n_minus> <weight> <total_cost_minor> <cold_start>\n";
  if (table.order == WeightOrder::second) {
    os << "# columns: pair <lo> <hi> <n_plus> <n_minus>\n";
  }
  for (const auto& [li, s] : table.items) {
    os << "li\t" << li << '\t' << s.n_plus << '\t' << s.n_minus << '\t'
       << format_double(s.weight) << '\t' << s.total_cost << '\t' << (s.cold_start ? 1 : 0)
       << "\n";
  }
  for (const auto& [key, ps] : table.pairs) {
    os << "pair\t" << key.first << '\t' << key.second << '\t' << ps.n_plus << '\t' << ps.n_minus
       << "\n";
  }
}

WeightTable read_weight_table(std::istream& is) {
  WeightTable table;
  LineReader reader(is);
  bool saw_header = false;
  while (reader.next()) {
    const std::string& line = reader.line;
    if (line[0] == '#') {
      if (!saw_header && line.find("# weights") == 0) {
        table.advertiser_id = header_field(line, "advertiser");
        const std::string order = header_field(line, "order");
        if (order == "first") {
          table.order = WeightOrder::first;
        } else if (order == "second") {
          table.order = WeightOrder::second;
        } else {
          bad_line("unknown weight order", reader.line_no, line);
        }
        saw_header = true;
      }
      continue;
    }
    if (!saw_header) bad_line("weight rows before header", reader.line_no, line);
    const auto f = split_tabs(line);
    if (f[0] == "li") {
      LineItemStats s;
      std::int64_t cold = 0;
      double w = 0.0;
      if (f.size() != 7 || !parse_i64(f[2], s.n_plus) || !parse_i64(f[3], s.n_minus) ||
          !parse_double(f[4], w) || !parse_i64(f[5], s.total_cost) || !parse_i64(f[6], cold)) {
        bad_line("malformed weight row", reader.line_no, line);
      }
      s.weight = w;
      s.cold_start = cold != 0;
      table.items[std::string(f[1])] = s;
    } else if (f[0] == "pair") {
      PairStats ps;
      if (f.size() != 5 || !parse_i64(f[3], ps.n_plus) || !parse_i64(f[4], ps.n_minus)) {
        bad_line("malformed pair row", reader.line_no, line);
      }
      table.pairs[{std::string(f[1]), std::string(f[2])}] = ps;
    } else {
      bad_line("unknown row kind", reader.line_no, line);
    }
  }
  if (!saw_header) throw std::runtime_error("weight table header missing");
  return table;
}

void write_attribution(std::ostream& os, const AttributionResult& result) {
  os << "# attribution advertiser=" << result.advertiser_id << " mode="
     << (result.mode == AttributionMode::mta ? "mta" : "lta") << "\n";
  os << "# attributed_actions=" << result.attributed_actions
     << " unattributable=" << result.unattributable
     << " uniform_fallbacks=" << result.uniform_fallbacks
     << " missing_members=" << result.missing_members << "\n";
  os << "# columns: li <id> <attributed> <value_minor> <roi>\n";
  for (const auto& [li, e] : result.items) {
    os << "li\t" << li << '\t' << format_double(e.attributed) << '\t' << e.value << '\t'
       << format_double(e.roi) << "\n";
  }
}

AttributionResult read_attribution(std::istream& is) {
  AttributionResult result;
  LineReader reader(is);
  bool saw_header = false;
  while (reader.next()) {
    const std::string& line = reader.line;
    if (line[0] == '#') {
      if (line.find("# attribution") == 0) {
        result.advertiser_id = header_field(line, "advertiser");
        const std::string mode = header_field(line, "mode");
        if (mode == "mta") {
          result.mode = AttributionMode::mta;
        } else if (mode == "lta") {
          result.mode = AttributionMode::lta;
        } else {
          bad_line("unknown attribution mode", reader.line_no, line);
        }
        saw_header = true;
      } else if (line.find("# attributed_actions=") == 0) {
        std::int64_t v = 0;
        if (parse_i64(header_field(line, "attributed_actions"), v)) {
          result.attributed_actions = static_cast<std::size_t>(v);
        }
        if (parse_i64(header_field(line, "unattributable"), v)) {
          result.unattributable = static_cast<std::size_t>(v);
        }
        if (parse_i64(header_field(line, "uniform_fallbacks"), v)) {
          result.uniform_fallbacks = static_cast<std::size_t>(v);
        }
        if (parse_i64(header_field(line, "missing_members"), v)) {
          result.missing_members = static_cast<std::size_t>(v);
        }
      }
      continue;
    }
    if (!saw_header) bad_line("attribution rows before header", reader.line_no, line);
    const auto f = split_tabs(line);
    AttributionEntry e;
    if (f.size() != 5 || f[0] != "li" || !parse_double(f[2], e.attributed) ||
        !parse_i64(f[3], e.value) || !parse_double(f[4], e.roi)) {
      bad_line("malformed attribution row", reader.line_no, line);
    }
    result.items[std::string(f[1])] = e;
  }
  if (!saw_header) throw std::runtime_error("attribution header missing");
  return result;
}

void write_plan(std::ostream& os, const AllocationPlan& plan) {
  os << "# plan io=" << plan.insertion_order_id << " budget_minor=" << plan.total_budget << "\n";
  os << "# residual_minor=" << plan.residual
     << " uniform_fallback=" << (plan.uniform_fallback ? 1 : 0) << "\n";
  os << "# roi_order=";
  for (std::size_t i = 0; i < plan.roi_order.size(); ++i) {
    os << (i ? "," : "") << plan.roi_order[i];
  }
  os << "\n# caps_hit=";
  for (std::size_t i = 0; i < plan.caps_hit.size(); ++i) {
    os << (i ? "," : "") << plan.caps_hit[i];
  }
  os << "\n# columns: li <id> <budget_minor>\n";
  for (const auto& [li, amount] : plan.allocated) {
    os << "li\t" << li << '\t' << amount << "\n";
  }
}

namespace {

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

AllocationPlan read_plan(std::istream& is) {
  AllocationPlan plan;
  LineReader reader(is);
  bool saw_header = false;
  while (reader.next()) {
    const std::string& line = reader.line;
    if (line[0] == '#') {
      if (line.find("# plan") == 0) {
        plan.insertion_order_id = header_field(line, "io");
        if (!parse_i64(header_field(line, "budget_minor"), plan.total_budget)) {
          bad_line("malformed plan header", reader.line_no, line);
        }
        saw_header = true;
      } else if (line.find("# residual_minor=") == 0) {
        std::int64_t v = 0;
        if (parse_i64(header_field(line, "residual_minor"), v)) plan.residual = v;
        if (parse_i64(header_field(line, "uniform_fallback"), v)) plan.uniform_fallback = v != 0;
      } else if (line.find("# roi_order=") == 0) {
        plan.roi_order = split_commas(header_field(line, "roi_order"));
      } else if (line.find("# caps_hit=") == 0) {
        plan.caps_hit = split_commas(header_field(line, "caps_hit"));
      }
      continue;
    }
    if (!saw_header) bad_line("plan rows before header", reader.line_no, line);
    const auto f = split_tabs(line);
    Money amount = 0;
    if (f.size() != 3 || f[0] != "li" || !parse_i64(f[2], amount)) {
      bad_line("malformed plan row", reader.line_no, line);
    }
    plan.allocated.emplace_back(std::string(f[1]), amount);
  }
  if (!saw_header) throw std::runtime_error("plan header missing");
  return plan;
}

void write_states(std::ostream& os, const std::vector<LineItemBudgetState>& states) {
  os << "# states\n";
  os << "# columns: li <id> <yesterday_budget_minor> <yesterday_spend_minor> <is_new>\n";
  for (const LineItemBudgetState& s : states) {
    os << "li\t" << s.line_item_id << '\t' << s.yesterday_budget << '\t' << s.yesterday_spend
       << '\t' << (s.is_new ? 1 : 0) << "\n";
  }
}

std::vector<LineItemBudgetState> read_states(std::istream& is) {
  std::vector<LineItemBudgetState> states;
  LineReader reader(is);
  while (reader.next()) {
    const std::string& line = reader.line;
    if (line[0] == '#') continue;
    const auto f = split_tabs(line);
    LineItemBudgetState s;
    std::int64_t is_new = 0;
    if (f.size() != 5 || f[0] != "li" || !parse_i64(f[2], s.yesterday_budget) ||
        !parse_i64(f[3], s.yesterday_spend) || !parse_i64(f[4], is_new)) {
      bad_line("malformed state row", reader.line_no, line);
    }
    s.line_item_id = std::string(f[1]);
    s.is_new = is_new != 0;
    states.push_back(std::move(s));
  }
  return states;
}

}  // namespace mta
