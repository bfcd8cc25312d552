#include "mta/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "mta/attribution.hpp"
#include "mta/serialize.hpp"

namespace mta {

Metrics compute_metrics(Money spend, double actions, std::int64_t clicks, Money action_value) {
  Metrics m;
  m.roi = compute_roi(action_value, spend);
  if (actions > 0.0) m.ecpa = static_cast<double>(spend) / actions;
  if (clicks > 0) m.ecpc = static_cast<double>(spend) / static_cast<double>(clicks);
  return m;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::string money_str(Money minor) {
  const bool neg = minor < 0;
  const Money abs = neg ? -minor : minor;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", neg ? "-" : "",
                static_cast<long long>(abs / 100), static_cast<long long>(abs % 100));
  return buf;
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

const char* arm_name(Arm arm) { return arm == Arm::mta ? "mta" : "lta"; }

std::vector<std::string> sorted_line_items(const ExperimentResult& result) {
  std::set<std::string> ids;
  for (const auto& [li, v] : result.mta.cum_budget) {
    (void)v;
    ids.insert(li);
  }
  for (const auto& [li, v] : result.lta.cum_budget) {
    (void)v;
    ids.insert(li);
  }
  return {ids.begin(), ids.end()};
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) return 0.0;
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double mean = (n + 1.0) / 2.0;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    var_a += (ra[i] - mean) * (ra[i] - mean);
    var_b += (rb[i] - mean) * (rb[i] - mean);
  }
  if (var_a == 0.0 || var_b == 0.0) return 0.0;
  return cov / std::sqrt(var_a * var_b);
}

double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  const int k = std::min(wins, losses);
  // Two-sided exact binomial tail at p = 1/2.
  double tail = 0.0;
  double binom = 1.0;  // C(n, 0)
  for (int i = 0; i <= k; ++i) {
    if (i > 0) binom = binom * static_cast<double>(n - i + 1) / static_cast<double>(i);
    tail += binom;
  }
  const double p = 2.0 * tail * std::pow(0.5, n);
  return p > 1.0 ? 1.0 : p;
}

double realized_roi(const ArmResult& arm, const std::string& line_item_id) {
  auto v = arm.realized_value.find(line_item_id);
  const double value = v == arm.realized_value.end() ? 0.0 : v->second;
  auto s = arm.cum_spend.find(line_item_id);
  const Money spend = s == arm.cum_spend.end() ? 0 : s->second;
  if (spend == 0) {
    return value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return value / static_cast<double>(spend);
}

double budget_share(const ArmResult& arm, const std::string& line_item_id) {
  Money total = 0;
  for (const auto& [li, amount] : arm.cum_budget) {
    (void)li;
    total += amount;
  }
  if (total == 0) return 0.0;
  auto it = arm.cum_budget.find(line_item_id);
  const Money mine = it == arm.cum_budget.end() ? 0 : it->second;
  return static_cast<double>(mine) / static_cast<double>(total);
}

Metrics arm_metrics(const ArmResult& arm) {
  Money spend = 0, value = 0;
  std::int64_t actions = 0, clicks = 0;
  for (const DayStats& d : arm.days) {
    spend += d.spend;
    value += d.action_value;
    actions += d.actions;
    clicks += d.clicks;
  }
  return compute_metrics(spend, static_cast<double>(actions), clicks, value);
}

void write_experiment_csv(std::ostream& os, const ExperimentResult& result) {
  os << "arm,day,spend_minor,spend,impressions,clicks,actions,value_minor,value,"
        "cum_roi,cum_ecpa,cum_ecpc\n";
  for (const ArmResult* arm : {&result.lta, &result.mta}) {
    Money cum_spend = 0, cum_value = 0;
    std::int64_t cum_actions = 0, cum_clicks = 0;
    for (const DayStats& d : arm->days) {
      cum_spend += d.spend;
      cum_value += d.action_value;
      cum_actions += d.actions;
      cum_clicks += d.clicks;
      const Metrics m =
          compute_metrics(cum_spend, static_cast<double>(cum_actions), cum_clicks, cum_value);
      os << arm_name(arm->arm) << ',' << d.day << ',' << d.spend << ',' << money_str(d.spend)
         << ',' << d.impressions << ',' << d.clicks << ',' << d.actions << ',' << d.action_value
         << ',' << money_str(d.action_value) << ',' << format_double(m.roi) << ','
         << opt_str(m.ecpa) << ',' << opt_str(m.ecpc) << "\n";
    }
  }
}

void write_budget_share_csv(std::ostream& os, const ExperimentResult& result) {
  os << "arm,line_item,cum_budget_minor,cum_spend_minor,budget_share,realized_value,"
        "realized_roi,attributed_roi\n";
  const std::vector<std::string> lis = sorted_line_items(result);
  for (const ArmResult* arm : {&result.lta, &result.mta}) {
    for (const std::string& li : lis) {
      auto budget = arm->cum_budget.find(li);
      auto spend = arm->cum_spend.find(li);
      auto value = arm->realized_value.find(li);
      auto attr = arm->final_attribution.items.find(li);
      os << arm_name(arm->arm) << ',' << li << ','
         << (budget == arm->cum_budget.end() ? 0 : budget->second) << ','
         << (spend == arm->cum_spend.end() ? 0 : spend->second) << ','
         << format_double(budget_share(*arm, li)) << ','
         << format_double(value == arm->realized_value.end() ? 0.0 : value->second) << ','
         << format_double(realized_roi(*arm, li)) << ','
         << (attr == arm->final_attribution.items.end() ? std::string()
                                                        : format_double(attr->second.roi))
         << "\n";
    }
  }
}

void write_experiment_summary(std::ostream& os, const ExperimentResult& result) {
  const std::vector<std::string> lis = sorted_line_items(result);
  for (const ArmResult* arm : {&result.lta, &result.mta}) {
    const Metrics m = arm_metrics(*arm);
    Money spend = 0, value = 0;
    std::int64_t actions = 0, clicks = 0, imps = 0;
    for (const DayStats& d : arm->days) {
      spend += d.spend;
      value += d.action_value;
      actions += d.actions;
      clicks += d.clicks;
      imps += d.impressions;
    }
    os << "arm " << arm_name(arm->arm) << ": spend=" << money_str(spend)
       << " value=" << money_str(value) << " impressions=" << imps << " clicks=" << clicks
       << " actions=" << actions << "\n";
    os << "  roi=" << format_double(m.roi) << " ecpa=" << (m.ecpa ? money_str(Money(*m.ecpa)) : "null")
       << " ecpc=" << (m.ecpc ? money_str(Money(*m.ecpc)) : "null") << "\n";
    std::vector<double> shares, rois;
    for (const std::string& li : lis) {
      shares.push_back(budget_share(*arm, li));
      rois.push_back(realized_roi(*arm, li));
    }
    os << "  budget-vs-realized-roi spearman=" << format_double(spearman(shares, rois)) << "\n";
    for (const std::string& li : lis) {
      os << "  " << li << ": share=" << format_double(budget_share(*arm, li))
         << " realized_roi=" << format_double(realized_roi(*arm, li)) << "\n";
    }
  }
  const Metrics lta = arm_metrics(result.lta);
  const Metrics mta = arm_metrics(result.mta);
  os << "multi-touch roi " << format_double(mta.roi) << " vs last-touch "
     << format_double(lta.roi) << "\n";
}

std::vector<LogReportRow> summarize_log(const EventLog& log) {
  struct Key {
    std::string adv, io;
    std::int64_t day;
    bool operator<(const Key& o) const {
      if (adv != o.adv) return adv < o.adv;
      if (io != o.io) return io < o.io;
      return day < o.day;
    }
  };
  auto day_of = [](Timestamp ts) {
    return ts >= 0 ? ts / kSecondsPerDay : (ts - (kSecondsPerDay - 1)) / kSecondsPerDay;
  };
  std::map<Key, LogReportRow> rows;
  for (const UserHistory& user : log.users) {
    for (const TouchPoint& tp : user.touch_points) {
      LogReportRow& r = rows[{tp.advertiser_id, tp.insertion_order_id, day_of(tp.timestamp)}];
      r.spend += tp.cost;
      if (tp.kind == TouchKind::impression) {
        ++r.impressions;
      } else {
        ++r.clicks;
      }
    }
    for (const ActionEvent& a : user.actions) {
      LogReportRow& r = rows[{a.advertiser_id, a.insertion_order_id, day_of(a.timestamp)}];
      ++r.actions;
      r.action_value += a.value;
    }
  }
  std::vector<LogReportRow> out;
  out.reserve(rows.size());
  for (auto& [key, row] : rows) {
    row.advertiser_id = key.adv;
    row.insertion_order_id = key.io;
    row.day = key.day;
    out.push_back(std::move(row));
  }
  return out;
}

void write_log_report_csv(std::ostream& os, const std::vector<LogReportRow>& rows) {
  os << "advertiser,insertion_order,day,spend_minor,spend,impressions,clicks,actions,"
        "value_minor,value,roi,ecpa,ecpc\n";
  auto emit = [&](const std::string& adv, const std::string& io, const std::string& day,
                  const LogReportRow& r) {
    const Metrics m =
        compute_metrics(r.spend, static_cast<double>(r.actions), r.clicks, r.action_value);
    os << adv << ',' << io << ',' << day << ',' << r.spend << ',' << money_str(r.spend) << ','
       << r.impressions << ',' << r.clicks << ',' << r.actions << ',' << r.action_value << ','
       << money_str(r.action_value) << ',' << format_double(m.roi) << ',' << opt_str(m.ecpa)
       << ',' << opt_str(m.ecpc) << "\n";
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    emit(rows[i].advertiser_id, rows[i].insertion_order_id, std::to_string(rows[i].day), rows[i]);
    const bool last_of_pair =
        i + 1 == rows.size() || rows[i + 1].advertiser_id != rows[i].advertiser_id ||
        rows[i + 1].insertion_order_id != rows[i].insertion_order_id;
    if (last_of_pair) {
      LogReportRow total;
      for (const LogReportRow& r : rows) {
        if (r.advertiser_id == rows[i].advertiser_id &&
            r.insertion_order_id == rows[i].insertion_order_id) {
          total.spend += r.spend;
          total.impressions += r.impressions;
          total.clicks += r.clicks;
          total.actions += r.actions;
          total.action_value += r.action_value;
        }
      }
      emit(rows[i].advertiser_id, rows[i].insertion_order_id, "total", total);
    }
  }
}

}  // namespace mta
