#include "mta/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mta/pipeline.hpp"
#include "mta/rng.hpp"
#include "mta/sequencing.hpp"

namespace mta {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const char* expected) {
  throw std::runtime_error("scenario field '" + field + "' must be " + expected);
}

std::int64_t get_int(const json& j, const std::string& key, std::int64_t def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number_integer()) bad_field(key, "an integer");
  return j.at(key).get<std::int64_t>();
}

double get_num(const json& j, const std::string& key, double def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number()) bad_field(key, "a number");
  return j.at(key).get<double>();
}

std::string get_str(const json& j, const std::string& key, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_string()) bad_field(key, "a string");
  return j.at(key).get<std::string>();
}

bool get_bool(const json& j, const std::string& key, bool def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_boolean()) bad_field(key, "a boolean");
  return j.at(key).get<bool>();
}

}  // namespace

MarketConfig load_market_config(std::istream& is) {
  json j;
  try {
    j = json::parse(is, nullptr, true, true);  // allow comments
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("scenario root must be an object");

  MarketConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(get_int(j, "seed", 1));
  cfg.days = static_cast<int>(get_int(j, "days", 12));
  cfg.user_population = static_cast<int>(get_int(j, "user_population", 1000));
  cfg.io_budget_per_day = get_int(j, "io_budget_minor_per_day", 0);
  cfg.advertiser_id = get_str(j, "advertiser", "adv1");
  cfg.insertion_order_id = get_str(j, "insertion_order", "io1");
  cfg.start_time = get_int(j, "start_time", cfg.start_time);
  cfg.t_action_days = get_int(j, "t_action_days", 7);
  cfg.t_association_days = get_int(j, "t_association_days", 30);
  cfg.base_conversion_logit = get_num(j, "base_conversion_logit", -6.0);
  cfg.affinity_sigma = get_num(j, "affinity_sigma", 1.0);
  cfg.affinity_click_weight = get_num(j, "affinity_click_weight", 1.0);
  cfg.frequency_cap = static_cast<int>(get_int(j, "frequency_cap", 5));
  cfg.organic_value_min = get_int(j, "organic_value_min_minor", 0);
  cfg.organic_value_max = get_int(j, "organic_value_max_minor", 0);
  const std::string order = get_str(j, "weight_order", "first");
  if (order == "first") {
    cfg.weight_order = WeightOrder::first;
  } else if (order == "second") {
    cfg.weight_order = WeightOrder::second;
  } else {
    bad_field("weight_order", "\"first\" or \"second\"");
  }
  if (j.contains("allocation")) {
    const json& a = j.at("allocation");
    if (!a.is_object()) bad_field("allocation", "an object");
    if (a.contains("learning_budget_minor") && !a.at("learning_budget_minor").is_null()) {
      if (!a.at("learning_budget_minor").is_number_integer()) {
        bad_field("allocation.learning_budget_minor", "an integer or null");
      }
      cfg.allocation.learning_budget = a.at("learning_budget_minor").get<Money>();
    }
    cfg.allocation.learning_budget_cap =
        get_int(a, "learning_budget_cap_minor", cfg.allocation.learning_budget_cap);
    cfg.allocation.explore_rate = get_num(a, "explore_rate", cfg.allocation.explore_rate);
    cfg.allocation.min_budget = get_int(a, "min_budget_minor", cfg.allocation.min_budget);
  }
  if (!j.contains("line_items") || !j.at("line_items").is_array() || j.at("line_items").empty()) {
    throw std::runtime_error("scenario needs a non-empty line_items array");
  }
  for (const json& item : j.at("line_items")) {
    if (!item.is_object()) bad_field("line_items[]", "an object");
    LineItemProfile p;
    p.id = get_str(item, "id", "");
    if (p.id.empty()) throw std::runtime_error("line item id missing or empty");
    p.reach = get_num(item, "reach", 1.0);
    p.cost_min = get_int(item, "cost_min_minor", 0);
    p.cost_max = get_int(item, "cost_max_minor", p.cost_min);
    p.true_lift = get_num(item, "true_lift", 0.0);
    p.click_rate = get_num(item, "click_rate", 0.0);
    p.retargeting = get_bool(item, "retargeting", false);
    p.value_min = get_int(item, "value_min_minor", 0);
    p.value_max = get_int(item, "value_max_minor", p.value_min);
    if (p.reach < 0.0 || p.reach > 1.0) bad_field("line_items[].reach", "within [0, 1]");
    if (p.click_rate < 0.0 || p.click_rate >= 1.0) {
      bad_field("line_items[].click_rate", "within [0, 1)");
    }
    if (p.cost_min < 0 || p.cost_max < p.cost_min) {
      bad_field("line_items[].cost_*_minor", "a non-negative range");
    }
    if (p.value_min < 0 || p.value_max < p.value_min) {
      bad_field("line_items[].value_*_minor", "a non-negative range");
    }
    cfg.line_items.push_back(std::move(p));
  }
  std::vector<std::string> ids;
  for (const LineItemProfile& p : cfg.line_items) ids.push_back(p.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::runtime_error("line item ids must be unique");
  }
  if (cfg.days < 1) bad_field("days", "at least 1");
  if (cfg.user_population < 1) bad_field("user_population", "at least 1");
  if (cfg.io_budget_per_day < 0) bad_field("io_budget_minor_per_day", "non-negative");
  if (cfg.frequency_cap < 1) bad_field("frequency_cap", "at least 1");
  if (cfg.organic_value_min < 0 || cfg.organic_value_max < cfg.organic_value_min) {
    bad_field("organic_value_*_minor", "a non-negative range");
  }
  return cfg;
}

MarketConfig load_market_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scenario file " + path);
  return load_market_config(is);
}

std::vector<UserHistory> build_users(const std::vector<TouchPoint>& touches,
                                     const std::vector<ActionEvent>& actions) {
  std::map<std::string, UserHistory> by_user;
  for (const TouchPoint& tp : touches) {
    UserHistory& u = by_user[tp.user_id];
    u.user_id = tp.user_id;
    u.touch_points.push_back(tp);
  }
  for (const ActionEvent& a : actions) {
    UserHistory& u = by_user[a.user_id];
    u.user_id = a.user_id;
    u.actions.push_back(a);
  }
  std::vector<UserHistory> users;
  users.reserve(by_user.size());
  for (auto& [id, user] : by_user) {
    (void)id;
    auto by_time = [](const auto& a, const auto& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.ingest_seq < b.ingest_seq;
    };
    std::sort(user.touch_points.begin(), user.touch_points.end(), by_time);
    std::sort(user.actions.begin(), user.actions.end(), by_time);
    users.push_back(std::move(user));
  }
  return users;
}

namespace {

// Draw purposes; each (purpose, key...) tuple is one independent stream,
// shared between arms so allocation is the only difference.
const std::uint64_t kAffinity = tag_of("affinity");
const std::uint64_t kTargetable = tag_of("targetable");
const std::uint64_t kCost = tag_of("cost");
const std::uint64_t kClick = tag_of("click");
const std::uint64_t kConvert = tag_of("convert");
const std::uint64_t kValue = tag_of("value");
const std::uint64_t kJitter = tag_of("jitter");
const std::uint64_t kActionTime = tag_of("action-time");
const std::uint64_t kServeOrder = tag_of("serve-order");

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(p / (1.0 - p));
}

std::string make_user_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%07d", index);
  return buf;
}

class Market {
 public:
  Market(const MarketConfig& cfg, Arm arm) : cfg_(cfg), arm_(arm) {
    result_.arm = arm;
    const int n = static_cast<int>(cfg.line_items.size());
    exposures_.assign(static_cast<std::size_t>(cfg.user_population),
                      std::vector<int>(static_cast<std::size_t>(n), 0));
    engaged_.assign(static_cast<std::size_t>(cfg.user_population), false);
    user_ids_.reserve(static_cast<std::size_t>(cfg.user_population));
    affinity_.reserve(static_cast<std::size_t>(cfg.user_population));
    for (int u = 0; u < cfg.user_population; ++u) {
      user_ids_.push_back(make_user_id(u));
      KeyedRng rng(derive_seed(cfg.seed, {kAffinity, static_cast<std::uint64_t>(u)}));
      affinity_.push_back(rng.next_normal() * cfg.affinity_sigma);
    }
    li_tags_.reserve(static_cast<std::size_t>(n));
    for (const LineItemProfile& p : cfg.line_items) li_tags_.push_back(tag_of(p.id));
  }

  ArmResult run() {
    std::vector<LineItemBudgetState> states;
    for (const LineItemProfile& p : cfg_.line_items) {
      LineItemBudgetState s;
      s.line_item_id = p.id;
      s.is_new = true;
      states.push_back(std::move(s));
    }
    AttributionResult attribution;  // empty on day 0: everything is new

    for (int day = 0; day < cfg_.days; ++day) {
      if (day > 0) {
        const WindowConfig w{cfg_.t_action_days, cfg_.t_association_days,
                             cfg_.start_time + static_cast<Timestamp>(day) * kSecondsPerDay};
        const std::vector<UserHistory> users = build_users(result_.touches, result_.actions);
        const WeightTable table =
            run_step1(users, w, cfg_.advertiser_id, cfg_.weight_order, 1);
        attribution = run_step2(
            users, w, table,
            arm_ == Arm::mta ? AttributionMode::mta : AttributionMode::lta, 1);
      }
      AllocationPlan plan = daily_allocation(cfg_.io_budget_per_day, cfg_.insertion_order_id,
                                             attribution, states, cfg_.allocation);
      simulate_day(day, plan);
      states = next_states(plan, result_.days.back());
      result_.plans.push_back(std::move(plan));
    }

    const WindowConfig w{cfg_.t_action_days, cfg_.t_association_days,
                         cfg_.start_time + static_cast<Timestamp>(cfg_.days) * kSecondsPerDay};
    const std::vector<UserHistory> users = build_users(result_.touches, result_.actions);
    result_.final_weights = run_step1(users, w, cfg_.advertiser_id, cfg_.weight_order, 1);
    result_.final_attribution = run_step2(
        users, w, result_.final_weights,
        arm_ == Arm::mta ? AttributionMode::mta : AttributionMode::lta, 1);
    return std::move(result_);
  }

 private:
  double unit_draw(std::uint64_t purpose, std::initializer_list<std::uint64_t> key) {
    std::uint64_t s = cfg_.seed;
    std::uint64_t h = splitmix64_next(s);
    s = h ^ purpose;
    h = splitmix64_next(s);
    for (std::uint64_t k : key) {
      s = h ^ k;
      h = splitmix64_next(s);
    }
    KeyedRng rng(h);
    return rng.next_unit();
  }

  Money range_draw(std::uint64_t purpose, std::initializer_list<std::uint64_t> key, Money lo,
                   Money hi) {
    if (hi <= lo) return lo;
    const double u = unit_draw(purpose, key);
    return lo + static_cast<Money>(u * static_cast<double>(hi - lo + 1));
  }

  bool targetable(int user, std::size_t li) {
    const LineItemProfile& p = cfg_.line_items[li];
    if (p.reach >= 1.0) return true;
    return unit_draw(kTargetable, {li_tags_[li], static_cast<std::uint64_t>(user)}) < p.reach;
  }

  double click_probability(int user, std::size_t li) {
    const LineItemProfile& p = cfg_.line_items[li];
    if (p.click_rate <= 0.0) return 0.0;
    return sigmoid(logit(p.click_rate) + cfg_.affinity_click_weight * affinity_[user]);
  }

  Money serve_line_item(std::size_t li, Money budget, int day, Timestamp phase_base,
                        DayStats& stats) {
    const LineItemProfile& p = cfg_.line_items[li];
    const std::uint64_t day_key = static_cast<std::uint64_t>(day);
    Money remaining = budget;
    Money spent = 0;
    std::vector<int> order(static_cast<std::size_t>(cfg_.user_population));
    for (int pass = 0; pass < cfg_.frequency_cap; ++pass) {
      const std::uint64_t pass_key = static_cast<std::uint64_t>(pass);
      // Serve in a fresh keyed shuffle each pass. A fixed scan order would
      // hand every marginal dollar to the same user prefix, so arms that
      // split budget slightly differently would diverge in exposure depth
      // on those users instead of reach; the key excludes the arm.
      std::iota(order.begin(), order.end(), 0);
      KeyedRng shuffle(derive_seed(cfg_.seed, {kServeOrder, li_tags_[li], day_key, pass_key}));
      for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(shuffle.next_in(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
      }
      for (const int u : order) {
        if (p.retargeting && !engaged_[static_cast<std::size_t>(u)]) continue;
        if (!targetable(u, li)) continue;
        const std::uint64_t user_key = static_cast<std::uint64_t>(u);
        const Money cost = range_draw(kCost, {li_tags_[li], user_key, day_key, pass_key},
                                      p.cost_min, p.cost_max);
        if (cost > remaining) return spent;  // marginal impression unaffordable
        const Timestamp ts =
            phase_base + static_cast<Timestamp>(pass) * 900 +
            static_cast<Timestamp>(
                range_draw(kJitter, {li_tags_[li], user_key, day_key, pass_key}, 0, 899));
        TouchPoint imp;
        imp.user_id = user_ids_[static_cast<std::size_t>(u)];
        imp.timestamp = ts;
        imp.kind = TouchKind::impression;
        imp.line_item_id = p.id;
        imp.insertion_order_id = cfg_.insertion_order_id;
        imp.advertiser_id = cfg_.advertiser_id;
        imp.cost = cost;
        imp.ingest_seq = next_seq_++;
        result_.touches.push_back(std::move(imp));
        ++exposures_[static_cast<std::size_t>(u)][li];
        spent += cost;
        remaining -= cost;
        ++stats.impressions;
        if (unit_draw(kClick, {li_tags_[li], user_key, day_key, pass_key}) <
            click_probability(u, li)) {
          TouchPoint click;
          click.user_id = user_ids_[static_cast<std::size_t>(u)];
          click.timestamp = ts + 60;
          click.kind = TouchKind::click;
          click.line_item_id = p.id;
          click.insertion_order_id = cfg_.insertion_order_id;
          click.advertiser_id = cfg_.advertiser_id;
          click.cost = 0;
          click.ingest_seq = next_seq_++;
          result_.touches.push_back(std::move(click));
          engaged_[static_cast<std::size_t>(u)] = true;
          ++stats.clicks;
        }
      }
    }
    return spent;
  }

  void simulate_day(int day, const AllocationPlan& plan) {
    DayStats stats;
    stats.day = day;
    const Timestamp day_start = cfg_.start_time + static_cast<Timestamp>(day) * kSecondsPerDay;

    std::map<std::string, Money> budget_of;
    for (const auto& [li, amount] : plan.allocated) {
      budget_of[li] = amount;
      stats.planned += amount;
      stats.li_budget[li] = amount;
      result_.cum_budget[li] += amount;
    }

    // Broad-reach items serve in the morning, retargeting in the afternoon;
    // conversions land late evening. The retargeting impression is therefore
    // usually the last touch before an action that same day.
    for (int phase = 0; phase < 2; ++phase) {
      const Timestamp phase_base = day_start + (phase == 0 ? 6 : 15) * 3600;
      for (std::size_t li = 0; li < cfg_.line_items.size(); ++li) {
        const LineItemProfile& p = cfg_.line_items[li];
        if (p.retargeting != (phase == 1)) continue;
        auto it = budget_of.find(p.id);
        const Money budget = it == budget_of.end() ? 0 : it->second;
        const Money spent = serve_line_item(li, budget, day, phase_base, stats);
        stats.li_spend[p.id] += spent;
        stats.spend += spent;
        result_.cum_spend[p.id] += spent;
      }
    }

    // Evening conversion check, once per user, against cumulative exposure.
    for (int u = 0; u < cfg_.user_population; ++u) {
      const std::uint64_t user_key = static_cast<std::uint64_t>(u);
      const std::uint64_t day_key = static_cast<std::uint64_t>(day);
      double pressure = 0.0;
      for (std::size_t li = 0; li < cfg_.line_items.size(); ++li) {
        pressure += exposures_[static_cast<std::size_t>(u)][li] *
                    cfg_.line_items[li].true_lift;
      }
      const double p_convert =
          sigmoid(cfg_.base_conversion_logit + affinity_[static_cast<std::size_t>(u)] + pressure);
      if (unit_draw(kConvert, {user_key, day_key}) >= p_convert) continue;

      // Value follows the strongest causal contributor; a conversion nobody
      // influenced is organic.
      std::size_t top = 0;
      double top_contrib = 0.0;
      double total_contrib = 0.0;
      for (std::size_t li = 0; li < cfg_.line_items.size(); ++li) {
        const double c = exposures_[static_cast<std::size_t>(u)][li] *
                         cfg_.line_items[li].true_lift;
        total_contrib += c;
        if (c > top_contrib) {
          top_contrib = c;
          top = li;
        }
      }
      Money value = 0;
      if (total_contrib > 0.0) {
        const LineItemProfile& tp = cfg_.line_items[top];
        value = range_draw(kValue, {user_key, day_key}, tp.value_min, tp.value_max);
        for (std::size_t li = 0; li < cfg_.line_items.size(); ++li) {
          const double c = exposures_[static_cast<std::size_t>(u)][li] *
                           cfg_.line_items[li].true_lift;
          if (c > 0.0) {
            result_.realized_value[cfg_.line_items[li].id] +=
                static_cast<double>(value) * (c / total_contrib);
          }
        }
      } else {
        value = range_draw(kValue, {user_key, day_key}, cfg_.organic_value_min,
                           cfg_.organic_value_max);
        result_.organic_value += value;
      }

      ActionEvent action;
      action.user_id = user_ids_[static_cast<std::size_t>(u)];
      action.timestamp = day_start + 22 * 3600 +
                         static_cast<Timestamp>(
                             range_draw(kActionTime, {user_key, day_key}, 0, 3599));
      action.advertiser_id = cfg_.advertiser_id;
      action.insertion_order_id = cfg_.insertion_order_id;
      action.value = value;
      action.ingest_seq = next_seq_++;
      result_.actions.push_back(std::move(action));
      ++stats.actions;
      stats.action_value += value;
      engaged_[static_cast<std::size_t>(u)] = true;
      // The funnel restarts after a conversion.
      std::fill(exposures_[static_cast<std::size_t>(u)].begin(),
                exposures_[static_cast<std::size_t>(u)].end(), 0);
    }

    result_.days.push_back(std::move(stats));
  }

  std::vector<LineItemBudgetState> next_states(const AllocationPlan& plan,
                                               const DayStats& stats) {
    std::vector<LineItemBudgetState> states;
    for (const auto& [li, amount] : plan.allocated) {
      LineItemBudgetState s;
      s.line_item_id = li;
      s.yesterday_budget = amount;
      auto it = stats.li_spend.find(li);
      s.yesterday_spend = it == stats.li_spend.end() ? 0 : it->second;
      s.is_new = false;
      states.push_back(std::move(s));
    }
    return states;
  }

  const MarketConfig& cfg_;
  Arm arm_;
  ArmResult result_;
  std::vector<std::string> user_ids_;
  std::vector<double> affinity_;
  std::vector<std::uint64_t> li_tags_;
  std::vector<std::vector<int>> exposures_;  // per user, per line-item index
  std::vector<bool> engaged_;
  std::int64_t next_seq_ = 0;
};

}  // namespace

ArmResult simulate_arm(const MarketConfig& config, Arm arm) {
  return Market(config, arm).run();
}

ExperimentResult run_experiment(const MarketConfig& config) {
  ExperimentResult result;
  result.lta = simulate_arm(config, Arm::lta);
  result.mta = simulate_arm(config, Arm::mta);
  return result;
}

}  // namespace mta
