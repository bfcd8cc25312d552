#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mta/attribution.hpp"
#include "mta/pipeline.hpp"
#include "mta/serialize.hpp"
#include "mta/synthetic.hpp"

using namespace mta;

namespace {

std::string weights_bytes(const WeightTable& t) {
  std::ostringstream os;
  write_weight_table(os, t);
  return os.str();
}

std::string attribution_bytes(const AttributionResult& r) {
  std::ostringstream os;
  write_attribution(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("shard count does not change a single byte of output") {
  SyntheticSpec spec;
  spec.seed = 42;
  spec.n_users = 400;
  spec.n_line_items = 7;
  spec.max_touches = 10;
  const std::vector<UserHistory> users = synthetic_corpus(spec);
  WindowConfig w;
  w.as_of = spec.t0 + spec.span_seconds;

  for (const WeightOrder order : {WeightOrder::first, WeightOrder::second}) {
    const WeightTable serial_table = compute_weight_table(users, w, "adv01", order);
    REQUIRE_FALSE(serial_table.items.empty());
    for (const AttributionMode mode : {AttributionMode::mta, AttributionMode::lta}) {
      const AttributionResult serial_result = attribute_all(users, w, serial_table, mode);
      const std::string want_weights = weights_bytes(serial_table);
      const std::string want_attribution = attribution_bytes(serial_result);
      for (const int shards : {1, 2, 4, 8}) {
        CAPTURE(static_cast<int>(order));
        CAPTURE(static_cast<int>(mode));
        CAPTURE(shards);
        const WeightTable table = run_step1(users, w, "adv01", order, shards);
        CHECK(weights_bytes(table) == want_weights);
        CHECK(attribution_bytes(run_step2(users, w, table, mode, shards)) == want_attribution);
      }
    }
  }
}

TEST_CASE("pipeline runs every advertiser in the log") {
  SyntheticSpec spec;
  spec.seed = 7;
  spec.n_users = 120;
  spec.n_advertisers = 3;
  const std::vector<UserHistory> users = synthetic_corpus(spec);
  EventLog log;
  log.users = users;
  WindowConfig w;
  w.as_of = spec.t0 + spec.span_seconds;

  const auto outputs = run_pipeline(log, w, WeightOrder::second, AttributionMode::mta, 4);
  CHECK(outputs.size() == 3);
  for (const auto& [advertiser, out] : outputs) {
    CHECK(out.weights.advertiser_id == advertiser);
    CHECK(out.attribution.advertiser_id == advertiser);
    const WeightTable serial_table = compute_weight_table(users, w, advertiser, WeightOrder::second);
    CHECK(weights_bytes(out.weights) == weights_bytes(serial_table));
  }
}

TEST_CASE("invalid shard counts are rejected up front") {
  const std::vector<UserHistory> users;
  WindowConfig w;
  CHECK_THROWS_AS(run_step1(users, w, "adv01", WeightOrder::first, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_step2(users, w, WeightTable{}, AttributionMode::mta, -2),
                  std::invalid_argument);
}

TEST_CASE("user sharding is stable and in range") {
  for (const int shards : {1, 2, 4, 8, 13}) {
    for (const char* id : {"u0000001", "alice", "", "u9999999"}) {
      const int s = shard_of_user(id, shards);
      CHECK(s >= 0);
      CHECK(s < shards);
      CHECK(shard_of_user(id, shards) == s);
    }
  }
}

TEST_CASE("format_double round-trips exact values") {
  const double values[] = {0.0,
                           1.0,
                           -1.0,
                           0.1,
                           1.0 / 3.0,
                           6.02214076e23,
                           -5e-324,
                           std::numeric_limits<double>::max(),
                           std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
  for (const double v : values) {
    double back = 0.0;
    REQUIRE(parse_double(format_double(v), back));
    CHECK(back == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  double ignored;
  CHECK_FALSE(parse_double("1.5x", ignored));
  CHECK_FALSE(parse_double("", ignored));
}

TEST_CASE("weight tables survive a write/read cycle") {
  SyntheticSpec spec;
  spec.seed = 11;
  spec.n_users = 150;
  const std::vector<UserHistory> users = synthetic_corpus(spec);
  WindowConfig w;
  w.as_of = spec.t0 + spec.span_seconds;

  for (const WeightOrder order : {WeightOrder::first, WeightOrder::second}) {
    const WeightTable table = compute_weight_table(users, w, "adv01", order);
    REQUIRE_FALSE(table.items.empty());
    std::stringstream buffer;
    write_weight_table(buffer, table);
    const WeightTable back = read_weight_table(buffer);
    CHECK(back.advertiser_id == table.advertiser_id);
    CHECK(back.order == table.order);
    REQUIRE(back.items.size() == table.items.size());
    for (const auto& [li, stats] : table.items) {
      const auto it = back.items.find(li);
      REQUIRE(it != back.items.end());
      CHECK(it->second.n_plus == stats.n_plus);
      CHECK(it->second.n_minus == stats.n_minus);
      CHECK(it->second.weight == stats.weight);
      CHECK(it->second.total_cost == stats.total_cost);
      CHECK(it->second.cold_start == stats.cold_start);
    }
    CHECK(back.pairs.size() == table.pairs.size());
    for (const auto& [key, stats] : table.pairs) {
      const auto it = back.pairs.find(key);
      REQUIRE(it != back.pairs.end());
      CHECK(it->second.n_plus == stats.n_plus);
      CHECK(it->second.n_minus == stats.n_minus);
    }
    // and the rewrite is byte-identical
    std::ostringstream again;
    write_weight_table(again, back);
    CHECK(again.str() == weights_bytes(table));
  }
}

TEST_CASE("attribution results survive a write/read cycle") {
  SyntheticSpec spec;
  spec.seed = 12;
  spec.n_users = 150;
  const std::vector<UserHistory> users = synthetic_corpus(spec);
  WindowConfig w;
  w.as_of = spec.t0 + spec.span_seconds;
  const WeightTable table = compute_weight_table(users, w, "adv01", WeightOrder::second);
  REQUIRE_FALSE(table.items.empty());

  for (const AttributionMode mode : {AttributionMode::mta, AttributionMode::lta}) {
    const AttributionResult result = attribute_all(users, w, table, mode);
    std::stringstream buffer;
    write_attribution(buffer, result);
    const AttributionResult back = read_attribution(buffer);
    CHECK(back.advertiser_id == result.advertiser_id);
    CHECK(back.mode == result.mode);
    CHECK(back.attributed_actions == result.attributed_actions);
    CHECK(back.unattributable == result.unattributable);
    CHECK(back.uniform_fallbacks == result.uniform_fallbacks);
    CHECK(back.missing_members == result.missing_members);
    REQUIRE(back.items.size() == result.items.size());
    std::ostringstream again;
    write_attribution(again, back);
    CHECK(again.str() == attribution_bytes(result));
  }
}

TEST_CASE("plans and states survive a write/read cycle") {
  AllocationPlan plan;
  plan.insertion_order_id = "io1";
  plan.total_budget = 100000;
  plan.allocated = {{"li_a", 60000}, {"li_b", 39000}};
  plan.residual = 1000;
  plan.roi_order = {"li_a", "li_b"};
  plan.caps_hit = {"li_b"};
  plan.uniform_fallback = false;

  std::stringstream buffer;
  write_plan(buffer, plan);
  const AllocationPlan back = read_plan(buffer);
  CHECK(back.insertion_order_id == plan.insertion_order_id);
  CHECK(back.total_budget == plan.total_budget);
  CHECK(back.allocated == plan.allocated);
  CHECK(back.residual == plan.residual);
  CHECK(back.roi_order == plan.roi_order);
  CHECK(back.caps_hit == plan.caps_hit);
  CHECK(back.uniform_fallback == plan.uniform_fallback);

  std::vector<LineItemBudgetState> states(2);
  states[0].line_item_id = "li_a";
  states[0].yesterday_budget = 60000;
  states[0].yesterday_spend = 58123;
  states[0].is_new = false;
  states[1].line_item_id = "li_b";
  states[1].yesterday_budget = 39000;
  states[1].yesterday_spend = 40000;
  states[1].is_new = true;

  std::stringstream sbuf;
  write_states(sbuf, states);
  const auto back_states = read_states(sbuf);
  REQUIRE(back_states.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back_states[i].line_item_id == states[i].line_item_id);
    CHECK(back_states[i].yesterday_budget == states[i].yesterday_budget);
    CHECK(back_states[i].yesterday_spend == states[i].yesterday_spend);
    CHECK(back_states[i].is_new == states[i].is_new);
  }
}

TEST_CASE("readers reject mangled artifacts") {
  {
    std::stringstream buffer("not a header\n");
    CHECK_THROWS_AS(read_weight_table(buffer), std::runtime_error);
  }
  {
    std::stringstream buffer("# weights advertiser=a order=second\nli\tx\tbad\n");
    CHECK_THROWS_AS(read_weight_table(buffer), std::runtime_error);
  }
  {
    std::stringstream buffer("# plan io=a budget_minor=oops\n");
    CHECK_THROWS_AS(read_plan(buffer), std::runtime_error);
  }
}
