// Command-line front end: attribute event logs, allocate budgets, run the
// market simulator, and roll up raw logs.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "mta/allocation.hpp"
#include "mta/attribution.hpp"
#include "mta/log_io.hpp"
#include "mta/pipeline.hpp"
#include "mta/report.hpp"
#include "mta/serialize.hpp"
#include "mta/simulator.hpp"

namespace {

struct LogOptions {
  std::string path;
  double max_malformed = 0.1;
};

// Loads a log and enforces the malformed-line budget. Returns nullopt (after
// printing the reason) when the log is too damaged to trust.
std::optional<mta::EventLog> load_log(const LogOptions& opt) {
  mta::EventLog log;
  try {
    log = mta::ingest_events_file(opt.path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::nullopt;
  }
  const mta::ParseStats& stats = log.stats;
  if (stats.malformed_lines > 0) {
    std::cerr << "warning: " << stats.malformed_lines << " of " << stats.total_lines
              << " lines malformed\n";
    for (const std::string& sample : stats.samples) {
      std::cerr << "  " << sample << "\n";
    }
  }
  if (stats.hierarchy_violations > 0) {
    std::cerr << "warning: " << stats.hierarchy_violations
              << " events contradicted the advertiser/io/line-item hierarchy\n";
  }
  const double ratio = stats.total_lines == 0
                           ? 0.0
                           : static_cast<double>(stats.malformed_lines) /
                                 static_cast<double>(stats.total_lines);
  if (ratio > opt.max_malformed) {
    std::cerr << "error: malformed ratio " << ratio << " exceeds limit " << opt.max_malformed
              << "\n";
    return std::nullopt;
  }
  return log;
}

mta::Timestamp default_as_of(const mta::EventLog& log) {
  mta::Timestamp max_ts = 0;
  for (const mta::UserHistory& user : log.users) {
    for (const mta::TouchPoint& tp : user.touch_points) max_ts = std::max(max_ts, tp.timestamp);
    for (const mta::ActionEvent& a : user.actions) max_ts = std::max(max_ts, a.timestamp);
  }
  return max_ts;
}

bool write_file(const std::string& path, const auto& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  writer(os);
  return os.good();
}

int default_shards() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int run_attribute(const LogOptions& log_opt, std::int64_t t_action, std::int64_t t_association,
                  std::optional<std::int64_t> as_of, int shards, const std::string& order_name,
                  const std::string& mode_name, const std::string& out_dir) {
  auto log = load_log(log_opt);
  if (!log) return 1;
  const mta::WindowConfig w{t_action, t_association, as_of ? *as_of : default_as_of(*log)};
  const mta::WeightOrder order =
      order_name == "first" ? mta::WeightOrder::first : mta::WeightOrder::second;
  const mta::AttributionMode mode =
      mode_name == "lta" ? mta::AttributionMode::lta : mta::AttributionMode::mta;
  std::map<std::string, mta::AdvertiserOutputs> outputs;
  try {
    outputs = mta::run_pipeline(*log, w, order, mode, shards);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& [adv, out] : outputs) {
    const std::string weights_path = out_dir + "/weights_" + adv + ".tsv";
    const std::string attr_path = out_dir + "/attribution_" + adv + "_" + mode_name + ".tsv";
    if (!write_file(weights_path, [&](std::ostream& os) { mta::write_weight_table(os, out.weights); }) ||
        !write_file(attr_path, [&](std::ostream& os) { mta::write_attribution(os, out.attribution); })) {
      return 1;
    }
    std::cout << adv << ": line_items=" << out.weights.items.size()
              << " attributed_actions=" << out.attribution.attributed_actions
              << " unattributable=" << out.attribution.unattributable << " -> " << weights_path
              << ", " << attr_path << "\n";
  }
  if (outputs.empty()) std::cout << "no advertisers in window\n";
  return 0;
}

int run_allocate(const std::string& attribution_path, const std::string& states_path,
                 mta::Money budget, const std::string& io_id, const std::string& out_path,
                 const mta::AllocationConfig& cfg) {
  mta::AttributionResult attribution;
  try {
    std::ifstream is(attribution_path);
    if (!is) throw std::runtime_error("cannot open " + attribution_path);
    attribution = mta::read_attribution(is);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<mta::LineItemBudgetState> states;
  if (!states_path.empty()) {
    try {
      std::ifstream is(states_path);
      if (!is) throw std::runtime_error("cannot open " + states_path);
      states = mta::read_states(is);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  mta::AllocationPlan plan;
  try {
    plan = mta::daily_allocation(budget, io_id, attribution, states, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (out_path == "-") {
    mta::write_plan(std::cout, plan);
    return 0;
  }
  return write_file(out_path, [&](std::ostream& os) { mta::write_plan(os, plan); }) ? 0 : 1;
}

int run_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                 const std::string& out_dir) {
  mta::MarketConfig cfg;
  try {
    cfg = mta::load_market_config_file(scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (seed) cfg.seed = *seed;
  const mta::ExperimentResult result = mta::run_experiment(cfg);
  bool ok = true;
  for (const mta::ArmResult* arm : {&result.lta, &result.mta}) {
    const char* name = arm->arm == mta::Arm::mta ? "mta" : "lta";
    mta::EventLog log;  // reuse the writer's merge ordering
    log.users = mta::build_users(arm->touches, arm->actions);
    ok = ok && write_file(out_dir + "/events_" + name + ".log",
                          [&](std::ostream& os) { mta::write_event_log(os, log); });
  }
  ok = ok && write_file(out_dir + "/experiment.csv",
                        [&](std::ostream& os) { mta::write_experiment_csv(os, result); });
  ok = ok && write_file(out_dir + "/budget_shares.csv",
                        [&](std::ostream& os) { mta::write_budget_share_csv(os, result); });
  if (!ok) return 1;
  mta::write_experiment_summary(std::cout, result);
  return 0;
}

int run_report(const LogOptions& log_opt, const std::string& out_path) {
  auto log = load_log(log_opt);
  if (!log) return 1;
  const std::vector<mta::LogReportRow> rows = mta::summarize_log(*log);
  if (out_path == "-") {
    mta::write_log_report_csv(std::cout, rows);
    return 0;
  }
  return write_file(out_path, [&](std::ostream& os) { mta::write_log_report_csv(os, rows); })
             ? 0
             : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"campaign attribution and budget allocation"};
  app.require_subcommand(1);

  // attribute
  auto* attribute = app.add_subcommand("attribute", "compute weights and attribution from a log");
  LogOptions attr_log;
  std::int64_t t_action = 7, t_association = 30;
  std::optional<std::int64_t> as_of;
  int shards = default_shards();
  std::string order_name = "second", mode_name = "mta", out_dir = ".";
  attribute->add_option("--log", attr_log.path, "event log file")->required();
  attribute->add_option("--t-action", t_action, "action window, days");
  attribute->add_option("--t-association", t_association, "association window, days");
  attribute->add_option("--as-of", as_of, "window end, epoch seconds (default: last event)");
  attribute->add_option("--shards", shards, "parallel shards");
  attribute->add_option("--order", order_name, "weight order")
      ->check(CLI::IsMember({"first", "second"}));
  attribute->add_option("--attribution", mode_name, "attribution mode")
      ->check(CLI::IsMember({"lta", "mta"}));
  attribute->add_option("--out-dir", out_dir, "output directory");
  attribute->add_option("--max-malformed", attr_log.max_malformed,
                        "tolerated malformed-line ratio");

  // allocate
  auto* allocate = app.add_subcommand("allocate", "plan tomorrow's budgets from an attribution");
  std::string attribution_path, states_path, plan_out = "-";
  std::string io_id;
  mta::Money budget = 0;
  mta::AllocationConfig alloc_cfg;
  std::optional<mta::Money> learning_budget;
  allocate->add_option("--attribution", attribution_path, "attribution file")->required();
  allocate->add_option("--budget", budget, "insertion order budget, minor units")->required();
  allocate->add_option("--io", io_id, "insertion order id")->required();
  allocate->add_option("--states", states_path, "yesterday's line-item states file");
  allocate->add_option("--out", plan_out, "plan output path, '-' for stdout");
  allocate->add_option("--learning-budget", learning_budget, "budget for new line items");
  allocate->add_option("--learning-budget-cap", alloc_cfg.learning_budget_cap,
                       "cap on the default learning budget");
  allocate->add_option("--explore-rate", alloc_cfg.explore_rate, "capability headroom rate");
  allocate->add_option("--min-budget", alloc_cfg.min_budget, "capability floor");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the two-arm market experiment");
  std::string scenario_path, sim_out_dir = ".";
  std::optional<std::uint64_t> seed;
  simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--seed", seed, "override the scenario seed");
  simulate->add_option("--out-dir", sim_out_dir, "output directory");

  // report
  auto* report = app.add_subcommand("report", "daily delivery rollup of a raw log");
  LogOptions report_log;
  std::string report_out = "-";
  report->add_option("--log", report_log.path, "event log file")->required();
  report->add_option("--out", report_out, "CSV output path, '-' for stdout");
  report->add_option("--max-malformed", report_log.max_malformed,
                     "tolerated malformed-line ratio");

  CLI11_PARSE(app, argc, argv);

  if (*attribute) {
    return run_attribute(attr_log, t_action, t_association, as_of, shards, order_name, mode_name,
                         out_dir);
  }
  if (*allocate) {
    alloc_cfg.learning_budget = learning_budget;
    return run_allocate(attribution_path, states_path, budget, io_id, plan_out, alloc_cfg);
  }
  if (*simulate) return run_simulate(scenario_path, seed, sim_out_dir);
  if (*report) return run_report(report_log, report_out);
  return 0;
}
