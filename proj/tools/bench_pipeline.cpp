// Times the sharded attribution pipeline against the serial reference on a
// synthetic corpus and checks that every configuration produces identical
// bytes.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mta/attribution.hpp"
#include "mta/pipeline.hpp"
#include "mta/serialize.hpp"
#include "mta/synthetic.hpp"

namespace {

std::string render(const mta::WeightTable& table, const mta::AttributionResult& result) {
  std::ostringstream os;
  mta::write_weight_table(os, table);
  mta::write_attribution(os, result);
  return os.str();
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pipeline benchmark: serial reference vs sharded"};
  int users = 100000;
  std::string order_name = "second";
  std::string mode_name = "mta";
  std::vector<int> shard_counts{1, 2, 4, 8};
  app.add_option("--users", users, "corpus size");
  app.add_option("--order", order_name, "weight order")
      ->check(CLI::IsMember({"first", "second"}));
  app.add_option("--attribution", mode_name, "attribution mode")
      ->check(CLI::IsMember({"lta", "mta"}));
  app.add_option("--shards", shard_counts, "shard counts to time");
  CLI11_PARSE(app, argc, argv);

  const mta::WeightOrder order =
      order_name == "first" ? mta::WeightOrder::first : mta::WeightOrder::second;
  const mta::AttributionMode mode =
      mode_name == "lta" ? mta::AttributionMode::lta : mta::AttributionMode::mta;

  mta::SyntheticSpec spec;
  spec.n_users = users;
  std::printf("generating %d users...\n", users);
  const std::vector<mta::UserHistory> corpus = mta::synthetic_corpus(spec);
  const mta::WindowConfig w{7, 30, spec.t0 + spec.span_seconds};
  const std::string advertiser = "adv01";

  auto serial_start = std::chrono::steady_clock::now();
  const mta::WeightTable serial_table =
      mta::compute_weight_table(corpus, w, advertiser, order);
  const mta::AttributionResult serial_result = mta::attribute_all(corpus, w, serial_table, mode);
  const double serial_ms = ms_since(serial_start);
  const std::string serial_bytes = render(serial_table, serial_result);
  std::printf("%-12s %10.1f ms   %8s   %s\n", "serial", serial_ms, "1.00x", "reference");

  bool all_match = true;
  for (int shards : shard_counts) {
    auto start = std::chrono::steady_clock::now();
    const mta::WeightTable table = mta::run_step1(corpus, w, advertiser, order, shards);
    const mta::AttributionResult result = mta::run_step2(corpus, w, table, mode, shards);
    const double ms = ms_since(start);
    const bool match = render(table, result) == serial_bytes;
    all_match = all_match && match;
    char label[32];
    std::snprintf(label, sizeof(label), "shards=%d", shards);
    char speedup[16];
    std::snprintf(speedup, sizeof(speedup), "%.2fx", serial_ms / ms);
    std::printf("%-12s %10.1f ms   %8s   %s\n", label, ms, speedup,
                match ? "bytes match" : "MISMATCH");
  }
  if (!all_match) {
    std::fprintf(stderr, "pipeline output diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
