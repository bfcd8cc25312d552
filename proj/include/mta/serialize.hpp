#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mta/allocation.hpp"
#include "mta/attribution.hpp"

namespace mta {

/// Shortest decimal form that round-trips the exact double; infinities
/// render as "inf"/"-inf".
std::string format_double(double v);

/// Inverse of format_double. Returns false on trailing garbage.
bool parse_double(std::string_view text, double& out);

// Artifact files are tab-separated with '#' header lines. Identifiers come
// from the event log, which guarantees they carry no whitespace. Readers are
// strict: any malformed line throws std::runtime_error naming the line.

void write_weight_table(std::ostream& os, const WeightTable& table);
WeightTable read_weight_table(std::istream& is);

void write_attribution(std::ostream& os, const AttributionResult& result);
AttributionResult read_attribution(std::istream& is);

void write_plan(std::ostream& os, const AllocationPlan& plan);
AllocationPlan read_plan(std::istream& is);

void write_states(std::ostream& os, const std::vector<LineItemBudgetState>& states);
std::vector<LineItemBudgetState> read_states(std::istream& is);

}  // namespace mta
