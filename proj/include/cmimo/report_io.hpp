#pragma once

// Channel input parsing and JSON report serialization.

#include <string>
#include <string_view>

#include <json.hpp>

#include "cmimo/capacity.hpp"
#include "cmimo/verification.hpp"

namespace cmimo {

using Json = nlohmann::json;

/// {"rows": r, "cols": t, "entries": [[re, im], ...]} in row-major order.
ChannelMatrix parse_channel_json(std::string_view text);

/// Real-valued rows of comma-separated numbers; blank lines and lines
/// starting with '#' are skipped.
ChannelMatrix parse_channel_csv(std::string_view text);

/// Picks the CSV parser for *.csv paths, JSON otherwise.
ChannelMatrix load_channel(const std::string& path);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json vector_to_json(const RealVector& v, double scale = 1.0);
RealVector vector_from_json(const Json& j);

Json constraint_to_json(const PowerConstraint& c);
PowerConstraint constraint_from_json(const Json& j);

/// `unit_scale` multiplies capacities only (1 for nats, 1/ln 2 for bits).
Json capacity_report_to_json(const CapacityReport& rep, double unit_scale = 1.0);
CapacityReport capacity_report_from_json(const Json& j, double unit_scale = 1.0);

Json verification_report_to_json(const VerificationReport& rep);

Json counterexample_to_json(const CounterexampleL1& ce);

Json lemma_search_to_json(const LemmaSearchResult& res);

}  // namespace cmimo
