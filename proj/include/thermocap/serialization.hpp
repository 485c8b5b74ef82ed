#pragma once

// JSON forms of states and reports.  Non-finite doubles become null.

#include <string>

#include "json.hpp"

#include "thermocap/extremality.hpp"
#include "thermocap/fock.hpp"
#include "thermocap/fock_perturbation.hpp"
#include "thermocap/perturbation.hpp"

namespace thermocap {

using Json = nlohmann::ordered_json;

/// Bumped whenever a CSV column or JSON key changes meaning.
inline constexpr int kSchemaVersion = 1;
/// First line of every CSV file.
std::string csv_schema_header(const std::string& table);

/// {n, gamma: row-major 4n^2 numbers}
Json to_json(const CovMatrix& cm);
CovMatrix cm_from_json(const Json& j);

/// {d, modes, re, im} row-major.
Json to_json(const FockDensity& rho);
FockDensity fock_from_json(const Json& j);

Json to_json(const DeltaCiReport& r);
Json to_json(const Ns0Result& r);
Json to_json(const NcResult& r);
Json to_json(const CapacityCertificate& c);
Json to_json(const TraceBoundReport& r);
Json to_json(const DirectionalReport& r);
Json to_json(const LocalMaxReport& r);
Json to_json(const DeltaCiScan& s);
Json to_json(const PerturbCompareReport& r);
Json to_json(const PairIdentityReport& r);
Json to_json(const ProbeEnsemble& e);
Json to_json(const QuadratureSpec& q);

/// null for non-finite values.
Json number(double x);

/// Shortest round-trip decimal; "inf", "-inf" or "nan" otherwise.
std::string format_double(double x);

}  // namespace thermocap
