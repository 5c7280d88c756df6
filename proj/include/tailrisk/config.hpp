#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailrisk/bandit.hpp"
#include "tailrisk/distributions.hpp"
#include "tailrisk/estimators.hpp"
#include "tailrisk/experiments.hpp"

namespace tailrisk {

using json = nlohmann::json;

// Distributions serialise as {"family": name, "params": {...}}; estimators as
// {"kind": "empirical" | "truncated" | "gaussian-plugin", ...}. Malformed
// input throws InvalidArgument.

json to_json(const DistributionSpec& dist);
DistributionSpec distribution_from_json(const json& j);

json to_json(const EstimatorSpec& spec);
EstimatorSpec estimator_from_json(const json& j);

json to_json(const RiskEstimate& estimate);
json to_json(const BanditRun& run);
json to_json(const TailCurve& curve);
json to_json(const ErrorCurve& curve);
TailCurve tail_curve_from_json(const json& j);
ErrorCurve error_curve_from_json(const json& j);

/// {"arms": [...], "alpha": a}
BanditEnv bandit_env_from_json(const json& j);

/// {"kind": "deviation", ...} or {"kind": "misid", ...}
DeviationConfig deviation_config_from_json(const json& j);
MisidConfig misid_config_from_json(const json& j);

/// Reads and parses a JSON file; IOFailure when unreadable.
json load_json(const std::filesystem::path& path);

/// JSON text with every floating value printed to 17 significant digits.
std::string dump_json(const json& j);

/// %.17g rendering used for CSV cells and JSON numbers.
std::string format_double(double x);

/// One value per line; blank lines and a non-numeric header line are skipped.
std::vector<double> read_csv_column(const std::filesystem::path& path);
/// Packed little-endian IEEE-754 binary64.
std::vector<double> read_f64_stream(const std::filesystem::path& path);
void write_f64_stream(const std::filesystem::path& path, std::span<const double> values);

}  // namespace tailrisk
