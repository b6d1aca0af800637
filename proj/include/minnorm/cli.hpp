#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "minnorm/dp.hpp"
#include "minnorm/model.hpp"

namespace minnorm::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Two-column x,y CSV.  An optional header row is detected when its fields
/// are not numbers; blank lines and lines starting with '#' are skipped.
[[nodiscard]] Dataset read_dataset_csv(std::istream& in, const std::string& source = "<stream>");
[[nodiscard]] Dataset load_dataset(const std::string& path);

/// FNV-1a over the bit patterns of all coordinates, as 16 hex digits.
[[nodiscard]] std::string dataset_hash(const Dataset& d);

[[nodiscard]] nlohmann::json function_to_json(const PiecewiseLinearFn& f);
[[nodiscard]] PiecewiseLinearFn function_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json estimator_document(const Dataset& d, const Solution& s, const DPConfig& cfg);

/// Command-line entry point.  Returns 0 on success, 2 for input errors and 3
/// when a solver fails to converge.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace minnorm::cli
