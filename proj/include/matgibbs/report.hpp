#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "matgibbs/config.hpp"

namespace matgibbs {

inline constexpr const char* kSummarySchemaVersion = "1.0";

enum class Subcommand { kPressure, kGibbs, kLift, kTransfer, kMixing, kCheckAll };

const char* subcommand_name(Subcommand s);
std::optional<Subcommand> parse_subcommand(std::string_view name);

using Cell = std::variant<std::string, double, std::int64_t>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// An asserted invariant: passed iff `value` satisfies `relation` against `bound`.
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string relation;  // "<=", ">=", ">", "==" (boolean checks carry value 0/1)
  double bound = 0.0;
};

struct RunReport {
  Subcommand subcommand = Subcommand::kCheckAll;
  nlohmann::ordered_json summary;
  std::vector<Table> tables;
  std::vector<Check> checks;

  bool all_passed() const;
  /// 0 when every check passed, 1 otherwise.
  int exit_code() const { return all_passed() ? 0 : 1; }
};

/// Runs one subcommand. Module errors propagate as matgibbs::Error.
RunReport run(const RunConfig& config, Subcommand subcommand);

/// Writes summary.json plus one CSV per table (or tables.json for the json
/// format) into `out_dir`, creating it if needed.
void write_report(const RunReport& report, const RunConfig& config, const std::filesystem::path& out_dir);

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// JSON text with every double printed to 17 significant digits (non-finite
/// values become null).
std::string dump_json(const nlohmann::ordered_json& doc);

}  // namespace matgibbs
