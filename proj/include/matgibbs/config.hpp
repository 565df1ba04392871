#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matgibbs/matrix_system.hpp"

namespace matgibbs {

enum class Construction { kCone, kKusuoka, kTensorK, kProjective };
enum class OutputFormat { kCsv, kJson };

const char* construction_name(Construction c);
const char* output_format_name(OutputFormat f);

/// Validated run configuration. Scan parameters keep their defaults when the
/// document omits them.
struct RunConfig {
  std::vector<Matrix> matrices;
  int d = 0;
  int M = 0;
  double t = 1.0;
  Construction construction = Construction::kCone;
  int k = 2;
  int grid_resolution = 1024;
  int scan_length = 6;  // L
  int gap = 4;          // N
  int n_max = 10;
  std::optional<double> epsilon;  // Holder exponent; min(1, t) when absent
  double theta = 0.5;
  std::uint64_t seed = 42;
  std::uint64_t budget = 20'000'000;
  OutputFormat format = OutputFormat::kCsv;

  MatrixSystem system() const { return MatrixSystem(matrices); }
  EnumerationBudget enumeration_budget() const { return {budget}; }
  double holder_exponent() const;
};

/// Parses a JSON document. Matrices are given either nested
/// ([[[1,1],[0,1]], ...]) or as flat row-major arrays together with "d".
/// Throws kConfig naming the offending field.
RunConfig parse_config(std::string_view text);

}  // namespace matgibbs
