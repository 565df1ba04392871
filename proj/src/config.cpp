#include "matgibbs/config.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace matgibbs {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kConfig, "config field '" + path + "': " + message);
}

double number_at(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  const double x = node.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

std::int64_t integer_at(const json& node, const std::string& path) {
  if (!node.is_number_integer() && !node.is_number_unsigned()) fail(path, "expected an integer");
  return node.get<std::int64_t>();
}

int positive_int(const json& doc, const char* key, int fallback, int minimum) {
  if (!doc.contains(key)) return fallback;
  const auto value = integer_at(doc.at(key), key);
  if (value < minimum || value > 1'000'000'000) fail(key, "must be at least " + std::to_string(minimum));
  return static_cast<int>(value);
}

Matrix nested_matrix(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) fail(path, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(node.size());
  Matrix a(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row_path = path + "[" + std::to_string(r) + "]";
    const auto& row = node[static_cast<std::size_t>(r)];
    if (!row.is_array()) fail(row_path, "expected an array");
    if (static_cast<Eigen::Index>(row.size()) != rows) {
      fail(row_path, "row has " + std::to_string(row.size()) + " entries, matrix must be square with " +
                         std::to_string(rows) + " rows");
    }
    for (Eigen::Index c = 0; c < rows; ++c) {
      a(r, c) = number_at(row[static_cast<std::size_t>(c)], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return a;
}

Matrix flat_matrix(const json& node, int d, const std::string& path) {
  if (static_cast<int>(node.size()) != d * d) {
    fail(path, "flat matrix has " + std::to_string(node.size()) + " entries, expected d*d = " + std::to_string(d * d));
  }
  Matrix a(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const auto idx = static_cast<std::size_t>(r * d + c);
      a(r, c) = number_at(node[idx], path + "[" + std::to_string(idx) + "]");
    }
  }
  return a;
}

Construction parse_construction(const std::string& name) {
  if (name == "cone") return Construction::kCone;
  if (name == "kusuoka") return Construction::kKusuoka;
  if (name == "tensor-k") return Construction::kTensorK;
  if (name == "projective") return Construction::kProjective;
  fail("construction", "unknown construction '" + name + "' (cone, kusuoka, tensor-k, projective)");
}

}  // namespace

const char* construction_name(Construction c) {
  switch (c) {
    case Construction::kCone: return "cone";
    case Construction::kKusuoka: return "kusuoka";
    case Construction::kTensorK: return "tensor-k";
    case Construction::kProjective: return "projective";
  }
  return "unknown";
}

const char* output_format_name(OutputFormat f) { return f == OutputFormat::kCsv ? "csv" : "json"; }

double RunConfig::holder_exponent() const { return epsilon.value_or(std::min(1.0, t)); }

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");

  static const char* const kKnown[] = {"matrices", "d", "M", "t", "construction", "k", "grid_resolution", "L", "N",
                                       "n_max", "epsilon", "theta", "seed", "budget", "format"};
  for (const auto& item : doc.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return item.key() == k; }) ==
        std::end(kKnown)) {
      fail(item.key(), "unknown field");
    }
  }

  RunConfig cfg;
  if (!doc.contains("matrices")) fail("matrices", "missing required field");
  const auto& mats = doc.at("matrices");
  if (!mats.is_array() || mats.empty()) fail("matrices", "expected a non-empty array");

  const bool flat = mats.front().is_array() && !mats.front().empty() && mats.front().front().is_number();
  std::optional<int> declared_d;
  if (doc.contains("d")) declared_d = positive_int(doc, "d", 0, 1);
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const auto path = "matrices[" + std::to_string(i) + "]";
    if (!mats[i].is_array()) fail(path, "expected an array");
    if (flat) {
      if (!declared_d) fail("d", "required when matrices are given as flat arrays");
      cfg.matrices.push_back(flat_matrix(mats[i], *declared_d, path));
    } else {
      cfg.matrices.push_back(nested_matrix(mats[i], path));
    }
  }
  cfg.d = static_cast<int>(cfg.matrices.front().rows());
  for (std::size_t i = 1; i < cfg.matrices.size(); ++i) {
    if (cfg.matrices[i].rows() != cfg.d) {
      fail("matrices[" + std::to_string(i) + "]", "dimension " + std::to_string(cfg.matrices[i].rows()) +
                                                      " differs from matrices[0] dimension " + std::to_string(cfg.d));
    }
  }
  if (declared_d && *declared_d != cfg.d) {
    fail("d", "declared " + std::to_string(*declared_d) + " but matrices are " + std::to_string(cfg.d) + "x" +
                  std::to_string(cfg.d));
  }
  cfg.M = static_cast<int>(cfg.matrices.size());
  if (cfg.M < 2) fail("matrices", "need at least two matrices");
  if (doc.contains("M") && positive_int(doc, "M", 0, 1) != cfg.M) {
    fail("M", "declared alphabet size differs from the number of matrices (" + std::to_string(cfg.M) + ")");
  }

  if (doc.contains("construction")) {
    if (!doc.at("construction").is_string()) fail("construction", "expected a string");
    cfg.construction = parse_construction(doc.at("construction").get<std::string>());
  }
  if (doc.contains("k")) {
    cfg.k = static_cast<int>(integer_at(doc.at("k"), "k"));
  }
  if (cfg.construction == Construction::kTensorK && (cfg.k < 2 || cfg.k % 2 != 0)) {
    fail("k", "tensor-k construction requires an even k >= 2 (the tensor cone is {0} for odd k), got " +
                  std::to_string(cfg.k));
  }
  if (cfg.construction == Construction::kKusuoka) {
    if (doc.contains("k") && cfg.k != 2) fail("k", "kusuoka construction fixes k = 2");
    cfg.k = 2;
  }

  // The cone routes fix t; a given t must agree with it.
  std::optional<double> natural_t;
  switch (cfg.construction) {
    case Construction::kCone: natural_t = 1.0; break;
    case Construction::kKusuoka:
    case Construction::kTensorK: natural_t = static_cast<double>(cfg.k); break;
    case Construction::kProjective: break;
  }
  if (doc.contains("t")) {
    cfg.t = number_at(doc.at("t"), "t");
    if (cfg.t < 0.0) fail("t", "must be >= 0");
    if (natural_t && cfg.t != *natural_t) {
      fail("t", std::string(construction_name(cfg.construction)) + " construction fixes t = " +
                    std::to_string(static_cast<int>(*natural_t)));
    }
  } else {
    cfg.t = natural_t.value_or(1.0);
  }

  cfg.grid_resolution = positive_int(doc, "grid_resolution", cfg.grid_resolution, 4);
  cfg.scan_length = positive_int(doc, "L", cfg.scan_length, 1);
  cfg.gap = positive_int(doc, "N", cfg.gap, 1);
  cfg.n_max = positive_int(doc, "n_max", cfg.n_max, 2);
  if (doc.contains("epsilon")) {
    const double eps = number_at(doc.at("epsilon"), "epsilon");
    if (!(eps > 0.0) || eps > std::min(1.0, cfg.t)) fail("epsilon", "must satisfy 0 < epsilon <= min(1, t)");
    cfg.epsilon = eps;
  }
  if (doc.contains("theta")) {
    cfg.theta = number_at(doc.at("theta"), "theta");
    if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) fail("theta", "must lie in (0, 1)");
  }
  if (doc.contains("seed")) {
    const auto seed = integer_at(doc.at("seed"), "seed");
    if (seed < 0) fail("seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (doc.contains("budget")) {
    const auto budget = integer_at(doc.at("budget"), "budget");
    if (budget < 1) fail("budget", "must be positive");
    cfg.budget = static_cast<std::uint64_t>(budget);
  }
  if (doc.contains("format")) {
    const auto& f = doc.at("format");
    if (!f.is_string()) fail("format", "expected a string");
    const auto name = f.get<std::string>();
    if (name == "csv") {
      cfg.format = OutputFormat::kCsv;
    } else if (name == "json") {
      cfg.format = OutputFormat::kJson;
    } else {
      fail("format", "expected csv or json");
    }
  }
  return cfg;
}

}  // namespace matgibbs
