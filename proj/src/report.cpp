#include "matgibbs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>

#include "matgibbs/cone_gibbs.hpp"
#include "matgibbs/mixing.hpp"
#include "matgibbs/projective_transfer.hpp"
#include "matgibbs/tensor_lift.hpp"

namespace matgibbs {
namespace {

using nlohmann::ordered_json;

constexpr double kMassSlack = 1e-9;

void add_check(RunReport& report, std::string name, double value, const char* relation, double bound) {
  bool ok = false;
  const std::string rel(relation);
  if (rel == "<=") ok = value <= bound;
  if (rel == ">=") ok = value >= bound;
  if (rel == ">") ok = value > bound;
  if (rel == "==") ok = value == bound;
  report.checks.push_back({std::move(name), ok, value, rel, bound});
}

void add_flag(RunReport& report, std::string name, bool ok) {
  add_check(report, std::move(name), ok ? 1.0 : 0.0, "==", 1.0);
}

ordered_json complex_list(const std::vector<std::complex<double>>& values) {
  ordered_json out = ordered_json::array();
  for (const auto& z : values) out.push_back({{"re", z.real()}, {"im", z.imag()}});
  return out;
}

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// A Gibbs state for the configured construction, shared by the gibbs and
// mixing sections.
struct Model {
  std::shared_ptr<const CylinderMeasure> mu;
  std::shared_ptr<const ConeGibbsModel> cone;  // null for the projective route
  double rho = 0.0;
  double gap_ratio = 0.0;
  double consistency_tolerance = 1e-10;
  int consistency_length = 0;
  ordered_json info;
};

LiftedSystem configured_lift(const RunConfig& cfg, const MatrixSystem& system) {
  if (cfg.construction == Construction::kKusuoka) return kusuoka_lift(system);
  return tensor_power_lift(system, cfg.k);
}

Model build_model(const RunConfig& cfg, const MatrixSystem& system) {
  Model m;
  m.consistency_length = cfg.scan_length;
  switch (cfg.construction) {
    case Construction::kCone: {
      auto model = std::make_shared<ConeGibbsModel>(build_cone_gibbs(system));
      m.cone = model;
      m.mu = model;
      break;
    }
    case Construction::kKusuoka:
    case Construction::kTensorK: {
      const auto lifted = configured_lift(cfg, system);
      auto model = std::make_shared<ConeGibbsModel>(k_gibbs_measure(lifted, 64, cfg.seed));
      m.cone = model;
      m.mu = model;
      m.info["lifted_dim"] = lifted.lifted_dim;
      m.info["k"] = lifted.k;
      m.info["orientation"] = orientation_name(lifted.orientation);
      break;
    }
    case Construction::kProjective: {
      auto disc = std::make_shared<TransferDiscretization>(
          assemble_transfer(system, cfg.t, build_grid(system.dim(), cfg.grid_resolution)));
      m.rho = disc->rho;
      m.gap_ratio = disc->gap_ratio;
      m.consistency_tolerance = 1e-3;
      m.consistency_length = std::min(cfg.scan_length, 5);
      m.info["grid_resolution"] = disc->grid.resolution;
      m.info["iterations"] = disc->iterations;
      m.info["converged"] = disc->converged;
      m.mu = std::make_shared<TransferGibbsMeasure>(std::move(disc));
      break;
    }
  }
  if (m.cone) {
    const auto& s = m.cone->spectral();
    m.rho = s.rho;
    m.gap_ratio = s.gap_ratio;
    m.info["u"] = vector_json(s.u);
    m.info["v"] = vector_json(s.v);
    m.info["eigenvalues"] = complex_list(s.eigenvalues);
  }
  m.info["rho"] = m.rho;
  m.info["P"] = m.mu->pressure();
  m.info["t"] = m.mu->exponent();
  m.info["gap_ratio"] = m.gap_ratio;
  return m;
}

void set_headline(RunReport& report, double rho, double pressure, double gap_ratio) {
  auto& s = report.summary;
  if (s.contains("rho")) return;
  s["rho"] = rho;
  s["P"] = pressure;
  s["gap_ratio"] = gap_ratio;
}

void pressure_section(const RunConfig& cfg, const MatrixSystem& system, RunReport& report) {
  const auto series = pressure_estimate(system, cfg.t, cfg.n_max, cfg.enumeration_budget());
  Table table{"pressure", {"n", "log_z", "per_n", "diff"}, {}};
  for (int n = 1; n <= series.n_max(); ++n) {
    const double diff = n < series.n_max() ? series.diff[static_cast<std::size_t>(n - 1)] : std::nan("");
    table.rows.push_back({std::int64_t{n}, series.log_z_at(n), series.per_n_at(n), diff});
  }
  report.tables.push_back(std::move(table));

  double worst = -std::numeric_limits<double>::infinity();
  for (int a = 1; a <= series.n_max(); ++a) {
    for (int b = 1; a + b <= series.n_max(); ++b) {
      worst = std::max(worst, series.log_z_at(a + b) - series.log_z_at(a) - series.log_z_at(b));
    }
  }
  add_check(report, "pressure.subadditivity", worst, "<=", 1e-9);

  ordered_json section;
  section["t"] = cfg.t;
  section["norm"] = series.norm;
  section["n_max"] = series.n_max();
  section["P_per_n"] = series.per_n.back();
  section["P_diff"] = series.diff.back();
  report.summary["sections"]["pressure"] = std::move(section);
  if (!report.summary.contains("P")) report.summary["P"] = series.per_n.back();
}

Table word_table(const std::string& name, const CylinderMeasure& mu, int max_len) {
  Table table{name, {"word", "mass", "norm_t", "ratio"}, {}};
  for (const auto& w : all_words(mu.alphabet_size(), 1, max_len)) {
    const double mass = mu.measure(w);
    const double norm_t = std::pow(mu.norm_of_product(w), mu.exponent());
    table.rows.push_back({w.str(), mass, norm_t, mu.gibbs_ratio(w)});
  }
  return table;
}

void mass_range_check(RunReport& report, const std::string& prefix, const Table& table) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : table.rows) {
    const double mass = std::get<double>(row[1]);
    lo = std::min(lo, mass);
    hi = std::max(hi, mass);
  }
  add_check(report, prefix + ".mass_min", lo, ">=", 0.0);
  add_check(report, prefix + ".mass_max", hi, "<=", 1.0 + kMassSlack);
}

void gibbs_section(const RunConfig& cfg, const Model& m, RunReport& report) {
  const auto& mu = *m.mu;
  const auto budget = cfg.enumeration_budget();
  auto words = word_table("gibbs_words", mu, cfg.scan_length);
  mass_range_check(report, "gibbs", words);
  report.tables.push_back(std::move(words));

  double singletons = 0.0;
  for (int i = 0; i < mu.alphabet_size(); ++i) singletons += mu.measure(Word({i}));
  add_check(report, "gibbs.empty_word", std::abs(mu.measure(Word{}) - 1.0), "<=", 1e-10);
  add_check(report, "gibbs.singleton_sum", std::abs(singletons - 1.0), "<=", 1e-8);

  const double consistency = consistency_check(mu, m.consistency_length, budget);
  add_check(report, "gibbs.consistency", consistency, "<=", m.consistency_tolerance);

  const auto ratios = gibbs_ratio_scan(mu, cfg.scan_length, budget);
  add_check(report, "gibbs.ratio_min_positive", ratios.c_min, ">=", std::numeric_limits<double>::min());
  add_flag(report, "gibbs.ratio_max_finite", std::isfinite(ratios.c_max) && ratios.c_min <= ratios.c_max);

  const auto variational = variational_check(mu, cfg.n_max, budget);
  add_check(report, "gibbs.entropy_nonnegative", variational.entropy, ">=", -1e-12);
  add_check(report, "gibbs.entropy_at_most_log_m", variational.entropy, "<=",
            std::log(static_cast<double>(mu.alphabet_size())) + 1e-12);

  ordered_json section = m.info;
  section["consistency_defect"] = consistency;
  section["consistency_length"] = m.consistency_length;
  section["ratio_scan"] = {{"L", ratios.scan_length},
                           {"c_min", ratios.c_min},
                           {"c_max", ratios.c_max},
                           {"argmin", ratios.argmin.str()},
                           {"argmax", ratios.argmax.str()},
                           {"skipped_zero_norm", ratios.skipped_zero_norm}};
  section["variational"] = {{"n", variational.n},
                            {"entropy", variational.entropy},
                            {"lyapunov", variational.lyapunov},
                            {"pressure", variational.pressure},
                            {"defect", variational.defect}};
  if (m.cone) {
    constexpr int kPathLength = 100000;
    const auto path = sample_path(*m.cone, kPathLength, cfg.seed);
    const auto zeros = std::count(path.begin(), path.end(), 0);
    section["sample_path"] = {{"length", kPathLength},
                              {"seed", cfg.seed},
                              {"frequency_0", static_cast<double>(zeros) / kPathLength},
                              {"mu_0", mu.measure(Word({0}))}};
  }
  report.summary["sections"]["gibbs"] = std::move(section);
  set_headline(report, m.rho, mu.pressure(), m.gap_ratio);
}

void lift_section(const RunConfig& cfg, const MatrixSystem& system, RunReport& report) {
  const auto lifted = configured_lift(cfg, system);
  const auto budget = cfg.enumeration_budget();
  const Matrix sum = lifted.operators.sum();

  PositivityVerdict positivity;
  for (int n = 1; n <= system.dim(); ++n) {
    positivity = lift_positivity_test(lifted, n, 64, cfg.seed);
    if (positivity.positive) break;
  }
  add_flag(report, "lift.positivity", positivity.positive);

  ordered_json section;
  section["k"] = lifted.k;
  section["lifted_dim"] = lifted.lifted_dim;
  section["basis"] = lifted.basis == LiftBasis::kMonomial ? "monomial" : "symmetric-matrix";
  section["orientation"] = orientation_name(lifted.orientation);
  section["positivity"] = {{"positive", positivity.positive},
                           {"N", positivity.gap},
                           {"trials", positivity.trials},
                           {"exact_stage_failed", positivity.exact_stage_failed},
                           {"min_relative_eigenvalue", positivity.min_relative_eigenvalue}};
  if (positivity.failing_vector) section["positivity"]["failing_vector"] = vector_json(*positivity.failing_vector);

  // Product compatibility and the norm identity on every word up to length 4.
  const int check_len = std::min(cfg.scan_length, 4);
  double product_defect = 0.0;
  double norm_defect = 0.0;
  for (const auto& w : all_words(system.alphabet_size(), 1, check_len)) {
    const Matrix direct = lift_of_word(lifted, w);
    const Matrix via_ops = word_product(lifted.operators, w);
    product_defect = std::max(product_defect, (via_ops - direct).norm() / std::max(direct.norm(), 1e-300));
    const double base = spectral_norm(word_product(lifted.lifted_matrices(),
                                                   lifted.orientation == Orientation::kReverse ? w.reversed() : w));
    const double target = std::pow(base, lifted.k);
    norm_defect = std::max(norm_defect, std::abs(lifted_operator_norm(lifted, via_ops) - target) / target);
  }
  add_check(report, "lift.product_compatibility", product_defect, "<=", 1e-10);
  add_check(report, "lift.norm_identity", norm_defect, "<=", 1e-8);
  section["product_defect"] = product_defect;
  section["norm_identity_defect"] = norm_defect;

  if (positivity.positive) {
    const auto model = k_gibbs_measure(lifted, 64, cfg.seed);
    const auto& s = model.spectral();
    section["rho"] = s.rho;
    section["P"] = model.pressure();
    section["gap_ratio"] = s.gap_ratio;
    section["eigenvalues"] = complex_list(s.eigenvalues);
    const double consistency = consistency_check(model, cfg.scan_length, budget);
    add_check(report, "lift.consistency", consistency, "<=", 1e-10);
    const auto ratios = gibbs_ratio_scan(model, cfg.scan_length, budget);
    add_check(report, "lift.ratio_min_positive", ratios.c_min, ">=", std::numeric_limits<double>::min());
    add_flag(report, "lift.ratio_max_finite", std::isfinite(ratios.c_max));
    section["consistency_defect"] = consistency;
    section["ratio_scan"] = {{"L", ratios.scan_length}, {"c_min", ratios.c_min}, {"c_max", ratios.c_max}};
    auto words = word_table("lift_words", model, cfg.scan_length);
    mass_range_check(report, "lift", words);
    report.tables.push_back(std::move(words));
    set_headline(report, s.rho, model.pressure(), s.gap_ratio);
  } else {
    section["rho"] = std::abs(leading_eigentriple(sum, lift_sign_functional(lifted)).rho);
  }
  report.summary["sections"]["lift"] = std::move(section);
}

void transfer_section(const RunConfig& cfg, const MatrixSystem& system, RunReport& report) {
  auto disc = std::make_shared<TransferDiscretization>(
      assemble_transfer(system, cfg.t, build_grid(system.dim(), cfg.grid_resolution)));
  const auto& h = disc->h;
  const auto [h_min, h_max] = std::minmax_element(h.begin(), h.end());
  const double nu_min = *std::min_element(disc->nu.begin(), disc->nu.end());
  double pairing = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) pairing += h[j] * disc->nu[j];

  add_flag(report, "transfer.converged", disc->converged);
  add_check(report, "transfer.operator_nonnegative", disc->op.min_value(), ">=", 0.0);
  add_check(report, "transfer.h_positive", *h_min / *h_max, ">", 1e-12);
  add_check(report, "transfer.nu_nonnegative", nu_min, ">=", 0.0);
  add_check(report, "transfer.normalization", std::abs(pairing - 1.0), "<=", 1e-10);
  add_check(report, "transfer.right_residual", disc->right_residual, "<=", 1e-8);
  add_check(report, "transfer.left_residual", disc->left_residual, "<=", 1e-8);

  const double eps = cfg.holder_exponent();
  const int holder_len = std::min(cfg.scan_length, 6);
  double holder_short = 0.0;
  double holder_long = 0.0;
  for (const auto& w : all_words(system.alphabet_size(), 0, holder_len)) {
    const double ratio = holder_bound_check(*disc, w, eps);
    if (static_cast<int>(w.size()) <= 3) holder_short = std::max(holder_short, ratio);
    holder_long = std::max(holder_long, ratio);
  }
  add_check(report, "transfer.holder_bounded", holder_long, "<=", 10.0 * holder_short);

  const auto contraction = projective_contraction_check(system, disc->grid, 10000, cfg.t, cfg.seed);
  add_flag(report, "transfer.contraction", contraction.passed);

  const auto proximal = proximality_search(system, 4, cfg.enumeration_budget());

  Table grid{"transfer_grid", {"index"}, {}};
  for (int c = 0; c < system.dim(); ++c) grid.columns.push_back("x" + std::to_string(c));
  grid.columns.insert(grid.columns.end(), {"h", "nu"});
  for (int j = 0; j < disc->grid.resolution; ++j) {
    std::vector<Cell> row{std::int64_t{j}};
    for (int c = 0; c < system.dim(); ++c) row.emplace_back(disc->grid.points(c, j));
    row.emplace_back(h[static_cast<std::size_t>(j)]);
    row.emplace_back(disc->nu[static_cast<std::size_t>(j)]);
    grid.rows.push_back(std::move(row));
  }
  report.tables.push_back(std::move(grid));

  const TransferGibbsMeasure mu(disc);
  auto words = word_table("transfer_words", mu, std::min(cfg.scan_length, 6));
  mass_range_check(report, "transfer", words);
  report.tables.push_back(std::move(words));

  ordered_json section;
  section["t"] = disc->t;
  section["grid_resolution"] = disc->grid.resolution;
  section["rho"] = disc->rho;
  section["P"] = std::log(disc->rho);
  section["gap_ratio"] = disc->gap_ratio;
  section["iterations"] = disc->iterations;
  section["right_residual"] = disc->right_residual;
  section["left_residual"] = disc->left_residual;
  section["h_min_over_max"] = *h_min / *h_max;
  section["holder"] = {{"epsilon", eps}, {"max_short", holder_short}, {"max_long", holder_long},
                       {"long_length", holder_len}};
  section["contraction"] = {{"samples", contraction.samples},
                            {"worst_contraction", contraction.worst_contraction},
                            {"worst_weight", contraction.worst_weight}};
  section["proximality"] = {{"witness", proximal.witness ? ordered_json(proximal.witness->str()) : ordered_json()},
                            {"eigenvalue_separation", proximal.eigenvalue_separation}};
  report.summary["sections"]["transfer"] = std::move(section);
  set_headline(report, disc->rho, std::log(disc->rho), disc->gap_ratio);
}

void mixing_section(const RunConfig& cfg, const MatrixSystem& system, const Model& m, RunReport& report) {
  const auto& mu = *m.mu;
  const auto budget = cfg.enumeration_budget();
  const int L = cfg.scan_length;
  const int N = cfg.gap;
  ordered_json section;
  section["gap_ratio"] = m.gap_ratio;
  section["skipped"] = ordered_json::array();

  // A diagnostic that would exceed the enumeration budget is skipped and
  // listed, so measures without closed-form joint masses still get the rest.
  auto attempt = [&](const char* name, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBudgetExceeded) throw;
      section["skipped"].push_back({{"diagnostic", name}, {"reason", e.what()}});
    }
  };

  attempt("bradley", [&] {
    const auto near = bradley_scan(mu, N, L, budget);
    add_check(report, "mixing.bradley_lower_at_most_one", near.c_lower, "<=", 1.0 + 1e-12);
    add_check(report, "mixing.bradley_upper_at_least_one", near.c_upper, ">=", 1.0 - 1e-12);
    add_check(report, "mixing.bradley_lower_positive", near.c_lower, ">=", std::numeric_limits<double>::min());
    Table bradley{"bradley", {"gap", "L", "c_lower", "c_upper", "excluded_zero_mass"}, {}};
    auto row = [&](const BradleyReport& r) {
      bradley.rows.push_back({std::int64_t{r.gap}, std::int64_t{r.scan_length}, r.c_lower, r.c_upper,
                              static_cast<std::int64_t>(r.excluded_zero_mass)});
    };
    row(near);
    section["bradley"] = {{"N", N},
                          {"L", L},
                          {"c_lower", near.c_lower},
                          {"c_upper", near.c_upper},
                          {"upper_pair", {near.upper_i.str(), near.upper_j.str()}},
                          {"lower_pair", {near.lower_i.str(), near.lower_j.str()}}};
    attempt("bradley_persistence", [&] {
      const auto far = bradley_scan(mu, 2 * N, L, budget);
      add_flag(report, "mixing.bradley_persistence", far.contained_in(near, 1e-6));
      row(far);
      section["bradley"]["c_lower_2N"] = far.c_lower;
      section["bradley"]["c_upper_2N"] = far.c_upper;
    });
    report.tables.push_back(std::move(bradley));
  });

  attempt("psi", [&] {
    const std::vector<int> gaps{2, 4, 8};
    const auto psi = psi_coefficients(mu, gaps, L, budget);
    bool monotone = true;
    bool averaging = true;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      averaging = averaging && psi[i].psi_star >= 1.0 - 1e-12 && psi[i].psi_prime <= 1.0 + 1e-12;
      if (i > 0) {
        monotone = monotone && psi[i].psi_star <= psi[i - 1].psi_star + 1e-9 &&
                   psi[i].psi_prime >= psi[i - 1].psi_prime - 1e-9;
      }
    }
    add_flag(report, "mixing.psi_monotone", monotone);
    add_flag(report, "mixing.psi_averaging", averaging);
    Table table{"psi", {"gap", "L", "psi_star", "psi_prime"}, {}};
    for (const auto& p : psi) table.rows.push_back({std::int64_t{p.gap}, std::int64_t{p.scan_length}, p.psi_star, p.psi_prime});
    report.tables.push_back(std::move(table));
  });

  attempt("eps_independence", [&] {
    std::vector<double> gap_list;
    std::vector<double> values;
    for (int gap = 3; gap <= 10; ++gap) {
      gap_list.push_back(gap);
      values.push_back(eps_independence(mu, 2, 2, gap, budget));
    }
    const auto fit = fit_geometric_rate(gap_list, values);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    add_check(report, "mixing.eps_nonnegative", *lo, ">=", 0.0);
    add_check(report, "mixing.eps_total_variation", *hi, "<=", 2.0 + 1e-12);
    if (fit.points_used >= 2) add_check(report, "mixing.eps_rate", fit.rate, "<=", m.gap_ratio + 0.15);
    Table table{"eps_independence", {"s", "r", "gap", "value"}, {}};
    for (std::size_t i = 0; i < gap_list.size(); ++i) {
      table.rows.push_back({std::int64_t{2}, std::int64_t{2}, static_cast<std::int64_t>(gap_list[i]), values[i]});
    }
    report.tables.push_back(std::move(table));
    section["eps_independence_fit"] = {{"rate", fit.rate}, {"points_used", fit.points_used}};
  });

  attempt("correlation_decay", [&] {
    const auto f = StepFunction::indicator(mu.alphabet_size(), Word({0}), cfg.theta);
    std::vector<int> n_list(12);
    std::iota(n_list.begin(), n_list.end(), 1);
    const auto decay = correlation_decay(mu, f, f, n_list, budget);
    if (decay.fit.points_used >= 2) {
      add_check(report, "mixing.correlation_rate", decay.fit.rate, "<=", m.gap_ratio + 0.05);
    }
    Table table{"correlation_decay", {"n", "covariance"}, {}};
    for (std::size_t i = 0; i < decay.n.size(); ++i) table.rows.push_back({std::int64_t{decay.n[i]}, decay.covariance[i]});
    report.tables.push_back(std::move(table));
    section["correlation_fit"] = {{"rate", decay.fit.rate}, {"points_used", decay.fit.points_used}, {"theta", f.theta}};
  });

  attempt("sum_rule", [&] {
    // Summing the joint masses over every J of a fixed length recovers sum_K mu(I K).
    const int m_size = mu.alphabet_size();
    budget.require(word_count_range(m_size, 1, 2) * (word_count(m_size, 2) + 1) * mu.joint_mass_cost(N), "sum_rule");
    double defect = 0.0;
    for (const auto& i : all_words(m_size, 1, 2)) {
      double total = 0.0;
      for_each_word_of_length(m_size, 2, [&](const Word& j) { total += mu.joint_mass(i, N, j); });
      defect = std::max(defect, std::abs(total - mu.joint_mass(i, N, Word{})));
    }
    // The discretized measure is consistent only up to the grid error.
    add_check(report, "mixing.sum_rule", defect, "<=", m.cone ? 1e-9 : m.consistency_tolerance);
    section["sum_rule_defect"] = defect;
  });

  attempt("cesaro", [&] {
    double defect = 0.0;
    for (int i = 0; i < mu.alphabet_size(); ++i) {
      for (int j = 0; j < mu.alphabet_size(); ++j) {
        defect = std::max(defect, cesaro_mixing_defect(mu, Word({i}), Word({j}), 64, budget));
      }
    }
    add_check(report, "mixing.cesaro", defect, "<=", 0.02);
    section["cesaro_defect"] = defect;
  });

  attempt("power_mean_chain", [&] {
    const double chain = power_mean_chain_check(system, mu.exponent(), 2, 2, budget);
    add_check(report, "mixing.power_mean_chain", chain, ">=", 1.0 - 1e-9);
    section["power_mean_chain_ratio"] = chain;
  });

  report.summary["sections"]["mixing"] = std::move(section);
  set_headline(report, m.rho, mu.pressure(), m.gap_ratio);
}

void append_json_string(std::string& out, const std::string& s) {
  out += ordered_json(s).dump();
}

void dump_into(std::string& out, const ordered_json& node, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (node.type()) {
    case ordered_json::value_t::object: {
      if (node.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& item : node.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        append_json_string(out, item.key());
        out += ": ";
        dump_into(out, item.value(), indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (node.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < node.size(); ++i) {
        if (i > 0) out += ",\n";
        out += pad;
        dump_into(out, node[i], indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double x = node.get<double>();
      out += std::isfinite(x) ? format_number(x) : "null";
      return;
    }
    default:
      out += node.dump();
  }
}

std::string csv_cell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* x = std::get_if<double>(&cell)) return format_number(*x);
  return std::to_string(std::get<std::int64_t>(cell));
}

ordered_json json_cell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* x = std::get_if<double>(&cell)) return *x;
  return std::get<std::int64_t>(cell);
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json c;
  c["construction"] = construction_name(cfg.construction);
  c["d"] = cfg.d;
  c["M"] = cfg.M;
  c["t"] = cfg.t;
  c["k"] = cfg.k;
  c["grid_resolution"] = cfg.grid_resolution;
  c["L"] = cfg.scan_length;
  c["N"] = cfg.gap;
  c["n_max"] = cfg.n_max;
  c["epsilon"] = cfg.holder_exponent();
  c["theta"] = cfg.theta;
  c["seed"] = cfg.seed;
  c["budget"] = cfg.budget;
  c["format"] = output_format_name(cfg.format);
  ordered_json mats = ordered_json::array();
  for (const auto& a : cfg.matrices) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index col = 0; col < a.cols(); ++col) row.push_back(a(r, col));
      rows.push_back(std::move(row));
    }
    mats.push_back(std::move(rows));
  }
  c["matrices"] = std::move(mats);
  return c;
}

}  // namespace

const char* subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::kPressure: return "pressure";
    case Subcommand::kGibbs: return "gibbs";
    case Subcommand::kLift: return "lift";
    case Subcommand::kTransfer: return "transfer";
    case Subcommand::kMixing: return "mixing";
    case Subcommand::kCheckAll: return "check-all";
  }
  return "unknown";
}

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  for (auto s : {Subcommand::kPressure, Subcommand::kGibbs, Subcommand::kLift, Subcommand::kTransfer,
                 Subcommand::kMixing, Subcommand::kCheckAll}) {
    if (name == subcommand_name(s)) return s;
  }
  return std::nullopt;
}

bool RunReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const ordered_json& doc) {
  std::string out;
  dump_into(out, doc, 0);
  out += "\n";
  return out;
}

RunReport run(const RunConfig& config, Subcommand subcommand) {
  const auto system = config.system();
  RunReport report;
  report.subcommand = subcommand;
  report.summary["spec_version"] = kSummarySchemaVersion;
  report.summary["subcommand"] = subcommand_name(subcommand);
  report.summary["construction"] = construction_name(config.construction);
  report.summary["norm"] = "spectral";
  report.summary["sections"] = ordered_json::object();

  const bool all = subcommand == Subcommand::kCheckAll;
  std::optional<Model> model;
  auto get_model = [&]() -> const Model& {
    if (!model) model = build_model(config, system);
    return *model;
  };

  if (all || subcommand == Subcommand::kGibbs) gibbs_section(config, get_model(), report);
  if (all || subcommand == Subcommand::kMixing) mixing_section(config, system, get_model(), report);
  if (subcommand == Subcommand::kLift || (all && config.construction != Construction::kProjective &&
                                          config.construction != Construction::kCone)) {
    lift_section(config, system, report);
  }
  // check-all follows the configured construction; the lift and transfer
  // sections assume hypotheses the cone route does not need.
  if (subcommand == Subcommand::kTransfer ||
      (all && config.construction == Construction::kProjective)) {
    transfer_section(config, system, report);
  }
  if (all || subcommand == Subcommand::kPressure) pressure_section(config, system, report);

  ordered_json checks = ordered_json::array();
  ordered_json verdicts = ordered_json::object();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"relation", c.relation},
                      {"bound", c.bound}});
    verdicts[c.name] = c.passed;
  }
  report.summary["verdicts"] = std::move(verdicts);
  report.summary["checks"] = std::move(checks);
  report.summary["all_passed"] = report.all_passed();
  report.summary["config"] = config_json(config);
  return report;
}

void write_report(const RunReport& report, const RunConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto open = [](const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
    return out;
  };
  {
    auto out = open(out_dir / "summary.json");
    out << dump_json(report.summary);
  }
  if (config.format == OutputFormat::kCsv) {
    for (const auto& table : report.tables) {
      auto out = open(out_dir / (table.name + ".csv"));
      for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
      out << "\n";
      for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
        out << "\n";
      }
    }
  } else {
    ordered_json tables = ordered_json::object();
    for (const auto& table : report.tables) {
      ordered_json rows = ordered_json::array();
      for (const auto& row : table.rows) {
        ordered_json obj;
        for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = json_cell(row[c]);
        rows.push_back(std::move(obj));
      }
      tables[table.name] = std::move(rows);
    }
    auto out = open(out_dir / "tables.json");
    out << dump_json(tables);
  }
}

}  // namespace matgibbs
