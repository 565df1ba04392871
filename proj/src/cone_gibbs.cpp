#include "matgibbs/cone_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace matgibbs {

const char* orientation_name(Orientation o) { return o == Orientation::kForward ? "forward" : "reverse"; }

ConeGibbsModel::ConeGibbsModel(MatrixSystem operators, SpectralData spectral, double t_exponent,
                               MatrixSystem reference, Orientation reference_order)
    : operators_(std::move(operators)),
      spectral_(std::move(spectral)),
      t_(t_exponent),
      pressure_(std::log(spectral_.rho)),
      reference_(std::move(reference)),
      order_(reference_order) {
  if (operators_.dim() != spectral_.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "spectral data does not match the operator dimension");
  }
  if (reference_.alphabet_size() != operators_.alphabet_size()) {
    throw Error(ErrorCode::kInvalidArgument, "reference system has a different alphabet size");
  }
}

double ConeGibbsModel::measure(const Word& word) const {
  operators_.validate(word);
  Vector x = spectral_.u;
  for (auto it = word.symbols().rbegin(); it != word.symbols().rend(); ++it) {
    x = operators_[*it] * x / spectral_.rho;
  }
  return spectral_.v.dot(x);
}

double ConeGibbsModel::norm_of_product(const Word& word) const {
  return spectral_norm(word_product(reference_, order_ == Orientation::kForward ? word : word.reversed()));
}

double ConeGibbsModel::joint_mass(const Word& i, int gap, const Word& j) const {
  if (gap < 0) throw Error(ErrorCode::kPrecondition, "joint_mass needs gap >= 0");
  operators_.validate(i);
  operators_.validate(j);
  const double rho = spectral_.rho;
  Vector x = spectral_.u;
  for (auto it = j.symbols().rbegin(); it != j.symbols().rend(); ++it) x = operators_[*it] * x / rho;
  for (int k = 0; k < gap; ++k) x = spectral_.matrix * x / rho;
  for (auto it = i.symbols().rbegin(); it != i.symbols().rend(); ++it) x = operators_[*it] * x / rho;
  return spectral_.v.dot(x);
}

ConeGibbsModel build_cone_gibbs(const MatrixSystem& system) {
  if (!system.is_nonnegative()) {
    throw Error(ErrorCode::kNotConeNonnegative, "cone construction needs entrywise nonnegative matrices");
  }
  const Matrix sum = system.sum();
  if (!orthant_irreducible(sum)) {
    throw Error(ErrorCode::kNotIrreducible, "sum of the matrices is not irreducible on the orthant");
  }
  auto spectral = leading_eigentriple(sum);
  return ConeGibbsModel(system, std::move(spectral), 1.0, system, Orientation::kForward);
}

double consistency_check(const CylinderMeasure& mu, int scan_length, const EnumerationBudget& budget) {
  if (scan_length < 0) throw Error(ErrorCode::kPrecondition, "consistency_check needs L >= 0");
  const int m = mu.alphabet_size();
  budget.require(word_count_range(m, 0, scan_length + 1), "consistency_check");
  double worst = 0.0;
  for (int len = 0; len <= scan_length; ++len) {
    for_each_word_of_length(m, len, [&](const Word& w) {
      const double base = mu.measure(w);
      double left = 0.0;
      double right = 0.0;
      for (int i = 0; i < m; ++i) {
        const Word sym({i});
        left += mu.measure(sym + w);
        right += mu.measure(w + sym);
      }
      worst = std::max({worst, std::abs(left - base), std::abs(right - base)});
    });
  }
  return worst;
}

GibbsRatioReport gibbs_ratio_scan(const CylinderMeasure& mu, int scan_length, const EnumerationBudget& budget) {
  if (scan_length < 1) throw Error(ErrorCode::kPrecondition, "gibbs_ratio_scan needs L >= 1");
  const int m = mu.alphabet_size();
  budget.require(word_count_range(m, 1, scan_length), "gibbs_ratio_scan");
  const auto words = all_words(m, 1, scan_length);
  std::vector<double> ratios(words.size());
  const auto count = static_cast<std::int64_t>(words.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t k = 0; k < count; ++k) {
    ratios[static_cast<std::size_t>(k)] = mu.gibbs_ratio(words[static_cast<std::size_t>(k)]);
  }

  GibbsRatioReport report;
  report.scan_length = scan_length;
  report.c_min = std::numeric_limits<double>::infinity();
  report.c_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < words.size(); ++k) {
    const double r = ratios[k];
    if (std::isnan(r)) {
      ++report.skipped_zero_norm;
      continue;
    }
    if (r < report.c_min) {
      report.c_min = r;
      report.argmin = words[k];
    }
    if (r > report.c_max) {
      report.c_max = r;
      report.argmax = words[k];
    }
  }
  return report;
}

VariationalReport variational_check(const CylinderMeasure& mu, int n, const EnumerationBudget& budget) {
  if (n < 1) throw Error(ErrorCode::kPrecondition, "variational_check needs n >= 1");
  const int m = mu.alphabet_size();
  budget.require(word_count(m, n), "variational_check");
  double entropy = 0.0;
  double lyapunov = 0.0;
  for_each_word_of_length(m, n, [&](const Word& w) {
    const double p = mu.measure(w);
    if (p <= 0.0) return;  // 0 log 0 = 0
    entropy -= p * std::log(p);
    const double norm = mu.norm_of_product(w);
    if (norm > 0.0) lyapunov += p * std::log(norm);
  });
  VariationalReport report;
  report.n = n;
  report.entropy = entropy / n;
  report.lyapunov = lyapunov / n;
  report.pressure = mu.pressure();
  report.exponent = mu.exponent();
  report.defect = std::abs(report.entropy + report.exponent * report.lyapunov - report.pressure);
  return report;
}

Word sample_path(const ConeGibbsModel& model, int length, std::uint64_t seed) {
  if (length < 1) throw Error(ErrorCode::kPrecondition, "sample_path needs length >= 1");
  const auto& ops = model.system();
  const int m = ops.alphabet_size();
  const auto& u = model.spectral().u;
  std::vector<Vector> images;
  images.reserve(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) images.push_back(ops[a] * u);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  // row = v^T A_w, up to a positive scale
  Eigen::RowVectorXd row = model.spectral().v.transpose();
  std::vector<double> weights(static_cast<std::size_t>(m));
  std::vector<int> symbols;
  symbols.reserve(static_cast<std::size_t>(length));
  for (int step = 0; step < length; ++step) {
    double total = 0.0;
    for (int a = 0; a < m; ++a) {
      const double w = std::max(0.0, row.dot(images[static_cast<std::size_t>(a)]));
      weights[static_cast<std::size_t>(a)] = w;
      total += w;
    }
    const double r = uniform(rng) * total;
    int pick = m - 1;
    double acc = 0.0;
    for (int a = 0; a < m; ++a) {
      acc += weights[static_cast<std::size_t>(a)];
      if (r < acc) {
        pick = a;
        break;
      }
    }
    symbols.push_back(pick);
    row = row * ops[pick];
    row /= row.norm();
  }
  return Word(std::move(symbols));
}

}  // namespace matgibbs
