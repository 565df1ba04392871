#include "matgibbs/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matgibbs {
namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (a != 0 && b > kMax / a) return kMax;
  return a * b;
}

struct Cylinder {
  Word word;
  double mass;
};

std::vector<Cylinder> cylinders(const CylinderMeasure& mu, int lo, int hi) {
  std::vector<Cylinder> out;
  for (const auto& w : all_words(mu.alphabet_size(), lo, hi)) out.push_back({w, mu.measure(w)});
  return out;
}

// Products of every word of length lo..hi over an arbitrary list of matrices.
std::vector<Matrix> word_products(std::span<const Matrix> matrices, int lo, int hi) {
  const auto d = matrices.front().rows();
  std::vector<Matrix> out;
  for (int len = lo; len <= hi; ++len) {
    for_each_word_of_length(static_cast<int>(matrices.size()), len, [&](const Word& w) {
      Matrix p = Matrix::Identity(d, d);
      for (int s : w) p = p * matrices[static_cast<std::size_t>(s)];
      out.push_back(std::move(p));
    });
  }
  return out;
}

}  // namespace

BradleyReport bradley_scan(const CylinderMeasure& mu, int gap, int scan_length, const EnumerationBudget& budget) {
  if (gap < 0 || scan_length < 1) throw Error(ErrorCode::kPrecondition, "bradley_scan needs N >= 0 and L >= 1");
  const int m = mu.alphabet_size();
  const auto sides = word_count_range(m, 1, scan_length);
  budget.require(saturating_mul(saturating_mul(sides, sides), mu.joint_mass_cost(gap)), "bradley_scan");

  const auto cyl = cylinders(mu, 1, scan_length);
  const auto count = static_cast<std::int64_t>(cyl.size());
  struct Partial {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    std::size_t hi_j = 0, lo_j = 0;
    std::uint64_t excluded = 0;
  };
  std::vector<Partial> partial(cyl.size());

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t a = 0; a < count; ++a) {
    const auto& left = cyl[static_cast<std::size_t>(a)];
    auto& acc = partial[static_cast<std::size_t>(a)];
    for (std::size_t b = 0; b < cyl.size(); ++b) {
      const auto& right = cyl[b];
      const double product = left.mass * right.mass;
      if (!(product > 0.0)) {
        ++acc.excluded;
        continue;
      }
      const double ratio = mu.joint_mass(left.word, gap, right.word) / product;
      if (ratio > acc.hi) {
        acc.hi = ratio;
        acc.hi_j = b;
      }
      if (ratio < acc.lo) {
        acc.lo = ratio;
        acc.lo_j = b;
      }
    }
  }

  BradleyReport report;
  report.gap = gap;
  report.scan_length = scan_length;
  report.c_upper = -std::numeric_limits<double>::infinity();
  report.c_lower = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < partial.size(); ++a) {
    const auto& p = partial[a];
    report.excluded_zero_mass += p.excluded;
    if (p.hi > report.c_upper) {
      report.c_upper = p.hi;
      report.upper_i = cyl[a].word;
      report.upper_j = cyl[p.hi_j].word;
    }
    if (p.lo < report.c_lower) {
      report.c_lower = p.lo;
      report.lower_i = cyl[a].word;
      report.lower_j = cyl[p.lo_j].word;
    }
  }
  return report;
}

std::vector<PsiCoefficient> psi_coefficients(const CylinderMeasure& mu, std::span<const int> gaps, int scan_length,
                                             const EnumerationBudget& budget) {
  std::vector<PsiCoefficient> out;
  for (int gap : gaps) {
    // B ends at -1 and A starts at `gap`, so `gap` free coordinates lie between.
    const auto scan = bradley_scan(mu, gap, scan_length, budget);
    out.push_back({gap, scan_length, scan.c_upper, scan.c_lower});
  }
  return out;
}

double eps_independence(const CylinderMeasure& mu, int s, int r, int gap, const EnumerationBudget& budget) {
  if (s < 1 || r < 1) throw Error(ErrorCode::kPrecondition, "eps_independence needs s, r >= 1");
  if (gap < s) throw Error(ErrorCode::kPrecondition, "eps_independence needs gap >= s");
  const int m = mu.alphabet_size();
  budget.require(saturating_mul(word_count(m, s + r), mu.joint_mass_cost(gap - s)), "eps_independence");

  const auto left = cylinders(mu, s, s);
  const auto right = cylinders(mu, r, r);
  double total = 0.0;
  for (const auto& a : left) {
    for (const auto& b : right) {
      total += std::abs(mu.joint_mass(a.word, gap - s, b.word) - a.mass * b.mass);
    }
  }
  return total;
}

RateFit fit_geometric_rate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kInvalidArgument, "fit needs matching x and y");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(y[k] >= kDecayNoiseFloor)) continue;
    const double ly = std::log(y[k]);
    sx += x[k];
    sy += ly;
    sxx += x[k] * x[k];
    sxy += x[k] * ly;
    ++n;
  }
  RateFit fit;
  fit.points_used = n;
  if (n < 2) {
    fit.rate = std::numeric_limits<double>::quiet_NaN();
    fit.slope = fit.intercept = fit.rate;
    return fit;
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.rate = std::exp(fit.slope);
  return fit;
}

double StepFunction::operator()(const Word& prefix) const {
  std::size_t index = 0;
  for (int p = 0; p < window; ++p) {
    index = index * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(prefix[static_cast<std::size_t>(p)]);
  }
  return values.at(index);
}

StepFunction StepFunction::indicator(int alphabet_size, const Word& cylinder, double theta) {
  StepFunction f;
  f.alphabet_size = alphabet_size;
  f.window = static_cast<int>(cylinder.size());
  f.theta = theta;
  f.values.assign(word_count(alphabet_size, f.window), 0.0);
  std::size_t k = 0;
  for_each_word_of_length(alphabet_size, f.window, [&](const Word& w) {
    if (w == cylinder) f.values[k] = 1.0;
    ++k;
  });
  return f;
}

StepFunction StepFunction::constant(int alphabet_size, double value, double theta) {
  StepFunction f;
  f.alphabet_size = alphabet_size;
  f.window = 1;
  f.theta = theta;
  f.values.assign(static_cast<std::size_t>(alphabet_size), value);
  return f;
}

DecayTable correlation_decay(const CylinderMeasure& mu, const StepFunction& f, const StepFunction& g,
                             std::span<const int> n_list, const EnumerationBudget& budget) {
  const int m = mu.alphabet_size();
  if (f.alphabet_size != m || g.alphabet_size != m) {
    throw Error(ErrorCode::kInvalidArgument, "observable alphabet does not match the measure");
  }
  auto integral = [&](const StepFunction& obs) {
    double total = 0.0;
    for_each_word_of_length(m, obs.window, [&](const Word& w) { total += obs(w) * mu.measure(w); });
    return total;
  };
  const double mean_f = integral(f);
  const double mean_g = integral(g);

  DecayTable table;
  for (int n : n_list) {
    if (n < 0) throw Error(ErrorCode::kPrecondition, "correlation_decay needs n >= 0");
    double joint = 0.0;
    if (n >= f.window) {
      budget.require(saturating_mul(word_count(m, f.window + g.window), mu.joint_mass_cost(n - f.window)),
                     "correlation_decay");
      for_each_word_of_length(m, f.window, [&](const Word& a) {
        const double fa = f(a);
        if (fa == 0.0) return;
        for_each_word_of_length(m, g.window, [&](const Word& b) {
          const double gb = g(b);
          if (gb != 0.0) joint += fa * gb * mu.joint_mass(a, n - f.window, b);
        });
      });
    } else {
      // Windows overlap: enumerate the union window directly.
      const int len = std::max(f.window, n + g.window);
      budget.require(word_count(m, len), "correlation_decay");
      for_each_word_of_length(m, len, [&](const Word& w) {
        const auto& s = w.symbols();
        const Word head(std::vector<int>(s.begin(), s.begin() + f.window));
        const Word tail(std::vector<int>(s.begin() + n, s.begin() + n + g.window));
        const double value = f(head) * g(tail);
        if (value != 0.0) joint += value * mu.measure(w);
      });
    }
    table.n.push_back(n);
    table.covariance.push_back(std::abs(joint - mean_f * mean_g));
  }
  std::vector<double> xs(table.n.begin(), table.n.end());
  table.fit = fit_geometric_rate(xs, table.covariance);
  return table;
}

double power_mean_chain_check(std::span<const Matrix> matrices, double t, int gap, int scan_length,
                              const EnumerationBudget& budget) {
  if (matrices.empty()) throw Error(ErrorCode::kInvalidArgument, "power_mean_chain_check needs matrices");
  if (!(t > 0.0)) throw Error(ErrorCode::kPrecondition, "power_mean_chain_check needs t > 0");
  if (gap < 1 || scan_length < 0) throw Error(ErrorCode::kPrecondition, "power_mean_chain_check needs N >= 1");
  const int m = static_cast<int>(matrices.size());
  budget.require(word_count(m, 2 * scan_length + gap), "power_mean_chain_check");

  const auto sides = word_products(matrices, 0, scan_length);
  const auto middles = word_products(matrices, gap, gap);
  // M^{-N t / q} with 1/q = 1 - 1/t.
  const double holder_factor = t > 1.0 ? std::pow(static_cast<double>(m), -gap * (t - 1.0)) : 1.0;

  double worst = std::numeric_limits<double>::infinity();
  Matrix lk;
  for (const auto& left : sides) {
    for (const auto& right : sides) {
      double sum_t = 0.0;
      double sum_1 = 0.0;
      for (const auto& mid : middles) {
        lk.noalias() = left * mid;
        const double norm = spectral_norm(lk * right);
        sum_t += std::pow(norm, t);
        sum_1 += norm;
      }
      const double rhs = holder_factor * std::pow(sum_1, t);
      if (rhs == 0.0) continue;
      worst = std::min(worst, sum_t / rhs);
    }
  }
  return worst;
}

double cesaro_mixing_defect(const CylinderMeasure& mu, const Word& i, const Word& j, int n,
                            const EnumerationBudget& budget) {
  if (n < 1) throw Error(ErrorCode::kPrecondition, "cesaro_mixing_defect needs n >= 1");
  std::uint64_t cost = 0;
  for (int k = static_cast<int>(i.size()); k <= n; ++k) {
    cost += std::min(budget.max_words + 1, mu.joint_mass_cost(k - static_cast<int>(i.size())));
    if (cost > budget.max_words) break;
  }
  budget.require(cost, "cesaro_mixing_defect");
  double total = 0.0;
  for (int k = 1; k <= n; ++k) total += shifted_joint(mu, i, k, j);
  return std::abs(total / n - mu.measure(i) * mu.measure(j));
}

}  // namespace matgibbs
