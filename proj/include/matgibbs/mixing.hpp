#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matgibbs/cylinder_measure.hpp"
#include "matgibbs/matrix_system.hpp"

namespace matgibbs {

/// Two-sided ratio bounds mu(I K J summed over |K| = N) / (mu(I) mu(J))
/// over 1 <= |I|, |J| <= L.
struct BradleyReport {
  int gap = 0;
  int scan_length = 0;
  double c_upper = 0.0;
  double c_lower = 0.0;
  Word upper_i, upper_j;
  Word lower_i, lower_j;
  std::uint64_t excluded_zero_mass = 0;

  bool contained_in(const BradleyReport& wider, double slack) const {
    return c_lower >= wider.c_lower - slack && c_upper <= wider.c_upper + slack;
  }
};

BradleyReport bradley_scan(const CylinderMeasure& mu, int gap, int scan_length,
                           const EnumerationBudget& budget = {});

/// Cylinder-algebra restriction of psi* (sup) and psi' (inf): B is a cylinder
/// of length <= L ending at coordinate -1, A a cylinder of length <= L
/// starting at coordinate `gap`.
struct PsiCoefficient {
  int gap = 0;
  int scan_length = 0;
  double psi_star = 0.0;
  double psi_prime = 0.0;
};

std::vector<PsiCoefficient> psi_coefficients(const CylinderMeasure& mu, std::span<const int> gaps, int scan_length,
                                             const EnumerationBudget& budget = {});

/// sum over |I| = s, |J| = r of |mu([I] intersect sigma^{-gap}[J]) - mu(I) mu(J)|;
/// requires gap >= s.
double eps_independence(const CylinderMeasure& mu, int s, int r, int gap, const EnumerationBudget& budget = {});

/// Least-squares fit of log y = intercept + slope x; points with
/// y < 1e-13 are dropped.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rate = 0.0;  // exp(slope)
  int points_used = 0;
};

RateFit fit_geometric_rate(std::span<const double> x, std::span<const double> y);

inline constexpr double kDecayNoiseFloor = 1e-13;

/// Observable depending on the first `window` coordinates; values are indexed
/// by the window word in lexicographic order.
struct StepFunction {
  int alphabet_size = 2;
  int window = 1;
  std::vector<double> values;
  double theta = 0.5;  // declared Holder parameter on the shift

  double operator()(const Word& prefix) const;

  static StepFunction indicator(int alphabet_size, const Word& cylinder, double theta = 0.5);
  static StepFunction constant(int alphabet_size, double value, double theta = 0.5);
};

struct DecayTable {
  std::vector<int> n;
  std::vector<double> covariance;  // |int f g o sigma^n - int f int g|
  RateFit fit;
};

DecayTable correlation_decay(const CylinderMeasure& mu, const StepFunction& f, const StepFunction& g,
                             std::span<const int> n_list, const EnumerationBudget& budget = {});

/// min over |I|, |J| <= L of LHS / RHS for
///   t > 1:      sum_K ||A_I A_K A_J||^t  >=  M^{-N t / q} (sum_K ||A_I A_K A_J||)^t,  1/t + 1/q = 1
///   0 < t <= 1: sum_K ||A_I A_K A_J||^t  >=  (sum_K ||A_I A_K A_J||)^t
/// with K over words of length N. Pairs with a vanishing right side are skipped.
double power_mean_chain_check(std::span<const Matrix> matrices, double t, int gap, int scan_length,
                              const EnumerationBudget& budget = {});

inline double power_mean_chain_check(const MatrixSystem& system, double t, int gap, int scan_length,
                                     const EnumerationBudget& budget = {}) {
  return power_mean_chain_check(std::span<const Matrix>(system.matrices()), t, gap, scan_length, budget);
}

/// |(1/n) sum_{k=1}^n mu([I] intersect sigma^{-k}[J]) - mu(I) mu(J)|.
double cesaro_mixing_defect(const CylinderMeasure& mu, const Word& i, const Word& j, int n,
                            const EnumerationBudget& budget = {});

}  // namespace matgibbs
