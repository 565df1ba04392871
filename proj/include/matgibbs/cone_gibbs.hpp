#pragma once

#include <cstdint>

#include "matgibbs/cone_spectral.hpp"
#include "matgibbs/cylinder_measure.hpp"
#include "matgibbs/matrix_system.hpp"

namespace matgibbs {

/// Order in which a word's symbols are multiplied when the reference norm
/// ||A_I|| is formed: forward is A_{x_0} ... A_{x_{n-1}}.
enum class Orientation { kForward, kReverse };

const char* orientation_name(Orientation o);

/// Gibbs state built from the eigendata of A = sum_i A_i for a collection
/// that preserves a common cone:
///
///   mu[x_0 ... x_{n-1}] = rho(A)^{-n} <A_{x_0} ... A_{x_{n-1}} u, v>.
///
/// The operators defining the masses may differ from the matrices the Gibbs
/// inequality refers to (tensor lifts), so the model carries both.
/// Immutable after construction and safe to share between threads.
class ConeGibbsModel final : public CylinderMeasure {
 public:
  ConeGibbsModel(MatrixSystem operators, SpectralData spectral, double t_exponent,
                 MatrixSystem reference, Orientation reference_order);

  const MatrixSystem& system() const noexcept { return operators_; }
  const MatrixSystem& reference() const noexcept { return reference_; }
  Orientation reference_order() const noexcept { return order_; }
  const SpectralData& spectral() const noexcept { return spectral_; }
  double rho() const noexcept { return spectral_.rho; }

  double measure(const Word& word) const override;
  int alphabet_size() const override { return operators_.alphabet_size(); }
  double pressure() const override { return pressure_; }
  double exponent() const override { return t_; }
  double norm_of_product(const Word& word) const override;

  /// Collapses sum_{|K|=gap} A_K to A^gap.
  double joint_mass(const Word& i, int gap, const Word& j) const override;
  std::uint64_t joint_mass_cost(int gap) const override { return static_cast<std::uint64_t>(gap) + 1; }

 private:
  MatrixSystem operators_;
  SpectralData spectral_;
  double t_;
  double pressure_;
  MatrixSystem reference_;
  Orientation order_;
};

/// Entrywise nonnegative system whose sum is orthant-irreducible.
/// Throws kNotConeNonnegative, kNotIrreducible or kNonSimpleDominant.
ConeGibbsModel build_cone_gibbs(const MatrixSystem& system);

inline double cylinder_measure(const ConeGibbsModel& model, const Word& word) {
  return model.measure(word);
}

/// max over |w| <= L of |sum_i mu[i w] - mu[w]| and |sum_i mu[w i] - mu[w]|.
double consistency_check(const CylinderMeasure& mu, int scan_length, const EnumerationBudget& budget = {});

struct GibbsRatioReport {
  int scan_length = 0;
  double c_min = 0.0;
  double c_max = 0.0;
  Word argmin;
  Word argmax;
  std::uint64_t skipped_zero_norm = 0;
};

/// Bounds of mu[I] / (e^{-nP} ||A_I||^t) over 1 <= |I| <= L.
GibbsRatioReport gibbs_ratio_scan(const CylinderMeasure& mu, int scan_length,
                                  const EnumerationBudget& budget = {});

struct VariationalReport {
  int n = 0;
  double entropy = 0.0;   // -(1/n) sum mu log mu
  double lyapunov = 0.0;  // (1/n) sum mu log ||A_I||
  double pressure = 0.0;
  double exponent = 0.0;
  double defect = 0.0;    // |entropy + t lyapunov - P|
};

VariationalReport variational_check(const CylinderMeasure& mu, int n, const EnumerationBudget& budget = {});

/// Draws x_0 ... x_{length-1} with the law of mu on cylinders, one symbol at
/// a time from the conditionals mu[w a] / mu[w].
Word sample_path(const ConeGibbsModel& model, int length, std::uint64_t seed);

}  // namespace matgibbs
