#pragma once

#include <cstdint>

#include "matgibbs/matrix_system.hpp"

namespace matgibbs {

/// A shift-invariant measure on the full shift, known through its values on
/// cylinder sets [x_0 ... x_{n-1}], together with the matrix potential it is
/// a Gibbs state for.
class CylinderMeasure {
 public:
  virtual ~CylinderMeasure() = default;

  /// mu[word]; 1 for the empty word.
  virtual double measure(const Word& word) const = 0;
  virtual int alphabet_size() const = 0;
  virtual double pressure() const = 0;
  virtual double exponent() const = 0;

  /// ||A_I|| for the product the Gibbs inequality is stated against.
  virtual double norm_of_product(const Word& word) const = 0;

  /// sum_{|K| = gap} mu[I K J]. The default enumerates every K.
  virtual double joint_mass(const Word& i, int gap, const Word& j) const;

  /// Work units one joint_mass call costs, for enumeration budgets.
  virtual std::uint64_t joint_mass_cost(int gap) const { return word_count(alphabet_size(), gap); }

  /// mu[I] / (e^{-|I| P} ||A_I||^t); NaN when ||A_I|| = 0.
  double gibbs_ratio(const Word& word) const;
};

/// mu([I] intersect sigma^{-shift}[J]) for shift >= 0, resolving overlaps
/// between I and the shifted J.
double shifted_joint(const CylinderMeasure& mu, const Word& i, int shift, const Word& j);

}  // namespace matgibbs
