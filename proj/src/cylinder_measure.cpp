#include "matgibbs/cylinder_measure.hpp"

#include <cmath>
#include <limits>

namespace matgibbs {

double CylinderMeasure::joint_mass(const Word& i, int gap, const Word& j) const {
  if (gap < 0) throw Error(ErrorCode::kPrecondition, "joint_mass needs gap >= 0");
  double total = 0.0;
  for_each_word_of_length(alphabet_size(), gap, [&](const Word& k) { total += measure(i + k + j); });
  return total;
}

double CylinderMeasure::gibbs_ratio(const Word& word) const {
  const double norm = norm_of_product(word);
  if (norm == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(word.size());
  // Evaluated in log space so long words do not overflow.
  const double log_ref = -n * pressure() + exponent() * std::log(norm);
  return measure(word) * std::exp(-log_ref);
}

double shifted_joint(const CylinderMeasure& mu, const Word& i, int shift, const Word& j) {
  if (shift < 0) throw Error(ErrorCode::kPrecondition, "shifted_joint needs shift >= 0");
  const auto len_i = static_cast<int>(i.size());
  if (shift >= len_i) return mu.joint_mass(i, shift - len_i, j);

  // J starts inside I: the overlapping symbols must agree.
  std::vector<int> merged = i.symbols();
  for (std::size_t p = 0; p < j.size(); ++p) {
    const auto pos = static_cast<std::size_t>(shift) + p;
    if (pos < merged.size()) {
      if (merged[pos] != j[p]) return 0.0;
    } else {
      merged.push_back(j[p]);
    }
  }
  return mu.measure(Word(std::move(merged)));
}

}  // namespace matgibbs
