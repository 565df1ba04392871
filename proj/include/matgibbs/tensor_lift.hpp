#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "matgibbs/cone_gibbs.hpp"
#include "matgibbs/matrix_system.hpp"

namespace matgibbs {

/// Coordinates used for the lifted space.
enum class LiftBasis {
  /// Symmetric matrices, B = sum b_ii E_ii + sum_{i<j} b_ij (E_ij + E_ji).
  kSymmetricMatrix,
  /// Coefficients of degree-k monomials x_{i_1} ... x_{i_k}, i_1 <= ... <= i_k.
  kMonomial,
};

/// Collection of maps p -> p o A_i on degree-k forms (the adjoint action of
/// A_i^{(x)k} on the symmetric tensors), in a fixed coordinate basis.
///
/// With reverse orientation the lifted product over x_0 ... x_{n-1} is the
/// lift of A_{x_{n-1}} ... A_{x_0}. Forward orientation lifts the transposed
/// system, which restores the order A_{x_0} ... A_{x_{n-1}}.
struct LiftedSystem {
  MatrixSystem base;
  int k = 2;
  int lifted_dim = 0;
  LiftBasis basis = LiftBasis::kMonomial;
  Orientation orientation = Orientation::kReverse;
  std::vector<std::vector<int>> multi_indices;  // nondecreasing index tuples, lexicographic
  MatrixSystem operators;

  /// The matrices whose lift is taken: base (reverse) or its transposes (forward).
  MatrixSystem lifted_matrices() const;
};

/// C(d + k - 1, k).
std::uint64_t symmetric_power_dim(int d, int k);

/// B -> A^T B A in symmetric-matrix coordinates.
LiftedSystem kusuoka_lift(const MatrixSystem& system, Orientation orientation = Orientation::kReverse);

/// Even k only; throws kInvalidExponent for odd or nonpositive k and
/// kDimensionBudget when C(d+k-1, k) exceeds max_dim.
LiftedSystem tensor_power_lift(const MatrixSystem& system, int k, Orientation orientation = Orientation::kReverse,
                               int max_dim = 1024);

/// Matrix of p -> p o A in the lift's basis.
Matrix lift_matrix(const LiftedSystem& lifted, const Matrix& a);

/// Direct lift of the base product the lifted word product should equal.
Matrix lift_of_word(const LiftedSystem& lifted, const Word& word);

/// Operator norm with respect to the Frobenius (Bombieri) inner product on
/// symmetric tensors, under which ||lift(A)|| = ||A||^k.
double lifted_operator_norm(const LiftedSystem& lifted, const Matrix& op);

/// Pairs positively with the interior of the cone of nonnegative forms:
/// the sum of the form's values at the standard basis vectors.
Vector lift_sign_functional(const LiftedSystem& lifted);

struct PositivityVerdict {
  bool positive = false;       // positive-at-confidence when true
  int gap = 0;                 // N
  int trials = 0;
  bool exact_stage_failed = false;
  std::optional<Vector> failing_vector;  // certificate when !positive
  double min_relative_eigenvalue = 0.0;  // smallest lambda_min / trace seen
};

/// For sampled unit v, checks that sum_{|I|=N} (A_I^T v)(A_I^T v)^T is
/// positive definite. The basis vectors e_j are tried first (exact stage).
/// A failure is a certificate; success is probabilistic.
PositivityVerdict lift_positivity_test(const LiftedSystem& lifted, int gap, int trials = 64,
                                       std::uint64_t seed = 42);

/// Cone Gibbs state of the lifted collection, with t_exponent = k and the
/// Gibbs ratio measured against ||A_I||^k of the base in the lift's word order.
/// Throws kNotIrreducible when no gap N <= d passes lift_positivity_test.
ConeGibbsModel k_gibbs_measure(const LiftedSystem& lifted, int trials = 64, std::uint64_t seed = 42);

}  // namespace matgibbs
