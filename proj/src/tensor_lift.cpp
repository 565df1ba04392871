#include "matgibbs/tensor_lift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace matgibbs {
namespace {

std::vector<std::vector<int>> nondecreasing_tuples(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(k), 0);
  while (true) {
    out.push_back(cur);
    int pos = k - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == d - 1) --pos;
    if (pos < 0) break;
    const int next = cur[static_cast<std::size_t>(pos)] + 1;
    for (int p = pos; p < k; ++p) cur[static_cast<std::size_t>(p)] = next;
  }
  return out;
}

double multinomial(const std::vector<int>& tuple) {
  double value = std::tgamma(static_cast<double>(tuple.size()) + 1.0);
  std::size_t run = 1;
  for (std::size_t p = 1; p <= tuple.size(); ++p) {
    if (p < tuple.size() && tuple[p] == tuple[p - 1]) {
      ++run;
    } else {
      value /= std::tgamma(static_cast<double>(run) + 1.0);
      run = 1;
    }
  }
  return std::round(value);
}

Matrix symmetric_matrix_lift(const Matrix& a, const std::vector<std::vector<int>>& pairs) {
  const auto n = static_cast<Eigen::Index>(pairs.size());
  const auto d = a.rows();
  Matrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const int i = pairs[static_cast<std::size_t>(c)][0];
    const int j = pairs[static_cast<std::size_t>(c)][1];
    Matrix e = Matrix::Zero(d, d);
    e(i, j) = 1.0;
    e(j, i) = 1.0;
    const Matrix image = a.transpose() * e * a;
    for (Eigen::Index r = 0; r < n; ++r) {
      out(r, c) = image(pairs[static_cast<std::size_t>(r)][0], pairs[static_cast<std::size_t>(r)][1]);
    }
  }
  return out;
}

// Column alpha holds the monomial coefficients of prod_r (A x)_{alpha_r}.
Matrix monomial_lift(const Matrix& a, const std::vector<std::vector<int>>& tuples) {
  const auto n = static_cast<Eigen::Index>(tuples.size());
  const auto d = static_cast<int>(a.rows());
  std::map<std::vector<int>, Eigen::Index> index;
  for (Eigen::Index r = 0; r < n; ++r) index.emplace(tuples[static_cast<std::size_t>(r)], r);

  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    std::map<std::vector<int>, double> poly{{{}, 1.0}};
    for (int row : tuples[static_cast<std::size_t>(c)]) {
      std::map<std::vector<int>, double> next;
      for (const auto& [mono, coef] : poly) {
        for (int m = 0; m < d; ++m) {
          const double entry = a(row, m);
          if (entry == 0.0) continue;
          auto grown = mono;
          grown.insert(std::upper_bound(grown.begin(), grown.end(), m), m);
          next[grown] += coef * entry;
        }
      }
      poly = std::move(next);
    }
    for (const auto& [mono, coef] : poly) out(index.at(mono), c) = coef;
  }
  return out;
}

LiftedSystem make_lift(const MatrixSystem& system, int k, LiftBasis basis, Orientation orientation) {
  const auto tuples = nondecreasing_tuples(system.dim(), k);
  const MatrixSystem source = orientation == Orientation::kReverse ? system : system.transposed();
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(system.alphabet_size()));
  for (const auto& a : source.matrices()) {
    ops.push_back(basis == LiftBasis::kSymmetricMatrix ? symmetric_matrix_lift(a, tuples) : monomial_lift(a, tuples));
  }
  return LiftedSystem{system, k, static_cast<int>(tuples.size()), basis, orientation, tuples,
                      MatrixSystem(std::move(ops))};
}

Vector orthonormal_scaling(const LiftedSystem& lifted) {
  Vector s(lifted.lifted_dim);
  for (int r = 0; r < lifted.lifted_dim; ++r) {
    const auto& tuple = lifted.multi_indices[static_cast<std::size_t>(r)];
    if (lifted.basis == LiftBasis::kSymmetricMatrix) {
      s(r) = tuple[0] == tuple[1] ? 1.0 : std::sqrt(2.0);
    } else {
      s(r) = 1.0 / std::sqrt(multinomial(tuple));
    }
  }
  return s;
}

// Smallest eigenvalue of the Gram matrix of {A_I^T v : |I| = gap}, relative to its trace.
double gram_min_relative(const std::vector<Matrix>& products, const Vector& v) {
  const auto d = v.size();
  Matrix gram = Matrix::Zero(d, d);
  for (const auto& p : products) {
    const Vector w = p.transpose() * v;
    gram.noalias() += w * w.transpose();
  }
  const double trace = gram.trace();
  if (!(trace > 0.0)) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0) / trace;
}

constexpr double kGramTolerance = 1e-10;

}  // namespace

MatrixSystem LiftedSystem::lifted_matrices() const {
  return orientation == Orientation::kReverse ? base : base.transposed();
}

std::uint64_t symmetric_power_dim(int d, int k) {
  // C(d+k-1, k) computed incrementally; exact while it fits.
  std::uint64_t value = 1;
  for (int i = 1; i <= k; ++i) {
    value = value * static_cast<std::uint64_t>(d + i - 1) / static_cast<std::uint64_t>(i);
  }
  return value;
}

LiftedSystem kusuoka_lift(const MatrixSystem& system, Orientation orientation) {
  return make_lift(system, 2, LiftBasis::kSymmetricMatrix, orientation);
}

LiftedSystem tensor_power_lift(const MatrixSystem& system, int k, Orientation orientation, int max_dim) {
  if (k < 2 || k % 2 != 0) {
    throw Error(ErrorCode::kInvalidExponent,
                "tensor power lift needs an even exponent k >= 2, got " + std::to_string(k));
  }
  const auto dim = symmetric_power_dim(system.dim(), k);
  if (dim > static_cast<std::uint64_t>(max_dim)) {
    throw Error(ErrorCode::kDimensionBudget,
                "lifted dimension " + std::to_string(dim) + " exceeds " + std::to_string(max_dim));
  }
  return make_lift(system, k, LiftBasis::kMonomial, orientation);
}

Matrix lift_matrix(const LiftedSystem& lifted, const Matrix& a) {
  return lifted.basis == LiftBasis::kSymmetricMatrix ? symmetric_matrix_lift(a, lifted.multi_indices)
                                                     : monomial_lift(a, lifted.multi_indices);
}

Matrix lift_of_word(const LiftedSystem& lifted, const Word& word) {
  return lift_matrix(lifted, word_product(lifted.lifted_matrices(), word.reversed()));
}

double lifted_operator_norm(const LiftedSystem& lifted, const Matrix& op) {
  const Vector s = orthonormal_scaling(lifted);
  const Matrix scaled = s.asDiagonal() * op * s.cwiseInverse().asDiagonal();
  return spectral_norm(scaled);
}

Vector lift_sign_functional(const LiftedSystem& lifted) {
  Vector w = Vector::Zero(lifted.lifted_dim);
  for (int r = 0; r < lifted.lifted_dim; ++r) {
    const auto& tuple = lifted.multi_indices[static_cast<std::size_t>(r)];
    if (std::all_of(tuple.begin(), tuple.end(), [&](int x) { return x == tuple.front(); })) w(r) = 1.0;
  }
  return w;
}

PositivityVerdict lift_positivity_test(const LiftedSystem& lifted, int gap, int trials, std::uint64_t seed) {
  if (gap < 1) throw Error(ErrorCode::kPrecondition, "lift_positivity_test needs N >= 1");
  if (trials < 1) throw Error(ErrorCode::kPrecondition, "lift_positivity_test needs trials >= 1");
  const auto matrices = lifted.lifted_matrices();
  const int d = matrices.dim();
  std::vector<Matrix> products;
  visit_words(matrices, gap, gap, [&](const Word&, const Matrix& p) { products.push_back(p); });

  PositivityVerdict verdict;
  verdict.gap = gap;
  verdict.min_relative_eigenvalue = std::numeric_limits<double>::infinity();

  auto check = [&](const Vector& v) {
    const double rel = gram_min_relative(products, v);
    verdict.min_relative_eigenvalue = std::min(verdict.min_relative_eigenvalue, rel);
    if (rel > kGramTolerance) return true;
    verdict.failing_vector = v;
    return false;
  };

  for (int j = 0; j < d; ++j) {
    if (!check(Vector::Unit(d, j))) {
      verdict.exact_stage_failed = true;
      return verdict;
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < trials; ++trial) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = normal(rng);
    v.normalize();
    verdict.trials = trial + 1;
    if (!check(v)) return verdict;
  }
  verdict.positive = true;
  return verdict;
}

ConeGibbsModel k_gibbs_measure(const LiftedSystem& lifted, int trials, std::uint64_t seed) {
  const int d = lifted.base.dim();
  PositivityVerdict last;
  bool ok = false;
  for (int gap = 1; gap <= std::max(1, d) && !ok; ++gap) {
    last = lift_positivity_test(lifted, gap, trials, seed);
    ok = last.positive;
  }
  if (!ok) {
    std::ostringstream msg;
    msg << "lifted collection failed the positivity test up to N=" << last.gap;
    if (last.failing_vector) msg << " at v=(" << last.failing_vector->transpose() << ")";
    throw Error(ErrorCode::kNotIrreducible, msg.str());
  }
  auto spectral = leading_eigentriple(lifted.operators.sum(), lift_sign_functional(lifted));
  return ConeGibbsModel(lifted.operators, std::move(spectral), static_cast<double>(lifted.k), lifted.base,
                        lifted.orientation);
}

}  // namespace matgibbs
