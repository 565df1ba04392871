#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matgibbs/matrix_system.hpp"

// Data-parallel inner loops. Each OpenMP kernel has a serial twin under
// kernels::serial that is kept as the reference in tests and benchmarks.
// Parallel reductions combine partial results in a fixed order that does not
// depend on the thread count, so outputs are bitwise reproducible.
namespace matgibbs::kernels {

/// Z_n = sum_{|I|=n} ||A_I||^t for n = 1..n_max (index n-1). The word tree is
/// split on a fixed prefix depth and partial sums are added in prefix order.
std::vector<double> level_norm_sums(const MatrixSystem& system, double t, int n_max);

/// Row-compressed nonnegative operator.
struct SparseOperator {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  std::int64_t nonzeros() const noexcept { return static_cast<std::int64_t>(val.size()); }
  SparseOperator transpose() const;
  double min_value() const;
  /// Dense copy, for small operators and tests.
  Matrix dense() const;
};

/// y = op * x.
void apply(const SparseOperator& op, std::span<const double> x, std::span<double> y);

/// d(u, w) = min(||u - w||, ||u + w||) for unit representatives.
double projective_distance(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& w);

/// max over point pairs a != b of |f(a) - f(b)| / d(a, b)^eps, where the
/// points are the columns of `points`. Pairs at distance 0 are skipped.
double holder_seminorm(const Matrix& points, std::span<const double> values, double eps);

namespace serial {

std::vector<double> level_norm_sums(const MatrixSystem& system, double t, int n_max);
void apply(const SparseOperator& op, std::span<const double> x, std::span<double> y);
double holder_seminorm(const Matrix& points, std::span<const double> values, double eps);

}  // namespace serial

/// Threads OpenMP would use (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace matgibbs::kernels
