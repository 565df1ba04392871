#include "matgibbs/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace matgibbs::kernels {
namespace {

double norm_power(const Matrix& a, double t) {
  const double n = spectral_norm(a);
  if (t == 1.0) return n;
  return std::pow(n, t);
}

// Enough prefixes to keep a few dozen threads busy; depends only on M.
void check_shape(const SparseOperator& op, std::span<const double> x, std::span<double> y) {
  if (x.size() != static_cast<std::size_t>(op.cols) || y.size() != static_cast<std::size_t>(op.rows)) {
    throw Error(ErrorCode::kInvalidArgument, "operator and vector sizes do not match");
  }
}

int split_depth(int alphabet_size, int n_max) {
  int depth = 1;
  while (depth < n_max && word_count(alphabet_size, depth) < 64) ++depth;
  return std::min(depth, n_max);
}

}  // namespace

std::vector<double> level_norm_sums(const MatrixSystem& system, double t, int n_max) {
  const auto m = system.alphabet_size();
  const int depth = split_depth(m, n_max);
  std::vector<double> z(static_cast<std::size_t>(n_max), 0.0);

  // Levels shallower than the split are summed serially in lexicographic order.
  visit_words(system, 1, depth - 1, [&](const Word& w, const Matrix& p) {
    z[w.size() - 1] += norm_power(p, t);
  });

  const auto prefixes = all_words(m, depth, depth);
  const auto count = static_cast<std::int64_t>(prefixes.size());
  std::vector<std::vector<double>> partial(prefixes.size(),
                                           std::vector<double>(static_cast<std::size_t>(n_max), 0.0));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < count; ++k) {
    auto& acc = partial[static_cast<std::size_t>(k)];
    visit_words(
        system, depth, n_max,
        [&](const Word& w, const Matrix& p) { acc[w.size() - 1] += norm_power(p, t); },
        prefixes[static_cast<std::size_t>(k)]);
  }

  for (const auto& acc : partial) {
    for (std::size_t n = 0; n < z.size(); ++n) z[n] += acc[n];
  }
  return z;
}

SparseOperator SparseOperator::transpose() const {
  SparseOperator t;
  t.rows = cols;
  t.cols = rows;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(cols) + 1, 0);
  for (int c : col) ++counts[static_cast<std::size_t>(c) + 1];
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  t.row_ptr = counts;
  t.col.assign(col.size(), 0);
  t.val.assign(val.size(), 0.0);
  auto next = counts;
  // Row-major sweep keeps each transposed row sorted by column.
  for (int r = 0; r < rows; ++r) {
    for (auto k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      const auto c = static_cast<std::size_t>(col[static_cast<std::size_t>(k)]);
      const auto dst = static_cast<std::size_t>(next[c]++);
      t.col[dst] = r;
      t.val[dst] = val[static_cast<std::size_t>(k)];
    }
  }
  return t;
}

double SparseOperator::min_value() const {
  return val.empty() ? 0.0 : *std::min_element(val.begin(), val.end());
}

Matrix SparseOperator::dense() const {
  Matrix out = Matrix::Zero(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (auto k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      out(r, col[static_cast<std::size_t>(k)]) += val[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

void apply(const SparseOperator& op, std::span<const double> x, std::span<double> y) {
  check_shape(op, x, y);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < op.rows; ++r) {
    double acc = 0.0;
    for (auto k = op.row_ptr[static_cast<std::size_t>(r)]; k < op.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      acc += op.val[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(op.col[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(r)] = acc;
  }
}

double projective_distance(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& w) {
  return std::min((u - w).norm(), (u + w).norm());
}

double holder_seminorm(const Matrix& points, std::span<const double> values, double eps) {
  const auto n = static_cast<int>(points.cols());
  double best = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double dist = projective_distance(points.col(a), points.col(b));
      if (dist <= 0.0) continue;
      const double diff = std::abs(values[static_cast<std::size_t>(a)] - values[static_cast<std::size_t>(b)]);
      best = std::max(best, diff / std::pow(dist, eps));
    }
  }
  return best;
}

namespace serial {

std::vector<double> level_norm_sums(const MatrixSystem& system, double t, int n_max) {
  std::vector<double> z(static_cast<std::size_t>(n_max), 0.0);
  visit_words(system, 1, n_max, [&](const Word& w, const Matrix& p) { z[w.size() - 1] += norm_power(p, t); });
  return z;
}

void apply(const SparseOperator& op, std::span<const double> x, std::span<double> y) {
  check_shape(op, x, y);
  for (int r = 0; r < op.rows; ++r) {
    double acc = 0.0;
    for (auto k = op.row_ptr[static_cast<std::size_t>(r)]; k < op.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      acc += op.val[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(op.col[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(r)] = acc;
  }
}

double holder_seminorm(const Matrix& points, std::span<const double> values, double eps) {
  const auto n = static_cast<int>(points.cols());
  double best = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double dist = projective_distance(points.col(a), points.col(b));
      if (dist <= 0.0) continue;
      const double diff = std::abs(values[static_cast<std::size_t>(a)] - values[static_cast<std::size_t>(b)]);
      best = std::max(best, diff / std::pow(dist, eps));
    }
  }
  return best;
}

}  // namespace serial

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, n));
#else
  (void)n;
#endif
}

}  // namespace matgibbs::kernels
