#include "matgibbs/cone_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace matgibbs {
namespace {

using Complex = std::complex<double>;

struct Dominant {
  Complex value;
  Vector vector;
  std::vector<Complex> sorted;
};

Dominant dominant_eigenpair(const Matrix& a) {
  Eigen::EigenSolver<Matrix> solver(a, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonSimpleDominant, "eigendecomposition did not converge");
  }
  const auto& values = solver.eigenvalues();
  std::vector<int> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return std::abs(values(x)) > std::abs(values(y)); });

  Dominant out;
  for (int idx : order) out.sorted.push_back(values(idx));
  out.value = values(order.front());
  out.vector = solver.eigenvectors().col(order.front()).real();
  return out;
}

void require_simple_dominant(const std::vector<Complex>& sorted) {
  const double top = std::abs(sorted.front());
  if (!(top > 0.0)) {
    throw Error(ErrorCode::kNonSimpleDominant, "spectral radius is zero");
  }
  if (std::abs(sorted.front().imag()) > kSimplicityTolerance * top || sorted.front().real() <= 0.0) {
    throw Error(ErrorCode::kNonSimpleDominant, "dominant eigenvalue is not real and positive");
  }
  if (sorted.size() > 1 && top - std::abs(sorted[1]) < kSimplicityTolerance * top) {
    throw Error(ErrorCode::kNonSimpleDominant, "dominant eigenvalue is not simple");
  }
}

// Boolean product of zero/nonzero patterns.
using Pattern = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

Pattern pattern_product(const Pattern& x, const Pattern& y) {
  const auto n = x.rows();
  Pattern out = Pattern::Constant(n, n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!x(i, k)) continue;
      for (Eigen::Index j = 0; j < n; ++j) out(i, j) = out(i, j) || y(k, j);
    }
  }
  return out;
}

Pattern nonnegative_pattern(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::kInvalidArgument, "matrix must be square");
  if ((a.array() < 0.0).any()) {
    throw Error(ErrorCode::kNotConeNonnegative, "matrix has a negative entry");
  }
  return (a.array() > 0.0).matrix();
}

struct ProductEntry {
  Word word;
  Matrix product;
  double norm;
};

std::vector<ProductEntry> products_up_to(const MatrixSystem& system, int lo, int hi) {
  std::vector<ProductEntry> out;
  visit_words(system, lo, hi, [&](const Word& w, const Matrix& p) {
    out.push_back({w, p, spectral_norm(p)});
  });
  return out;
}

PrimitivityReport scan_collection(const MatrixSystem& system, const std::vector<ProductEntry>& middles,
                                  int scan_length) {
  const auto sides = products_up_to(system, 0, scan_length);
  const auto count = static_cast<std::int64_t>(sides.size());

  struct Partial {
    double delta = std::numeric_limits<double>::infinity();
    std::size_t j = 0;
    std::uint64_t skipped = 0;
  };
  std::vector<Partial> partial(sides.size());

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& left = sides[static_cast<std::size_t>(i)];
    auto& acc = partial[static_cast<std::size_t>(i)];
    Matrix lk;
    for (std::size_t j = 0; j < sides.size(); ++j) {
      const auto& right = sides[j];
      const double denom = left.norm * right.norm;
      if (denom == 0.0) {
        ++acc.skipped;
        continue;
      }
      double total = 0.0;
      for (const auto& mid : middles) {
        lk.noalias() = left.product * mid.product;
        total += spectral_norm(lk * right.product);
      }
      const double ratio = total / denom;
      if (ratio < acc.delta) {
        acc.delta = ratio;
        acc.j = j;
      }
    }
  }

  PrimitivityReport report;
  report.scanned_length = scan_length;
  report.delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < partial.size(); ++i) {
    report.skipped_degenerate += partial[i].skipped;
    if (partial[i].delta < report.delta) {
      report.delta = partial[i].delta;
      report.argmin_i = sides[i].word;
      report.argmin_j = sides[partial[i].j].word;
    }
  }
  if (!std::isfinite(report.delta)) report.delta = 0.0;
  report.verdict = report.delta > 1e-12 ? ScanVerdict::kCertifiedPositiveAtScale : ScanVerdict::kFailed;
  return report;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

struct PowerOutcome {
  double rho = 0.0;
  std::vector<double> vec;
  int iterations = 0;
  bool converged = false;
};

PowerOutcome power_iterate(const kernels::SparseOperator& op, const PowerIterationOptions& options) {
  const auto n = static_cast<std::size_t>(op.rows);
  std::vector<double> x(n, 1.0), y(n, 0.0);
  PowerOutcome out;
  for (int it = 1; it <= options.max_iterations; ++it) {
    kernels::apply(op, x, y);
    const double rho = dot(x, y) / dot(x, x);
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::abs(y[i] - rho * x[i]));
    const double scale = max_abs(y);
    if (!(scale > 0.0)) {
      throw Error(ErrorCode::kNonSimpleDominant, "power iteration collapsed to zero");
    }
    out.rho = rho;
    out.iterations = it;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / scale;
    if (resid <= options.tolerance * rho * 1.0) {
      out.converged = true;
      break;
    }
  }
  out.vec = std::move(x);
  return out;
}

}  // namespace

double SpectralData::right_residual() const { return (matrix * u - rho * u).norm(); }

double SpectralData::left_residual() const { return (matrix.transpose() * v - rho * v).norm(); }

SpectralData leading_eigentriple(const Matrix& a) {
  return leading_eigentriple(a, Vector::Ones(a.rows()));
}

SpectralData leading_eigentriple(const Matrix& a, const Vector& sign_functional) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "leading_eigentriple needs a non-empty square matrix");
  }
  const auto right = dominant_eigenpair(a);
  require_simple_dominant(right.sorted);
  const auto left = dominant_eigenpair(a.transpose());

  SpectralData s;
  s.matrix = a;
  s.rho = right.value.real();
  s.eigenvalues = right.sorted;
  s.gap_ratio = right.sorted.size() > 1 ? std::abs(right.sorted[1]) / s.rho : 0.0;

  s.u = right.vector;
  Eigen::Index arg = 0;
  s.u.cwiseAbs().maxCoeff(&arg);
  s.u /= s.u(arg);
  if (s.u.dot(sign_functional) < 0.0) s.u = -s.u;
  if (s.u.dot(sign_functional) == 0.0 && s.u(arg) < 0.0) s.u = -s.u;

  s.v = left.vector;
  const double pairing = s.u.dot(s.v);
  if (std::abs(pairing) < 1e-14 * s.v.norm()) {
    throw Error(ErrorCode::kNonSimpleDominant, "left and right eigenvectors are orthogonal");
  }
  s.v /= pairing;
  return s;
}

bool orthant_irreducible(const Matrix& a) {
  auto p = nonnegative_pattern(a);
  const auto d = a.rows();
  for (Eigen::Index i = 0; i < d; ++i) p(i, i) = true;
  Pattern power = Pattern::Identity(d, d);
  for (Eigen::Index k = 0; k + 1 < d; ++k) power = pattern_product(power, p);
  return power.all();
}

bool orthant_primitive(const Matrix& a) {
  const auto p = nonnegative_pattern(a);
  const auto d = a.rows();
  const auto bound = (d - 1) * (d - 1) + 1;
  Pattern power = p;
  for (Eigen::Index m = 1; m <= bound; ++m) {
    if (power.all()) return true;
    power = pattern_product(power, p);
  }
  return false;
}

double convergence_defect(const SpectralData& spectral, int n) {
  if (n < 0) throw Error(ErrorCode::kPrecondition, "convergence_defect needs n >= 0");
  const Matrix scaled = spectral.matrix / spectral.rho;
  Matrix power = Matrix::Identity(spectral.dim(), spectral.dim());
  for (int k = 0; k < n; ++k) power = power * scaled;
  if (!power.allFinite()) throw Error(ErrorCode::kOverflow, "matrix power overflowed");
  return spectral_norm(power - spectral.projector());
}

const char* scan_verdict_name(ScanVerdict verdict) {
  return verdict == ScanVerdict::kCertifiedPositiveAtScale ? "certified-positive-at-scale" : "failed";
}

PrimitivityReport collection_primitivity_scan(const MatrixSystem& system, int gap, int scan_length,
                                              const EnumerationBudget& budget) {
  if (gap < 1 || scan_length < 1) {
    throw Error(ErrorCode::kPrecondition, "primitivity scan needs N >= 1 and L >= 1");
  }
  budget.require(word_count(system.alphabet_size(), 2 * scan_length + gap), "collection_primitivity_scan");
  auto report = scan_collection(system, products_up_to(system, gap, gap), scan_length);
  report.gap_length = gap;
  return report;
}

PrimitivityReport collection_irreducibility_scan(const MatrixSystem& system, int scan_length,
                                                 const EnumerationBudget& budget) {
  if (scan_length < 1) throw Error(ErrorCode::kPrecondition, "irreducibility scan needs L >= 1");
  const int d = system.dim();
  budget.require(word_count(system.alphabet_size(), 2 * scan_length + d), "collection_irreducibility_scan");
  auto report = scan_collection(system, products_up_to(system, 0, d), scan_length);
  report.gap_length = d;
  report.gap_is_upper_bound = true;
  return report;
}

PerronPowerResult perron_power_iteration(const kernels::SparseOperator& op,
                                         const PowerIterationOptions& options) {
  if (op.rows != op.cols || op.rows == 0) {
    throw Error(ErrorCode::kInvalidArgument, "power iteration needs a non-empty square operator");
  }
  if (op.min_value() < 0.0) {
    throw Error(ErrorCode::kNotConeNonnegative, "operator has a negative entry");
  }
  const auto transposed = op.transpose();
  auto right = power_iterate(op, options);
  auto left = power_iterate(transposed, options);

  PerronPowerResult out;
  out.rho = right.rho;
  out.iterations = std::max(right.iterations, left.iterations);
  out.converged = right.converged && left.converged;
  out.h = std::move(right.vec);
  out.nu = std::move(left.vec);

  const double mass = std::accumulate(out.nu.begin(), out.nu.end(), 0.0);
  for (double& x : out.nu) x /= mass;
  const double pairing = dot(out.h, out.nu);
  for (double& x : out.h) x /= pairing;

  const auto n = static_cast<std::size_t>(op.rows);
  std::vector<double> y(n);
  kernels::apply(op, out.h, y);
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(y[i] - out.rho * out.h[i]));
  out.right_residual = r / (out.rho * max_abs(out.h));
  kernels::apply(transposed, out.nu, y);
  double l = 0.0;
  for (std::size_t i = 0; i < n; ++i) l += std::abs(y[i] - out.rho * out.nu[i]);
  out.left_residual = l / out.rho;

  // Second eigenvalue modulus from the iteration restricted to ker(nu).
  std::vector<double> z(n), w(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::cos(2.3 * static_cast<double>(i) + 0.7);
  auto deflate = [&](std::vector<double>& vec) {
    const double c = dot(vec, out.nu);
    for (std::size_t i = 0; i < n; ++i) vec[i] -= c * out.h[i];
  };
  auto norm2 = [](std::span<const double> vec) { return std::sqrt(dot(vec, vec)); };
  deflate(z);
  double log_growth = 0.0;
  bool vanished = false;
  for (int it = 0; it < options.gap_burn_in + options.gap_window; ++it) {
    const double before = norm2(z);
    if (!(before > 0.0)) {
      vanished = true;
      break;
    }
    for (double& x : z) x /= before;
    kernels::apply(op, z, w);
    for (double& x : w) x /= out.rho;
    deflate(w);
    const double after = norm2(w);
    if (!(after > 0.0)) {
      vanished = true;
      break;
    }
    if (it >= options.gap_burn_in) log_growth += std::log(after);
    z.swap(w);
  }
  out.gap_ratio = vanished ? 0.0 : std::exp(log_growth / options.gap_window);
  return out;
}

}  // namespace matgibbs
