#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "matgibbs/kernels.hpp"
#include "matgibbs/matrix_system.hpp"

namespace matgibbs {

/// Dominant eigentriple of a cone-nonnegative matrix.
///
/// u is scaled so its largest-magnitude entry has modulus 1 and it pairs
/// positively with the cone's sign functional; v is then fixed by <u, v> = 1.
struct SpectralData {
  Matrix matrix;
  double rho = 0.0;
  Vector u;
  Vector v;
  double gap_ratio = 0.0;  // |lambda_2| / rho, 0 in dimension 1
  std::vector<std::complex<double>> eigenvalues;  // sorted by decreasing modulus

  int dim() const noexcept { return static_cast<int>(u.size()); }
  Matrix projector() const { return u * v.transpose(); }
  double right_residual() const;  // ||A u - rho u||
  double left_residual() const;   // ||A^T v - rho v||
};

/// Relative separation |lambda_1| - |lambda_2| below which the dominant
/// eigenvalue is treated as non-simple.
inline constexpr double kSimplicityTolerance = 1e-8;

/// Orthant cone: u is made to have positive entry sum.
SpectralData leading_eigentriple(const Matrix& a);

/// General cone: `sign_functional` must pair positively with interior
/// points of the cone; u is oriented so that <u, sign_functional> > 0.
SpectralData leading_eigentriple(const Matrix& a, const Vector& sign_functional);

/// True iff (I + A)^{d-1} is entrywise positive. Evaluated on the
/// zero/nonzero pattern, so there is no overflow.
bool orthant_irreducible(const Matrix& a);

/// True iff A^m is entrywise positive for some m <= (d-1)^2 + 1.
bool orthant_primitive(const Matrix& a);

/// ||rho^{-n} A^n - u v^T|| in the spectral norm.
double convergence_defect(const SpectralData& spectral, int n);

enum class ScanVerdict { kCertifiedPositiveAtScale, kFailed };

const char* scan_verdict_name(ScanVerdict verdict);

struct PrimitivityReport {
  int gap_length = 0;  // N; for the irreducibility scan, the max |K|
  bool gap_is_upper_bound = false;  // true for the |K| <= d form
  int scanned_length = 0;  // L
  double delta = 0.0;
  Word argmin_i;
  Word argmin_j;
  std::uint64_t skipped_degenerate = 0;  // pairs with ||A_I|| ||A_J|| == 0
  ScanVerdict verdict = ScanVerdict::kFailed;
};

/// min over |I|, |J| <= L of sum_{|K|=N} ||A_I A_K A_J|| / (||A_I|| ||A_J||).
PrimitivityReport collection_primitivity_scan(const MatrixSystem& system, int gap, int scan_length,
                                              const EnumerationBudget& budget = {});

/// As above with K ranging over all words of length <= d, empty included.
PrimitivityReport collection_irreducibility_scan(const MatrixSystem& system, int scan_length,
                                                 const EnumerationBudget& budget = {});

struct PowerIterationOptions {
  double tolerance = 1e-10;
  int max_iterations = 100000;
  int gap_burn_in = 300;
  int gap_window = 300;
};

/// Perron data of a sparse nonnegative operator by power iteration.
struct PerronPowerResult {
  double rho = 0.0;
  std::vector<double> h;   // right eigenvector, <h, nu> = 1
  std::vector<double> nu;  // left eigenvector, sum(nu) = 1
  double gap_ratio = 0.0;  // from a deflated power iteration
  int iterations = 0;
  bool converged = false;
  double right_residual = 0.0;  // ||L h - rho h||_inf / (rho ||h||_inf)
  double left_residual = 0.0;   // ||L^T nu - rho nu||_1 / rho
};

PerronPowerResult perron_power_iteration(const kernels::SparseOperator& op,
                                         const PowerIterationOptions& options = {});

}  // namespace matgibbs
