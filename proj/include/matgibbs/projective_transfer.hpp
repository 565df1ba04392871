#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "matgibbs/cone_spectral.hpp"
#include "matgibbs/cylinder_measure.hpp"
#include "matgibbs/kernels.hpp"
#include "matgibbs/matrix_system.hpp"

namespace matgibbs {

/// Finite sample of RP^{d-1}: unit vectors (columns of `points`) taken one
/// per antipodal pair, with equal quadrature weights.
///
/// d = 2 uses angles j pi / R. d = 3 uses a Fibonacci lattice on the upper
/// hemisphere. 4 <= d <= 8 uses a Halton sequence pushed through the normal
/// quantile and folded onto the upper half-space.
struct ProjectiveGrid {
  int dim = 0;
  int resolution = 0;
  Matrix points;
  std::vector<double> weights;

  double distance(int a, int b) const {
    return kernels::projective_distance(points.col(a), points.col(b));
  }
};

ProjectiveGrid build_grid(int d, int resolution);

/// Interpolation stencil at an arbitrary direction: a convex combination of
/// grid values. Linear in angle for d = 2; inverse distance over the four
/// nearest grid points for d >= 3.
using Stencil = std::vector<std::pair<int, double>>;
Stencil interpolation_stencil(const ProjectiveGrid& grid, const Vector& direction);

struct TransferOptions {
  PowerIterationOptions power;
  /// |det A_i| <= threshold * ||A_i||^d counts as singular.
  double invertibility_threshold = 1e-12;
};

/// Discretized transfer operator
///
///   L_t f(u) = sum_i ||A_i u / ||u|| ||^t f(bar{A_i u})
///
/// with its Perron data: rho, h > 0 on the grid, nu >= 0, <h, nu> = 1.
struct TransferDiscretization {
  ProjectiveGrid grid;
  std::shared_ptr<const MatrixSystem> system;
  double t = 0.0;
  kernels::SparseOperator op;
  double rho = 0.0;
  std::vector<double> h;
  std::vector<double> nu;
  double gap_ratio = 0.0;
  int iterations = 0;
  bool converged = false;
  double right_residual = 0.0;
  double left_residual = 0.0;

  double interpolate_h(const Vector& direction) const;
  double pairing(std::span<const double> f) const;  // <f, nu>
};

/// Throws kNotInvertible for a singular A_i and kPrecondition for d < 2.
TransferDiscretization assemble_transfer(const MatrixSystem& system, double t, ProjectiveGrid grid,
                                         const TransferOptions& options = {});

/// rho^{-n} sum_j nu_j ||A_I u_j||^t h(bar{A_I u_j}), A_I in forward order.
double cylinder_measure_t(const TransferDiscretization& disc, const Word& word);

/// CylinderMeasure view of a solved discretization.
class TransferGibbsMeasure final : public CylinderMeasure {
 public:
  explicit TransferGibbsMeasure(std::shared_ptr<const TransferDiscretization> disc);

  double measure(const Word& word) const override { return cylinder_measure_t(*disc_, word); }
  int alphabet_size() const override { return disc_->system->alphabet_size(); }
  double pressure() const override { return std::log(disc_->rho); }
  double exponent() const override { return disc_->t; }
  double norm_of_product(const Word& word) const override;

  /// Enumerates the middle words once per call; each one costs a pass over
  /// the grid, which the cost reflects.
  double joint_mass(const Word& i, int gap, const Word& j) const override;
  std::uint64_t joint_mass_cost(int gap) const override;

  const TransferDiscretization& discretization() const noexcept { return *disc_; }

 private:
  std::shared_ptr<const TransferDiscretization> disc_;
};

/// ||rho^{-n} L^n f - <f, nu> h||_inf.
double convergence_defect_t(const TransferDiscretization& disc, std::span<const double> f, int n);

/// Holder seminorm (exponent eps, all grid pairs) of
/// u -> ||A_J u||^t h(bar{A_J u}), divided by ||A_J||^t.
double holder_bound_check(const TransferDiscretization& disc, const Word& word, double eps);

/// d(bar{Au}, bar{Aw}) / (2 ||A|| d(u, w) / ||A u||) for unit u, w.
double contraction_ratio(const Matrix& a, const Vector& u, const Vector& w);

/// | ||Au||^t - ||Aw||^t | / ((t + 1) ||A||^t d(u, w)^{min(1, t)}) for unit u, w.
double weight_regularity_ratio(const Matrix& a, const Vector& u, const Vector& w, double t);

struct ContractionReport {
  int samples = 0;
  double worst_contraction = 0.0;  // item 1, must be <= 1 + 1e-9
  double worst_weight = 0.0;       // item 2, must be <= 1 + 1e-9
  bool passed = false;

  double worst() const { return std::max(worst_contraction, worst_weight); }
};

/// Samples products of length 1..4 and pairs of grid points (half of them
/// as local perturbations) and checks both regularity inequalities.
ContractionReport projective_contraction_check(const MatrixSystem& system, const ProjectiveGrid& grid, int samples,
                                               double t = 1.0, std::uint64_t seed = 42);

struct ProximalityReport {
  std::optional<Word> witness;
  double eigenvalue_separation = 0.0;  // (|l1| - |l2|) / |l1| of the witness
};

/// First product (shortest, then lexicographic) with a real, simple
/// dominant eigenvalue separated by more than 1e-6 relative.
ProximalityReport proximality_search(const MatrixSystem& system, int max_len,
                                     const EnumerationBudget& budget = {});

}  // namespace matgibbs
