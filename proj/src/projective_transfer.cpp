#include "matgibbs/projective_transfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/erf.hpp>

namespace matgibbs {
namespace {

constexpr std::array<int, 8> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

double normal_quantile(double p) { return std::numbers::sqrt2 * boost::math::erf_inv(2.0 * p - 1.0); }

Stencil angle_stencil(const ProjectiveGrid& grid, const Vector& x) {
  const int r = grid.resolution;
  double theta = std::atan2(x(1), x(0));
  if (theta < 0.0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;
  const double pos = theta / (std::numbers::pi / r);
  double base = std::floor(pos);
  const double frac = pos - base;
  int j0 = static_cast<int>(base) % r;
  if (j0 < 0) j0 += r;
  const int j1 = (j0 + 1) % r;
  if (frac == 0.0) return {{j0, 1.0}};
  return {{j0, 1.0 - frac}, {j1, frac}};
}

Stencil nearest_stencil(const ProjectiveGrid& grid, const Vector& x) {
  const Vector unit = x.normalized();
  constexpr int kNeighbours = 4;
  std::array<std::pair<double, int>, kNeighbours> best;
  best.fill({std::numeric_limits<double>::infinity(), -1});
  for (int j = 0; j < grid.resolution; ++j) {
    const double dist = kernels::projective_distance(unit, grid.points.col(j));
    if (dist < best.back().first) {
      best.back() = {dist, j};
      std::sort(best.begin(), best.end());
    }
  }
  if (best.front().first < 1e-14) return {{best.front().second, 1.0}};
  Stencil out;
  double total = 0.0;
  for (const auto& [dist, j] : best) {
    if (j < 0) continue;
    out.emplace_back(j, 1.0 / dist);
    total += 1.0 / dist;
  }
  for (auto& entry : out) entry.second /= total;
  return out;
}

double stencil_value(const Stencil& stencil, std::span<const double> values) {
  double v = 0.0;
  for (const auto& [j, w] : stencil) v += w * values[static_cast<std::size_t>(j)];
  return v;
}

void require_invertible(const MatrixSystem& system, double threshold) {
  for (int i = 0; i < system.alphabet_size(); ++i) {
    const auto& a = system[i];
    const double scale = std::pow(spectral_norm(a), system.dim());
    if (!(std::abs(a.determinant()) > threshold * scale)) {
      throw Error(ErrorCode::kNotInvertible, "matrix " + std::to_string(i) + " is singular");
    }
  }
}

}  // namespace

ProjectiveGrid build_grid(int d, int resolution) {
  if (d < 2) throw Error(ErrorCode::kPrecondition, "projective grid needs d >= 2");
  if (d > 8) throw Error(ErrorCode::kDimensionBudget, "projective grid supports d <= 8");
  if (resolution < 4) throw Error(ErrorCode::kPrecondition, "projective grid needs R >= 4");

  ProjectiveGrid grid;
  grid.dim = d;
  grid.resolution = resolution;
  grid.points.resize(d, resolution);
  grid.weights.assign(static_cast<std::size_t>(resolution), 1.0 / resolution);

  if (d == 2) {
    for (int j = 0; j < resolution; ++j) {
      const double theta = j * std::numbers::pi / resolution;
      grid.points(0, j) = std::cos(theta);
      grid.points(1, j) = std::sin(theta);
    }
  } else if (d == 3) {
    for (int j = 0; j < resolution; ++j) {
      const double z = (j + 0.5) / resolution;
      const double radius = std::sqrt(1.0 - z * z);
      const double phi = 2.0 * std::numbers::pi * std::fmod(j / std::numbers::phi, 1.0);
      grid.points(0, j) = radius * std::cos(phi);
      grid.points(1, j) = radius * std::sin(phi);
      grid.points(2, j) = z;
    }
  } else {
    for (int j = 0; j < resolution; ++j) {
      Vector p(d);
      for (int c = 0; c < d; ++c) {
        p(c) = normal_quantile(radical_inverse(static_cast<std::uint64_t>(j) + 1, kPrimes[static_cast<std::size_t>(c)]));
      }
      p.normalize();
      if (p(d - 1) < 0.0) p = -p;
      grid.points.col(j) = p;
    }
  }
  return grid;
}

Stencil interpolation_stencil(const ProjectiveGrid& grid, const Vector& direction) {
  return grid.dim == 2 ? angle_stencil(grid, direction) : nearest_stencil(grid, direction);
}

double TransferDiscretization::interpolate_h(const Vector& direction) const {
  return stencil_value(interpolation_stencil(grid, direction), h);
}

double TransferDiscretization::pairing(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) s += f[j] * nu[j];
  return s;
}

TransferDiscretization assemble_transfer(const MatrixSystem& system, double t, ProjectiveGrid grid,
                                         const TransferOptions& options) {
  if (system.dim() < 2) {
    throw Error(ErrorCode::kPrecondition, "transfer operator needs d >= 2; use the cone construction for d = 1");
  }
  if (grid.dim != system.dim()) throw Error(ErrorCode::kInvalidArgument, "grid dimension does not match system");
  if (!(t >= 0.0)) throw Error(ErrorCode::kPrecondition, "transfer operator needs t >= 0");
  require_invertible(system, options.invertibility_threshold);

  const int r = grid.resolution;
  std::vector<Stencil> rows(static_cast<std::size_t>(r));
#pragma omp parallel for schedule(dynamic, 32)
  for (int j = 0; j < r; ++j) {
    std::vector<std::pair<int, double>> entries;
    const Vector u = grid.points.col(j);
    for (int i = 0; i < system.alphabet_size(); ++i) {
      const Vector image = system[i] * u;
      const double weight = std::pow(image.norm(), t);
      for (const auto& [col, w] : interpolation_stencil(grid, image)) entries.emplace_back(col, weight * w);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Stencil merged;
    for (const auto& e : entries) {
      if (!merged.empty() && merged.back().first == e.first) {
        merged.back().second += e.second;
      } else {
        merged.push_back(e);
      }
    }
    rows[static_cast<std::size_t>(j)] = std::move(merged);
  }

  TransferDiscretization disc;
  disc.system = std::make_shared<const MatrixSystem>(system);
  disc.t = t;
  disc.op.rows = r;
  disc.op.cols = r;
  for (const auto& row : rows) {
    for (const auto& [col, w] : row) {
      disc.op.col.push_back(col);
      disc.op.val.push_back(w);
    }
    disc.op.row_ptr.push_back(static_cast<std::int64_t>(disc.op.val.size()));
  }
  disc.grid = std::move(grid);

  auto perron = perron_power_iteration(disc.op, options.power);
  disc.rho = perron.rho;
  disc.h = std::move(perron.h);
  disc.nu = std::move(perron.nu);
  disc.gap_ratio = perron.gap_ratio;
  disc.iterations = perron.iterations;
  disc.converged = perron.converged;
  disc.right_residual = perron.right_residual;
  disc.left_residual = perron.left_residual;
  return disc;
}

namespace {

// rho^{-n} sum_j nu_j ||B u_j||^t h(bar{B u_j}) for a product B of n matrices.
double product_integral(const TransferDiscretization& disc, const Matrix& product, std::size_t length) {
  const double log_rho_n = static_cast<double>(length) * std::log(disc.rho);
  double total = 0.0;
  for (int j = 0; j < disc.grid.resolution; ++j) {
    const double weight = disc.nu[static_cast<std::size_t>(j)];
    if (weight == 0.0) continue;
    const Vector image = product * disc.grid.points.col(j);
    const double norm = image.norm();
    if (norm == 0.0) continue;
    total += weight * std::exp(disc.t * std::log(norm) - log_rho_n) * disc.interpolate_h(image);
  }
  return total;
}

}  // namespace

double cylinder_measure_t(const TransferDiscretization& disc, const Word& word) {
  return product_integral(disc, word_product(*disc.system, word), word.size());
}

TransferGibbsMeasure::TransferGibbsMeasure(std::shared_ptr<const TransferDiscretization> disc)
    : disc_(std::move(disc)) {
  if (!disc_) throw Error(ErrorCode::kInvalidArgument, "null discretization");
}

double TransferGibbsMeasure::joint_mass(const Word& i, int gap, const Word& j) const {
  if (gap < 0) throw Error(ErrorCode::kPrecondition, "joint_mass needs gap >= 0");
  const auto& system = *disc_->system;
  const Matrix left = word_product(system, i);
  const Matrix right = word_product(system, j);
  const auto length = i.size() + j.size() + static_cast<std::size_t>(gap);
  double total = 0.0;
  visit_words(system, gap, gap, [&](const Word&, const Matrix& middle) {
    total += product_integral(*disc_, left * middle * right, length);
  });
  return total;
}

std::uint64_t TransferGibbsMeasure::joint_mass_cost(int gap) const {
  const auto words = word_count(alphabet_size(), gap);
  const auto grid = static_cast<std::uint64_t>(disc_->grid.resolution);
  return words > std::numeric_limits<std::uint64_t>::max() / grid ? std::numeric_limits<std::uint64_t>::max()
                                                                   : words * grid;
}

double TransferGibbsMeasure::norm_of_product(const Word& word) const {
  return spectral_norm(word_product(*disc_->system, word));
}

double convergence_defect_t(const TransferDiscretization& disc, std::span<const double> f, int n) {
  if (n < 0) throw Error(ErrorCode::kPrecondition, "convergence_defect_t needs n >= 0");
  const auto size = static_cast<std::size_t>(disc.grid.resolution);
  if (f.size() != size) throw Error(ErrorCode::kInvalidArgument, "grid function has the wrong length");
  const double mean = disc.pairing(f);
  std::vector<double> x(f.begin(), f.end()), y(size);
  for (int k = 0; k < n; ++k) {
    kernels::apply(disc.op, x, y);
    for (std::size_t j = 0; j < size; ++j) x[j] = y[j] / disc.rho;
  }
  double defect = 0.0;
  for (std::size_t j = 0; j < size; ++j) defect = std::max(defect, std::abs(x[j] - mean * disc.h[j]));
  return defect;
}

double holder_bound_check(const TransferDiscretization& disc, const Word& word, double eps) {
  if (!(eps > 0.0) || eps > std::min(1.0, disc.t) + 1e-15) {
    throw Error(ErrorCode::kPrecondition, "holder_bound_check needs 0 < eps <= min(1, t)");
  }
  const Matrix product = word_product(*disc.system, word);
  const int r = disc.grid.resolution;
  std::vector<double> values(static_cast<std::size_t>(r));
#pragma omp parallel for schedule(static)
  for (int j = 0; j < r; ++j) {
    const Vector image = product * disc.grid.points.col(j);
    values[static_cast<std::size_t>(j)] = std::pow(image.norm(), disc.t) * disc.interpolate_h(image);
  }
  const double seminorm = kernels::holder_seminorm(disc.grid.points, values, eps);
  return seminorm / std::pow(spectral_norm(product), disc.t);
}

double contraction_ratio(const Matrix& a, const Vector& u, const Vector& w) {
  const Vector un = u.normalized();
  const Vector wn = w.normalized();
  const Vector au = a * un;
  const Vector aw = a * wn;
  const double lhs = kernels::projective_distance(au.normalized(), aw.normalized());
  const double rhs = 2.0 * spectral_norm(a) * kernels::projective_distance(un, wn) / au.norm();
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

double weight_regularity_ratio(const Matrix& a, const Vector& u, const Vector& w, double t) {
  const Vector un = u.normalized();
  const Vector wn = w.normalized();
  const double lhs = std::abs(std::pow((a * un).norm(), t) - std::pow((a * wn).norm(), t));
  const double rhs =
      (t + 1.0) * std::pow(spectral_norm(a), t) * std::pow(kernels::projective_distance(un, wn), std::min(1.0, t));
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

ContractionReport projective_contraction_check(const MatrixSystem& system, const ProjectiveGrid& grid, int samples,
                                               double t, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::kPrecondition, "projective_contraction_check needs samples >= 1");
  if (grid.dim != system.dim()) throw Error(ErrorCode::kInvalidArgument, "grid dimension does not match system");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length_dist(1, 4);
  std::uniform_int_distribution<int> symbol_dist(0, system.alphabet_size() - 1);
  std::uniform_int_distribution<int> point_dist(0, grid.resolution - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  ContractionReport report;
  for (int s = 0; s < samples; ++s) {
    std::vector<int> symbols(static_cast<std::size_t>(length_dist(rng)));
    for (int& x : symbols) x = symbol_dist(rng);
    const Matrix a = word_product(system, Word(std::move(symbols)));
    const Vector u = grid.points.col(point_dist(rng));
    Vector w(system.dim());
    // Redraw coincident pairs so every sample is a genuine pair.
    do {
      if (s % 2 == 0) {
        w = grid.points.col(point_dist(rng));
      } else {
        for (int c = 0; c < system.dim(); ++c) w(c) = normal(rng);
        w = (u + 1e-3 * w).normalized();
      }
    } while (kernels::projective_distance(u, w) == 0.0);
    report.worst_contraction = std::max(report.worst_contraction, contraction_ratio(a, u, w));
    report.worst_weight = std::max(report.worst_weight, weight_regularity_ratio(a, u, w, t));
    ++report.samples;
  }
  report.passed = report.worst() <= 1.0 + 1e-9;
  return report;
}

ProximalityReport proximality_search(const MatrixSystem& system, int max_len, const EnumerationBudget& budget) {
  if (max_len < 1) throw Error(ErrorCode::kPrecondition, "proximality_search needs max_len >= 1");
  ProximalityReport report;
  if (system.dim() == 1) {
    report.witness = Word({0});
    report.eigenvalue_separation = 1.0;
    return report;
  }
  budget.require(word_count_range(system.alphabet_size(), 1, max_len), "proximality_search");
  for (int len = 1; len <= max_len && !report.witness; ++len) {
    for_each_word_of_length(system.alphabet_size(), len, [&](const Word& w) {
      if (report.witness) return;
      Eigen::EigenSolver<Matrix> solver(word_product(system, w), false);
      std::vector<std::complex<double>> values(solver.eigenvalues().data(),
                                               solver.eigenvalues().data() + solver.eigenvalues().size());
      std::sort(values.begin(), values.end(),
                [](const auto& x, const auto& y) { return std::abs(x) > std::abs(y); });
      const double top = std::abs(values[0]);
      if (!(top > 0.0) || std::abs(values[0].imag()) > 1e-12 * top) return;
      const double separation = (top - std::abs(values[1])) / top;
      if (separation > 1e-6) {
        report.witness = w;
        report.eigenvalue_separation = separation;
      }
    });
  }
  return report;
}

}  // namespace matgibbs
