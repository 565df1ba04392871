#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "matgibbs/mixing.hpp"
#include "matgibbs/projective_transfer.hpp"
#include "matgibbs/tensor_lift.hpp"
#include "oracles.hpp"

using namespace matgibbs;

namespace {

const double kLiftRho = (5.0 + std::sqrt(17.0)) / 2.0;

std::shared_ptr<const TransferDiscretization> solve(const MatrixSystem& s, double t, int resolution) {
  return std::make_shared<const TransferDiscretization>(assemble_transfer(s, t, build_grid(s.dim(), resolution)));
}

// Shared across test cases: the R = 2048 shear discretizations are the slow part.
const TransferDiscretization& shear_at(double t) {
  static std::map<double, std::shared_ptr<const TransferDiscretization>> cache;
  auto& slot = cache[t];
  if (!slot) slot = solve(oracle::shear_pair(), t, 2048);
  return *slot;
}

std::shared_ptr<const TransferDiscretization> shear_ptr(double t) {
  shear_at(t);
  return std::shared_ptr<const TransferDiscretization>(std::shared_ptr<const TransferDiscretization>{}, &shear_at(t));
}

}  // namespace

TEST_CASE("grid construction") {
  const auto g = build_grid(2, 4);
  REQUIRE(g.points.cols() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(g.points(0, j) == doctest::Approx(std::cos(j * std::numbers::pi / 4)));
    CHECK(g.points(1, j) == doctest::Approx(std::sin(j * std::numbers::pi / 4)));
    CHECK(g.weights[static_cast<std::size_t>(j)] == doctest::Approx(0.25));
  }
  CHECK(g.distance(0, 2) == doctest::Approx(std::sqrt(2.0)));
  Vector e1(2), minus_e1(2);
  e1 << 1, 0;
  minus_e1 << -1, 0;
  CHECK(kernels::projective_distance(e1, minus_e1) == 0.0);

  std::mt19937_64 rng(83);
  for (int d = 2; d <= 8; ++d) {
    const auto grid = build_grid(d, 200);
    REQUIRE(grid.points.cols() == 200);
    double total = 0.0;
    for (double w : grid.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 200; ++j) CHECK(std::abs(grid.points.col(j).norm() - 1.0) <= 1e-12);
    std::uniform_int_distribution<int> pick(0, 199);
    for (int rep = 0; rep < 100; ++rep) {
      const int a = pick(rng), b = pick(rng), c = pick(rng);
      CHECK(grid.distance(a, b) == grid.distance(b, a));
      CHECK(grid.distance(a, c) <= grid.distance(a, b) + grid.distance(b, c) + 1e-12);
    }
  }
  CHECK_THROWS_AS(build_grid(9, 64), Error);
  CHECK_THROWS_AS(build_grid(1, 64), Error);
  CHECK_THROWS_AS(build_grid(2, 3), Error);
}

TEST_CASE("interpolation stencils are convex combinations") {
  std::mt19937_64 rng(89);
  for (int d : {2, 3, 5}) {
    const auto grid = build_grid(d, 256);
    for (int rep = 0; rep < 50; ++rep) {
      const Vector dir = oracle::random_matrix(rng, d).col(0).normalized();
      double total = 0.0;
      for (const auto& [index, weight] : interpolation_stencil(grid, dir)) {
        CHECK(weight >= 0.0);
        CHECK(index >= 0);
        CHECK(index < 256);
        total += weight;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    // A grid point interpolates to itself.
    const auto at_point = interpolation_stencil(grid, grid.points.col(7));
    double self = 0.0;
    for (const auto& [index, weight] : at_point) self += index == 7 ? weight : 0.0;
    CHECK(self == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("identity system: rho = M, h constant") {
  for (int d : {2, 3}) {
    const auto disc = assemble_transfer(oracle::identity_collection(3, d), 1.7, build_grid(d, 64));
    CHECK(disc.rho == doctest::Approx(3.0).epsilon(1e-12));
    for (double v : disc.h) CHECK(v == doctest::Approx(disc.h.front()).epsilon(1e-10));
    CHECK(disc.pairing(disc.h) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("singular matrices are rejected") {
  try {
    assemble_transfer(MatrixSystem({oracle::mat2(1, 1, 1, 1), oracle::mat2(1, 0, 0, 1)}), 1.0, build_grid(2, 64));
    FAIL("expected not invertible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotInvertible);
  }
}

TEST_CASE("discretization invariants") {
  for (double t : {0.5, 1.0, 2.0}) {
    const auto& disc = shear_at(t);
    CHECK(disc.converged);
    CHECK(disc.op.min_value() >= 0.0);
    const double h_max = *std::max_element(disc.h.begin(), disc.h.end());
    CHECK(*std::min_element(disc.h.begin(), disc.h.end()) > 1e-12 * h_max);
    CHECK(*std::min_element(disc.nu.begin(), disc.nu.end()) >= 0.0);
    CHECK(disc.pairing(disc.h) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(disc.right_residual <= 1e-8 * disc.rho * h_max);
    CHECK(disc.left_residual <= 1e-8 * disc.rho);
    CHECK(cylinder_measure_t(disc, Word{}) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("shear pair at t = 2 agrees with the Kusuoka lift") {
  const auto& disc = shear_at(2.0);
  CHECK(std::abs(disc.rho - kLiftRho) <= 1e-3);
  // The transfer measure multiplies in forward order, matching the forward lift.
  const auto lift = k_gibbs_measure(kusuoka_lift(oracle::shear_pair(), Orientation::kForward));
  CHECK(std::abs(cylinder_measure_t(disc, Word::parse("0")) - lift.measure(Word::parse("0"))) <= 1e-3);
  double worst = 0.0;
  for (const auto& w : all_words(2, 1, 6)) worst = std::max(worst, std::abs(cylinder_measure_t(disc, w) - lift.measure(w)));
  CHECK(worst <= 1e-3);
}

TEST_CASE("transfer measure follows the forward lift on a non-symmetric pair") {
  const MatrixSystem s({oracle::mat2(2, 1, 0, 1), oracle::mat2(1, 0, 3, 1)});
  const auto disc = assemble_transfer(s, 2.0, build_grid(2, 2048));
  const auto forward = k_gibbs_measure(kusuoka_lift(s, Orientation::kForward));
  CHECK(std::abs(disc.rho - forward.rho()) <= 1e-3);
  double worst = 0.0;
  for (const auto& w : all_words(2, 1, 4)) worst = std::max(worst, std::abs(cylinder_measure_t(disc, w) - forward.measure(w)));
  CHECK(worst <= 1e-3);
}

TEST_CASE("transfer measure consistency at t = 1") {
  const TransferGibbsMeasure mu(shear_ptr(1.0));
  CHECK(consistency_check(mu, 5) <= 1e-3);
  // The override and the generic enumeration agree.
  const Word i = Word::parse("01"), j = Word::parse("0");
  for (int gap = 0; gap <= 3; ++gap) {
    double total = 0.0;
    for_each_word_of_length(2, gap, [&](const Word& k) { total += mu.measure(i + k + j); });
    CHECK(mu.joint_mass(i, gap, j) == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("convergence defect of the discrete operator") {
  const auto& disc = shear_at(1.0);
  CHECK(convergence_defect_t(disc, disc.h, 0) <= 1e-10);
  CHECK(convergence_defect_t(disc, disc.h, 7) <= 1e-8);

  std::vector<double> f(disc.h.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = j < f.size() / 3 ? 1.0 : 0.0;
  // n = 0 is the distance to the projection.
  const double mean = disc.pairing(f);
  double direct = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) direct = std::max(direct, std::abs(f[j] - mean * disc.h[j]));
  CHECK(convergence_defect_t(disc, f, 0) == doctest::Approx(direct).epsilon(1e-12));

  for (std::size_t j = 0; j < f.size(); ++j) f[j] -= mean * disc.h[j];
  CHECK(std::abs(disc.pairing(f)) <= 1e-12);
  std::vector<double> xs, ys;
  for (int n = 4; n <= 20; ++n) {
    xs.push_back(n);
    ys.push_back(convergence_defect_t(disc, f, n));
  }
  const auto fit = fit_geometric_rate(xs, ys);
  CHECK(fit.points_used >= 2);
  CHECK(fit.rate <= disc.gap_ratio + 0.05);
}

TEST_CASE("Holder bound ratios stay bounded") {
  for (double t : {0.5, 1.0, 2.0}) {
    const auto& disc = shear_at(t);
    const double eps = std::min(1.0, t);
    CHECK(std::isfinite(holder_bound_check(disc, Word{}, eps)));
    double short_max = 0.0, long_max = 0.0;
    for (const auto& w : all_words(2, 0, 6)) {
      const double r = holder_bound_check(disc, w, eps);
      if (w.size() <= 3) short_max = std::max(short_max, r);
      long_max = std::max(long_max, r);
    }
    CHECK(long_max <= 10.0 * short_max);
  }
  // Identity system: every product is the identity.
  const auto id = assemble_transfer(oracle::identity_collection(2, 2), 1.0, build_grid(2, 256));
  const double base = holder_bound_check(id, Word{}, 1.0);
  for (const auto& w : all_words(2, 1, 3)) CHECK(holder_bound_check(id, w, 1.0) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("projective contraction inequalities") {
  const auto grid = build_grid(2, 512);
  const auto shear = projective_contraction_check(oracle::shear_pair(), grid, 10000, 1.0);
  CHECK(shear.passed);
  CHECK(shear.worst() <= 1.0 + 1e-9);
  CHECK(shear.samples == 10000);

  const auto identity = projective_contraction_check(oracle::identity_collection(2, 2), grid, 2000);
  CHECK(identity.passed);
  // Identity: d(u, w) / (2 d(u, w)) = 1/2.
  CHECK(identity.worst_contraction == doctest::Approx(0.5).epsilon(1e-9));

  const Matrix squeeze = oracle::mat2(10, 0, 0, 0.1);
  Vector u(2), w(2);
  for (double delta : {1e-3, 1e-2, 0.1}) {
    u << delta, 1;
    w << -delta, 1;
    u.normalize();
    w.normalize();
    const double r = contraction_ratio(squeeze, u, w);
    CHECK(r <= 1.0 + 1e-9);
    CHECK(r > 0.0);
    for (double t : {0.5, 1.0, 2.5}) CHECK(weight_regularity_ratio(squeeze, u, w, t) <= 1.0 + 1e-9);
  }
  const auto squeezed = projective_contraction_check(MatrixSystem({squeeze, oracle::mat2(1, 1, 0, 1)}), grid, 10000, 0.7);
  CHECK(squeezed.passed);
}

TEST_CASE("proximality search") {
  const auto shear = proximality_search(oracle::shear_pair(), 4);
  REQUIRE(shear.witness.has_value());
  CHECK(shear.witness->str() == "01");
  // [[2,1],[1,1]] has eigenvalues (3 +- sqrt 5) / 2.
  CHECK(shear.eigenvalue_separation == doctest::Approx(std::sqrt(5.0) / ((3 + std::sqrt(5.0)) / 2)).epsilon(1e-10));
  const auto from_two = proximality_search(MatrixSystem({oracle::rotation(0.3), oracle::rotation(-0.3) * 1.0}), 4);
  CHECK_FALSE(from_two.witness.has_value());
  const auto rotations = proximality_search(MatrixSystem({oracle::rotation(std::numbers::pi / 2), oracle::rotation(-std::numbers::pi / 2)}), 4);
  CHECK_FALSE(rotations.witness.has_value());
  const auto scalars = proximality_search(oracle::scalar_pair(2, 1), 1);
  CHECK(scalars.witness.has_value());
}

TEST_CASE("grid refinement stability") {
  std::vector<double> rho;
  for (int r : {256, 512, 1024}) rho.push_back(assemble_transfer(oracle::shear_pair(), 1.0, build_grid(2, r)).rho);
  rho.push_back(shear_at(1.0).rho);
  CHECK(std::abs(rho[3] - rho[2]) <= std::abs(rho[1] - rho[0]));
}

TEST_CASE("pressure cross-validation") {
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    const double log_rho = std::log(shear_at(t).rho);
    const auto series = pressure_estimate(oracle::shear_pair(), t, 12);
    CHECK(std::abs(log_rho - series.per_n_at(12)) <= 0.1);
  }
  CHECK(std::abs(std::log(shear_at(2.0).rho) - std::log(kLiftRho)) <= 1e-3);
}

TEST_CASE("Gibbs ratios at non-integer t are finite and positive") {
  const TransferGibbsMeasure mu(shear_ptr(0.5));
  const auto scan = gibbs_ratio_scan(mu, 8);
  CHECK(scan.c_min > 0.0);
  CHECK(std::isfinite(scan.c_max));
  CHECK(scan.skipped_zero_norm == 0);
  // Bounded: the spread does not grow much from L = 4 to L = 8.
  const auto short_scan = gibbs_ratio_scan(mu, 4);
  CHECK(scan.c_max / scan.c_min <= 2.0 * short_scan.c_max / short_scan.c_min);
}
