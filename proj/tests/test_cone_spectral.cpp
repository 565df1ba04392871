#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include "matgibbs/cone_spectral.hpp"
#include "oracles.hpp"

using namespace matgibbs;

namespace {

// Strong connectivity of the digraph i -> j when a(i, j) > 0.
bool graph_irreducible(const Matrix& a) {
  const auto d = static_cast<int>(a.rows());
  auto reach_all = [&](bool transpose) {
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      for (int j = 0; j < d; ++j) {
        const double w = transpose ? a(j, i) : a(i, j);
        if (w > 0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = true;
          q.push(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach_all(false) && reach_all(true);
}

// Irreducible and aperiodic: the gcd of (level(i) + 1 - level(j)) over edges
// i -> j of a BFS level function is the period.
bool graph_primitive(const Matrix& a) {
  if (!graph_irreducible(a)) return false;
  const auto d = static_cast<int>(a.rows());
  std::vector<int> level(static_cast<std::size_t>(d), -1);
  std::queue<int> q;
  q.push(0);
  level[0] = 0;
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (int j = 0; j < d; ++j) {
      if (a(i, j) > 0 && level[static_cast<std::size_t>(j)] < 0) {
        level[static_cast<std::size_t>(j)] = level[static_cast<std::size_t>(i)] + 1;
        q.push(j);
      }
    }
  }
  int period = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (a(i, j) > 0) period = std::gcd(period, std::abs(level[static_cast<std::size_t>(i)] + 1 - level[static_cast<std::size_t>(j)]));
    }
  }
  return period == 1;
}

Matrix random_sparse_nonnegative(std::mt19937_64& rng, int d, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (u(rng) < density) a(i, j) = 0.1 + u(rng);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("leading eigentriple of [[2,1],[1,2]]") {
  const auto s = leading_eigentriple(oracle::mat2(2, 1, 1, 2));
  const auto eig = oracle::symmetric_eigenvalues(oracle::mat2(2, 1, 1, 2));
  CHECK(s.rho == doctest::Approx(eig[1]).epsilon(1e-14));
  CHECK(s.rho == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(s.u(0) == doctest::Approx(1.0));
  CHECK(s.u(1) == doctest::Approx(1.0));
  CHECK(s.v(0) == doctest::Approx(0.5));
  CHECK(s.v(1) == doctest::Approx(0.5));
  CHECK(s.gap_ratio == doctest::Approx(eig[0] / eig[1]).epsilon(1e-14));
  CHECK(s.gap_ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("leading eigentriple rejects a multiple dominant eigenvalue") {
  try {
    leading_eigentriple(Matrix::Identity(3, 3));
    FAIL("expected non-simple-dominant");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonSimpleDominant);
  }
  // Complex dominant pair.
  CHECK_THROWS_AS(leading_eigentriple(oracle::rotation(1.0)), Error);
  // Period two: eigenvalues +1 and -1 share the modulus.
  CHECK_THROWS_AS(leading_eigentriple(oracle::mat2(0, 1, 1, 0)), Error);
}

TEST_CASE("leading eigentriple in dimension one") {
  const auto s = leading_eigentriple(oracle::scalar(3));
  CHECK(s.rho == doctest::Approx(3.0));
  CHECK(s.u(0) * s.v(0) == doctest::Approx(1.0));
  CHECK(s.gap_ratio == 0.0);
}

TEST_CASE("leading eigentriple residuals and positivity on random positive matrices") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 7;
    const Matrix a = oracle::random_matrix(rng, d).cwiseAbs() + Matrix::Constant(d, d, 0.01);
    const auto s = leading_eigentriple(a);
    CHECK(s.right_residual() <= 1e-10 * s.rho * s.u.norm());
    CHECK(s.left_residual() <= 1e-10 * s.rho * s.v.norm());
    CHECK(s.u.dot(s.v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.u.minCoeff() > 0.0);
    CHECK(s.v.minCoeff() > 0.0);
    CHECK(std::abs(oracle::eigenvalues(a)[0] - std::complex<double>(s.rho, 0.0)) <= 1e-10 * s.rho);
    CHECK(s.gap_ratio >= 0.0);
    CHECK(s.gap_ratio < 1.0);
  }
}

TEST_CASE("orthant irreducibility examples") {
  CHECK(orthant_irreducible(oracle::mat2(0, 1, 1, 0)));
  CHECK_FALSE(orthant_irreducible(oracle::mat2(1, 0, 0, 1)));
  CHECK(orthant_irreducible(oracle::mat2(2, 1, 1, 2)));
  try {
    orthant_irreducible(oracle::mat2(1, -1, 0, 1));
    FAIL("expected not-cone-nonnegative");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotConeNonnegative);
  }
}

TEST_CASE("orthant primitivity examples") {
  CHECK_FALSE(orthant_primitive(oracle::mat2(0, 1, 1, 0)));
  CHECK(orthant_primitive(oracle::mat2(1, 1, 1, 0)));
  CHECK(orthant_primitive(oracle::mat2(2, 1, 1, 2)));
  CHECK_THROWS_AS(orthant_primitive(oracle::mat2(0, -1, 1, 0)), Error);
  // Wielandt's extremal matrix needs exactly (d-1)^2 + 1 powers.
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = w(1, 2) = w(2, 3) = w(3, 0) = w(3, 1) = 1;
  CHECK(orthant_primitive(w));
}

TEST_CASE("irreducibility and primitivity agree with graph oracles; primitive implies irreducible") {
  std::mt19937_64 rng(43);
  int primitive_count = 0;
  int irreducible_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 6;
    const Matrix a = random_sparse_nonnegative(rng, d, 0.25 + 0.1 * (trial % 4));
    const bool irr = orthant_irreducible(a);
    const bool prim = orthant_primitive(a);
    CHECK(irr == graph_irreducible(a));
    CHECK(prim == graph_primitive(a));
    if (prim) CHECK(irr);
    primitive_count += prim;
    irreducible_count += irr;
  }
  // The sample exercises both outcomes.
  CHECK(primitive_count > 10);
  CHECK(irreducible_count < 200);
}

TEST_CASE("convergence defect examples") {
  const auto s = leading_eigentriple(oracle::mat2(2, 1, 1, 2));
  CHECK(convergence_defect(s, 0) > 0.0);
  CHECK(convergence_defect(s, 0) == doctest::Approx(oracle::sigma_max(Matrix::Identity(2, 2) - s.projector())));
  // Direct matrix power oracle.
  Matrix power = Matrix::Identity(2, 2);
  for (int r = 0; r < 5; ++r) power = power * oracle::mat2(2, 1, 1, 2) / 3.0;
  const double direct = oracle::sigma_max(power - Matrix::Constant(2, 2, 0.5));
  CHECK(convergence_defect(s, 5) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(convergence_defect(s, 5) == doctest::Approx(std::pow(1.0 / 3.0, 5)).epsilon(1e-12));

  Vector u(3), v(3);
  u << 1, 2, 3;
  v << 0.5, 0.25, 1.0 / 6.0;
  v /= u.dot(v);
  const auto rank_one = leading_eigentriple(u * v.transpose());
  CHECK(rank_one.rho == doctest::Approx(1.0));
  for (int n = 1; n <= 6; ++n) CHECK(convergence_defect(rank_one, n) <= 1e-12);
}

TEST_CASE("convergence defect decays at the gap rate") {
  std::mt19937_64 rng(47);
  std::vector<Matrix> cases{oracle::mat2(2, 1, 1, 2), oracle::mat2(1, 1, 1, 0)};
  for (int i = 0; i < 20; ++i) cases.push_back(oracle::random_matrix(rng, 2 + i % 4).cwiseAbs() + Matrix::Constant(2 + i % 4, 2 + i % 4, 0.05));
  for (const auto& a : cases) {
    REQUIRE(orthant_primitive(a));
    const auto s = leading_eigentriple(a);
    const double rate = s.gap_ratio + 1e-3;
    // defect(n) / rate^n stays bounded: its max over n <= 30 is controlled
    // by the values at small n. Points below the rounding floor are dropped.
    double early = 0.0, late = 0.0;
    int last = 2;
    for (int n = 2; n <= 30; ++n) {
      const double defect = convergence_defect(s, n);
      if (defect < 1e-12) break;
      last = n;
      const double scaled = defect / std::pow(rate, n);
      if (n <= 6) early = std::max(early, scaled);
      else late = std::max(late, scaled);
    }
    CHECK(late <= 10.0 * early);
    if (last >= 12) {
      const double root = std::pow(convergence_defect(s, last) / convergence_defect(s, 6), 1.0 / (last - 6));
      CHECK(root == doctest::Approx(s.gap_ratio).epsilon(0.15));
    }
  }
}

TEST_CASE("collection primitivity scan examples") {
  // Scalars commute, so the ratio is sum_{|K|=N} p_K for every I, J.
  const auto scalars = collection_primitivity_scan(oracle::scalar_pair(2, 1), 2, 3);
  CHECK(scalars.delta == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(scalars.verdict == ScanVerdict::kCertifiedPositiveAtScale);

  const auto shear = oracle::shear_pair();
  const auto report = collection_primitivity_scan(shear, 1, 3);
  CHECK(report.delta > 0.0);
  CHECK(report.verdict == ScanVerdict::kCertifiedPositiveAtScale);
  // Hand-checkable L = 1 case by brute force.
  double brute = 1e300;
  for (const auto& i : all_words(2, 0, 1)) {
    for (const auto& j : all_words(2, 0, 1)) {
      double total = 0.0;
      for (int k = 0; k < 2; ++k) {
        total += oracle::sigma_max(oracle::product(shear, i) * shear[k] * oracle::product(shear, j));
      }
      brute = std::min(brute, total / (oracle::sigma_max(oracle::product(shear, i)) * oracle::sigma_max(oracle::product(shear, j))));
    }
  }
  CHECK(collection_primitivity_scan(shear, 1, 1).delta == doctest::Approx(brute).epsilon(1e-12));
  CHECK(report.delta <= brute + 1e-12);

  const auto reducible = collection_primitivity_scan(oracle::reducible_pair(), 1, 1);
  CHECK(reducible.delta <= 1e-12);
  CHECK(reducible.verdict == ScanVerdict::kFailed);
  CHECK(reducible.argmin_i.size() + reducible.argmin_j.size() > 0);
}

TEST_CASE("collection irreducibility scan examples") {
  const auto scalars = collection_irreducibility_scan(oracle::scalar_pair(2, 1), 2);
  CHECK(scalars.delta == doctest::Approx(1.0 + 3.0).epsilon(1e-12));  // K over lengths 0 and 1
  CHECK(scalars.gap_is_upper_bound);
  CHECK(collection_irreducibility_scan(oracle::shear_pair(), 3).verdict == ScanVerdict::kCertifiedPositiveAtScale);
  const auto reducible = collection_irreducibility_scan(oracle::reducible_pair(), 1);
  CHECK(reducible.delta <= 1e-12);
  CHECK(reducible.verdict == ScanVerdict::kFailed);
}

TEST_CASE("irreducibility scan verdict is invariant under transposition") {
  std::mt19937_64 rng(53);
  int positives = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Matrix a0 = random_sparse_nonnegative(rng, 3, 0.3);
    Matrix a1 = random_sparse_nonnegative(rng, 3, 0.3);
    a0(trial % 3, (trial / 3) % 3) += 1.0;
    a1((trial / 9) % 3, trial % 3) += 1.0;
    const MatrixSystem s({a0, a1});
    const auto a = collection_irreducibility_scan(s, 2);
    const auto b = collection_irreducibility_scan(s.transposed(), 2);
    CHECK((a.verdict == ScanVerdict::kCertifiedPositiveAtScale) == (b.verdict == ScanVerdict::kCertifiedPositiveAtScale));
    CHECK(a.delta == doctest::Approx(b.delta).epsilon(1e-10));
    positives += a.verdict == ScanVerdict::kCertifiedPositiveAtScale;
  }
  CHECK(positives > 0);
  CHECK(positives < 40);
}

TEST_CASE("collection scans respect the budget") {
  try {
    collection_primitivity_scan(oracle::shear_pair(), 4, 10, EnumerationBudget{1000});
    FAIL("expected budget error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetExceeded);
  }
}

TEST_CASE("power iteration matches a dense eigendecomposition") {
  std::mt19937_64 rng(59);
  const Matrix a = oracle::random_matrix(rng, 30).cwiseAbs();
  kernels::SparseOperator op;
  op.rows = op.cols = 30;
  for (int r = 0; r < 30; ++r) {
    for (int c = 0; c < 30; ++c) {
      op.col.push_back(c);
      op.val.push_back(a(r, c));
    }
    op.row_ptr.push_back(static_cast<std::int64_t>(op.val.size()));
  }
  const auto result = perron_power_iteration(op);
  const auto eig = oracle::eigenvalues(a);
  CHECK(result.converged);
  CHECK(result.rho == doctest::Approx(eig[0].real()).epsilon(1e-10));
  CHECK(result.gap_ratio == doctest::Approx(std::abs(eig[1]) / eig[0].real()).epsilon(0.02));
  double pairing = 0.0, nu_sum = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    pairing += result.h[i] * result.nu[i];
    nu_sum += result.nu[i];
    CHECK(result.h[i] > 0.0);
    CHECK(result.nu[i] > 0.0);
  }
  CHECK(pairing == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nu_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.right_residual <= 1e-8);
  CHECK(result.left_residual <= 1e-8);
}
