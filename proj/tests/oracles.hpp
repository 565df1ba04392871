#pragma once

// Reference computations for the tests. These deliberately avoid the library's
// own code paths: products are plain loops, norms come from a full SVD,
// symmetric spectra from the self-adjoint solver and tensor lifts from
// explicit Kronecker products.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "matgibbs/matrix_system.hpp"

namespace oracle {

using matgibbs::Matrix;
using matgibbs::MatrixSystem;
using matgibbs::Vector;
using matgibbs::Word;

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix scalar(double a) { return Matrix::Constant(1, 1, a); }

inline MatrixSystem shear_pair() { return MatrixSystem({mat2(1, 1, 0, 1), mat2(1, 0, 1, 1)}); }
inline MatrixSystem scalar_pair(double a, double b) { return MatrixSystem({scalar(a), scalar(b)}); }
inline MatrixSystem reducible_pair() { return MatrixSystem({mat2(1, 0, 0, 0), mat2(0, 0, 0, 1)}); }

inline MatrixSystem identity_collection(int m, int d) {
  return MatrixSystem(std::vector<Matrix>(static_cast<std::size_t>(m), Matrix::Identity(d, d)));
}

inline Matrix rotation(double angle) { return mat2(std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle)); }

inline Matrix product(const std::vector<Matrix>& mats, const std::vector<int>& word) {
  const auto d = mats.front().rows();
  Matrix p = Matrix::Identity(d, d);
  for (int s : word) p = p * mats[static_cast<std::size_t>(s)];
  return p;
}

inline Matrix product(const MatrixSystem& system, const Word& word) { return product(system.matrices(), word.symbols()); }

inline double sigma_max(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/// Eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> symmetric_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

/// Eigenvalues of a general matrix sorted by decreasing modulus.
inline std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  Eigen::ComplexEigenSolver<Matrix> es(a);
  std::vector<std::complex<double>> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](auto x, auto y) {
    if (std::abs(std::abs(x) - std::abs(y)) > 1e-12) return std::abs(x) > std::abs(y);
    return x.real() > y.real() || (x.real() == y.real() && x.imag() > y.imag());
  });
  return out;
}

/// Kronecker power A^{(x)k}.
inline Matrix kron_power(const Matrix& a, int k) {
  Matrix out = Matrix::Identity(1, 1);
  for (int r = 0; r < k; ++r) {
    Matrix next(out.rows() * a.rows(), out.cols() * a.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(i * a.rows(), j * a.cols(), a.rows(), a.cols()) = out(i, j) * a;
    }
    out = next;
  }
  return out;
}

/// Orthonormal basis (columns) of the symmetric tensors in (R^d)^{(x)k},
/// from the range of the symmetrizing projector.
inline Matrix symmetric_tensor_basis(int d, int k) {
  const int n = static_cast<int>(std::pow(d, k));
  Matrix proj = Matrix::Zero(n, n);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  int count = 0;
  do {
    for (int idx = 0; idx < n; ++idx) {
      std::vector<int> digits(static_cast<std::size_t>(k));
      int rem = idx;
      for (int p = k - 1; p >= 0; --p) {
        digits[static_cast<std::size_t>(p)] = rem % d;
        rem /= d;
      }
      int target = 0;
      for (int p = 0; p < k; ++p) target = target * d + digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(p)])];
      proj(target, idx) += 1.0;
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  proj /= count;
  Eigen::SelfAdjointEigenSolver<Matrix> es(proj);
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  }
  Matrix basis(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  return basis;
}

/// Sum_i (A_i^T)^{(x)k} restricted to the symmetric tensors.
inline Matrix symmetric_power_sum(const MatrixSystem& system, int k) {
  const Matrix q = symmetric_tensor_basis(system.dim(), k);
  Matrix sum = Matrix::Zero(q.cols(), q.cols());
  for (const auto& a : system.matrices()) sum += q.transpose() * kron_power(a.transpose(), k) * q;
  return sum;
}

/// Random d x d matrix with entries uniform in [-1, 1].
inline Matrix random_matrix(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  return a;
}

inline Word random_word(std::mt19937_64& rng, int alphabet_size, int length) {
  std::uniform_int_distribution<int> pick(0, alphabet_size - 1);
  std::vector<int> s(static_cast<std::size_t>(length));
  for (auto& x : s) x = pick(rng);
  return Word(std::move(s));
}

}  // namespace oracle
