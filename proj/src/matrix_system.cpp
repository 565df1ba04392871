#include "matgibbs/matrix_system.hpp"

#include <cmath>
#include <limits>

#include "matgibbs/kernels.hpp"

namespace matgibbs {

Word Word::parse(std::string_view digits) {
  std::vector<int> symbols;
  symbols.reserve(digits.size());
  for (char c : digits) {
    if (c >= '0' && c <= '9') {
      symbols.push_back(c - '0');
    } else if (c >= 'a' && c <= 'z') {
      symbols.push_back(10 + (c - 'a'));
    } else {
      throw Error(ErrorCode::kInvalidWord,
                  "invalid symbol '" + std::string(1, c) + "' in word \"" + std::string(digits) + "\"");
    }
  }
  return Word(std::move(symbols));
}

Word Word::reversed() const {
  return Word(std::vector<int>(symbols_.rbegin(), symbols_.rend()));
}

std::string Word::str() const {
  std::string out;
  out.reserve(symbols_.size());
  for (int s : symbols_) {
    out.push_back(s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + (s - 10)));
  }
  return out;
}

Word operator+(const Word& a, const Word& b) {
  std::vector<int> symbols = a.symbols_;
  symbols.insert(symbols.end(), b.symbols_.begin(), b.symbols_.end());
  return Word(std::move(symbols));
}

void EnumerationBudget::require(std::uint64_t words, std::string_view what) const {
  if (words > max_words) {
    throw Error(ErrorCode::kBudgetExceeded,
                std::string(what) + " needs " + std::to_string(words) +
                    " words, budget is " + std::to_string(max_words));
  }
}

std::uint64_t word_count(int alphabet_size, int length) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  const auto m = static_cast<std::uint64_t>(alphabet_size);
  for (int i = 0; i < length; ++i) {
    if (m != 0 && count > kMax / m) return kMax;
    count *= m;
  }
  return count;
}

std::uint64_t word_count_range(int alphabet_size, int lo, int hi) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  for (int n = lo; n <= hi; ++n) {
    const auto c = word_count(alphabet_size, n);
    if (total > kMax - c) return kMax;
    total += c;
  }
  return total;
}

MatrixSystem::MatrixSystem(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "a matrix system needs at least two matrices");
  }
  const auto d = matrices_.front().rows();
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "matrix dimension must be at least 1");
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    const auto& a = matrices_[i];
    if (a.rows() != d || a.cols() != d) {
      throw Error(ErrorCode::kInvalidArgument,
                  "matrix " + std::to_string(i) + " is not " + std::to_string(d) + "x" + std::to_string(d));
    }
    if (!a.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "matrix " + std::to_string(i) + " has non-finite entries");
    }
    if (a.isZero(0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "matrix " + std::to_string(i) + " is the zero matrix");
    }
  }
}

Matrix MatrixSystem::sum() const {
  Matrix s = Matrix::Zero(dim(), dim());
  for (const auto& a : matrices_) s += a;
  return s;
}

MatrixSystem MatrixSystem::transposed() const {
  std::vector<Matrix> t;
  t.reserve(matrices_.size());
  for (const auto& a : matrices_) t.emplace_back(a.transpose());
  return MatrixSystem(std::move(t));
}

bool MatrixSystem::is_nonnegative() const {
  for (const auto& a : matrices_) {
    if ((a.array() < 0.0).any()) return false;
  }
  return true;
}

void MatrixSystem::validate(const Word& word) const {
  for (int s : word) {
    if (s < 0 || s >= alphabet_size()) {
      throw Error(ErrorCode::kInvalidWord, "symbol " + std::to_string(s) + " in word \"" + word.str() +
                                               "\" is outside alphabet of size " +
                                               std::to_string(alphabet_size()));
    }
  }
}

Matrix word_product(const MatrixSystem& system, const Word& word) {
  system.validate(word);
  Matrix p = Matrix::Identity(system.dim(), system.dim());
  Matrix tmp;
  for (int s : word) {
    tmp.noalias() = p * system[s];
    p.swap(tmp);
  }
  return p;
}

double spectral_norm(const Matrix& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  if (a.rows() == 2 && a.cols() == 2) {
    const double p = std::hypot(a(0, 0) + a(1, 1), a(0, 1) - a(1, 0));
    const double q = std::hypot(a(0, 0) - a(1, 1), a(0, 1) + a(1, 0));
    return 0.5 * (p + q);
  }
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

std::vector<Word> all_words(int alphabet_size, int lo, int hi) {
  std::vector<Word> out;
  for (int n = lo; n <= hi; ++n) {
    for_each_word_of_length(alphabet_size, n, [&](const Word& w) { out.push_back(w); });
  }
  return out;
}

double partition_sum(const MatrixSystem& system, double t, int n, const EnumerationBudget& budget) {
  if (n < 1) throw Error(ErrorCode::kPrecondition, "partition_sum needs n >= 1");
  if (!(t >= 0.0)) throw Error(ErrorCode::kPrecondition, "partition_sum needs t >= 0");
  budget.require(word_count_range(system.alphabet_size(), 1, n), "partition_sum");
  return kernels::level_norm_sums(system, t, n).back();
}

PartitionSumSeries pressure_estimate(const MatrixSystem& system, double t, int n_max,
                                     const EnumerationBudget& budget) {
  if (n_max < 2) throw Error(ErrorCode::kPrecondition, "pressure_estimate needs n_max >= 2");
  if (!(t >= 0.0)) throw Error(ErrorCode::kPrecondition, "pressure_estimate needs t >= 0");
  budget.require(word_count_range(system.alphabet_size(), 1, n_max), "pressure_estimate");

  const auto z = kernels::level_norm_sums(system, t, n_max);
  PartitionSumSeries series;
  series.t = t;
  for (int n = 1; n <= n_max; ++n) {
    const double lz = std::log(z[static_cast<std::size_t>(n - 1)]);
    if (!std::isfinite(lz)) {
      throw Error(ErrorCode::kOverflow, "log Z_" + std::to_string(n) + " is not finite");
    }
    series.log_z.push_back(lz);
    series.per_n.push_back(lz / n);
  }
  for (int n = 1; n < n_max; ++n) {
    series.diff.push_back(series.log_z[static_cast<std::size_t>(n)] -
                          series.log_z[static_cast<std::size_t>(n - 1)]);
  }
  return series;
}

}  // namespace matgibbs
