#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "matgibbs/error.hpp"

namespace matgibbs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Finite word over the alphabet {0, ..., M-1}. The empty word denotes the
/// whole shift space.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> symbols) : symbols_(std::move(symbols)) {}

  /// Parses "0120" style strings; symbols 10..35 use 'a'..'z'.
  static Word parse(std::string_view digits);

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  int operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<int>& symbols() const noexcept { return symbols_; }

  void push_back(int symbol) { symbols_.push_back(symbol); }
  void pop_back() { symbols_.pop_back(); }

  Word reversed() const;
  std::string str() const;

  auto begin() const noexcept { return symbols_.begin(); }
  auto end() const noexcept { return symbols_.end(); }

  friend Word operator+(const Word& a, const Word& b);
  friend auto operator<=>(const Word&, const Word&) = default;
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<int> symbols_;
};

/// Caps the number of words any single enumeration may visit.
struct EnumerationBudget {
  std::uint64_t max_words = 20'000'000;

  /// Throws kBudgetExceeded when `words` exceeds the cap.
  void require(std::uint64_t words, std::string_view what) const;
};

/// M^n, saturating at UINT64_MAX.
std::uint64_t word_count(int alphabet_size, int length);

/// Number of words of lengths lo..hi.
std::uint64_t word_count_range(int alphabet_size, int lo, int hi);

/// Ordered collection (A_0, ..., A_{M-1}) of real d x d matrices.
class MatrixSystem {
 public:
  /// Throws kInvalidArgument on empty input, mismatched shapes, fewer than
  /// two matrices, or a zero matrix.
  explicit MatrixSystem(std::vector<Matrix> matrices);

  int dim() const noexcept { return static_cast<int>(matrices_.front().rows()); }
  int alphabet_size() const noexcept { return static_cast<int>(matrices_.size()); }
  const Matrix& operator[](int i) const { return matrices_[static_cast<std::size_t>(i)]; }
  const std::vector<Matrix>& matrices() const noexcept { return matrices_; }

  Matrix sum() const;
  MatrixSystem transposed() const;
  bool is_nonnegative() const;

  /// Throws kInvalidWord if any symbol is outside the alphabet.
  void validate(const Word& word) const;

 private:
  std::vector<Matrix> matrices_;
};

/// A_{i_0} A_{i_1} ... A_{i_{n-1}}; identity for the empty word.
Matrix word_product(const MatrixSystem& system, const Word& word);

/// Largest singular value. Closed form for 1x1 and 2x2.
double spectral_norm(const Matrix& a);

namespace detail {

template <class Visit>
void visit_subtree(const MatrixSystem& system, Word& word, std::vector<Matrix>& stack,
                   int min_len, int max_len, Visit& visit) {
  const auto depth = word.size();
  if (static_cast<int>(depth) >= min_len) visit(static_cast<const Word&>(word), stack[depth]);
  if (static_cast<int>(depth) == max_len) return;
  for (int i = 0; i < system.alphabet_size(); ++i) {
    word.push_back(i);
    stack[depth + 1].noalias() = stack[depth] * system[i];
    visit_subtree(system, word, stack, min_len, max_len, visit);
    word.pop_back();
  }
}

}  // namespace detail

/// Depth-first, lexicographic visit of every word extending `root` whose
/// length lies in [min_len, max_len]. The visitor receives the word and its
/// product; prefix products are cached along the stack.
template <class Visit>
void visit_words(const MatrixSystem& system, int min_len, int max_len, Visit&& visit,
                 const Word& root = {}) {
  if (static_cast<int>(root.size()) > max_len) return;
  Word word = root;
  std::vector<Matrix> stack(static_cast<std::size_t>(max_len) + 1);
  stack[root.size()] = word_product(system, root);
  detail::visit_subtree(system, word, stack, min_len, max_len, visit);
}

/// Calls visit(word) for every word of exactly `length` symbols over an
/// alphabet of size M, in lexicographic order.
template <class Visit>
void for_each_word_of_length(int alphabet_size, int length, Visit&& visit) {
  std::vector<int> digits(static_cast<std::size_t>(length), 0);
  while (true) {
    visit(Word(digits));
    int pos = length - 1;
    while (pos >= 0 && digits[static_cast<std::size_t>(pos)] == alphabet_size - 1) {
      digits[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) return;
    ++digits[static_cast<std::size_t>(pos)];
  }
}

/// Every word of length lo..hi, shortest first.
std::vector<Word> all_words(int alphabet_size, int lo, int hi);

/// Sum over all M^n words of ||A_I||^t (spectral norm).
double partition_sum(const MatrixSystem& system, double t, int n,
                     const EnumerationBudget& budget = {});

struct PartitionSumSeries {
  double t = 0.0;
  std::string norm = "spectral";
  std::vector<double> log_z;     // index n-1 holds log Z_n
  std::vector<double> per_n;     // (1/n) log Z_n
  std::vector<double> diff;      // log Z_{n+1} - log Z_n, n = 1..n_max-1

  int n_max() const noexcept { return static_cast<int>(log_z.size()); }
  double log_z_at(int n) const { return log_z.at(static_cast<std::size_t>(n - 1)); }
  double per_n_at(int n) const { return per_n.at(static_cast<std::size_t>(n - 1)); }
};

/// Both pressure estimator series for n = 1..n_max; no extrapolation.
PartitionSumSeries pressure_estimate(const MatrixSystem& system, double t, int n_max,
                                     const EnumerationBudget& budget = {});

}  // namespace matgibbs
