#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "edurec/error.hpp"

namespace edurec {

// Regularized incomplete gamma functions, a > 0, x >= 0.
// Series for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double statistic, double dof);

// Row-major r x c table of observed counts.
class ContingencyTable {
 public:
  ContingencyTable(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}
  ContingencyTable(std::initializer_list<std::initializer_list<std::int64_t>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::int64_t& at(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
  std::int64_t at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
  std::int64_t total() const;

  // Copy without all-zero rows and columns.
  ContingencyTable compact() const;

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::int64_t> cells_;
};

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  bool low_expected = false;  // some expected cell in [1, 5)
  ContingencyTable table{0, 0};
};

// Pearson chi-square test of independence, no continuity correction.
// Throws TooSmallTable (r or c < 2), DegenerateTable (zero row/column or an
// expected cell below 1).
ChiSquareResult chi_square_independence(const ContingencyTable& table);

// Fraction of unordered item pairs on which the two labelings agree.
double rand_index(std::span<const int> a, std::span<const int> b);
double rand_index(const std::map<std::string, int>& a, const std::map<std::string, int>& b);

// Product-moment correlation; throws LengthMismatch, TooFewItems, ZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace edurec
