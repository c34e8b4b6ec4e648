#include "edurec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace edurec {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a))
    throw Error(ErrorCode::InvalidConfig, "incomplete gamma requires a > 0 and x >= 0");
}

std::uint64_t pairs(std::uint64_t n) { return n * (n - 1) / 2; }

}  // namespace

double gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi_square_sf(double statistic, double dof) {
  if (!(dof > 0)) throw Error(ErrorCode::InvalidConfig, "dof must be positive");
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

ContingencyTable::ContingencyTable(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  cells_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::LengthMismatch, "ragged contingency table");
    cells_.insert(cells_.end(), r.begin(), r.end());
  }
}

std::int64_t ContingencyTable::total() const {
  std::int64_t t = 0;
  for (auto v : cells_) t += v;
  return t;
}

ContingencyTable ContingencyTable::compact() const {
  std::vector<std::size_t> keep_rows, keep_cols;
  for (std::size_t r = 0; r < rows_; ++r) {
    std::int64_t s = 0;
    for (std::size_t c = 0; c < cols_; ++c) s += at(r, c);
    if (s != 0) keep_rows.push_back(r);
  }
  for (std::size_t c = 0; c < cols_; ++c) {
    std::int64_t s = 0;
    for (std::size_t r = 0; r < rows_; ++r) s += at(r, c);
    if (s != 0) keep_cols.push_back(c);
  }
  ContingencyTable out(keep_rows.size(), keep_cols.size());
  for (std::size_t i = 0; i < keep_rows.size(); ++i)
    for (std::size_t j = 0; j < keep_cols.size(); ++j) out.at(i, j) = at(keep_rows[i], keep_cols[j]);
  return out;
}

ChiSquareResult chi_square_independence(const ContingencyTable& table) {
  const auto r = table.rows();
  const auto c = table.cols();
  if (r < 2 || c < 2) throw Error(ErrorCode::TooSmallTable, "need at least a 2x2 table");

  std::vector<double> row_sum(r, 0.0), col_sum(c, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const auto v = table.at(i, j);
      if (v < 0) throw Error(ErrorCode::DegenerateTable, "negative count");
      row_sum[i] += static_cast<double>(v);
      col_sum[j] += static_cast<double>(v);
    }
  for (std::size_t i = 0; i < r; ++i)
    if (row_sum[i] == 0) throw Error(ErrorCode::DegenerateTable, "row " + std::to_string(i) + " is empty");
  for (std::size_t j = 0; j < c; ++j)
    if (col_sum[j] == 0) throw Error(ErrorCode::DegenerateTable, "column " + std::to_string(j) + " is empty");
  const double total = static_cast<double>(table.total());

  ChiSquareResult result;
  result.table = table;
  result.dof = static_cast<int>((r - 1) * (c - 1));
  double stat = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      if (expected < 1.0)
        throw Error(ErrorCode::DegenerateTable, "expected count " + std::to_string(expected) + " below 1 at (" +
                                                    std::to_string(i) + "," + std::to_string(j) + ")");
      if (expected < 5.0) result.low_expected = true;
      const double diff = static_cast<double>(table.at(i, j)) - expected;
      stat += diff * diff / expected;
    }
  result.statistic = stat;
  result.p_value = chi_square_sf(stat, result.dof);
  return result;
}

double rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::MismatchedItems, "partitions cover different item counts");
  if (a.size() < 2) throw Error(ErrorCode::TooFewItems, "rand index needs at least 2 items");

  std::unordered_map<int, std::uint64_t> count_a, count_b;
  std::unordered_map<std::uint64_t, std::uint64_t> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a[i])) << 32) |
                     static_cast<std::uint32_t>(b[i]);
    ++joint[key];
  }
  // agreeing = together in both + apart in both
  std::uint64_t same_a = 0, same_b = 0, same_both = 0;
  for (const auto& [_, n] : count_a) same_a += pairs(n);
  for (const auto& [_, n] : count_b) same_b += pairs(n);
  for (const auto& [_, n] : joint) same_both += pairs(n);
  const std::uint64_t total = pairs(a.size());
  const std::uint64_t agree = total + 2 * same_both - same_a - same_b;
  return static_cast<double>(agree) / static_cast<double>(total);
}

double rand_index(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::MismatchedItems, "partitions cover different items");
  std::vector<int> la, lb;
  la.reserve(a.size());
  lb.reserve(b.size());
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw Error(ErrorCode::MismatchedItems, "item '" + ia->first + "' not in both");
    la.push_back(ia->second);
    lb.push_back(ib->second);
  }
  return rand_index(la, lb);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "pearson inputs differ in length");
  if (x.size() < 2) throw Error(ErrorCode::TooFewItems, "pearson needs at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ZeroVariance, "pearson input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace edurec
