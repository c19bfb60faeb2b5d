#include <cstdint>
#include <algorithm>
#include <numeric>

#include "nlslab/error.hpp"
#include "nlslab/nonlinearity.hpp"

namespace nlslab {

namespace {

__extension__ using Wide = __int128;

// Exact rational arithmetic for the small integer linear programs that arise
// from exponent vectors. Overflow is detected and reported.
class Rational {
 public:
  Rational(std::int64_t n = 0, std::int64_t d = 1) : num_(n), den_(d) { normalize(); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(static_cast<Wide>(a.num_) * b.den_ + static_cast<Wide>(b.num_) * a.den_,
                static_cast<Wide>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num_, b.den_); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<Wide>(a.num_) * b.num_, static_cast<Wide>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw NumericalError("division by zero in exact simplex");
    return make(static_cast<Wide>(a.num_) * b.den_, static_cast<Wide>(a.den_) * b.num_);
  }
  friend bool operator<(const Rational& a, const Rational& b) { return (a - b).num_ < 0; }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  static Rational make(Wide n, Wide d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    Wide a = n < 0 ? -n : n;
    Wide b = d;
    while (b != 0) {
      const Wide t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr Wide limit = static_cast<Wide>(INT64_MAX);
    if (n > limit || n < -limit || d > limit) throw NumericalError("overflow in exact simplex");
    return Rational(Raw{}, static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  }
  struct Raw {};
  Rational(Raw, std::int64_t n, std::int64_t d) : num_(n), den_(d) {}
  void normalize() {
    if (den_ == 0) throw NumericalError("zero denominator");
    *this = make(num_, den_);
  }

  std::int64_t num_;
  std::int64_t den_;
};

using Row = std::vector<Rational>;

// Tableau simplex with Bland's rule: minimizes cost . x subject to A x = b,
// x >= 0, b >= 0, starting from an artificial basis.
struct Simplex {
  std::vector<Row> A;  // m rows of (columns + 1), last entry is the rhs
  std::vector<int> basis;
  int columns = 0;

  void pivot(int r, int c) {
    const Rational inv = Rational(1) / A[r][c];
    for (auto& v : A[r]) v = v * inv;
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (static_cast<int>(i) == r || A[i][c].sign() == 0) continue;
      const Rational factor = A[i][c];
      for (int j = 0; j <= columns; ++j) A[i][j] = A[i][j] - factor * A[r][j];
    }
    basis[r] = c;
  }

  // Returns false when unbounded. `allowed` masks columns that may enter.
  bool optimize(const Row& cost, const std::vector<bool>& allowed) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < columns && enter < 0; ++j) {
        if (!allowed[j]) continue;
        Rational reduced = cost[j];
        for (std::size_t i = 0; i < A.size(); ++i) reduced = reduced - cost[basis[i]] * A[i][j];
        if (reduced.sign() < 0) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i][enter].sign() <= 0) continue;
        const Rational ratio = A[i][columns] / A[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

std::optional<std::vector<double>> find_sigma(const Potential& potential) {
  const int l = potential.components;
  // Rows (a - b) of every monomial; zero rows impose nothing.
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& m : potential.F.terms()) {
    std::vector<std::int64_t> row(l);
    bool nonzero = false;
    for (int j = 0; j < l; ++j) {
      row[j] = m.exps[j].z - m.exps[j].zbar;
      nonzero = nonzero || row[j] != 0;
    }
    if (nonzero && std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
  }

  // Substitute sigma = 1 + s with s >= 0: M s = -M 1. Minimize sum s.
  const int m = static_cast<int>(rows.size());
  Simplex lp;
  lp.columns = l + m;
  lp.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    std::int64_t rhs = 0;
    for (int j = 0; j < l; ++j) rhs -= rows[i][j];
    const std::int64_t flip = rhs < 0 ? -1 : 1;
    Row r(lp.columns + 1);
    for (int j = 0; j < l; ++j) r[j] = Rational(flip * rows[i][j]);
    r[l + i] = Rational(1);
    r[lp.columns] = Rational(flip * rhs);
    lp.A.push_back(std::move(r));
    lp.basis[i] = l + i;
  }

  Row phase1(lp.columns, Rational(0));
  for (int i = 0; i < m; ++i) phase1[l + i] = Rational(1);
  std::vector<bool> all(lp.columns, true);
  lp.optimize(phase1, all);
  Rational infeasibility(0);
  for (int i = 0; i < m; ++i) {
    if (lp.basis[i] >= l) infeasibility = infeasibility + lp.A[i][lp.columns];
  }
  if (infeasibility.sign() != 0) return std::nullopt;

  // Drive remaining artificial variables out of the basis or drop their
  // redundant rows.
  for (int i = static_cast<int>(lp.A.size()) - 1; i >= 0; --i) {
    if (lp.basis[i] < l) continue;
    int col = -1;
    for (int j = 0; j < l && col < 0; ++j) {
      if (lp.A[i][j].sign() != 0) col = j;
    }
    if (col >= 0) {
      lp.pivot(i, col);
    } else {
      lp.A.erase(lp.A.begin() + i);
      lp.basis.erase(lp.basis.begin() + i);
    }
  }

  Row phase2(lp.columns, Rational(0));
  for (int j = 0; j < l; ++j) phase2[j] = Rational(1);
  std::vector<bool> structural(lp.columns, false);
  for (int j = 0; j < l; ++j) structural[j] = true;
  if (!lp.optimize(phase2, structural)) return std::nullopt;

  std::vector<Rational> sigma(l, Rational(1));
  for (std::size_t i = 0; i < lp.A.size(); ++i) {
    if (lp.basis[i] < l) sigma[lp.basis[i]] = Rational(1) + lp.A[i][lp.columns];
  }
  const Rational scale = Rational(2) / sigma[0];
  std::vector<double> out(l);
  for (int j = 0; j < l; ++j) out[j] = (sigma[j] * scale).to_double();
  return out;
}

}  // namespace nlslab
