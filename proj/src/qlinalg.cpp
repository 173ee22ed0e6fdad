#include "lcgeom/qlinalg.hpp"

#include <stdexcept>
#include <utility>

namespace lcgeom::qla {

QVec zeros(std::size_t n) { return QVec(n, Rational(0)); }

QVec unit(std::size_t n, std::size_t i) {
  QVec v = zeros(n);
  v.at(i) = 1;
  return v;
}

QMat identity(std::size_t n) {
  QMat m;
  for (std::size_t i = 0; i < n; ++i) m.push_back(unit(n, i));
  return m;
}

Rational dot(const QVec& a, const QVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

QVec add(const QVec& a, const QVec& b) { return axpy(Rational(1), a, b); }

QVec scale(const Rational& c, const QVec& a) {
  QVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

QVec axpy(const Rational& c, const QVec& x, const QVec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  QVec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = c * x[i] + y[i];
  return r;
}

bool is_zero(const QVec& a) {
  for (const auto& x : a) {
    if (x != 0) return false;
  }
  return true;
}

QMat transpose(const QMat& m) {
  if (m.empty()) return {};
  QMat t(m[0].size(), QVec(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

QVec mul(const QMat& m, const QVec& v) {
  QVec r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) r[i] = dot(m[i], v);
  return r;
}

QMat mul(const QMat& a, const QMat& b) {
  const QMat bt = transpose(b);
  QMat r(a.size(), QVec(bt.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < bt.size(); ++j) r[i][j] = dot(a[i], bt[j]);
  }
  return r;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(QMat& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t p = row;
    while (p < m.size() && m[p][col] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    const Rational inv = 1 / m[row][col];
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t c = 0; c < m[r].size(); ++c) m[r][c] -= f * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rank(QMat m) {
  if (m.empty()) return 0;
  return rref(m, m[0].size()).size();
}

std::optional<QVec> solve(QMat m, QVec b) {
  if (m.size() != b.size()) throw std::invalid_argument("solve: size mismatch");
  if (m.empty()) return QVec{};
  const std::size_t cols = m[0].size();
  for (std::size_t i = 0; i < m.size(); ++i) m[i].push_back(b[i]);
  const auto pivots = rref(m, cols);
  for (std::size_t r = pivots.size(); r < m.size(); ++r) {
    if (m[r][cols] != 0) return std::nullopt;
  }
  QVec x = zeros(cols);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m[r][cols];
  return x;
}

std::vector<QVec> kernel(QMat m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  if (!m.empty()) pivots = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<QVec> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    QVec v = zeros(cols);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<QMat> inverse(QMat m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw std::invalid_argument("inverse: not square");
    m[i].resize(2 * n, Rational(0));
    m[i][n + i] = 1;
  }
  if (rref(m, n).size() != n) return std::nullopt;
  QMat inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = QVec(m[i].begin() + static_cast<long>(n), m[i].end());
  return inv;
}

bool parallel(const QVec& a, const QVec& b) { return rank({a, b}) <= 1; }

}  // namespace lcgeom::qla
