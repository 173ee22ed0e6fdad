#include "lcgeom/projective.hpp"

#include <map>
#include <numeric>

#include "lcgeom/polynomial.hpp"

namespace lcgeom::proj {

namespace {

Expression zero(const VarsPtr& vars) { return Expression::constant(vars, Rational(0)); }

Expression on(const Expression& e, const VarsPtr& vars) { return *e.vars() == *vars ? e : e.rebind(vars); }

}  // namespace

VarsPtr ChristoffelField::variables(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i < m; ++i) names.push_back("x" + std::to_string(i));
  names.push_back("u");
  return expr::make_vars(std::move(names));
}

ChristoffelField::ChristoffelField(std::size_t m) : m_(m), vars_(variables(m)) {
  if (m < 2) throw ProjectiveError("Christoffel field needs m >= 2");
  g_.assign(m * m * m, zero(vars_));
}

void ChristoffelField::set(std::size_t c, std::size_t a, std::size_t b, const Expression& e) {
  if (c >= m_ || a >= m_ || b >= m_) throw ProjectiveError("Christoffel index out of range");
  const Expression v = on(e, vars_);
  g_[index(c, a, b)] = v;
  g_[index(c, b, a)] = v;
}

Expression ChristoffelField::trace(std::size_t c) const {
  Expression t = zero(vars_);
  for (std::size_t a = 0; a < m_; ++a) t = t + get(a, a, c);
  return t;
}

bool ChristoffelField::is_symmetric() const {
  for (std::size_t c = 0; c < m_; ++c) {
    for (std::size_t a = 0; a < m_; ++a) {
      for (std::size_t b = a + 1; b < m_; ++b) {
        if (!expr::symbolically_equal(get(c, a, b), get(c, b, a))) return false;
      }
    }
  }
  return true;
}

bool ChristoffelField::is_trace_free() const {
  for (std::size_t c = 0; c < m_; ++c) {
    if (!expr::is_symbolically_zero(trace(c))) return false;
  }
  return true;
}

void ChristoffelField::validate() const {
  if (!is_symmetric()) throw ProjectiveError("Christoffel symbols are not symmetric in the lower indices");
  if (!is_trace_free()) throw ProjectiveError("Christoffel symbols are not trace-free (sum_a G^a_ac != 0)");
}

ChristoffelField ChristoffelField::trace_free_part() const {
  ChristoffelField out(m_);
  std::vector<Expression> tr;
  for (std::size_t c = 0; c < m_; ++c) tr.push_back(trace(c));
  const Rational w(1, static_cast<long>(m_ + 1));
  for (std::size_t c = 0; c < m_; ++c) {
    for (std::size_t a = 0; a < m_; ++a) {
      for (std::size_t b = a; b < m_; ++b) {
        Expression e = get(c, a, b);
        if (c == a) e = e - w * tr[b];
        if (c == b) e = e - w * tr[a];
        out.set(c, a, b, expr::expand(e));
      }
    }
  }
  return out;
}

namespace {

// The cubic formula, without any validation of Gamma.
std::vector<std::vector<Expression>> cubic_fij(const ChristoffelField& g) {
  const std::size_t n = g.n();
  const std::size_t N = n;  // index of u
  const VarsPtr vars = lc::LCStructure::variables(n);
  auto G = [&](std::size_t c, std::size_t a, std::size_t b) { return on(g.get(c, a, b), vars); };
  auto p = [&](std::size_t i) { return Expression::variable(vars, n + 1 + i); };
  std::vector<std::vector<Expression>> f(n, std::vector<Expression>(n, zero(vars)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Expression e = -G(N, i, j);
      e = e - p(j) * G(N, N, i) - p(i) * G(N, N, j) - p(i) * p(j) * G(N, N, N);
      for (std::size_t k = 0; k < n; ++k) {
        e = e + p(k) * G(k, i, j) + p(i) * p(k) * G(k, N, j) + p(j) * p(k) * G(k, N, i) +
            p(i) * p(j) * p(k) * G(k, N, N);
      }
      e = expr::expand(e);
      f[i][j] = e;
      f[j][i] = e;
    }
  }
  return f;
}

std::vector<std::size_t> p_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), n + 1);
  return v;
}

// All exponent vectors of total degree <= 3 in n variables.
std::vector<std::vector<int>> cubic_monomials(std::size_t n) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(n, 0);
  auto rec = [&](auto&& self, std::size_t k, int budget) -> void {
    if (k == n) {
      out.push_back(e);
      return;
    }
    for (int d = 0; d <= budget; ++d) {
      e[k] = d;
      self(self, k + 1, budget - d);
    }
    e[k] = 0;
  };
  rec(rec, 0, 3);
  return out;
}

}  // namespace

lc::LCStructure fij_from_christoffels(const ChristoffelField& gamma) {
  if (!gamma.is_symmetric()) throw ProjectiveError("Christoffel symbols are not symmetric in the lower indices");
  return lc::LCStructure(gamma.n(), cubic_fij(gamma));
}

ChristoffelField christoffels_from_fij(const lc::LCStructure& s) {
  const std::size_t n = s.n();
  const std::size_t m = n + 1;
  const VarsPtr lc_vars = s.vars();
  const auto pidx = p_indices(n);
  const auto monomials = cubic_monomials(n);

  struct Unknown {
    std::size_t c, a, b;
  };
  std::vector<Unknown> unknowns;
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) unknowns.push_back({c, a, b});
    }
  }
  auto unknown_index = [&](std::size_t c, std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      if (unknowns[u].c == c && unknowns[u].a == a && unknowns[u].b == b) return u;
    }
    throw std::logic_error("unknown index");
  };

  // Row layout: (i <= j, monomial) rows, then the m trace rows.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  }
  const std::size_t coeff_rows = pairs.size() * monomials.size();
  const std::size_t rows = coeff_rows + m;
  auto row_of = [&](std::size_t pair, const std::vector<int>& mono) {
    for (std::size_t k = 0; k < monomials.size(); ++k) {
      if (monomials[k] == mono) return pair * monomials.size() + k;
    }
    throw std::logic_error("monomial index");
  };

  qla::QMat A(rows, qla::zeros(unknowns.size()));
  for (std::size_t u = 0; u < unknowns.size(); ++u) {
    ChristoffelField unit(m);
    unit.set(unknowns[u].c, unknowns[u].a, unknowns[u].b, Expression::constant(unit.vars(), Rational(1)));
    const auto f = cubic_fij(unit);
    for (std::size_t pr = 0; pr < pairs.size(); ++pr) {
      std::map<std::vector<int>, expr::CanonicalPoly> split;
      expr::canonicalize(f[pairs[pr].first][pairs[pr].second]).split_by_variables(pidx, split);
      for (const auto& [mono, coeff] : split) {
        if (!coeff.is_constant()) throw std::logic_error("non-constant unit coefficient");
        if (coeff.is_zero()) continue;
        A[row_of(pr, mono)][u] = coeff.terms().begin()->second;
      }
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t a = 0; a < m; ++a) A[coeff_rows + c][unknown_index(a, a, c)] += 1;
  }

  std::vector<expr::CanonicalPoly> rhs(rows, expr::CanonicalPoly(lc_vars));
  for (std::size_t pr = 0; pr < pairs.size(); ++pr) {
    const auto [i, j] = pairs[pr];
    std::map<std::vector<int>, expr::CanonicalPoly> split;
    if (!expr::canonicalize(s.f(i, j)).split_by_variables(pidx, split)) {
      throw NotProjective("f" + std::to_string(i + 1) + std::to_string(j + 1) + " is not a polynomial in p");
    }
    for (const auto& [mono, coeff] : split) {
      if (coeff.is_zero()) continue;
      const int degree = std::accumulate(mono.begin(), mono.end(), 0);
      if (degree > 3) {
        throw NotProjective("f" + std::to_string(i + 1) + std::to_string(j + 1) + " has p-degree " +
                            std::to_string(degree) + " > 3");
      }
      rhs[row_of(pr, mono)] = coeff;
    }
  }

  // Row-reduce [A | I] and apply the recorded transform to the right-hand side.
  const std::size_t U = unknowns.size();
  qla::QMat aug = A;
  for (std::size_t r = 0; r < rows; ++r) {
    aug[r].resize(U + rows, Rational(0));
    aug[r][U + r] = 1;
  }
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < U && row < rows; ++col) {
    std::size_t p = row;
    while (p < rows && aug[p][col] == 0) ++p;
    if (p == rows) continue;
    std::swap(aug[p], aug[row]);
    const Rational inv = 1 / aug[row][col];
    for (auto& x : aug[row]) x *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || aug[r][col] == 0) continue;
      const Rational fct = aug[r][col];
      for (std::size_t c = 0; c < aug[r].size(); ++c) aug[r][c] -= fct * aug[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  if (pivots.size() != U) throw ProjectiveError("linear system for Christoffel symbols is underdetermined");

  auto combine = [&](std::size_t r) {
    expr::CanonicalPoly acc(lc_vars);
    for (std::size_t k = 0; k < rows; ++k) {
      const Rational& t = aug[r][U + k];
      if (t != 0 && !rhs[k].is_zero()) acc = acc + rhs[k].scaled(t);
    }
    return acc;
  };
  for (std::size_t r = U; r < rows; ++r) {
    if (!combine(r).is_zero()) {
      throw NotProjective("coefficients of f do not match the cubic pattern of a projective structure");
    }
  }
  ChristoffelField gamma(m);
  for (std::size_t r = 0; r < U; ++r) {
    const Unknown& u = unknowns[pivots[r]];
    gamma.set(u.c, u.a, u.b, combine(r).to_expression().rebind(gamma.vars()));
  }
  const auto check = cubic_fij(gamma);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (!expr::symbolically_equal(check[i][j], s.f(i, j))) {
        throw NotProjective("recovered Christoffel symbols do not reproduce f");
      }
    }
  }
  return gamma;
}

std::array<Expression, 4> ode_coeffs_dim2(const ChristoffelField& g) {
  if (g.m() != 2) throw ProjectiveError("ODE coefficients need m = 2");
  return {expr::expand(-g.get(1, 0, 0)), expr::expand(g.get(0, 0, 0) - Rational(2) * g.get(1, 0, 1)),
          expr::expand(Rational(2) * g.get(0, 0, 1) - g.get(1, 1, 1)), expr::expand(g.get(0, 1, 1))};
}

ChristoffelField christoffels_from_ode_coeffs(const std::array<Expression, 4>& a) {
  ChristoffelField g(2);
  const Rational third(1, 3);
  g.set(0, 0, 0, expr::expand(third * a[1]));
  g.set(0, 0, 1, expr::expand(third * a[2]));
  g.set(1, 0, 1, expr::expand(-(third * a[1])));
  g.set(1, 1, 1, expr::expand(-(third * a[2])));
  g.set(1, 0, 0, expr::expand(-a[0]));
  g.set(0, 1, 1, expr::expand(a[3]));
  return g;
}

ChristoffelField projective_change(const ChristoffelField& gamma, const Expression& fscale) {
  const std::size_t m = gamma.m();
  const Expression f = on(fscale, gamma.vars());
  std::vector<Expression> ups;
  for (std::size_t a = 0; a < m; ++a) ups.push_back(f.diff(a));
  ChristoffelField out(m);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) {
        Expression e = gamma.get(c, a, b);
        if (c == a) e = e + ups[b];
        if (c == b) e = e + ups[a];
        out.set(c, a, b, e);
      }
    }
  }
  return out;
}

}  // namespace lcgeom::proj
