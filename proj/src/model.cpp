#include "lcgeom/model.hpp"

#include <cstdio>
#include <sstream>

namespace lcgeom::model {

using namespace qla;

Rational inner_product(const PCVector& v, const PCVector& w) {
  if (v.plus.size() != w.plus.size() || v.minus.size() != w.minus.size() || v.plus.size() != v.minus.size()) {
    throw ModelError("inner_product: dimension mismatch");
  }
  return dot(v.plus, w.minus) + dot(v.minus, w.plus);
}

PCVector apply_K(const PCVector& v) { return {v.plus, scale(Rational(-1), v.minus)}; }

QVec normalize_direction(QVec v) {
  for (const auto& x : v) {
    if (x != 0) {
      const Rational inv = 1 / x;
      for (auto& y : v) y *= inv;
      return v;
    }
  }
  throw ModelError("zero vector does not span a line");
}

PCLine make_line(QVec plus, QVec minus) {
  if (plus.size() != minus.size() || plus.size() < 3) throw ModelError("line parts must both have n+2 >= 3 entries");
  if (is_zero(plus) || is_zero(minus)) throw ModelError("NotInN0: a line part vanishes");
  if (dot(minus, plus) != 0) throw ModelError("NotNull: v_- . v_+ != 0");
  return {normalize_direction(std::move(plus)), normalize_direction(std::move(minus))};
}

PCLine origin(std::size_t n) { return make_line(unit(n + 2, 0), unit(n + 2, n + 1)); }

PCLine pc_hull(const PCVector& v) {
  if (v.plus.size() != v.minus.size()) throw ModelError("pc_hull: dimension mismatch");
  if (is_zero(v.plus) || is_zero(v.minus)) throw ModelError("NotInN0: vector lies in V_+ or V_-");
  if (inner_product(v, v) != 0) throw ModelError("NotInN0: vector is not null");
  return make_line(v.plus, v.minus);
}

std::string_view to_string(TangentKind k) {
  switch (k) {
    case TangentKind::kZero: return "zero";
    case TangentKind::kInE: return "in_E";
    case TangentKind::kInF: return "in_F";
    case TangentKind::kNullGeneric: return "null_generic";
    case TangentKind::kContactNonnull: return "contact_nonnull";
    case TangentKind::kTransverse: return "transverse";
  }
  return "?";
}

ModelTangent ModelTangent::at_origin(const QVec& X, const QVec& Y, const Rational& z) {
  const std::size_t n = X.size();
  if (Y.size() != n || n == 0) throw ModelError("at_origin: X and Y must have n >= 1 entries");
  QVec plus = zeros(n + 2);
  QVec minus = zeros(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    plus[i + 1] = X[i];
    minus[i + 1] = -Y[i];
  }
  plus[n + 1] = z;
  minus[0] = -z;
  return {origin(n), plus, minus};
}

ModelTangent ModelTangent::from_images(const PCLine& base, QVec image_plus, QVec image_minus) {
  if (image_plus.size() != base.plus.size() || image_minus.size() != base.minus.size()) {
    throw ModelError("tangent images have the wrong dimension");
  }
  if (dot(base.minus, image_plus) + dot(image_minus, base.plus) != 0) {
    throw ModelError("images are not tangent to the null quadric");
  }
  return {base, std::move(image_plus), std::move(image_minus)};
}

TangentKind classify_tangent(const ModelTangent& w) {
  if (dot(w.base.minus, w.image_plus) != 0) return TangentKind::kTransverse;
  if (dot(w.image_minus, w.image_plus) != 0) return TangentKind::kContactNonnull;
  const bool x_zero = parallel(w.base.plus, w.image_plus);
  const bool y_zero = parallel(w.base.minus, w.image_minus);
  if (x_zero && y_zero) return TangentKind::kZero;
  if (y_zero) return TangentKind::kInE;
  if (x_zero) return TangentKind::kInF;
  return TangentKind::kNullGeneric;
}

PCLine ModelCurve::at(const Rational& t) const {
  return make_line(axpy(t, b_plus, a_plus), axpy(t, b_minus, a_minus));
}

PCLine ModelCurve::at_homogeneous(const Rational& s0, const Rational& s1) const {
  return make_line(axpy(s1, b_plus, scale(s0, a_plus)), axpy(s1, b_minus, scale(s0, a_minus)));
}

std::vector<CurveSample> sample(const ModelCurve& c, const Rational& t0, const Rational& t1, std::size_t count) {
  if (count < 2) throw ModelError("sample: need at least two samples");
  std::vector<CurveSample> out;
  for (std::size_t k = 0; k < count; ++k) {
    Rational t = t0 + (t1 - t0) * Rational(static_cast<long>(k), static_cast<long>(count - 1));
    t.canonicalize();
    out.push_back({t, c.at(t)});
  }
  return out;
}

std::string samples_to_csv(const std::vector<CurveSample>& samples) {
  std::ostringstream os;
  if (samples.empty()) return "";
  const std::size_t d = samples.front().line.plus.size();
  os << "t";
  for (std::size_t i = 0; i < d; ++i) os << ",vp_" << i;
  for (std::size_t i = 0; i < d; ++i) os << ",vm_" << i;
  os << "\n";
  auto num = [](const Rational& q) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", to_double(q));
    return std::string(buf);
  };
  for (const auto& s : samples) {
    os << num(s.t);
    for (const auto& x : s.line.plus) os << "," << num(x);
    for (const auto& x : s.line.minus) os << "," << num(x);
    os << "\n";
  }
  return os.str();
}

QMat complete_frame(std::size_t dim, const FrameSpec& spec) {
  std::vector<std::optional<QVec>> columns(dim);
  for (const auto& [i, v] : spec.cols) {
    if (i >= dim || v.size() != dim) throw ModelError("complete_frame: bad column prescription");
    columns[i] = v;
  }
  QMat duals;
  std::vector<std::size_t> dual_index;
  for (const auto& [j, v] : spec.duals) {
    if (j >= dim || v.size() != dim) throw ModelError("complete_frame: bad dual prescription");
    duals.push_back(v);
    dual_index.push_back(j);
  }
  for (std::size_t r = 0; r < duals.size(); ++r) {
    for (const auto& [i, v] : spec.cols) {
      if (dot(duals[r], v) != (dual_index[r] == i ? 1 : 0)) {
        throw ModelError("complete_frame: prescribed columns and duals are not dual");
      }
    }
  }
  if (rank(duals) != duals.size()) throw ModelError("complete_frame: prescribed duals are dependent");
  // Dual-prescribed slots without a column: any particular solution.
  for (std::size_t r = 0; r < duals.size(); ++r) {
    const std::size_t j = dual_index[r];
    if (columns[j]) continue;
    columns[j] = *solve(duals, unit(duals.size(), r));
  }
  // Remaining slots: extend with kernel vectors of the dual rows.
  QMat current;
  for (const auto& c : columns) {
    if (c) current.push_back(*c);
  }
  std::size_t current_rank = rank(current);
  if (current_rank != current.size()) throw ModelError("complete_frame: prescribed columns are dependent");
  const auto ker = kernel(duals, dim);
  std::size_t next = 0;
  for (std::size_t k = 0; k < dim; ++k) {
    if (columns[k]) continue;
    while (next < ker.size()) {
      QMat trial = current;
      trial.push_back(ker[next]);
      ++next;
      if (rank(trial) > current_rank) {
        columns[k] = trial.back();
        current = std::move(trial);
        ++current_rank;
        break;
      }
    }
    if (!columns[k]) throw ModelError("complete_frame: could not complete to a basis");
  }
  QMat cols_as_rows;
  for (const auto& c : columns) cols_as_rows.push_back(*c);
  return transpose(cols_as_rows);
}

namespace {

QMat inverse_transpose(const QMat& g) {
  auto inv = inverse(g);
  if (!inv) throw ModelError("group element is singular");
  return transpose(*inv);
}

}  // namespace

PCLine act(const QMat& g, const PCLine& line) {
  return make_line(mul(g, line.plus), mul(inverse_transpose(g), line.minus));
}

ModelTangent act(const QMat& g, const ModelTangent& w) {
  const QMat h = inverse_transpose(g);
  // Keep the images attached to the transported representatives.
  const QVec plus = mul(g, w.base.plus);
  const QVec minus = mul(h, w.base.minus);
  QVec image_plus = mul(g, w.image_plus);
  QVec image_minus = mul(h, w.image_minus);
  const PCLine base = make_line(plus, minus);
  // make_line rescales the representatives; rescale the images to match.
  Rational sp = 0;
  Rational sm = 0;
  for (std::size_t i = 0; i < plus.size(); ++i) {
    if (plus[i] != 0) {
      sp = base.plus[i] / plus[i];
      break;
    }
  }
  for (std::size_t i = 0; i < minus.size(); ++i) {
    if (minus[i] != 0) {
      sm = base.minus[i] / minus[i];
      break;
    }
  }
  return ModelTangent::from_images(base, scale(sp, image_plus), scale(sm, image_minus));
}

ModelCurve act(const QMat& g, const ModelCurve& c) {
  const QMat h = inverse_transpose(g);
  return {mul(g, c.a_plus), mul(g, c.b_plus), mul(h, c.a_minus), mul(h, c.b_minus)};
}

ModelCurve model_chain(const ModelTangent& w) {
  if (classify_tangent(w) != TangentKind::kTransverse) {
    throw ModelError("NotTransverse: tangent is " + std::string(to_string(classify_tangent(w))));
  }
  const std::size_t n = w.base.n();
  const std::size_t d = n + 2;
  const Rational zp = dot(w.base.minus, w.image_plus);
  const Rational a = dot(w.image_minus, w.image_plus);
  FrameSpec spec;
  spec.cols = {{0, w.base.plus}, {n + 1, w.image_plus}};
  spec.duals = {{n + 1, scale(Rational(1 / zp), w.base.minus)},
                {0, axpy(Rational(a / (zp * zp)), w.base.minus, scale(Rational(-1 / zp), w.image_minus))}};
  const QMat g = complete_frame(d, spec);
  const ModelCurve at_origin{unit(d, 0), unit(d, n + 1), unit(d, n + 1), scale(Rational(-1), unit(d, 0))};
  return act(g, at_origin);
}

ModelCurve model_null_chain(const ModelTangent& w, const Rational& a, const Rational& b) {
  if (classify_tangent(w) != TangentKind::kNullGeneric) {
    throw ModelError("NotNullGeneric: tangent is " + std::string(to_string(classify_tangent(w))));
  }
  const std::size_t n = w.base.n();
  const std::size_t d = n + 2;
  FrameSpec spec;
  spec.cols = {{0, w.base.plus}, {1, w.image_plus}};
  spec.duals = {{n + 1, w.base.minus}, {n, scale(Rational(-1), w.image_minus)}};
  const QMat g = complete_frame(d, spec);
  const ModelCurve at_origin{unit(d, 0), axpy(a, unit(d, 0), unit(d, 1)), unit(d, n + 1),
                             axpy(b, unit(d, n + 1), scale(Rational(-1), unit(d, n)))};
  return act(g, at_origin);
}

ModelCurve NullChainConnection::member(const Rational& mu) const {
  if (mu == 0) throw ModelError("null-chain family parameter must be nonzero");
  return {v1_plus, v2_plus, v1_minus, scale(mu, v2_minus)};
}

std::string_view connection_name(const Connection& c) {
  switch (c.index()) {
    case 0: return "chain";
    case 1: return "null_chain_family";
    case 2: return "degenerate";
    default: return "none";
  }
}

Connection connect(const PCLine& l1, const PCLine& l2) {
  if (l1.plus.size() != l2.plus.size()) throw ModelError("connect: dimension mismatch");
  if (l1 == l2) throw ModelError("connect: identical lines");
  const bool plus_parallel = parallel(l1.plus, l2.plus);
  const bool minus_parallel = parallel(l1.minus, l2.minus);
  if (plus_parallel) {
    return DegenerateConnection{{l1.plus, zeros(l1.plus.size()), l1.minus, l2.minus}, true};
  }
  if (minus_parallel) {
    return DegenerateConnection{{l1.plus, l2.plus, l1.minus, zeros(l1.minus.size())}, false};
  }
  const Rational beta = dot(l1.minus, l2.plus);
  const Rational gamma = dot(l2.minus, l1.plus);
  if (beta != 0 && gamma != 0) {
    const QVec m2 = scale(Rational(-beta / gamma), l2.minus);
    ChainConnection c;
    c.curve = {l1.plus, l2.plus, l1.minus, m2};
    c.arc_positive = {l1.plus, axpy(Rational(-1), l1.plus, l2.plus), l1.minus, axpy(Rational(-1), l1.minus, m2)};
    c.arc_negative = {l1.plus, axpy(Rational(-1), l1.plus, scale(Rational(-1), l2.plus)), l1.minus,
                      axpy(Rational(-1), l1.minus, scale(Rational(-1), m2))};
    return c;
  }
  if (beta == 0 && gamma == 0) return NullChainConnection{l1.plus, l2.plus, l1.minus, l2.minus};
  return NoConnection{};
}

}  // namespace lcgeom::model
