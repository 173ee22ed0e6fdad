#pragma once

// The homogeneous model: V = V_+ (+) V_- = R^{n+2} (+) (R^{n+2})*, with the
// split-signature pairing <v,w> = v_+ . w_- + v_- . w_+ and para-complex
// structure K = (+1 on V_+, -1 on V_-). Points of the model are null
// para-complex lines <v_+, v_-> with v_- . v_+ = 0. Everything is exact.
//
// Group convention: g in GL(n+2) acts by g on V_+ and by g^{-T} on V_-.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lcgeom/qlinalg.hpp"

namespace lcgeom::model {

using qla::QMat;
using qla::QVec;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PCVector {
  QVec plus;   // coefficients of e_0..e_{n+1}
  QVec minus;  // coefficients of e^0..e^{n+1}

  std::size_t n() const { return plus.size() - 2; }
};

Rational inner_product(const PCVector& v, const PCVector& w);
PCVector apply_K(const PCVector& v);

// Para-complex null line, normalized so that the first nonzero entry of each
// part equals 1.
struct PCLine {
  QVec plus;
  QVec minus;

  std::size_t n() const { return plus.size() - 2; }
  friend bool operator==(const PCLine& a, const PCLine& b) { return a.plus == b.plus && a.minus == b.minus; }
};

QVec normalize_direction(QVec v);
// Validates (nonzero parts, null) and normalizes.
PCLine make_line(QVec plus, QVec minus);
PCLine origin(std::size_t n);
// <v, K v> for v in N_0; throws ModelError("NotInN0") otherwise.
PCLine pc_hull(const PCVector& v);

enum class TangentKind { kZero, kInE, kInF, kNullGeneric, kContactNonnull, kTransverse };
std::string_view to_string(TangentKind k);

// A tangent vector at `base`, stored as the images (a_+, a_-) of the chosen
// representatives (base.plus, base.minus); a_+ matters modulo base.plus and
// a_- modulo base.minus. Tangency to the null quadric:
// base.minus . a_+ + a_- . base.plus = 0.
struct ModelTangent {
  PCLine base;
  QVec image_plus;
  QVec image_minus;

  // Block form at the origin: e_0 -> X^i e_i + z e_{n+1},
  // e^{n+1} -> -Y_j e^j - z e^0.
  static ModelTangent at_origin(const QVec& X, const QVec& Y, const Rational& z);
  // Validates the tangency condition.
  static ModelTangent from_images(const PCLine& base, QVec image_plus, QVec image_minus);
};

TangentKind classify_tangent(const ModelTangent& w);

// Curve t -> <A_+ + t B_+, A_- + t B_->; every model chain and null-chain has
// this pencil form.
struct ModelCurve {
  QVec a_plus, b_plus, a_minus, b_minus;

  PCLine at(const Rational& t) const;
  // <s0 A_+ + s1 B_+, s0 A_- + s1 B_->; (0,1) is the point at t = infinity.
  PCLine at_homogeneous(const Rational& s0, const Rational& s1) const;
};

struct CurveSample {
  Rational t;
  PCLine line;
};

// count >= 2 samples at equally spaced t in [t0, t1].
std::vector<CurveSample> sample(const ModelCurve& c, const Rational& t0, const Rational& t1, std::size_t count);
std::string samples_to_csv(const std::vector<CurveSample>& samples);

// Group element g (acting as g on V_+, g^{-T} on V_-) with prescribed columns
// g e_i = cols[i] and prescribed dual rows g^{-T} e^j = duals[j]. The
// prescriptions must satisfy duals[j] . cols[i] = delta_ij.
struct FrameSpec {
  std::vector<std::pair<std::size_t, QVec>> cols;
  std::vector<std::pair<std::size_t, QVec>> duals;
};
QMat complete_frame(std::size_t dim, const FrameSpec& spec);

PCLine act(const QMat& g, const PCLine& line);
ModelTangent act(const QMat& g, const ModelTangent& w);
ModelCurve act(const QMat& g, const ModelCurve& c);

// t -> <e_0 + t e_{n+1}, -t e^0 + e^{n+1}> conjugated to (L, w).
ModelCurve model_chain(const ModelTangent& w);
// t -> <(1+at) e_0 + t e_1, -t e^n + (1+bt) e^{n+1}> conjugated to (L, w).
ModelCurve model_null_chain(const ModelTangent& w, const Rational& a, const Rational& b);

struct ChainConnection {
  ModelCurve curve;        // t = 0 at L1, t = infinity at L2
  ModelCurve arc_positive;  // s in [0,1]: (s0,s1) = (1-s, s)
  ModelCurve arc_negative;  // s in [0,1]: (s0,s1) = (1-s, -s)
};
struct NullChainConnection {
  QVec v1_plus, v2_plus, v1_minus, v2_minus;
  // Every mu != 0 gives a null-chain joining L1 (t=0) and L2 (t=infinity).
  ModelCurve member(const Rational& mu) const;
};
struct DegenerateConnection {
  ModelCurve curve;
  bool shared_plus;  // true: both lines share v_+ (F-type); false: share v_-
};
struct NoConnection {};

using Connection = std::variant<ChainConnection, NullChainConnection, DegenerateConnection, NoConnection>;
std::string_view connection_name(const Connection& c);

Connection connect(const PCLine& l1, const PCLine& l2);

}  // namespace lcgeom::model
