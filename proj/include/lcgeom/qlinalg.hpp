#pragma once

// Small dense linear algebra over exact rationals.

#include <optional>
#include <vector>

#include "lcgeom/rational.hpp"

namespace lcgeom::qla {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;  // row-major, rows of equal length

QVec zeros(std::size_t n);
QVec unit(std::size_t n, std::size_t i);
QMat identity(std::size_t n);

Rational dot(const QVec& a, const QVec& b);
QVec add(const QVec& a, const QVec& b);
QVec scale(const Rational& c, const QVec& a);
QVec axpy(const Rational& c, const QVec& x, const QVec& y);  // c*x + y
bool is_zero(const QVec& a);

QMat transpose(const QMat& m);
QVec mul(const QMat& m, const QVec& v);
QMat mul(const QMat& a, const QMat& b);

std::size_t rank(QMat m);
// Some x with m x = b, or nullopt if inconsistent.
std::optional<QVec> solve(QMat m, QVec b);
// Basis of {x : m x = 0}; `cols` is needed when m has no rows.
std::vector<QVec> kernel(QMat m, std::size_t cols);
std::optional<QMat> inverse(QMat m);

// True when b is a rational multiple of a (a nonzero).
bool parallel(const QVec& a, const QVec& b);

}  // namespace lcgeom::qla
