#include "lcgeom/rational.hpp"

#include <cctype>
#include <cmath>

namespace lcgeom {

double to_double(const Rational& q) {
  if (q == 0) return 0.0;
  const double truncated = q.get_d();
  if (!std::isfinite(truncated)) return truncated;
  const double away = std::nextafter(truncated, q > 0 ? HUGE_VAL : -HUGE_VAL);
  if (!std::isfinite(away)) return truncated;
  const Rational d0(truncated);
  const Rational d1(away);
  const Rational e0 = abs(q - d0);
  const Rational e1 = abs(q - d1);
  if (e0 < e1) return truncated;
  if (e1 < e0) return away;
  // tie: pick even mantissa
  int exp0 = 0;
  const double m0 = std::frexp(truncated, &exp0);
  const auto bits = static_cast<long long>(std::ldexp(m0, 53));
  return (bits % 2 == 0) ? truncated : away;
}

bool parse_decimal(std::string_view text, Rational& out) {
  std::size_t i = 0;
  mpz_class mantissa = 0;
  long long scale = 0;
  bool any_digit = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    mantissa = mantissa * 10 + (text[i] - '0');
    any_digit = true;
    ++i;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mantissa = mantissa * 10 + (text[i] - '0');
      --scale;
      any_digit = true;
      ++i;
    }
  }
  if (!any_digit) return false;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      negative = text[i] == '-';
      ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    long long e = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      e = e * 10 + (text[i] - '0');
      if (e > 100000) return false;
      ++i;
    }
    scale += negative ? -e : e;
  }
  if (i != text.size()) return false;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  if (scale >= 0) {
    out = Rational(mantissa * ten_pow);
  } else {
    out = Rational(mantissa, ten_pow);
  }
  out.canonicalize();
  return true;
}

std::string to_string(const Rational& q) {
  if (is_integer(q)) return q.get_num().get_str();
  mpz_class den = q.get_den();
  int twos = 0;
  int fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return q.get_str();
  const int digits = twos > fives ? twos : fives;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class scaled = q.get_num() * scale / q.get_den();
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.get_str();
  if (s.size() <= static_cast<std::size_t>(digits)) {
    s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
  }
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return negative ? "-" + s : s;
}

bool is_integer(const Rational& q) { return mpz_divisible_p(q.get_num_mpz_t(), q.get_den_mpz_t()) != 0; }

}  // namespace lcgeom
