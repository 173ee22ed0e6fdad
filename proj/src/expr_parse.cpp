#include <cctype>

#include "lcgeom/expr.hpp"

namespace lcgeom::expr {

namespace {

class Parser {
 public:
  Parser(std::string_view src, const Variables& vars) : src_(src), vars_(vars) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail(ParseError::Kind::kSyntax, "unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg) const { throw ParseError(kind, pos_, msg); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool at(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  void expect(char c) {
    if (!at(c)) fail(ParseError::Kind::kSyntax, std::string("expected '") + c + "'");
    ++pos_;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      if (at('+')) {
        ++pos_;
        lhs = raw::binary(NodeKind::kAdd, lhs, parse_term());
      } else if (at('-')) {
        ++pos_;
        lhs = raw::binary(NodeKind::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    while (true) {
      if (at('*')) {
        ++pos_;
        lhs = raw::binary(NodeKind::kMul, lhs, parse_factor());
      } else if (at('/')) {
        ++pos_;
        lhs = raw::binary(NodeKind::kDiv, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_base();
    if (at('^')) {
      ++pos_;
      return raw::power(base, parse_exponent());
    }
    return base;
  }

  std::string read_digits() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  Rational parse_exponent() {
    skip_ws();
    if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      return Rational(mpz_class(read_digits()));
    }
    if (!at('(')) fail(ParseError::Kind::kMalformedExponent, "exponent must be an integer or a parenthesized rational");
    ++pos_;
    skip_ws();
    bool negative = false;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      negative = src_[pos_] == '-';
      ++pos_;
      skip_ws();
    }
    std::string num = read_digits();
    if (num.empty()) fail(ParseError::Kind::kMalformedExponent, "expected integer in exponent");
    mpz_class den = 1;
    if (at('/')) {
      ++pos_;
      skip_ws();
      std::string d = read_digits();
      if (d.empty()) fail(ParseError::Kind::kMalformedExponent, "expected denominator in exponent");
      den = mpz_class(d);
      if (den == 0) fail(ParseError::Kind::kMalformedExponent, "zero denominator in exponent");
    }
    if (!at(')')) fail(ParseError::Kind::kMalformedExponent, "expected ')' closing exponent");
    ++pos_;
    Rational r(mpz_class(num), den);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    read_digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      read_digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (read_digits().empty()) pos_ = save;
    }
    Rational value;
    if (!parse_decimal(src_.substr(start, pos_ - start), value)) {
      pos_ = start;
      fail(ParseError::Kind::kSyntax, "malformed number");
    }
    return raw::constant(value);
  }

  NodePtr parse_base() {
    skip_ws();
    if (pos_ >= src_.size()) fail(ParseError::Kind::kSyntax, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return raw::negate(parse_base());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = src_.substr(start, pos_ - start);
      if (at('(')) {
        auto f = function_from_name(name);
        if (!f) {
          pos_ = start;
          fail(ParseError::Kind::kUndeclaredIdentifier, "unknown function '" + std::string(name) + "'");
        }
        ++pos_;
        NodePtr arg = parse_expr();
        expect(')');
        return raw::call(*f, arg);
      }
      auto idx = vars_.index_of(name);
      if (!idx) {
        pos_ = start;
        fail(ParseError::Kind::kUndeclaredIdentifier, "undeclared identifier '" + std::string(name) + "'");
      }
      return raw::variable(*idx);
    }
    fail(ParseError::Kind::kSyntax, "unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  const Variables& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view source, const VarsPtr& vars) {
  Parser p(source, *vars);
  return Expression(vars, p.parse_all());
}

Expression parse(std::string_view source, const std::vector<std::string>& vars) {
  return parse(source, make_vars(vars));
}

}  // namespace lcgeom::expr
