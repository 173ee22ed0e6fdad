#pragma once

// Real-valued arithmetic expressions over an ordered list of named variables.
//
// Trees are immutable and shared; an Expression is a cheap value handle.
// Variables are bound positionally: eval() takes a point whose i-th entry is
// the value of the i-th declared variable.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lcgeom/rational.hpp"

namespace lcgeom::expr {

class Variables {
 public:
  explicit Variables(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Variables& a, const Variables& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
};

using VarsPtr = std::shared_ptr<const Variables>;

VarsPtr make_vars(std::vector<std::string> names);

enum class NodeKind { kConstant, kVariable, kNegate, kAdd, kSub, kMul, kDiv, kPow, kCall };
enum class Function { kExp, kLn, kSqrt, kSin, kCos, kSinh, kCosh, kTanh };

std::string_view function_name(Function f);
std::optional<Function> function_from_name(std::string_view name);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::kConstant;
  // kConstant: value is the double used by eval; exact is set when the
  // constant is a known rational (all parsed literals are).
  double value = 0.0;
  std::optional<Rational> exact;
  // kPow: the (always rational) exponent.
  Rational exponent;
  std::size_t var = 0;
  Function func = Function::kExp;
  NodePtr lhs;
  NodePtr rhs;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kUndeclaredIdentifier, kMalformedExponent };
  ParseError(Kind kind, std::size_t offset, const std::string& message);
  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& node, const std::string& reason);
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(const std::string& name);
};

class Expression {
 public:
  Expression(VarsPtr vars, NodePtr root);

  static Expression constant(VarsPtr vars, const Rational& value);
  static Expression constant(VarsPtr vars, double value);
  static Expression variable(VarsPtr vars, std::string_view name);
  static Expression variable(VarsPtr vars, std::size_t index);

  const VarsPtr& vars() const { return vars_; }
  const Node& root() const { return *root_; }
  const NodePtr& node() const { return root_; }

  double eval(std::span<const double> point) const;
  double eval(const std::map<std::string, double>& env) const;

  Expression diff(std::size_t var) const;
  Expression diff(std::string_view var) const;
  Expression simplified() const;

  // Replace variable `var` by `by` (same variable list).
  Expression substitute(std::size_t var, const Expression& by) const;
  // Re-express over another variable list, matching variables by name.
  Expression rebind(const VarsPtr& vars) const;

  bool is_constant() const { return root_->kind == NodeKind::kConstant; }
  bool is_zero() const;
  bool is_one() const;
  bool depends_on(std::size_t var) const;

  std::string to_string() const;

 private:
  VarsPtr vars_;
  NodePtr root_;
};

// Folding constructors: apply constant folding and the 0/1 identities.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression operator*(const Rational& c, const Expression& e);
Expression operator+(const Expression& e, const Rational& c);
Expression pow(const Expression& base, const Rational& exponent);
Expression call(Function f, const Expression& arg);

Expression parse(std::string_view source, const VarsPtr& vars);
Expression parse(std::string_view source, const std::vector<std::string>& vars);

inline double eval(const Expression& e, const std::map<std::string, double>& env) { return e.eval(env); }
inline Expression diff(const Expression& e, std::string_view var) { return e.diff(var); }
inline Expression simplify(const Expression& e) { return e.simplified(); }

bool structurally_equal(const Node& a, const Node& b);
inline bool structurally_equal(const Expression& a, const Expression& b) {
  return structurally_equal(a.root(), b.root());
}

// Raw node builders (no folding); the parser uses these so ASTs mirror source.
namespace raw {
NodePtr constant(const Rational& value);
NodePtr constant(double value);
NodePtr variable(std::size_t index);
NodePtr negate(NodePtr a);
NodePtr binary(NodeKind kind, NodePtr a, NodePtr b);
NodePtr power(NodePtr base, const Rational& exponent);
NodePtr call(Function f, NodePtr arg);
}  // namespace raw

std::string to_string(const Node& node, const Variables& vars);

}  // namespace lcgeom::expr
