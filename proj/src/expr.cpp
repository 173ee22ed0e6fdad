#include "lcgeom/expr.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace lcgeom::expr {

Variables::Variables(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = i + 1; j < names_.size(); ++j) {
      if (names_[i] == names_[j]) throw std::invalid_argument("duplicate variable name: " + names_[i]);
    }
  }
}

std::optional<std::size_t> Variables::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

VarsPtr make_vars(std::vector<std::string> names) {
  return std::make_shared<const Variables>(std::move(names));
}

namespace {

constexpr std::pair<Function, std::string_view> kFunctionNames[] = {
    {Function::kExp, "exp"},   {Function::kLn, "ln"},     {Function::kSqrt, "sqrt"},
    {Function::kSin, "sin"},   {Function::kCos, "cos"},   {Function::kSinh, "sinh"},
    {Function::kCosh, "cosh"}, {Function::kTanh, "tanh"},
};

}  // namespace

std::string_view function_name(Function f) {
  for (const auto& [fn, name] : kFunctionNames) {
    if (fn == f) return name;
  }
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
  for (const auto& [fn, n] : kFunctionNames) {
    if (n == name) return fn;
  }
  return std::nullopt;
}

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

DomainError::DomainError(const std::string& node, const std::string& reason)
    : std::runtime_error("domain error in `" + node + "`: " + reason), node_(node) {}

UnboundVariable::UnboundVariable(const std::string& name)
    : std::runtime_error("unbound variable: " + name) {}

// ---------------------------------------------------------------------------
// Raw builders

namespace raw {

NodePtr constant(const Rational& value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kConstant;
  n->exact = value;
  n->exact->canonicalize();
  n->value = to_double(*n->exact);
  return n;
}

NodePtr constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kConstant;
  n->value = value;
  return n;
}

NodePtr variable(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kVariable;
  n->var = index;
  return n;
}

NodePtr negate(NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kNegate;
  n->lhs = std::move(a);
  return n;
}

NodePtr binary(NodeKind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr power(NodePtr base, const Rational& exponent) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kPow;
  n->lhs = std::move(base);
  n->exponent = exponent;
  n->exponent.canonicalize();
  n->value = to_double(n->exponent);
  return n;
}

NodePtr call(Function f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kCall;
  n->func = f;
  n->lhs = std::move(arg);
  return n;
}

}  // namespace raw

// ---------------------------------------------------------------------------
// Folding builders on nodes

namespace {

bool is_const(const NodePtr& n) { return n->kind == NodeKind::kConstant; }
bool is_exact(const NodePtr& n) { return is_const(n) && n->exact.has_value(); }
bool is_value(const NodePtr& n, long v) { return is_exact(n) && *n->exact == v; }

double apply_function(Function f, double a) {
  switch (f) {
    case Function::kExp: return std::exp(a);
    case Function::kLn: return std::log(a);
    case Function::kSqrt: return std::sqrt(a);
    case Function::kSin: return std::sin(a);
    case Function::kCos: return std::cos(a);
    case Function::kSinh: return std::sinh(a);
    case Function::kCosh: return std::cosh(a);
    case Function::kTanh: return std::tanh(a);
  }
  return 0.0;
}

bool function_domain_ok(Function f, double a) {
  if (f == Function::kLn) return a > 0.0;
  if (f == Function::kSqrt) return a >= 0.0;
  return true;
}

// Real power with a rational exponent; nullopt outside the real domain.
std::optional<double> real_power(double base, const Rational& exponent, double exponent_value) {
  if (is_integer(exponent)) {
    if (base == 0.0 && exponent < 0) return std::nullopt;
    return std::pow(base, exponent_value);
  }
  if (base < 0.0) {
    const bool odd_den = mpz_odd_p(exponent.get_den().get_mpz_t()) != 0;
    if (!odd_den) return std::nullopt;
    const bool odd_num = mpz_odd_p(exponent.get_num().get_mpz_t()) != 0;
    const double magnitude = std::pow(-base, exponent_value);
    return odd_num ? -magnitude : magnitude;
  }
  if (base == 0.0 && exponent < 0) return std::nullopt;
  return std::pow(base, exponent_value);
}

NodePtr fold_neg(const NodePtr& a) {
  if (is_exact(a)) return raw::constant(Rational(-*a->exact));
  if (is_const(a)) return raw::constant(-a->value);
  if (a->kind == NodeKind::kNegate) return a->lhs;
  return raw::negate(a);
}

NodePtr fold_add(const NodePtr& a, const NodePtr& b) {
  if (is_exact(a) && is_exact(b)) return raw::constant(Rational(*a->exact + *b->exact));
  if (is_const(a) && is_const(b)) return raw::constant(a->value + b->value);
  if (is_value(a, 0)) return b;
  if (is_value(b, 0)) return a;
  if (b->kind == NodeKind::kNegate) return raw::binary(NodeKind::kSub, a, b->lhs);
  return raw::binary(NodeKind::kAdd, a, b);
}

NodePtr fold_sub(const NodePtr& a, const NodePtr& b) {
  if (is_exact(a) && is_exact(b)) return raw::constant(Rational(*a->exact - *b->exact));
  if (is_const(a) && is_const(b)) return raw::constant(a->value - b->value);
  if (is_value(b, 0)) return a;
  if (is_value(a, 0)) return fold_neg(b);
  if (b->kind == NodeKind::kNegate) return raw::binary(NodeKind::kAdd, a, b->lhs);
  return raw::binary(NodeKind::kSub, a, b);
}

NodePtr fold_mul(const NodePtr& a, const NodePtr& b) {
  if (is_exact(a) && is_exact(b)) return raw::constant(Rational(*a->exact * *b->exact));
  if (is_const(a) && is_const(b)) return raw::constant(a->value * b->value);
  if (is_value(a, 0) || is_value(b, 0)) return raw::constant(Rational(0));
  if (is_value(a, 1)) return b;
  if (is_value(b, 1)) return a;
  if (is_value(a, -1)) return fold_neg(b);
  if (is_value(b, -1)) return fold_neg(a);
  // keep constants on the left
  if (is_const(b) && !is_const(a)) return raw::binary(NodeKind::kMul, b, a);
  return raw::binary(NodeKind::kMul, a, b);
}

NodePtr fold_div(const NodePtr& a, const NodePtr& b) {
  if (is_exact(a) && is_exact(b) && *b->exact != 0) return raw::constant(Rational(*a->exact / *b->exact));
  if (is_const(a) && is_const(b) && b->value != 0.0) return raw::constant(a->value / b->value);
  if (is_value(a, 0) && !(is_const(b) && b->value == 0.0)) return raw::constant(Rational(0));
  if (is_value(b, 1)) return a;
  if (is_value(b, -1)) return fold_neg(a);
  return raw::binary(NodeKind::kDiv, a, b);
}

NodePtr fold_pow(const NodePtr& base, Rational exponent) {
  exponent.canonicalize();
  if (exponent == 0) return raw::constant(Rational(1));
  if (exponent == 1) return base;
  if (is_exact(base) && is_integer(exponent)) {
    const Rational& b = *base->exact;
    if (b != 0 || exponent > 0) {
      const long e = exponent.get_num().get_si();
      if (e >= -64 && e <= 64) {
        mpq_class result = 1;
        for (long i = 0; i < (e < 0 ? -e : e); ++i) result *= b;
        if (e < 0) result = 1 / result;
        return raw::constant(result);
      }
    }
  }
  if (is_const(base)) {
    if (auto v = real_power(base->value, exponent, to_double(exponent))) return raw::constant(*v);
  }
  return raw::power(base, exponent);
}

NodePtr fold_call(Function f, const NodePtr& arg) {
  if (is_exact(arg)) {
    const Rational& a = *arg->exact;
    if (a == 0) {
      switch (f) {
        case Function::kExp:
        case Function::kCos:
        case Function::kCosh: return raw::constant(Rational(1));
        case Function::kSin:
        case Function::kSinh:
        case Function::kTanh:
        case Function::kSqrt: return raw::constant(Rational(0));
        case Function::kLn: break;
      }
    }
    if (f == Function::kLn && a == 1) return raw::constant(Rational(0));
    if (f == Function::kSqrt && a > 0) {
      if (mpz_perfect_square_p(a.get_num().get_mpz_t()) && mpz_perfect_square_p(a.get_den().get_mpz_t())) {
        mpz_class num;
        mpz_class den;
        mpz_sqrt(num.get_mpz_t(), a.get_num().get_mpz_t());
        mpz_sqrt(den.get_mpz_t(), a.get_den().get_mpz_t());
        return raw::constant(Rational(num, den));
      }
    }
  }
  if (is_const(arg) && function_domain_ok(f, arg->value)) {
    return raw::constant(apply_function(f, arg->value));
  }
  return raw::call(f, arg);
}

NodePtr fold_binary(NodeKind kind, const NodePtr& a, const NodePtr& b) {
  switch (kind) {
    case NodeKind::kAdd: return fold_add(a, b);
    case NodeKind::kSub: return fold_sub(a, b);
    case NodeKind::kMul: return fold_mul(a, b);
    case NodeKind::kDiv: return fold_div(a, b);
    default: break;
  }
  throw std::logic_error("fold_binary: not a binary kind");
}

// ---------------------------------------------------------------------------
// Evaluation

struct Evaluator {
  std::span<const double> point;
  const Variables& vars;

  double run(const Node& n) const {
    switch (n.kind) {
      case NodeKind::kConstant: return n.value;
      case NodeKind::kVariable: return point[n.var];
      case NodeKind::kNegate: return -run(*n.lhs);
      case NodeKind::kAdd: return run(*n.lhs) + run(*n.rhs);
      case NodeKind::kSub: return run(*n.lhs) - run(*n.rhs);
      case NodeKind::kMul: return run(*n.lhs) * run(*n.rhs);
      case NodeKind::kDiv: {
        const double num = run(*n.lhs);
        const double den = run(*n.rhs);
        if (den == 0.0) throw DomainError(to_string(n, vars), "division by zero");
        return num / den;
      }
      case NodeKind::kPow: {
        const double base = run(*n.lhs);
        auto v = real_power(base, n.exponent, n.value);
        if (!v) throw DomainError(to_string(n, vars), "power outside the real domain");
        return *v;
      }
      case NodeKind::kCall: {
        const double a = run(*n.lhs);
        if (!function_domain_ok(n.func, a)) {
          throw DomainError(to_string(n, vars), "argument outside the function domain");
        }
        return apply_function(n.func, a);
      }
    }
    return 0.0;
  }
};

// ---------------------------------------------------------------------------
// Differentiation

NodePtr derive(const NodePtr& n, std::size_t var) {
  switch (n->kind) {
    case NodeKind::kConstant: return raw::constant(Rational(0));
    case NodeKind::kVariable: return raw::constant(Rational(n->var == var ? 1 : 0));
    case NodeKind::kNegate: return fold_neg(derive(n->lhs, var));
    case NodeKind::kAdd: return fold_add(derive(n->lhs, var), derive(n->rhs, var));
    case NodeKind::kSub: return fold_sub(derive(n->lhs, var), derive(n->rhs, var));
    case NodeKind::kMul:
      return fold_add(fold_mul(derive(n->lhs, var), n->rhs), fold_mul(n->lhs, derive(n->rhs, var)));
    case NodeKind::kDiv: {
      const NodePtr da = derive(n->lhs, var);
      const NodePtr db = derive(n->rhs, var);
      if (is_value(db, 0)) return fold_div(da, n->rhs);
      return fold_div(fold_sub(fold_mul(da, n->rhs), fold_mul(n->lhs, db)), fold_pow(n->rhs, Rational(2)));
    }
    case NodeKind::kPow: {
      const NodePtr db = derive(n->lhs, var);
      if (is_value(db, 0)) return raw::constant(Rational(0));
      const NodePtr outer = fold_mul(raw::constant(n->exponent), fold_pow(n->lhs, Rational(n->exponent - 1)));
      return fold_mul(outer, db);
    }
    case NodeKind::kCall: {
      const NodePtr& a = n->lhs;
      const NodePtr da = derive(a, var);
      if (is_value(da, 0)) return raw::constant(Rational(0));
      NodePtr outer;
      switch (n->func) {
        case Function::kExp: outer = fold_call(Function::kExp, a); break;
        case Function::kLn: return fold_div(da, a);
        case Function::kSqrt:
          return fold_div(da, fold_mul(raw::constant(Rational(2)), fold_call(Function::kSqrt, a)));
        case Function::kSin: outer = fold_call(Function::kCos, a); break;
        case Function::kCos: outer = fold_neg(fold_call(Function::kSin, a)); break;
        case Function::kSinh: outer = fold_call(Function::kCosh, a); break;
        case Function::kCosh: outer = fold_call(Function::kSinh, a); break;
        case Function::kTanh:
          outer = fold_sub(raw::constant(Rational(1)), fold_pow(fold_call(Function::kTanh, a), Rational(2)));
          break;
      }
      return fold_mul(outer, da);
    }
  }
  throw std::logic_error("derive: unknown node");
}

NodePtr rebuild(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::kConstant:
    case NodeKind::kVariable: return n;
    case NodeKind::kNegate: return fold_neg(rebuild(n->lhs));
    case NodeKind::kAdd:
    case NodeKind::kSub:
    case NodeKind::kMul:
    case NodeKind::kDiv: return fold_binary(n->kind, rebuild(n->lhs), rebuild(n->rhs));
    case NodeKind::kPow: return fold_pow(rebuild(n->lhs), n->exponent);
    case NodeKind::kCall: return fold_call(n->func, rebuild(n->lhs));
  }
  return n;
}

NodePtr replace(const NodePtr& n, std::size_t var, const NodePtr& by) {
  switch (n->kind) {
    case NodeKind::kConstant: return n;
    case NodeKind::kVariable: return n->var == var ? by : n;
    case NodeKind::kNegate: return fold_neg(replace(n->lhs, var, by));
    case NodeKind::kAdd:
    case NodeKind::kSub:
    case NodeKind::kMul:
    case NodeKind::kDiv: return fold_binary(n->kind, replace(n->lhs, var, by), replace(n->rhs, var, by));
    case NodeKind::kPow: return fold_pow(replace(n->lhs, var, by), n->exponent);
    case NodeKind::kCall: return fold_call(n->func, replace(n->lhs, var, by));
  }
  return n;
}

NodePtr remap(const NodePtr& n, const std::vector<std::size_t>& map) {
  switch (n->kind) {
    case NodeKind::kConstant: return n;
    case NodeKind::kVariable: return raw::variable(map[n->var]);
    case NodeKind::kNegate: return raw::negate(remap(n->lhs, map));
    case NodeKind::kAdd:
    case NodeKind::kSub:
    case NodeKind::kMul:
    case NodeKind::kDiv: return raw::binary(n->kind, remap(n->lhs, map), remap(n->rhs, map));
    case NodeKind::kPow: return raw::power(remap(n->lhs, map), n->exponent);
    case NodeKind::kCall: return raw::call(n->func, remap(n->lhs, map));
  }
  return n;
}

bool node_depends_on(const Node& n, std::size_t var) {
  switch (n.kind) {
    case NodeKind::kConstant: return false;
    case NodeKind::kVariable: return n.var == var;
    case NodeKind::kNegate:
    case NodeKind::kPow:
    case NodeKind::kCall: return node_depends_on(*n.lhs, var);
    default: return node_depends_on(*n.lhs, var) || node_depends_on(*n.rhs, var);
  }
}

// ---------------------------------------------------------------------------
// Printing; output re-parses to the same tree for parser-produced ASTs.

std::string format_constant(const Node& n) {
  if (n.exact) return lcgeom::to_string(*n.exact);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", n.value);
  return buf;
}

std::string print_expr(const Node& n, const Variables& vars);

std::string print_base(const Node& n, const Variables& vars) {
  switch (n.kind) {
    case NodeKind::kConstant: {
      std::string s = format_constant(n);
      const bool negative = !s.empty() && s[0] == '-';
      const bool fraction = s.find('/') != std::string::npos;
      if (fraction) return "(" + s + ")";
      if (negative) return "(" + s + ")";
      return s;
    }
    case NodeKind::kVariable: return vars.name(n.var);
    case NodeKind::kCall: return std::string(function_name(n.func)) + "(" + print_expr(*n.lhs, vars) + ")";
    case NodeKind::kNegate: return "-" + print_base(*n.lhs, vars);
    default: return "(" + print_expr(n, vars) + ")";
  }
}

std::string print_factor(const Node& n, const Variables& vars) {
  if (n.kind != NodeKind::kPow) return print_base(n, vars);
  std::string exponent = lcgeom::to_string(n.exponent);
  if (!is_integer(n.exponent)) {
    exponent = "(" + n.exponent.get_str() + ")";
  } else if (n.exponent < 0) {
    exponent = "(" + exponent + ")";
  }
  return print_base(*n.lhs, vars) + "^" + exponent;
}

std::string print_term(const Node& n, const Variables& vars) {
  if (n.kind == NodeKind::kMul || n.kind == NodeKind::kDiv) {
    return print_term(*n.lhs, vars) + (n.kind == NodeKind::kMul ? "*" : "/") + print_factor(*n.rhs, vars);
  }
  return print_factor(n, vars);
}

std::string print_expr(const Node& n, const Variables& vars) {
  if (n.kind == NodeKind::kAdd || n.kind == NodeKind::kSub) {
    return print_expr(*n.lhs, vars) + (n.kind == NodeKind::kAdd ? " + " : " - ") + print_term(*n.rhs, vars);
  }
  return print_term(n, vars);
}

}  // namespace

std::string to_string(const Node& node, const Variables& vars) { return print_expr(node, vars); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::kConstant:
      if (a.exact && b.exact) return *a.exact == *b.exact;
      return a.value == b.value && a.exact.has_value() == b.exact.has_value();
    case NodeKind::kVariable: return a.var == b.var;
    case NodeKind::kNegate: return structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::kPow: return a.exponent == b.exponent && structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::kCall: return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
    default: return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

// ---------------------------------------------------------------------------
// Expression

Expression::Expression(VarsPtr vars, NodePtr root) : vars_(std::move(vars)), root_(std::move(root)) {
  if (!vars_) throw std::invalid_argument("Expression: null variable list");
  if (!root_) throw std::invalid_argument("Expression: null root");
}

Expression Expression::constant(VarsPtr vars, const Rational& value) {
  return Expression(std::move(vars), raw::constant(value));
}

Expression Expression::constant(VarsPtr vars, double value) {
  return Expression(std::move(vars), raw::constant(value));
}

Expression Expression::variable(VarsPtr vars, std::string_view name) {
  auto idx = vars->index_of(name);
  if (!idx) throw UnboundVariable(std::string(name));
  return Expression(std::move(vars), raw::variable(*idx));
}

Expression Expression::variable(VarsPtr vars, std::size_t index) {
  if (index >= vars->size()) throw std::out_of_range("Expression::variable: index out of range");
  return Expression(std::move(vars), raw::variable(index));
}

double Expression::eval(std::span<const double> point) const {
  if (point.size() < vars_->size()) {
    throw UnboundVariable(vars_->name(point.size()));
  }
  return Evaluator{point, *vars_}.run(*root_);
}

double Expression::eval(const std::map<std::string, double>& env) const {
  std::vector<double> point(vars_->size(), 0.0);
  for (std::size_t i = 0; i < vars_->size(); ++i) {
    auto it = env.find(vars_->name(i));
    if (it != env.end()) {
      point[i] = it->second;
    } else if (depends_on(i)) {
      throw UnboundVariable(vars_->name(i));
    }
  }
  return eval(point);
}

Expression Expression::diff(std::size_t var) const { return Expression(vars_, derive(root_, var)); }

Expression Expression::diff(std::string_view var) const {
  auto idx = vars_->index_of(var);
  if (!idx) throw UnboundVariable(std::string(var));
  return diff(*idx);
}

Expression Expression::simplified() const { return Expression(vars_, rebuild(root_)); }

Expression Expression::substitute(std::size_t var, const Expression& by) const {
  if (!(*by.vars_ == *vars_)) throw std::invalid_argument("substitute: variable lists differ");
  return Expression(vars_, replace(root_, var, by.root_));
}

Expression Expression::rebind(const VarsPtr& vars) const {
  std::vector<std::size_t> map(vars_->size(), 0);
  for (std::size_t i = 0; i < vars_->size(); ++i) {
    auto idx = vars->index_of(vars_->name(i));
    if (idx) {
      map[i] = *idx;
    } else if (depends_on(i)) {
      throw UnboundVariable(vars_->name(i));
    }
  }
  return Expression(vars, remap(root_, map));
}

bool Expression::is_zero() const { return is_const(root_) && root_->value == 0.0; }
bool Expression::is_one() const { return is_const(root_) && root_->value == 1.0; }

bool Expression::depends_on(std::size_t var) const { return node_depends_on(*root_, var); }

std::string Expression::to_string() const { return print_expr(*root_, *vars_); }

namespace {

const VarsPtr& common_vars(const Expression& a, const Expression& b) {
  if (a.vars() != b.vars() && !(*a.vars() == *b.vars())) {
    throw std::invalid_argument("expressions over different variable lists");
  }
  return a.vars();
}

}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(common_vars(a, b), fold_add(a.node(), b.node()));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(common_vars(a, b), fold_sub(a.node(), b.node()));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(common_vars(a, b), fold_mul(a.node(), b.node()));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(common_vars(a, b), fold_div(a.node(), b.node()));
}
Expression operator-(const Expression& a) { return Expression(a.vars(), fold_neg(a.node())); }
Expression operator*(const Rational& c, const Expression& e) {
  return Expression(e.vars(), fold_mul(raw::constant(c), e.node()));
}
Expression operator+(const Expression& e, const Rational& c) {
  return Expression(e.vars(), fold_add(e.node(), raw::constant(c)));
}
Expression pow(const Expression& base, const Rational& exponent) {
  return Expression(base.vars(), fold_pow(base.node(), exponent));
}
Expression call(Function f, const Expression& arg) { return Expression(arg.vars(), fold_call(f, arg.node())); }

}  // namespace lcgeom::expr
