#include "yamabe/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace yamabe {

namespace {

int max_var_of(const ExprPtr& a, const ExprPtr& b) {
  int m = -1;
  if (a) m = std::max(m, a->max_var());
  if (b) m = std::max(m, b->max_var());
  return m;
}

}  // namespace

// Factories are the only construction path; Expr stays immutable afterwards.
#define YAMABE_EXPR_NODE(K)            \
  Expr e;                              \
  e.kind_ = Kind::K

ExprPtr Expr::constant(double v) {
  YAMABE_EXPR_NODE(Const);
  e.cval_ = v;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr Expr::var(int index) {
  YAMABE_EXPR_NODE(Var);
  e.var_ = index;
  e.max_var_ = index;
  return std::make_shared<const Expr>(std::move(e));
}

#define YAMABE_EXPR_BINARY(NAME, K)                      \
  ExprPtr Expr::NAME(ExprPtr a, ExprPtr b) {             \
    YAMABE_EXPR_NODE(K);                                 \
    e.max_var_ = max_var_of(a, b);                       \
    e.a_ = std::move(a);                                 \
    e.b_ = std::move(b);                                 \
    return std::make_shared<const Expr>(std::move(e));   \
  }

YAMABE_EXPR_BINARY(add, Add)
YAMABE_EXPR_BINARY(sub, Sub)
YAMABE_EXPR_BINARY(mul, Mul)
YAMABE_EXPR_BINARY(div, Div)

#define YAMABE_EXPR_UNARY(NAME, K)                       \
  ExprPtr Expr::NAME(ExprPtr a) {                        \
    YAMABE_EXPR_NODE(K);                                 \
    e.max_var_ = max_var_of(a, nullptr);                 \
    e.a_ = std::move(a);                                 \
    return std::make_shared<const Expr>(std::move(e));   \
  }

YAMABE_EXPR_UNARY(neg, Neg)
YAMABE_EXPR_UNARY(sin, Sin)
YAMABE_EXPR_UNARY(cos, Cos)
YAMABE_EXPR_UNARY(exp, Exp)
YAMABE_EXPR_UNARY(log, Log)
YAMABE_EXPR_UNARY(sqrt, Sqrt)

ExprPtr Expr::pow(ExprPtr a, int exponent) {
  YAMABE_EXPR_NODE(Pow);
  e.max_var_ = max_var_of(a, nullptr);
  e.a_ = std::move(a);
  e.ipow_ = exponent;
  return std::make_shared<const Expr>(std::move(e));
}

std::string Expr::str() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Const: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", cval_);
      os << buf;
      break;
    }
    case Kind::Var:
      os << "x" << (var_ + 1);
      break;
    case Kind::Add:
      os << "(" << a_->str() << " + " << b_->str() << ")";
      break;
    case Kind::Sub:
      os << "(" << a_->str() << " - " << b_->str() << ")";
      break;
    case Kind::Mul:
      os << "(" << a_->str() << " * " << b_->str() << ")";
      break;
    case Kind::Div:
      os << "(" << a_->str() << " / " << b_->str() << ")";
      break;
    case Kind::Neg:
      os << "(-" << a_->str() << ")";
      break;
    case Kind::Pow:
      os << a_->str() << "^" << ipow_;
      break;
    case Kind::Sin:
      os << "sin(" << a_->str() << ")";
      break;
    case Kind::Cos:
      os << "cos(" << a_->str() << ")";
      break;
    case Kind::Exp:
      os << "exp(" << a_->str() << ")";
      break;
    case Kind::Log:
      os << "log(" << a_->str() << ")";
      break;
    case Kind::Sqrt:
      os << "sqrt(" << a_->str() << ")";
      break;
  }
  return os.str();
}

template <class T>
T Expr::eval_impl(std::span<const T> xs) const {
  switch (kind_) {
    case Kind::Var:
      return xs[var_];
    case Kind::Add:
      return a_->eval_impl<T>(xs) + b_->eval_impl<T>(xs);
    case Kind::Sub:
      return a_->eval_impl<T>(xs) - b_->eval_impl<T>(xs);
    case Kind::Mul:
      return a_->eval_impl<T>(xs) * b_->eval_impl<T>(xs);
    case Kind::Neg:
      return -a_->eval_impl<T>(xs);
    default:
      break;
  }
  // Remaining kinds have domain restrictions or need the constant path.
  try {
    switch (kind_) {
      case Kind::Const:
        if constexpr (std::is_same_v<T, double>) {
          return cval_;
        } else {
          return Jet::constant(xs[0].arity(), xs[0].order(), xs[0].base_point(), cval_);
        }
      case Kind::Div:
        if constexpr (std::is_same_v<T, double>) {
          double d = b_->eval_impl<T>(xs);
          if (d == 0.0) throw SingularJetError("division by zero");
          return a_->eval_impl<T>(xs) / d;
        } else {
          return a_->eval_impl<T>(xs) / b_->eval_impl<T>(xs);
        }
      case Kind::Pow:
        if constexpr (std::is_same_v<T, double>) {
          return std::pow(a_->eval_impl<T>(xs), ipow_);
        } else {
          return pow_int(a_->eval_impl<T>(xs), ipow_);
        }
      case Kind::Sin:
        if constexpr (std::is_same_v<T, double>)
          return std::sin(a_->eval_impl<T>(xs));
        else
          return yamabe::sin(a_->eval_impl<T>(xs));
      case Kind::Cos:
        if constexpr (std::is_same_v<T, double>)
          return std::cos(a_->eval_impl<T>(xs));
        else
          return yamabe::cos(a_->eval_impl<T>(xs));
      case Kind::Exp:
        if constexpr (std::is_same_v<T, double>)
          return std::exp(a_->eval_impl<T>(xs));
        else
          return yamabe::exp(a_->eval_impl<T>(xs));
      case Kind::Log:
        if constexpr (std::is_same_v<T, double>) {
          double v = a_->eval_impl<T>(xs);
          if (v <= 0.0) throw SingularJetError("log of non-positive value");
          return std::log(v);
        } else {
          return yamabe::log(a_->eval_impl<T>(xs));
        }
      case Kind::Sqrt:
        if constexpr (std::is_same_v<T, double>) {
          double v = a_->eval_impl<T>(xs);
          if (v < 0.0) throw SingularJetError("sqrt of negative value");
          return std::sqrt(v);
        } else {
          return yamabe::sqrt(a_->eval_impl<T>(xs));
        }
      default:
        throw Error("unreachable expression kind");
    }
  } catch (const SingularJetError& err) {
    throw EvalError(std::string(err.what()) + " while evaluating " + str());
  }
}

double Expr::eval(std::span<const double> xs) const { return eval_impl<double>(xs); }

Jet Expr::eval(std::span<const Jet> xs) const {
  if (xs.empty()) throw Error("expression evaluated with no jet coordinates");
  return eval_impl<Jet>(xs);
}

double ScalarField::eval(std::span<const double> xs) const {
  if (static_cast<int>(xs.size()) < arity) throw Error("field evaluated with too few coordinates");
  return root->eval(xs);
}

Jet ScalarField::eval(std::span<const Jet> xs) const {
  if (static_cast<int>(xs.size()) < arity) throw Error("field evaluated with too few jets");
  return root->eval(xs);
}

Jet lift(const ScalarField& field, std::span<const double> base, int order) {
  if (static_cast<int>(base.size()) != field.arity)
    throw Error("lift: base point dimension does not match field arity");
  if (order < 0) throw Error("lift: negative order");
  std::vector<double> b(base.begin(), base.end());
  std::vector<Jet> seeds;
  seeds.reserve(field.arity);
  for (int v = 0; v < field.arity; ++v)
    seeds.push_back(Jet::variable(field.arity, order, b, v));
  return field.eval(seeds);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& src;
  const std::vector<std::string>& vars;
  const std::map<std::string, double>& params;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at position " + std::to_string(pos) + " in \"" + src + "\"", pos);
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  ExprPtr parse() {
    ExprPtr e = expr();
    skip_ws();
    if (pos != src.size()) fail("unexpected trailing input");
    return e;
  }

  ExprPtr expr() {
    ExprPtr e = term();
    while (true) {
      if (eat('+'))
        e = Expr::add(e, term());
      else if (eat('-'))
        e = Expr::sub(e, term());
      else
        return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    while (true) {
      if (eat('*'))
        e = Expr::mul(e, factor());
      else if (eat('/'))
        e = Expr::div(e, factor());
      else
        return e;
    }
  }

  ExprPtr factor() {
    ExprPtr e = unary();
    if (eat('^')) {
      skip_ws();
      bool negexp = eat('-');
      skip_ws();
      std::size_t start = pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      if (pos == start) fail("expected integer exponent after '^'");
      int k = std::stoi(src.substr(start, pos - start));
      e = Expr::pow(e, negexp ? -k : k);
    }
    return e;
  }

  ExprPtr unary() {
    if (eat('-')) return Expr::neg(unary());
    return primary();
  }

  ExprPtr primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of expression");
    char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos;
      ExprPtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected character");
  }

  ExprPtr number() {
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.' ||
            src[pos] == 'e' || src[pos] == 'E' ||
            ((src[pos] == '+' || src[pos] == '-') && pos > start &&
             (src[pos - 1] == 'e' || src[pos - 1] == 'E'))))
      ++pos;
    try {
      std::size_t used = 0;
      double v = std::stod(src.substr(start, pos - start), &used);
      if (used != pos - start) fail("malformed number");
      return Expr::constant(v);
    } catch (const std::invalid_argument&) {
      pos = start;
      fail("malformed number");
    } catch (const std::out_of_range&) {
      pos = start;
      fail("number out of range");
    }
  }

  ExprPtr name() {
    std::size_t start = pos;
    while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                                src[pos] == '_'))
      ++pos;
    std::string id = src.substr(start, pos - start);
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (vars[v] == id) return Expr::var(static_cast<int>(v));
    if (auto it = params.find(id); it != params.end()) return Expr::constant(it->second);
    skip_ws();
    if (pos < src.size() && src[pos] == '(') {
      ++pos;
      ExprPtr arg = expr();
      if (!eat(')')) fail("expected ')' closing call to " + id);
      if (id == "sin") return Expr::sin(arg);
      if (id == "cos") return Expr::cos(arg);
      if (id == "exp") return Expr::exp(arg);
      if (id == "log") return Expr::log(arg);
      if (id == "sqrt") return Expr::sqrt(arg);
      pos = start;
      fail("unknown function '" + id + "'");
    }
    pos = start;
    fail("unknown identifier '" + id + "'");
  }
};

}  // namespace

ExprPtr parse_expr(const std::string& src, const std::vector<std::string>& var_names,
                   const std::map<std::string, double>& params) {
  Parser p{src, var_names, params};
  return p.parse();
}

ScalarField parse_field(const std::string& src, int arity,
                        const std::map<std::string, double>& params) {
  std::vector<std::string> names;
  names.reserve(arity);
  for (int v = 1; v <= arity; ++v) names.push_back("x" + std::to_string(v));
  return ScalarField{arity, parse_expr(src, names, params)};
}

}  // namespace yamabe
