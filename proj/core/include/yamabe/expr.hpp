#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/jet.hpp"

namespace yamabe {

/// Closed-form analytic expression tree, evaluable on doubles and on jets.
/// Immutable; nodes are shared freely.
class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt };

  static ExprPtr constant(double v);
  static ExprPtr var(int index);
  static ExprPtr add(ExprPtr a, ExprPtr b);
  static ExprPtr sub(ExprPtr a, ExprPtr b);
  static ExprPtr mul(ExprPtr a, ExprPtr b);
  static ExprPtr div(ExprPtr a, ExprPtr b);
  static ExprPtr neg(ExprPtr a);
  static ExprPtr pow(ExprPtr a, int exponent);
  static ExprPtr sin(ExprPtr a);
  static ExprPtr cos(ExprPtr a);
  static ExprPtr exp(ExprPtr a);
  static ExprPtr log(ExprPtr a);
  static ExprPtr sqrt(ExprPtr a);

  Kind kind() const { return kind_; }
  /// Largest variable index mentioned, or -1 for constant expressions.
  int max_var() const { return max_var_; }
  bool is_constant_zero() const { return kind_ == Kind::Const && cval_ == 0.0; }

  double eval(std::span<const double> xs) const;
  Jet eval(std::span<const Jet> xs) const;

  std::string str() const;

 private:
  Expr() = default;

  template <class T>
  T eval_impl(std::span<const T> xs) const;

  Kind kind_ = Kind::Const;
  double cval_ = 0.0;
  int var_ = 0;
  int ipow_ = 0;
  ExprPtr a_, b_;
  int max_var_ = -1;
};

/// A named scalar field: an expression tree over `arity` chart coordinates.
struct ScalarField {
  int arity = 0;
  ExprPtr root;

  double eval(std::span<const double> xs) const;
  Jet eval(std::span<const Jet> xs) const;
  bool is_zero() const { return !root || root->is_constant_zero(); }
};

/// Lifts a field to its truncated Taylor expansion around `base`:
/// coeffs[alpha] = (d^alpha field)(base) / alpha! for all |alpha| <= order.
Jet lift(const ScalarField& field, std::span<const double> base, int order);

/// Parses the small infix grammar used in scenario files:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' integer)?
///   unary  := '-' unary | primary
///   primary:= number | name | name '(' expr ')' | '(' expr ')'
/// Names resolve to variables (from `var_names`), bound parameters
/// (from `params`), or the functions sin, cos, exp, log, sqrt.
/// Throws ParseError with a position on malformed input.
ExprPtr parse_expr(const std::string& src, const std::vector<std::string>& var_names,
                   const std::map<std::string, double>& params = {});

/// Convenience: parse with variables named x1..x<arity>.
ScalarField parse_field(const std::string& src, int arity,
                        const std::map<std::string, double>& params = {});

}  // namespace yamabe
