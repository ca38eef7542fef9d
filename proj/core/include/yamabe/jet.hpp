#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "yamabe/errors.hpp"

namespace yamabe {

inline constexpr int kMaxArity = 5;
inline constexpr int kMaxOrder = 12;

/// Exponent tuple of a monomial. Slots beyond the arity are zero.
using MultiIndex = std::array<std::uint8_t, kMaxArity>;

/// Shared per-(arity, order) lookup tables: the graded-lexicographic monomial
/// basis, multiplication triples, and differentiation/integration maps.
/// Built once, immutable afterwards, safe to share across threads.
class MonomialTable {
 public:
  static const MonomialTable& get(int arity, int order);

  int arity() const { return arity_; }
  int order() const { return order_; }
  int count() const { return static_cast<int>(monomials_.size()); }

  const MultiIndex& exponents(int idx) const { return monomials_[idx]; }
  int degree(int idx) const { return degree_[idx]; }

  /// Index of a multi-index, or -1 when its degree exceeds the order.
  int index_of(const MultiIndex& mi) const;

  struct MulEntry {
    std::int32_t rhs;  // index into the second factor
    std::int32_t dst;  // index into the product
  };
  /// Multiplication fan-out of basis monomial `lhs`: all (rhs, dst) with
  /// monomial(lhs) * monomial(rhs) = monomial(dst) within the order bound.
  std::span<const MulEntry> mul_row(int lhs) const {
    return {mul_entries_.data() + mul_row_begin_[lhs],
            mul_entries_.data() + mul_row_begin_[lhs + 1]};
  }

  struct DerivEntry {
    std::int32_t src;
    std::int32_t dst;
    double factor;  // the incoming exponent
  };
  std::span<const DerivEntry> deriv(int var) const { return deriv_[var]; }

 private:
  MonomialTable(int arity, int order);

  int arity_;
  int order_;
  std::vector<MultiIndex> monomials_;
  std::vector<int> degree_;
  std::vector<std::int32_t> rank_;  // packed exponents -> index
  std::vector<MulEntry> mul_entries_;
  std::vector<std::int32_t> mul_row_begin_;
  std::array<std::vector<DerivEntry>, kMaxArity> deriv_;

  static std::uint32_t pack(const MultiIndex& mi, int arity);
};

/// Truncated multivariate Taylor expansion of a scalar around a base point.
/// Coefficients are Taylor coefficients: coeff(alpha) = (d^alpha f)(base) / alpha!.
/// Arithmetic truncates by total degree; binary operations require matching
/// arity and base point and truncate to the smaller order of the operands.
class Jet {
 public:
  Jet() = default;

  /// Zero jet.
  Jet(int arity, int order, std::vector<double> base);

  static Jet constant(int arity, int order, std::vector<double> base, double value);
  /// Seed of the coordinate function x[var]: value base[var], unit first-order
  /// coefficient in direction var.
  static Jet variable(int arity, int order, std::vector<double> base, int var);

  bool empty() const { return table_ == nullptr; }
  int arity() const { return table_->arity(); }
  int order() const { return table_->order(); }
  const std::vector<double>& base_point() const { return base_; }
  const MonomialTable& table() const { return *table_; }

  double value() const { return c_[0]; }
  double coeff(const MultiIndex& mi) const;
  double coeff_raw(int idx) const { return c_[idx]; }
  std::span<const double> coeffs() const { return c_; }
  double& coeff_mut(int idx) { return c_[idx]; }

  Jet truncated(int new_order) const;
  /// Re-embed into a larger variable space: old variable v becomes
  /// var_map[v] in the new space. New variables carry the new base point.
  Jet promoted(int new_arity, int new_order, std::span<const int> var_map,
               std::vector<double> new_base) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }

  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  /// Jet of the partial derivative in `direction`; order drops by one.
  Jet partial(int direction) const;
  /// Formal antiderivative in `direction` with zero constant of integration.
  /// The order grows by one: a jet exact to total degree D integrates to a
  /// jet exact to total degree D+1.
  Jet integrate(int direction) const;
  /// Re-declares the jet at a higher order, zero-padding the new degrees.
  /// Only meaningful when the caller knows those coefficients vanish (or will
  /// be refined, as in the Picard iteration of the geodesic flow).
  Jet extended(int new_order) const;

  /// The jet of the coefficient field of var^k: collects terms with
  /// exponent k in `var`, drops that variable slot (arity shrinks by one).
  Jet var_coefficient(int var, int k) const;
  /// Restriction to var = base_point()[var]: drops all terms carrying `var`,
  /// keeping the arity (the variable becomes inert).
  Jet restricted_to_base(int var) const;
  /// Numeric substitution var = base_point()[var] + delta: sums the series in
  /// that variable and drops the slot (arity shrinks by one). The result's
  /// x-degree-a coefficients carry the substituted powers up to order - a.
  Jet substituted(int var, double delta) const;

  /// True when every coefficient is exactly zero (cheap multiply short-cut).
  bool is_zero() const;

  /// Applies the analytic function whose Taylor coefficients around value()
  /// are `series` (series[k] = f^(k)(value())/k!, k = 0..order).
  Jet analytic(std::span<const double> series) const;

  friend Jet reciprocal(const Jet& a);
  friend Jet sqrt(const Jet& a);
  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);
  friend Jet pow_int(const Jet& a, int k);

  std::string str() const;

  /// Throws JetError unless `o` shares this jet's arity and base point.
  void check_compatible(const Jet& o) const;

 private:
  const MonomialTable* table_ = nullptr;
  std::vector<double> base_;
  std::vector<double> c_;
};

// Namespace-scope declarations of the friend math functions, so qualified
// calls (yamabe::sin, ...) work where another `sin` is in scope.
Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet pow_int(const Jet& a, int k);

/// Evaluates `outer`, a Taylor polynomial around outer.base_point(), at the
/// point whose coordinates are the jets `args` (all sharing one arity, order
/// and base). args[i].value() must reproduce outer.base_point()[i].
/// Prefer JetComposer when composing many polynomials at the same arguments.
Jet compose(const Jet& outer, std::span<const Jet> args);

/// Caches the monomial values of a fixed argument tuple so that many
/// compositions against the same arguments cost one fused multiply-add pass
/// per outer coefficient. Monomial values fill lazily, so composing zero
/// polynomials (flat metrics) costs nothing. Not safe for concurrent apply
/// calls on one instance; build one composer per worker.
class JetComposer {
 public:
  explicit JetComposer(std::vector<Jet> args);

  Jet apply(const Jet& outer) const;

  int outer_arity() const { return static_cast<int>(args_.size()); }
  const std::vector<double>& outer_base() const { return outer_base_; }

 private:
  const Jet& monomial(int idx) const;

  std::vector<Jet> args_;
  std::vector<Jet> deviations_;
  std::vector<double> outer_base_;       // args[i].value()
  const MonomialTable* outer_table_;     // basis the outer coefficients live on
  mutable std::vector<Jet> monomial_values_;  // filled on demand
};

}  // namespace yamabe
