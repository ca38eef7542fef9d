#include "yamabe/jet.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace yamabe {

namespace {

std::int64_t key_of(int arity, int order) { return arity * 64 + order; }

}  // namespace

// ---------------------------------------------------------------------------
// MonomialTable
// ---------------------------------------------------------------------------

const MonomialTable& MonomialTable::get(int arity, int order) {
  if (arity < 1 || arity > kMaxArity) throw JetError("jet arity out of range");
  if (order < 0 || order > kMaxOrder) throw JetError("jet order out of range");
  static std::mutex mu;
  static std::map<std::int64_t, std::unique_ptr<MonomialTable>> cache;
  std::scoped_lock lock(mu);
  auto& slot = cache[key_of(arity, order)];
  if (!slot) slot.reset(new MonomialTable(arity, order));
  return *slot;
}

std::uint32_t MonomialTable::pack(const MultiIndex& mi, int arity) {
  std::uint32_t key = 0;
  for (int v = 0; v < arity; ++v) key = key * (kMaxOrder + 1) + mi[v];
  return key;
}

MonomialTable::MonomialTable(int arity, int order) : arity_(arity), order_(order) {
  // Graded-lexicographic enumeration: degree major, lexicographic minor.
  for (int deg = 0; deg <= order; ++deg) {
    MultiIndex mi{};
    // Compositions of `deg` into `arity` parts in lex order, starting with
    // the lex-smallest (everything in the last slot).
    mi[arity - 1] = static_cast<std::uint8_t>(deg);
    while (true) {
      monomials_.push_back(mi);
      degree_.push_back(deg);
      // Find the rightmost slot before the last with mass to its right.
      int v = arity - 2;
      int tail = (arity >= 2) ? mi[arity - 1] : 0;
      while (v >= 0 && tail == 0) {
        --v;
        if (v >= 0) tail += mi[v + 1];
      }
      if (v < 0) break;
      for (int w = v + 1; w < arity; ++w) mi[w] = 0;
      mi[v] = static_cast<std::uint8_t>(mi[v] + 1);
      mi[arity - 1] = static_cast<std::uint8_t>(tail - 1);
    }
  }

  std::uint32_t span = 1;
  for (int v = 0; v < arity; ++v) span *= (kMaxOrder + 1);
  rank_.assign(span, -1);
  for (int i = 0; i < count(); ++i) rank_[pack(monomials_[i], arity)] = i;

  // Multiplication fan-out.
  mul_row_begin_.assign(count() + 1, 0);
  for (int i = 0; i < count(); ++i) {
    mul_row_begin_[i] = static_cast<std::int32_t>(mul_entries_.size());
    for (int j = 0; j < count(); ++j) {
      if (degree_[i] + degree_[j] > order) continue;
      MultiIndex sum{};
      for (int v = 0; v < arity; ++v)
        sum[v] = static_cast<std::uint8_t>(monomials_[i][v] + monomials_[j][v]);
      mul_entries_.push_back({j, rank_[pack(sum, arity)]});
    }
  }
  mul_row_begin_[count()] = static_cast<std::int32_t>(mul_entries_.size());

  // Differentiation map. Graded-lex enumeration is order-independent, so an
  // index addresses the same monomial in every table of the same arity; this
  // lets the entries double as an integration map into the next-higher order.
  for (int v = 0; v < arity; ++v) {
    for (int i = 0; i < count(); ++i) {
      const MultiIndex& mi = monomials_[i];
      if (mi[v] > 0) {
        MultiIndex down = mi;
        down[v] = static_cast<std::uint8_t>(down[v] - 1);
        deriv_[v].push_back({i, rank_[pack(down, arity)], static_cast<double>(mi[v])});
      }
    }
  }
}

int MonomialTable::index_of(const MultiIndex& mi) const {
  int deg = 0;
  for (int v = 0; v < arity_; ++v) deg += mi[v];
  for (int v = arity_; v < kMaxArity; ++v)
    if (mi[v] != 0) throw JetError("multi-index has entries beyond the declared arity");
  if (deg > order_) return -1;
  return rank_[pack(mi, arity_)];
}

// ---------------------------------------------------------------------------
// Jet
// ---------------------------------------------------------------------------

Jet::Jet(int arity, int order, std::vector<double> base)
    : table_(&MonomialTable::get(arity, order)), base_(std::move(base)) {
  if (static_cast<int>(base_.size()) != arity)
    throw JetError("base point size does not match jet arity");
  c_.assign(table_->count(), 0.0);
}

Jet Jet::constant(int arity, int order, std::vector<double> base, double value) {
  Jet j(arity, order, std::move(base));
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int arity, int order, std::vector<double> base, int var) {
  if (var < 0 || var >= arity) throw JetError("variable index out of range");
  Jet j(arity, order, std::move(base));
  j.c_[0] = j.base_[var];
  if (order >= 1) {
    MultiIndex mi{};
    mi[var] = 1;
    j.c_[j.table_->index_of(mi)] = 1.0;
  }
  return j;
}

double Jet::coeff(const MultiIndex& mi) const {
  int idx = table_->index_of(mi);
  if (idx < 0) throw JetError("coefficient request beyond jet order");
  return c_[idx];
}

Jet Jet::truncated(int new_order) const {
  if (new_order >= order()) return *this;
  Jet out(arity(), new_order, base_);
  for (int i = 0; i < out.table_->count(); ++i) out.c_[i] = c_[i];
  return out;
}

Jet Jet::promoted(int new_arity, int new_order, std::span<const int> var_map,
                  std::vector<double> new_base) const {
  if (static_cast<int>(var_map.size()) != arity())
    throw JetError("promotion map size does not match jet arity");
  Jet out(new_arity, new_order, std::move(new_base));
  for (int i = 0; i < table_->count(); ++i) {
    if (c_[i] == 0.0) continue;
    if (table_->degree(i) > new_order) continue;
    const MultiIndex& mi = table_->exponents(i);
    MultiIndex target{};
    for (int v = 0; v < arity(); ++v) target[var_map[v]] = mi[v];
    out.c_[out.table_->index_of(target)] = c_[i];
  }
  return out;
}

void Jet::check_compatible(const Jet& o) const {
  if (empty() || o.empty()) throw JetError("operation on an empty jet");
  if (arity() != o.arity()) throw JetError("jet arity mismatch");
  if (base_ != o.base_) throw JetError("jet base-point mismatch");
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& x : out.c_) x = -x;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  check_compatible(o);
  if (o.order() < order()) *this = truncated(o.order());
  for (int i = 0; i < table_->count(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_compatible(o);
  if (o.order() < order()) *this = truncated(o.order());
  for (int i = 0; i < table_->count(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  for (double& x : c_) x /= s;
  return *this;
}

bool Jet::is_zero() const {
  for (double x : c_)
    if (x != 0.0) return false;
  return true;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.check_compatible(b);
  const int ord = std::min(a.order(), b.order());
  Jet atmp, btmp;
  const Jet* ap = &a;
  const Jet* bp = &b;
  if (a.order() != ord) {
    atmp = a.truncated(ord);
    ap = &atmp;
  }
  if (b.order() != ord) {
    btmp = b.truncated(ord);
    bp = &btmp;
  }
  Jet out(a.arity(), ord, a.base_);
  if (ap->is_zero() || bp->is_zero()) return out;
  const MonomialTable& tab = *out.table_;
  for (int i = 0; i < tab.count(); ++i) {
    const double ai = ap->c_[i];
    if (ai == 0.0) continue;
    for (const auto& e : tab.mul_row(i)) out.c_[e.dst] += ai * bp->c_[e.rhs];
  }
  return out;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet Jet::partial(int direction) const {
  if (direction < 0 || direction >= arity()) throw JetError("partial direction out of range");
  if (order() < 1)
    throw OrderError("partial derivative of an order-0 jet: no derivative information left");
  Jet out(arity(), order() - 1, base_);
  for (const auto& e : table_->deriv(direction)) out.c_[e.dst] += e.factor * c_[e.src];
  return out;
}

Jet Jet::integrate(int direction) const {
  if (direction < 0 || direction >= arity()) throw JetError("integration direction out of range");
  if (order() + 1 > kMaxOrder)
    throw OrderError("integration would exceed the maximum jet order");
  Jet out(arity(), order() + 1, base_);
  const int n_in = table_->count();
  // The derivative map of the target table, read backwards, is the
  // integration map: out[src with exponent e] = in[dst] / e.
  for (const auto& e : out.table_->deriv(direction))
    if (e.dst < n_in) out.c_[e.src] = c_[e.dst] / e.factor;
  return out;
}

Jet Jet::extended(int new_order) const {
  if (new_order <= order()) return truncated(new_order);
  Jet out(arity(), new_order, base_);
  for (int i = 0; i < table_->count(); ++i) out.c_[i] = c_[i];
  return out;
}

Jet Jet::var_coefficient(int var, int k) const {
  if (var < 0 || var >= arity()) throw JetError("var_coefficient: variable out of range");
  if (arity() == 1) throw JetError("var_coefficient: cannot drop the only variable");
  std::vector<double> nb;
  for (int v = 0; v < arity(); ++v)
    if (v != var) nb.push_back(base_[v]);
  Jet out(arity() - 1, std::max(order() - k, 0), std::move(nb));
  for (int i = 0; i < table_->count(); ++i) {
    if (c_[i] == 0.0) continue;
    const MultiIndex& mi = table_->exponents(i);
    if (mi[var] != k) continue;
    MultiIndex target{};
    int w = 0;
    for (int v = 0; v < arity(); ++v)
      if (v != var) target[w++] = mi[v];
    int idx = out.table_->index_of(target);
    if (idx >= 0) out.c_[idx] = c_[i];
  }
  return out;
}

Jet Jet::restricted_to_base(int var) const {
  if (var < 0 || var >= arity()) throw JetError("restricted_to_base: variable out of range");
  Jet out(arity(), order(), base_);
  for (int i = 0; i < table_->count(); ++i) {
    if (c_[i] == 0.0) continue;
    if (table_->exponents(i)[var] == 0) out.c_[i] = c_[i];
  }
  return out;
}

Jet Jet::substituted(int var, double delta) const {
  if (var < 0 || var >= arity()) throw JetError("substituted: variable out of range");
  if (arity() == 1) throw JetError("substituted: cannot drop the only variable");
  std::vector<double> nb;
  for (int v = 0; v < arity(); ++v)
    if (v != var) nb.push_back(base_[v]);
  Jet out(arity() - 1, order(), std::move(nb));
  std::vector<double> dpow(order() + 1, 1.0);
  for (int k = 1; k <= order(); ++k) dpow[k] = dpow[k - 1] * delta;
  for (int i = 0; i < table_->count(); ++i) {
    if (c_[i] == 0.0) continue;
    const MultiIndex& mi = table_->exponents(i);
    MultiIndex target{};
    int w = 0;
    for (int v = 0; v < arity(); ++v)
      if (v != var) target[w++] = mi[v];
    out.c_[out.table_->index_of(target)] += c_[i] * dpow[mi[var]];
  }
  return out;
}

Jet Jet::analytic(std::span<const double> series) const {
  if (static_cast<int>(series.size()) < order() + 1)
    throw JetError("analytic composition needs order+1 series coefficients");
  Jet dev = *this;
  dev.c_[0] = 0.0;
  Jet acc = Jet::constant(arity(), order(), base_, series[order()]);
  for (int k = order() - 1; k >= 0; --k) {
    acc = acc * dev;
    acc.c_[0] += series[k];
  }
  return acc;
}

Jet reciprocal(const Jet& a) {
  const double c = a.value();
  if (c == 0.0) throw SingularJetError("division by a jet with zero constant term");
  std::vector<double> s(a.order() + 1);
  double p = 1.0 / c;
  for (int k = 0; k <= a.order(); ++k) {
    s[k] = (k % 2 == 0) ? p : -p;
    p /= c;
  }
  return a.analytic(s);
}

Jet sqrt(const Jet& a) {
  const double c = a.value();
  if (c <= 0.0) throw SingularJetError("sqrt of a jet with non-positive constant term");
  std::vector<double> s(a.order() + 1);
  s[0] = std::sqrt(c);
  for (int k = 1; k <= a.order(); ++k) s[k] = s[k - 1] * (1.5 - k) / (k * c);
  return a.analytic(s);
}

Jet exp(const Jet& a) {
  std::vector<double> s(a.order() + 1);
  s[0] = std::exp(a.value());
  for (int k = 1; k <= a.order(); ++k) s[k] = s[k - 1] / k;
  return a.analytic(s);
}

Jet log(const Jet& a) {
  const double c = a.value();
  if (c <= 0.0) throw SingularJetError("log of a jet with non-positive constant term");
  std::vector<double> s(a.order() + 1);
  s[0] = std::log(c);
  double p = 1.0 / c;
  for (int k = 1; k <= a.order(); ++k) {
    s[k] = ((k % 2 == 1) ? p : -p) / k;
    p /= c;
  }
  return a.analytic(s);
}

Jet sin(const Jet& a) {
  const double sc = std::sin(a.value());
  const double cc = std::cos(a.value());
  const double cycle[4] = {sc, cc, -sc, -cc};
  std::vector<double> s(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    s[k] = cycle[k % 4] / fact;
  }
  return a.analytic(s);
}

Jet cos(const Jet& a) {
  const double sc = std::sin(a.value());
  const double cc = std::cos(a.value());
  const double cycle[4] = {cc, -sc, -cc, sc};
  std::vector<double> s(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    s[k] = cycle[k % 4] / fact;
  }
  return a.analytic(s);
}

Jet pow_int(const Jet& a, int k) {
  if (k < 0) return reciprocal(pow_int(a, -k));
  Jet acc = Jet::constant(a.arity(), a.order(), a.base_point(), 1.0);
  Jet base = a;
  int e = k;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return acc;
}

std::string Jet::str() const {
  std::ostringstream os;
  os << "jet(arity=" << arity() << ", order=" << order() << ";";
  for (int i = 0; i < table_->count(); ++i) {
    if (c_[i] == 0.0) continue;
    const MultiIndex& mi = table_->exponents(i);
    char buf[32];
    std::snprintf(buf, sizeof buf, " %+.6g", c_[i]);
    os << buf;
    for (int v = 0; v < arity(); ++v)
      if (mi[v] > 0) {
        os << "*x" << (v + 1);
        if (mi[v] > 1) os << "^" << int(mi[v]);
      }
  }
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

JetComposer::JetComposer(std::vector<Jet> args) : args_(std::move(args)) {
  if (args_.empty()) throw JetError("composition needs at least one argument");
  for (const auto& a : args_) args_[0].check_compatible(a);
  outer_base_.reserve(args_.size());
  for (const auto& a : args_) outer_base_.push_back(a.value());

  outer_table_ = &MonomialTable::get(static_cast<int>(args_.size()), args_[0].order());

  deviations_.reserve(args_.size());
  for (const auto& a : args_) {
    Jet d = a;
    d.coeff_mut(0) = 0.0;
    deviations_.push_back(std::move(d));
  }
  monomial_values_.resize(outer_table_->count());
  monomial_values_[0] =
      Jet::constant(args_[0].arity(), args_[0].order(), args_[0].base_point(), 1.0);
}

const Jet& JetComposer::monomial(int idx) const {
  if (!monomial_values_[idx].empty()) return monomial_values_[idx];
  const MultiIndex& mi = outer_table_->exponents(idx);
  int v = 0;
  while (mi[v] == 0) ++v;
  MultiIndex parent = mi;
  parent[v] = static_cast<std::uint8_t>(parent[v] - 1);
  monomial_values_[idx] = monomial(outer_table_->index_of(parent)) * deviations_[v];
  return monomial_values_[idx];
}

Jet JetComposer::apply(const Jet& outer) const {
  if (outer.arity() != static_cast<int>(args_.size()))
    throw JetError("composition arity mismatch");
  for (std::size_t i = 0; i < outer_base_.size(); ++i) {
    const double b = outer.base_point()[i];
    if (std::abs(b - outer_base_[i]) > 1e-9 * (1.0 + std::abs(b)))
      throw JetError("composition base point does not match argument values");
  }
  // The result is the composition of the *truncated* outer polynomial, hence
  // only valid to the smaller of the two orders.
  const int valid = std::min(args_[0].order(), outer.order());
  Jet out(args_[0].arity(), args_[0].order(), args_[0].base_point());
  if (outer.is_zero()) return out.truncated(valid);
  const auto& tab = outer.table();
  for (int idx = 0; idx < tab.count(); ++idx) {
    const double c = outer.coeff_raw(idx);
    if (c == 0.0) continue;
    int cidx = outer_table_->index_of(tab.exponents(idx));
    if (cidx < 0) continue;  // beyond the argument order: value is zero
    const Jet& mon = monomial(cidx);
    for (int i = 0; i < static_cast<int>(out.coeffs().size()); ++i)
      out.coeff_mut(i) += c * mon.coeff_raw(i);
  }
  return out.truncated(valid);
}

Jet compose(const Jet& outer, std::span<const Jet> args) {
  return JetComposer(std::vector<Jet>(args.begin(), args.end())).apply(outer);
}

}  // namespace yamabe
