#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/jet.hpp"

namespace yamabe {

/// Dense tensor with `rank` slots of dimension `dim`, components of type T
/// (double for point values, Jet for fields in chart coordinates).
template <class T>
struct Tensor {
  int dim = 0;
  int rank = 0;
  std::vector<T> c;

  Tensor() = default;
  Tensor(int dim_, int rank_, const T& zero) : dim(dim_), rank(rank_) {
    std::size_t n = 1;
    for (int r = 0; r < rank_; ++r) n *= dim_;
    c.assign(n, zero);
  }

  std::size_t size() const { return c.size(); }

  T& at(int i) { return c[i]; }
  const T& at(int i) const { return c[i]; }
  T& at(int i, int j) { return c[i * dim + j]; }
  const T& at(int i, int j) const { return c[i * dim + j]; }
  T& at(int i, int j, int k) { return c[(i * dim + j) * dim + k]; }
  const T& at(int i, int j, int k) const { return c[(i * dim + j) * dim + k]; }
  T& at(int i, int j, int k, int l) { return c[((i * dim + j) * dim + k) * dim + l]; }
  const T& at(int i, int j, int k, int l) const {
    return c[((i * dim + j) * dim + k) * dim + l];
  }
  T& at(int i, int j, int k, int l, int m) {
    return c[(((i * dim + j) * dim + k) * dim + l) * dim + m];
  }
  const T& at(int i, int j, int k, int l, int m) const {
    return c[(((i * dim + j) * dim + k) * dim + l) * dim + m];
  }
};

using DTensor = Tensor<double>;
using JTensor = Tensor<Jet>;

inline DTensor value_of(const JTensor& t) {
  DTensor out(t.dim, t.rank, 0.0);
  for (std::size_t i = 0; i < t.c.size(); ++i) out.c[i] = t.c[i].value();
  return out;
}

/// Covariant derivative of a fully covariant jet tensor field with respect to
/// the connection `gamma` (layout gamma.at(k, i, j) = Gamma^k_{ij}). The
/// result has one extra leading slot: out.at(a, i1..ir) = (nabla_a T)_{i1..ir}.
inline JTensor covariant_deriv(const JTensor& t, const JTensor& gamma) {
  if (gamma.rank != 3) throw Error("covariant_deriv: connection must have rank 3");
  const int d = t.dim;
  const Jet zero(t.c.at(0).arity(), std::max(t.c.at(0).order() - 1, 0),
                 t.c.at(0).base_point());
  JTensor out(d, t.rank + 1, zero);
  {
    bool all_zero = true;
    for (const Jet& c : t.c)
      if (!c.is_zero()) {
        all_zero = false;
        break;
      }
    if (all_zero) return out;
  }
  std::vector<int> idx(t.rank, 0);
  const std::size_t n = t.c.size();
  for (std::size_t flat = 0; flat < n; ++flat) {
    // decode flat -> idx
    std::size_t rem = flat;
    for (int s = t.rank - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % d);
      rem /= d;
    }
    for (int a = 0; a < d; ++a) {
      Jet v = t.c[flat].partial(a);
      for (int s = 0; s < t.rank; ++s) {
        const int orig = idx[s];
        for (int m = 0; m < d; ++m) {
          const Jet& g_term = gamma.at(m, a, orig);
          if (g_term.is_zero()) continue;
          // index with slot s replaced by m
          std::size_t alt = 0;
          for (int u = 0; u < t.rank; ++u) alt = alt * d + (u == s ? m : idx[u]);
          if (t.c[alt].is_zero()) continue;
          v -= g_term * t.c[alt];
        }
      }
      out.c[a * n + flat] = std::move(v);
    }
  }
  return out;
}

/// Christoffel symbols of a jet metric: gamma.at(a, b, c) = Gamma^a_{bc}.
inline JTensor christoffel_jets(const JTensor& g, const JTensor& g_inv) {
  const int d = g.dim;
  const Jet zero(g.at(0, 0).arity(), std::max(g.at(0, 0).order() - 1, 0),
                 g.at(0, 0).base_point());
  JTensor dg(d, 3, zero);  // dg.at(c, a, b) = d_c g_{ab}
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        dg.at(c, a, b) = g.at(a, b).partial(c);
        if (b != a) dg.at(c, b, a) = dg.at(c, a, b);
      }
  JTensor gamma(d, 3, zero);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = b; c < d; ++c) {
        Jet s = zero;
        for (int e = 0; e < d; ++e) {
          if (g_inv.at(a, e).is_zero()) continue;
          if (dg.at(b, e, c).is_zero() && dg.at(c, e, b).is_zero() &&
              dg.at(e, b, c).is_zero())
            continue;
          s += g_inv.at(a, e) * (dg.at(b, e, c) + dg.at(c, e, b) - dg.at(e, b, c));
        }
        s *= 0.5;
        gamma.at(a, b, c) = s;
        if (c != b) gamma.at(a, c, b) = s;
      }
  return gamma;
}

/// Fully lowered curvature R_{abcd} = g(R(d_a, d_b) d_c, d_d) in the
/// convention R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
inline JTensor riemann_lowered_jets(const JTensor& g, const JTensor& gamma) {
  const int d = g.dim;
  const Jet zero(g.at(0, 0).arity(), std::max(gamma.at(0, 0, 0).order() - 1, 0),
                 g.at(0, 0).base_point());
  JTensor rup(d, 4, zero);  // R_{abc}^e at (a, b, c, e)
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < a; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          Jet s = gamma.at(e, b, c).partial(a) - gamma.at(e, a, c).partial(b);
          for (int f = 0; f < d; ++f) {
            if (!gamma.at(e, a, f).is_zero() && !gamma.at(f, b, c).is_zero())
              s += gamma.at(e, a, f) * gamma.at(f, b, c);
            if (!gamma.at(e, b, f).is_zero() && !gamma.at(f, a, c).is_zero())
              s -= gamma.at(e, b, f) * gamma.at(f, a, c);
          }
          rup.at(a, b, c, e) = s;
          rup.at(b, a, c, e) = -s;
        }
  JTensor riem(d, 4, zero);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < a; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          Jet s = zero;
          for (int f = 0; f < d; ++f) {
            if (rup.at(a, b, c, f).is_zero() || g.at(f, e).is_zero()) continue;
            s += rup.at(a, b, c, f) * g.at(f, e);
          }
          riem.at(a, b, c, e) = s;
          riem.at(b, a, c, e) = -s;
        }
  return riem;
}

// ---------------------------------------------------------------------------
// Small dense matrix helpers (dim <= 5), templated over double / Jet.
// ---------------------------------------------------------------------------

namespace detail {
inline double scalar_value(double x) { return x; }
inline double scalar_value(const Jet& x) { return x.value(); }
inline double typed_zero(double) { return 0.0; }
inline Jet typed_zero(const Jet& proto) {
  return Jet(proto.arity(), proto.order(), proto.base_point());
}
}  // namespace detail

/// Determinant by cofactor expansion; components indexed m.at(i, j).
template <class T>
T tensor_det(const Tensor<T>& m) {
  if (m.rank != 2) throw Error("tensor_det: rank-2 tensor required");
  const int d = m.dim;
  if (d == 1) return m.at(0, 0);
  if (d == 2) return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
  if (d == 3)
    return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
           m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
           m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
  if (d == 4) {
    T det = detail::typed_zero(m.at(0, 0));
    for (int j = 0; j < 4; ++j) {
      Tensor<T> sub(3, 2, det);
      for (int r = 1; r < 4; ++r) {
        int cc = 0;
        for (int col = 0; col < 4; ++col) {
          if (col == j) continue;
          sub.at(r - 1, cc++) = m.at(r, col);
        }
      }
      T term = m.at(0, j) * tensor_det(sub);
      if (j % 2 == 0)
        det += term;
      else
        det -= term;
    }
    return det;
  }
  throw Error("tensor_det: dimension out of range");
}

/// Matrix inverse via Gauss-Jordan elimination with pivoting on the scalar
/// part. Works for double and Jet entries; throws when a pivot vanishes.
template <class T>
Tensor<T> tensor_inverse(const Tensor<T>& m) {
  if (m.rank != 2) throw Error("tensor_inverse: rank-2 tensor required");
  const int d = m.dim;
  Tensor<T> a = m;
  Tensor<T> inv(d, 2, detail::typed_zero(m.at(0, 0)));
  for (int i = 0; i < d; ++i) inv.at(i, i) += 1.0;
  for (int col = 0; col < d; ++col) {
    int piv = col;
    double best = std::abs(detail::scalar_value(a.at(col, col)));
    for (int r = col + 1; r < d; ++r) {
      double v = std::abs(detail::scalar_value(a.at(r, col)));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw GeometryError("singular matrix in tensor_inverse");
    if (piv != col)
      for (int j = 0; j < d; ++j) {
        std::swap(a.at(piv, j), a.at(col, j));
        std::swap(inv.at(piv, j), inv.at(col, j));
      }
    T pivot = a.at(col, col);
    for (int j = 0; j < d; ++j) {
      a.at(col, j) = a.at(col, j) / pivot;
      inv.at(col, j) = inv.at(col, j) / pivot;
    }
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      T f = a.at(r, col);
      if (detail::scalar_value(f) == 0.0) {
        bool zero = true;
        if constexpr (std::is_same_v<T, Jet>) zero = f.is_zero();
        if (zero) continue;
      }
      for (int j = 0; j < d; ++j) {
        a.at(r, j) -= f * a.at(col, j);
        inv.at(r, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

/// Cholesky-based positive definiteness test for a symmetric double matrix.
inline bool is_positive_definite(const DTensor& m) {
  const int d = m.dim;
  DTensor l(d, 2, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (s <= 0.0) return false;
        l.at(i, i) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  return true;
}

}  // namespace yamabe
