#include "yamabe/surface.hpp"

#include <cmath>

namespace yamabe {

namespace {

int levi_civita_sign(std::span<const int> perm) {
  int sign = 1;
  std::vector<int> p(perm.begin(), perm.end());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) sign = -sign;
    }
  return sign;
}

/// Composes every component of a coordinate tensor along the embedding.
JTensor pull_tensor(const JTensor& coord, const JetComposer& comp) {
  const Jet zero_like = comp.apply(
      Jet(coord.c.at(0).arity(), coord.c.at(0).order(), coord.c.at(0).base_point()));
  JTensor out(coord.dim, coord.rank, zero_like);
  for (std::size_t i = 0; i < coord.c.size(); ++i) out.c[i] = comp.apply(coord.c[i]);
  return out;
}

/// Contracts every slot of a pulled coordinate tensor with the frame jet
/// vectors: slot value 0 takes the normal, slot value k takes tangent k-1.
/// Returns the full adapted-frame tensor with dimension (n+1); callers slice.
JTensor frame_project_jets(const JTensor& pulled, const std::vector<Jet>& normal,
                           const std::vector<std::vector<Jet>>& tangent) {
  const int d = pulled.dim;
  const int rank = pulled.rank;
  JTensor cur = pulled;
  for (int s = 0; s < rank; ++s) {
    const Jet zero(cur.c.at(0).arity(),
                   std::min(cur.c.at(0).order(), normal.at(0).order()),
                   cur.c.at(0).base_point());
    JTensor next(d, rank, zero);
    std::vector<int> idx(rank, 0);
    for (std::size_t flat = 0; flat < next.c.size(); ++flat) {
      std::size_t rem = flat;
      for (int u = rank - 1; u >= 0; --u) {
        idx[u] = static_cast<int>(rem % d);
        rem /= d;
      }
      Jet acc = zero;
      const int f = idx[s];
      for (int b = 0; b < d; ++b) {
        std::size_t alt = 0;
        for (int u = 0; u < rank; ++u) alt = alt * d + (u == s ? b : idx[u]);
        const Jet& fr = (f == 0) ? normal[b] : tangent[f - 1][b];
        if (fr.is_zero() || cur.c[alt].is_zero()) continue;
        acc += fr * cur.c[alt];
      }
      next.c[flat] = std::move(acc);
    }
    cur = std::move(next);
  }
  return cur;
}

/// Extracts the tangential slice with given slots pinned to the normal.
JTensor slice(const JTensor& full, int n, const std::vector<int>& normal_slots) {
  const int rank_full = full.rank;
  const int rank_out = rank_full - static_cast<int>(normal_slots.size());
  JTensor out(std::max(n, 1), rank_out, full.c.at(0));
  std::vector<int> idx(rank_out, 0);
  const std::size_t count = out.c.size();
  for (std::size_t flat = 0; flat < count; ++flat) {
    std::size_t rem = flat;
    for (int u = rank_out - 1; u >= 0; --u) {
      idx[u] = static_cast<int>(rem % n);
      rem /= n;
    }
    std::size_t fflat = 0;
    int t = 0;
    for (int s = 0; s < rank_full; ++s) {
      bool is_normal = false;
      for (int ns : normal_slots) is_normal |= (ns == s);
      fflat = fflat * (n + 1) + (is_normal ? 0 : idx[t++] + 1);
    }
    out.c[flat] = full.c[fflat];
  }
  return out;
}

}  // namespace

void SurfaceStack::require_order(int needed, const char* what) const {
  if (order < needed)
    throw OrderError(std::string(what) + ": needs jet order >= " + std::to_string(needed) +
                     ", stack was built at order " + std::to_string(order));
}

JTensor SurfaceStack::cov(const JTensor& t) const { return covariant_deriv(t, gamma); }

JTensor SurfaceStack::grad_scalar(const Jet& f) const {
  if (f.order() < 1) throw OrderError("grad: scalar jet has order 0");
  JTensor out(n, 1, Jet(f.arity(), f.order() - 1, f.base_point()));
  for (int a = 0; a < n; ++a) out.at(a) = f.partial(a);
  return out;
}

JTensor SurfaceStack::hess(const Jet& f) const {
  if (f.order() < 2) throw OrderError("hess: scalar jet needs order >= 2");
  return cov(grad_scalar(f));
}

Jet SurfaceStack::lap(const Jet& f) const { return tr2(hess(f)); }

Jet SurfaceStack::div_form(const JTensor& omega) const { return tr2(cov(omega)); }

JTensor SurfaceStack::div_sym2(const JTensor& b) const {
  JTensor nb = cov(b);  // (a, i, j) = nabla_a b_{ij}
  JTensor out(n, 1, Jet(nb.c.at(0).arity(), nb.c.at(0).order(), nb.c.at(0).base_point()));
  for (int i = 0; i < n; ++i) {
    Jet s = out.at(i);
    for (int a = 0; a < n; ++a)
      for (int j = 0; j < n; ++j) s += h_inv.at(a, j) * nb.at(a, j, i);
    out.at(i) = s;
  }
  return out;
}

Jet SurfaceStack::divdiv(const JTensor& b) const {
  JTensor n2 = cov(cov(b));  // (a, b, i, j)
  Jet s(n2.c.at(0).arity(), n2.c.at(0).order(), n2.c.at(0).base_point());
  for (int a = 0; a < n; ++a)
    for (int b2 = 0; b2 < n; ++b2)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          s += h_inv.at(a, i) * h_inv.at(b2, j) * n2.at(a, b2, i, j);
  return s;
}

JTensor SurfaceStack::lap_tensor2(const JTensor& b) const {
  JTensor n2 = cov(cov(b));
  JTensor out(n, 2, Jet(n2.c.at(0).arity(), n2.c.at(0).order(), n2.c.at(0).base_point()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet s = out.at(i, j);
      for (int a = 0; a < n; ++a)
        for (int b2 = 0; b2 < n; ++b2) s += h_inv.at(a, b2) * n2.at(a, b2, i, j);
      out.at(i, j) = s;
    }
  return out;
}

Jet SurfaceStack::ip_grad(const JTensor& a, const JTensor& b) const {
  Jet s(a.c.at(0).arity(), std::min(a.c.at(0).order(), b.c.at(0).order()),
        a.c.at(0).base_point());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += h_inv.at(i, j) * a.at(i) * b.at(j);
  return s;
}

Jet SurfaceStack::ip2(const JTensor& a, const JTensor& b) const {
  Jet s(a.c.at(0).arity(), std::min(a.c.at(0).order(), b.c.at(0).order()),
        a.c.at(0).base_point());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          s += h_inv.at(i, k) * h_inv.at(j, l) * a.at(i, j) * b.at(k, l);
  return s;
}

JTensor SurfaceStack::mul2(const JTensor& a, const JTensor& b) const {
  JTensor out(n, 2, Jet(a.c.at(0).arity(), std::min(a.c.at(0).order(), b.c.at(0).order()),
                        a.c.at(0).base_point()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet s = out.at(i, j);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += a.at(i, k) * h_inv.at(k, l) * b.at(l, j);
      out.at(i, j) = s;
    }
  return out;
}

Jet SurfaceStack::tr2(const JTensor& a) const {
  Jet s(a.c.at(0).arity(), a.c.at(0).order(), a.c.at(0).base_point());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += h_inv.at(i, j) * a.at(i, j);
  return s;
}

SurfaceStack build_surface_stack(const Embedding& emb, const MetricField& g,
                                 std::span<const double> x0, int order, int depth) {
  if (emb.ambient_dim != g.dim)
    throw EmbeddingError("embedding ambient dimension does not match the metric");
  if (emb.chart_dim + 1 != emb.ambient_dim)
    throw EmbeddingError("only hypersurfaces are supported (ambient = chart + 1)");
  std::vector<Jet> emb_jets;
  emb_jets.reserve(emb.maps.size());
  for (const auto& f : emb.maps) emb_jets.push_back(lift(f, x0, order));
  return build_surface_stack_from_jets(std::move(emb_jets), g, emb.normal_orientation,
                                       depth);
}

SurfaceStack build_surface_stack_from_jets(std::vector<Jet> emb_jets, const MetricField& g,
                                           double normal_orientation, int depth,
                                           bool lean) {
  SurfaceStack s;
  s.n = g.dim - 1;
  const int n = s.n;
  const int d = g.dim;
  if (static_cast<int>(emb_jets.size()) != d)
    throw EmbeddingError("embedding jets must have ambient_dim components");
  s.order = emb_jets[0].order();
  if (s.order < 4) throw OrderError("surface stack needs jet order >= 4");
  s.x0 = emb_jets[0].base_point();
  s.emb = std::move(emb_jets);
  s.normal_orientation = normal_orientation;

  std::vector<double> p0(d);
  for (int a = 0; a < d; ++a) p0[a] = s.emb[a].value();

  // Frame: tangent vectors and the metric-orthogonal unit normal.
  s.tangent.assign(n, std::vector<Jet>());
  for (int i = 0; i < n; ++i) {
    s.tangent[i].reserve(d);
    for (int a = 0; a < d; ++a) s.tangent[i].push_back(s.emb[a].partial(i));
  }

  const AmbientCoordJets raw = curvature_from_metric(g, p0, s.order, depth);
  JetComposer comp(s.emb);
  s.g_pull = pull_tensor(raw.g, comp);
  s.g_inv_pull = pull_tensor(raw.g_inv, comp);

  // Induced metric.
  const Jet xzero(n, s.order - 1, s.x0);
  s.h = JTensor(n, 2, xzero);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet acc = xzero;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          if (s.g_pull.at(a, b).is_zero()) continue;
          acc += s.g_pull.at(a, b) * s.tangent[i][a] * s.tangent[j][b];
        }
      s.h.at(i, j) = acc;
      if (j != i) s.h.at(j, i) = acc;
    }
  {
    DTensor h0 = value_of(s.h);
    if (!is_positive_definite(h0))
      throw EmbeddingError("embedding Jacobian is rank-deficient at the chart point");
  }
  s.h_inv = tensor_inverse(s.h);

  // Unit normal: annihilate the tangents with a Levi-Civita covector, raise
  // with g^{-1}, normalize; orientation multiplies the result.
  {
    std::vector<Jet> omega(d, xzero);
    std::vector<int> perm(d);
    // omega_a = eps_{a b1 .. bn} t1^{b1} ... tn^{bn}
    std::vector<int> bs(n, 0);
    for (int a = 0; a < d; ++a) {
      Jet acc = xzero;
      // iterate over all choices of (b1..bn)
      std::vector<int> stack_idx(n, 0);
      while (true) {
        perm[0] = a;
        for (int u = 0; u < n; ++u) perm[u + 1] = stack_idx[u];
        int sign = levi_civita_sign(perm);
        if (sign != 0) {
          Jet term = s.tangent[0][stack_idx[0]];
          for (int u = 1; u < n; ++u) term = term * s.tangent[u][stack_idx[u]];
          acc += (sign > 0) ? term : -term;
        }
        int u = n - 1;
        while (u >= 0 && ++stack_idx[u] == d) stack_idx[u--] = 0;
        if (u < 0) break;
      }
      omega[a] = acc;
    }
    std::vector<Jet> nraw(d, xzero);
    for (int a = 0; a < d; ++a) {
      Jet acc = xzero;
      for (int b = 0; b < d; ++b) acc += s.g_inv_pull.at(a, b) * omega[b];
      nraw[a] = acc;
    }
    Jet norm2 = xzero;
    for (int a = 0; a < d; ++a) norm2 += omega[a] * nraw[a];
    if (norm2.value() <= 0.0)
      throw EmbeddingError("normal is not normalizable (degenerate Jacobian)");
    Jet inv_norm = reciprocal(sqrt(norm2));
    s.normal.reserve(d);
    for (int a = 0; a < d; ++a) s.normal.push_back(normal_orientation * (nraw[a] * inv_norm));
  }

  // Intrinsic curvature.
  s.gamma = christoffel_jets(s.h, s.h_inv);
  if (!lean) s.riem = riemann_lowered_jets(s.h, s.gamma);
  if (lean) {
    // Extrinsic-only path: second fundamental form and the two Weyl slices.
    const JTensor gamma_pull_lean = pull_tensor(raw.gamma, comp);
    const Jet lzero_lean(n, s.order - 2, s.x0);
    s.L = JTensor(n, 2, lzero_lean);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        std::vector<Jet> dd(d, lzero_lean);
        for (int a = 0; a < d; ++a) {
          Jet acc = s.emb[a].partial(i).partial(j);
          for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e) {
              if (gamma_pull_lean.at(a, c, e).is_zero()) continue;
              acc += gamma_pull_lean.at(a, c, e) * s.tangent[i][c] * s.tangent[j][e];
            }
          dd[a] = acc;
        }
        Jet acc = lzero_lean;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            if (s.g_pull.at(a, b).is_zero()) continue;
            acc += s.g_pull.at(a, b) * dd[a] * s.normal[b];
          }
        s.L.at(i, j) = -acc;
        if (j != i) s.L.at(j, i) = s.L.at(i, j);
      }
    s.H = s.tr2(s.L) / double(n);
    s.lo = JTensor(n, 2, lzero_lean);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.lo.at(i, j) = s.L.at(i, j) - s.H * s.h.at(i, j);
    JTensor weyl_pull = pull_tensor(raw.weyl, comp);
    JTensor weyl_frame = frame_project_jets(weyl_pull, s.normal, s.tangent);
    s.w_hat = slice(weyl_frame, n, {0, 3});
    s.w0 = slice(weyl_frame, n, {3});
    JTensor riem_pull = pull_tensor(raw.riemann, comp);
    JTensor riem_frame = frame_project_jets(riem_pull, s.normal, s.tangent);
    s.gbar_pull = slice(riem_frame, n, {0, 3});
    return s;
  }
  const Jet czero(n, s.riem.c.at(0).order(), s.x0);
  s.ric = JTensor(n, 2, czero);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet acc = czero;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) acc += s.h_inv.at(a, b) * s.riem.at(a, i, j, b);
      s.ric.at(i, j) = acc;
      if (j != i) s.ric.at(j, i) = acc;
    }
  s.scal_intr = czero;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.scal_intr += s.h_inv.at(i, j) * s.ric.at(i, j);
  s.J_intr = s.scal_intr / (2.0 * (n - 1));
  if (n == 3) {
    s.P_intr = JTensor(n, 2, czero);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s.P_intr.at(i, j) = s.ric.at(i, j) - s.J_intr * s.h.at(i, j);
  }

  // Second fundamental form: L_{ij} = -g(nabla-bar_{e_i} e_j, N).
  const JTensor gamma_pull = pull_tensor(raw.gamma, comp);
  const Jet lzero(n, s.order - 2, s.x0);
  s.L = JTensor(n, 2, lzero);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<Jet> dd(d, lzero);
      for (int a = 0; a < d; ++a) {
        Jet acc = s.emb[a].partial(i).partial(j);
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) {
            if (gamma_pull.at(a, c, e).is_zero()) continue;
            acc += gamma_pull.at(a, c, e) * s.tangent[i][c] * s.tangent[j][e];
          }
        dd[a] = acc;
      }
      Jet acc = lzero;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          if (s.g_pull.at(a, b).is_zero()) continue;
          acc += s.g_pull.at(a, b) * dd[a] * s.normal[b];
        }
      s.L.at(i, j) = -acc;
      if (j != i) s.L.at(j, i) = s.L.at(i, j);
    }
  s.H = s.tr2(s.L) / double(n);
  s.lo = JTensor(n, 2, lzero);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.lo.at(i, j) = s.L.at(i, j) - s.H * s.h.at(i, j);

  // Pulled-back ambient curvature slices.
  {
    JTensor riem_pull = pull_tensor(raw.riemann, comp);
    JTensor riem_frame = frame_project_jets(riem_pull, s.normal, s.tangent);
    s.gbar_pull = slice(riem_frame, n, {0, 3});
    s.riem_pull3 = slice(riem_frame, n, {3});
    s.riem_tang = slice(riem_frame, n, {});

    JTensor weyl_pull = pull_tensor(raw.weyl, comp);
    JTensor weyl_frame = frame_project_jets(weyl_pull, s.normal, s.tangent);
    s.w_hat = slice(weyl_frame, n, {0, 3});
    s.w0 = slice(weyl_frame, n, {3});
    s.w0_first = slice(weyl_frame, n, {0});
    s.weyl_tang = slice(weyl_frame, n, {});

    JTensor ric_pull_c = pull_tensor(raw.ricci, comp);
    JTensor ric_frame = frame_project_jets(ric_pull_c, s.normal, s.tangent);
    s.ric_pull = slice(ric_frame, n, {});
    s.ric0_pull = slice(ric_frame, n, {1});
    s.ric00_pull = slice(ric_frame, n, {0, 1}).c.at(0);

    JTensor p_pull_c = pull_tensor(raw.schouten, comp);
    JTensor p_frame = frame_project_jets(p_pull_c, s.normal, s.tangent);
    s.p_pull = slice(p_frame, n, {});
    s.p0_pull = slice(p_frame, n, {1});
    s.p00_pull = slice(p_frame, n, {0, 1}).c.at(0);

    s.scalbar_pull = comp.apply(raw.scal);
    s.jbar_pull = comp.apply(raw.jbar);

    if (raw.depth >= 1) {
      JTensor nric_pull = pull_tensor(raw.nabla_ric, comp);
      JTensor nric_frame = frame_project_jets(nric_pull, s.normal, s.tangent);
      s.d0ric0_pull = slice(nric_frame, n, {0, 1});
    }
  }

  // Point values of the ambient stack in the adapted frame.
  {
    std::vector<std::vector<double>> frame(d, std::vector<double>(d, 0.0));
    for (int a = 0; a < d; ++a) frame[0][a] = s.normal[a].value();
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) frame[i + 1][a] = s.tangent[i][a].value();
    s.amb = adapt_frame(raw, frame);
  }
  return s;
}

FialkovResult fialkov(const SurfaceStack& s) {
  if (s.n != 3) throw ScopeError("fialkov: defined for three-dimensional hypersurfaces");
  const int n = s.n;
  DTensor h = value_of(s.h);
  DTensor hinv = value_of(s.h_inv);
  DTensor lo = value_of(s.lo);
  DTensor P = value_of(s.P_intr);
  DTensor pbar = value_of(s.p_pull);
  DTensor what = value_of(s.w_hat);
  const double H = s.H.value();
  DTensor lo2 = dalg::mul2(hinv, lo, lo);
  const double normlo2 = dalg::ip2(hinv, lo, lo);

  FialkovResult r;
  r.F = DTensor(n, 2, 0.0);
  r.F_rhs = DTensor(n, 2, 0.0);
  r.residual = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r.F.at(i, j) =
          pbar.at(i, j) - P.at(i, j) + H * lo.at(i, j) + 0.5 * H * H * h.at(i, j);
      r.F_rhs.at(i, j) = lo2.at(i, j) - 0.25 * normlo2 * h.at(i, j) + what.at(i, j);
      r.residual = std::max(r.residual, std::abs(r.F.at(i, j) - r.F_rhs.at(i, j)));
    }
  return r;
}

namespace dalg {

double ip1(const DTensor& hinv, const DTensor& a, const DTensor& b) {
  double s = 0;
  const int n = hinv.dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += hinv.at(i, j) * a.at(i) * b.at(j);
  return s;
}

double ip2(const DTensor& hinv, const DTensor& a, const DTensor& b) {
  double s = 0;
  const int n = hinv.dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += hinv.at(i, k) * hinv.at(j, l) * a.at(i, j) * b.at(k, l);
  return s;
}

double ip3(const DTensor& hinv, const DTensor& a, const DTensor& b) {
  const int n = hinv.dim;
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int i2 = 0; i2 < n; ++i2)
          for (int j2 = 0; j2 < n; ++j2)
            for (int k2 = 0; k2 < n; ++k2)
              s += hinv.at(i, i2) * hinv.at(j, j2) * hinv.at(k, k2) * a.at(i, j, k) *
                   b.at(i2, j2, k2);
  return s;
}

double ip4(const DTensor& hinv, const DTensor& a, const DTensor& b) {
  const int n = hinv.dim;
  double s = 0;
  std::vector<int> u(4), v(4);
  for (u[0] = 0; u[0] < n; ++u[0])
    for (u[1] = 0; u[1] < n; ++u[1])
      for (u[2] = 0; u[2] < n; ++u[2])
        for (u[3] = 0; u[3] < n; ++u[3])
          for (v[0] = 0; v[0] < n; ++v[0])
            for (v[1] = 0; v[1] < n; ++v[1])
              for (v[2] = 0; v[2] < n; ++v[2])
                for (v[3] = 0; v[3] < n; ++v[3]) {
                  double w = a.at(u[0], u[1], u[2], u[3]) * b.at(v[0], v[1], v[2], v[3]);
                  if (w == 0.0) continue;
                  s += w * hinv.at(u[0], v[0]) * hinv.at(u[1], v[1]) *
                       hinv.at(u[2], v[2]) * hinv.at(u[3], v[3]);
                }
  return s;
}

DTensor mul2(const DTensor& hinv, const DTensor& a, const DTensor& b) {
  const int n = hinv.dim;
  DTensor out(n, 2, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += a.at(i, k) * hinv.at(k, l) * b.at(l, j);
      out.at(i, j) = s;
    }
  return out;
}

double tr2(const DTensor& hinv, const DTensor& a) {
  const int n = hinv.dim;
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += hinv.at(i, j) * a.at(i, j);
  return s;
}

DTensor sym2(const DTensor& a) {
  DTensor out = a;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) out.at(i, j) = 0.5 * (a.at(i, j) + a.at(j, i));
  return out;
}

}  // namespace dalg

}  // namespace yamabe
