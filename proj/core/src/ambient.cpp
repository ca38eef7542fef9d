#include "yamabe/ambient.hpp"

#include <cmath>

namespace yamabe {

AmbientCoordJets metric_jets_only(const MetricField& g, std::span<const double> p0,
                                  int order) {
  AmbientCoordJets out;
  out.dim = g.dim;
  out.order = order;
  out.p0.assign(p0.begin(), p0.end());
  out.g = g.lift_at(p0, order);
  out.g_inv = tensor_inverse(out.g);
  out.gamma = christoffel_jets(out.g, out.g_inv);
  out.depth = -1;  // curvature not populated
  return out;
}

AmbientCoordJets curvature_from_metric(const MetricField& g, std::span<const double> p0,
                                       int order, int depth) {
  if (order < 2 + depth)
    throw OrderError(
        "curvature_from_metric: jet order must exceed the requested curvature "
        "derivative depth by at least 2");
  AmbientCoordJets out = metric_jets_only(g, p0, order);
  const int d = out.dim;
  out.riemann = riemann_lowered_jets(out.g, out.gamma);
  const Jet zero(d, out.riemann.at(0, 0, 0, 0).order(), out.p0);

  out.ricci = JTensor(d, 2, zero);
  for (int b = 0; b < d; ++b)
    for (int c = b; c < d; ++c) {
      Jet s = zero;
      for (int a = 0; a < d; ++a)
        for (int e = 0; e < d; ++e) s += out.g_inv.at(a, e) * out.riemann.at(a, b, c, e);
      out.ricci.at(b, c) = s;
      if (c != b) out.ricci.at(c, b) = s;
    }
  out.scal = zero;
  for (int b = 0; b < d; ++b)
    for (int c = 0; c < d; ++c) out.scal += out.g_inv.at(b, c) * out.ricci.at(b, c);
  out.jbar = out.scal / (2.0 * (d - 1));

  out.schouten = JTensor(d, 2, zero);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      out.schouten.at(a, b) = (out.ricci.at(a, b) - out.jbar * out.g.at(a, b)) / (d - 2.0);

  // W = R + (P [kn] g)
  out.weyl = JTensor(d, 4, zero);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e)
          out.weyl.at(a, b, c, e) =
              out.riemann.at(a, b, c, e) + out.schouten.at(a, c) * out.g.at(b, e) -
              out.schouten.at(b, c) * out.g.at(a, e) +
              out.schouten.at(b, e) * out.g.at(a, c) -
              out.schouten.at(a, e) * out.g.at(b, c);

  out.depth = 0;
  if (depth >= 1) {
    out.nabla_ric = covariant_deriv(out.ricci, out.gamma);
    out.nabla_riem = covariant_deriv(out.riemann, out.gamma);
    out.nabla_weyl = covariant_deriv(out.weyl, out.gamma);
    out.dscal = JTensor(d, 1, zero);
    for (int a = 0; a < d; ++a) out.dscal.at(a) = out.scal.partial(a);
    out.depth = 1;
  }
  if (depth >= 2) {
    out.nabla2_ric = covariant_deriv(out.nabla_ric, out.gamma);
    out.hess_scal = covariant_deriv(out.dscal, out.gamma);
    out.depth = 2;
  }
  return out;
}

namespace {

/// Frame projection of a coordinate tensor's point values.
DTensor project_frame(const JTensor& t, const std::vector<std::vector<double>>& frame) {
  const int d = t.dim;
  const int rank = t.rank;
  DTensor vals = value_of(t);
  DTensor out = vals;
  // Contract one slot at a time with the frame matrix.
  for (int s = 0; s < rank; ++s) {
    DTensor next(d, rank, 0.0);
    std::vector<int> idx(rank, 0);
    for (std::size_t flat = 0; flat < next.c.size(); ++flat) {
      std::size_t rem = flat;
      for (int u = rank - 1; u >= 0; --u) {
        idx[u] = static_cast<int>(rem % d);
        rem /= d;
      }
      double acc = 0;
      const int fi = idx[s];
      for (int b = 0; b < d; ++b) {
        std::size_t alt = 0;
        for (int u = 0; u < rank; ++u) alt = alt * d + (u == s ? b : idx[u]);
        acc += out.c[alt] * frame[fi][b];
      }
      next.c[flat] = acc;
    }
    out = std::move(next);
  }
  return out;
}

DTensor slice_tangential(const DTensor& full, int n, std::vector<int> normal_slots,
                         int rank_out) {
  // Extract components with the listed slots fixed to 0 (the normal) and the
  // remaining slots shifted down to tangential indices 1..n -> 0..n-1.
  DTensor out(n, rank_out, 0.0);
  std::vector<int> idx(rank_out, 0);
  for (std::size_t flat = 0; flat < out.c.size(); ++flat) {
    std::size_t rem = flat;
    for (int u = rank_out - 1; u >= 0; --u) {
      idx[u] = static_cast<int>(rem % n);
      rem /= n;
    }
    // build the full index
    std::vector<int> fidx;
    int t = 0;
    const int rank_full = rank_out + static_cast<int>(normal_slots.size());
    for (int s = 0; s < rank_full; ++s) {
      bool is_normal = false;
      for (int ns : normal_slots) is_normal |= (ns == s);
      fidx.push_back(is_normal ? 0 : idx[t++] + 1);
    }
    std::size_t fflat = 0;
    for (int s = 0; s < rank_full; ++s) fflat = fflat * (n + 1) + fidx[s];
    out.c[flat] = full.c[fflat];
  }
  return out;
}

}  // namespace

AmbientStack adapt_frame(const AmbientCoordJets& raw,
                         const std::vector<std::vector<double>>& frame) {
  const int d = raw.dim;
  if (static_cast<int>(frame.size()) != d)
    throw EmbeddingError("adapt_frame: frame must have dim vectors");
  AmbientStack st;
  st.n = d - 1;
  const int n = st.n;

  st.frame_metric = project_frame(raw.g, frame);
  st.riemann = project_frame(raw.riemann, frame);
  st.ricci = project_frame(raw.ricci, frame);
  st.schouten = project_frame(raw.schouten, frame);
  st.weyl = project_frame(raw.weyl, frame);
  st.scal = raw.scal.value();
  st.jbar = raw.jbar.value();

  st.einstein = DTensor(d, 2, 0.0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      st.einstein.at(a, b) = st.ricci.at(a, b) - 0.5 * st.scal * st.frame_metric.at(a, b);

  st.G_normal = DTensor(n, 2, 0.0);
  st.W_hat = DTensor(n, 2, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      st.G_normal.at(i, j) = st.riemann.at(0, i + 1, j + 1, 0);
      st.W_hat.at(i, j) = st.weyl.at(0, i + 1, j + 1, 0);
    }
  st.W0 = slice_tangential(st.weyl, n, {3}, 3);
  st.ric0 = DTensor(n, 1, 0.0);
  st.p0 = DTensor(n, 1, 0.0);
  for (int i = 0; i < n; ++i) {
    st.ric0.at(i) = st.ricci.at(i + 1, 0);
    st.p0.at(i) = st.schouten.at(i + 1, 0);
  }
  st.p00 = st.schouten.at(0, 0);
  st.ric00 = st.ricci.at(0, 0);

  if (raw.depth >= 1) {
    st.nabla_ric_frame = project_frame(raw.nabla_ric, frame);
    st.nabla_riem_frame = project_frame(raw.nabla_riem, frame);
    st.nabla_weyl_frame = project_frame(raw.nabla_weyl, frame);
    st.d0_ric00 = st.nabla_ric_frame.at(0, 0, 0);
    DTensor dscal = project_frame(raw.dscal, frame);
    st.scal_p = dscal.at(0);
    st.jbar_p = st.scal_p / (2.0 * (d - 1));
    st.d0_R_0ij0 = DTensor(n, 2, 0.0);
    st.d0_W_0ij0 = DTensor(n, 2, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        st.d0_R_0ij0.at(i, j) = st.nabla_riem_frame.at(0, 0, i + 1, j + 1, 0);
        st.d0_W_0ij0.at(i, j) = st.nabla_weyl_frame.at(0, 0, i + 1, j + 1, 0);
      }
    st.has_first_derivs = true;
    if (d == 4) st.cotton0 = cotton_hypersurface(st);
  }
  if (raw.depth >= 2) {
    DTensor n2ric = project_frame(raw.nabla2_ric, frame);
    st.d0d0_ric00 = n2ric.at(0, 0, 0, 0);
    DTensor hs = project_frame(raw.hess_scal, frame);
    st.scal_pp = hs.at(0, 0);
    st.jbar_pp = st.scal_pp / (2.0 * (d - 1));
    st.has_second_derivs = true;
  }
  return st;
}

DTensor cotton_hypersurface(const AmbientStack& stack) {
  const int n = stack.n;
  if (n != 3)
    throw ScopeError("cotton_hypersurface: ambient Cotton contraction needs ambient dimension 4");
  if (!stack.has_first_derivs)
    throw OrderError("cotton_hypersurface: first curvature derivatives missing");
  // C-bar_{abc} = nabla-bar^d (W-bar)_{abcd} in ambient dimension 4 (where the
  // Cotton divisor n-3 equals 1). Frame raising uses diag(1, h^{-1}).
  DTensor h(n, 2, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h.at(i, j) = stack.frame_metric.at(i + 1, j + 1);
  DTensor h_inv = tensor_inverse(h);
  DTensor out(n, 2, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto c_0ab = [&](int a, int b) {
        double acc = stack.nabla_weyl_frame.at(0, 0, a + 1, b + 1, 0);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            acc += h_inv.at(k, l) * stack.nabla_weyl_frame.at(k + 1, 0, a + 1, b + 1, l + 1);
        return acc;
      };
      out.at(i, j) = 0.5 * (c_0ab(i, j) + c_0ab(j, i));
    }
  return out;
}

}  // namespace yamabe
