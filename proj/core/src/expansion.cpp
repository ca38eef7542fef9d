#include "yamabe/expansion.hpp"

#include <cmath>

#include "yamabe/ambient.hpp"

namespace yamabe {

namespace {

double rel_mismatch(double a, double b) {
  return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

Jet GeodesicFlow::slice_laplacian(const Jet& u) const {
  const int nn = n;
  Jet acc(u.arity(), std::max(u.order() - 2, 0), u.base_point());
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) {
      Jet hij = h_r_inv.at(i, j);
      Jet term = u.partial(i).partial(j);
      for (int k = 0; k < nn; ++k) term -= gamma_r.at(k, i, j) * u.partial(k);
      acc += hij * term;
    }
  return acc;
}

Jet GeodesicFlow::slice_divergence(const std::vector<Jet>& omega) const {
  const int nn = n;
  Jet acc(omega[0].arity(), std::max(omega[0].order() - 1, 0), omega[0].base_point());
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) {
      Jet term = omega[j].partial(i);
      for (int k = 0; k < nn; ++k) term -= gamma_r.at(k, i, j) * omega[k];
      acc += h_r_inv.at(i, j) * term;
    }
  return acc;
}

std::vector<Jet> geodesic_flow_phi(const SurfaceStack& s, const MetricField& g,
                                   const std::vector<Jet>& velocity, int flow_order) {
  const int n = s.n;
  const int d = n + 1;
  std::vector<double> base = s.x0;
  base.push_back(0.0);
  std::vector<int> vmap(n);
  for (int i = 0; i < n; ++i) vmap[i] = i;
  std::vector<double> p0(d);
  for (int a = 0; a < d; ++a) p0[a] = s.emb[a].value();

  const Jet r = Jet::variable(d, flow_order, base, n);
  std::vector<Jet> iota_p, v_p;
  for (int a = 0; a < d; ++a) {
    iota_p.push_back(s.emb[a].promoted(d, flow_order, vmap, base));
    v_p.push_back(velocity[a].promoted(d, flow_order, vmap, base));
  }

  // Christoffels of the ambient metric, lifted deep enough that composition
  // against the flow jets keeps the full flow order.
  AmbientCoordJets mj = metric_jets_only(g, p0, std::min(flow_order + 1, kMaxOrder));

  std::vector<Jet> phi(d);
  for (int a = 0; a < d; ++a) phi[a] = iota_p[a] + r * v_p[a];

  // Picard iteration of gamma'' = -Gamma(gamma)(gamma', gamma'); each pass
  // fixes one more r-order, so flow_order passes reach the full truncation.
  for (int pass = 1; pass < flow_order; ++pass) {
    JetComposer comp(phi);
    std::vector<Jet> rdot;
    rdot.reserve(d);
    for (int a = 0; a < d; ++a) rdot.push_back(phi[a].partial(n));
    bool any_correction = false;
    for (int a = 0; a < d; ++a) {
      Jet acc(d, flow_order - 1, base);
      for (int b = 0; b < d; ++b)
        for (int c = b; c < d; ++c) {
          Jet gbc = comp.apply(mj.gamma.at(a, b, c));
          if (gbc.is_zero()) continue;
          Jet term = gbc * rdot[b] * rdot[c];
          acc -= (c == b) ? term : (term * 2.0);
        }
      if (acc.is_zero()) {
        phi[a] = iota_p[a] + r * v_p[a];
        continue;
      }
      any_correction = true;
      phi[a] =
          iota_p[a] + r * v_p[a] + acc.integrate(n).integrate(n).truncated(flow_order);
    }
    if (!any_correction) break;  // straight lines: flat connection
  }
  return phi;
}

GeodesicFlow geodesic_normal_flow(const SurfaceStack& s, const MetricField& g,
                                  int flow_order) {
  GeodesicFlow flow;
  const int n = s.n;
  const int d = n + 1;
  flow.n = n;
  flow.flow_order = flow_order;

  std::vector<double> base = s.x0;
  base.push_back(0.0);
  std::vector<double> p0(d);
  for (int a = 0; a < d; ++a) p0[a] = s.emb[a].value();
  AmbientCoordJets mj = metric_jets_only(g, p0, std::min(flow_order + 1, kMaxOrder));

  flow.phi = geodesic_flow_phi(s, g, s.normal, flow_order);

  // Slice metric h_r and the Gauss-lemma gauge residuals.
  JetComposer comp(flow.phi);
  JTensor g_along(d, 2, Jet(d, flow_order, base));
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      g_along.at(a, b) = comp.apply(mj.g.at(a, b));
      if (b != a) g_along.at(b, a) = g_along.at(a, b);
    }
  std::vector<Jet> dphi_r;
  std::vector<std::vector<Jet>> dphi_x(n);
  for (int a = 0; a < d; ++a) {
    Jet p = flow.phi[a];
    dphi_r.push_back(p.partial(n));
    for (int i = 0; i < n; ++i) dphi_x[i].push_back(p.partial(i));
  }
  const Jet fzero(d, flow_order - 1, base);
  flow.h_r = JTensor(n, 2, fzero);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet acc = fzero;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          if (g_along.at(a, b).is_zero()) continue;
          acc += g_along.at(a, b) * dphi_x[i][a] * dphi_x[j][b];
        }
      flow.h_r.at(i, j) = acc;
      if (j != i) flow.h_r.at(j, i) = acc;
    }
  {
    // Gauss-lemma residuals, measured on the trusted cone (x-degree <= 3);
    // higher x-degrees carry the zero-padding of the promoted initial data
    // and are never read.
    auto cone_max = [&](const Jet& j) {
      double m = 0;
      const MonomialTable& tab = j.table();
      for (int idx = 0; idx < tab.count(); ++idx) {
        const MultiIndex& mi = tab.exponents(idx);
        if (tab.degree(idx) - mi[n] > 3) continue;
        m = std::max(m, std::abs(j.coeff_raw(idx)));
      }
      return m;
    };
    double res = 0;
    Jet grr = fzero;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        if (g_along.at(a, b).is_zero()) continue;
        grr += g_along.at(a, b) * dphi_r[a] * dphi_r[b];
      }
    grr -= 1.0;
    res = std::max(res, cone_max(grr));
    for (int i = 0; i < n; ++i) {
      Jet gri = fzero;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          if (g_along.at(a, b).is_zero()) continue;
          gri += g_along.at(a, b) * dphi_r[a] * dphi_x[i][b];
        }
      res = std::max(res, cone_max(gri));
    }
    flow.gauge_residual = res;
  }

  flow.h_r_inv = tensor_inverse(flow.h_r);
  flow.gamma_r = christoffel_jets(flow.h_r, flow.h_r_inv);

  Jet det_r = tensor_det(flow.h_r);
  Jet det_0 = det_r.restricted_to_base(n);
  flow.v_of_r = sqrt(det_r * reciprocal(det_0));

  // Ambient scalar curvature along the flow (separate lift: curvature depth 0
  // suffices, the order only needs the r^2 coefficient at low x-degree).
  AmbientCoordJets curv = curvature_from_metric(g, p0, std::min(flow_order + 1, 8), 0);
  flow.scalbar_along = comp.apply(curv.scal);
  flow.jbar_along = comp.apply(curv.jbar);
  return flow;
}

HCoefficients h_coefficients(const SurfaceStack& s, const GeodesicFlow& flow) {
  const int n = s.n;
  HCoefficients hc;
  DTensor h = value_of(s.h);
  DTensor hinv = value_of(s.h_inv);
  DTensor L = value_of(s.L);
  const AmbientStack& amb = s.amb;

  hc.h1 = DTensor(n, 2, 0.0);
  hc.h2 = DTensor(n, 2, 0.0);
  hc.h3 = DTensor(n, 2, 0.0);
  DTensor L2 = dalg::mul2(hinv, L, L);
  DTensor LG = dalg::mul2(hinv, L, amb.G_normal);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      hc.h1.at(i, j) = 2.0 * L.at(i, j);
      hc.h2.at(i, j) = L2.at(i, j) - amb.G_normal.at(i, j);
      hc.h3.at(i, j) = (-amb.d0_R_0ij0.at(i, j) - 2.0 * LG.at(i, j) - 2.0 * LG.at(j, i)) / 3.0;
    }
  // 12 tr h4 = -nabla_0^2 Ric_00 - 6 L^{ij} nabla_0 R_{0ij0} - 4 (L^2, G) + 4 (G, G)
  double l_d0r = dalg::ip2(hinv, L, amb.d0_R_0ij0);
  double l2_g = dalg::ip2(hinv, L2, amb.G_normal);
  double g_g = dalg::ip2(hinv, amb.G_normal, amb.G_normal);
  hc.tr_h4 = (-amb.d0d0_ric00 - 6.0 * l_d0r - 4.0 * l2_g + 4.0 * g_g) / 12.0;

  const int rvar = n;
  auto flow_coeff = [&](int k) {
    DTensor out(n, 2, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.at(i, j) = flow.h_r.at(i, j).var_coefficient(rvar, k).value();
    return out;
  };
  hc.h1_flow = flow_coeff(1);
  hc.h2_flow = flow_coeff(2);
  hc.h3_flow = flow_coeff(3);
  hc.h4_flow = flow_coeff(4);
  return hc;
}

VolumePaths volume_coefficients(const SurfaceStack& s, const HCoefficients& hc,
                                const GeodesicFlow& flow) {
  const int n = s.n;
  DTensor hinv = value_of(s.h_inv);
  const AmbientStack& amb = s.amb;
  VolumePaths vp;

  // Trace relations (from the r-Taylor expansion of v'(r)/v(r) = tr/2).
  {
    auto tr = [&](const DTensor& a) { return dalg::tr2(hinv, a); };
    auto mul = [&](const DTensor& a, const DTensor& b) { return dalg::mul2(hinv, a, b); };
    const DTensor& h1 = hc.h1;
    const DTensor& h2 = hc.h2;
    const DTensor& h3 = hc.h3;
    DTensor h1h1 = mul(h1, h1);
    DTensor h1h2 = mul(h1, h2);
    DTensor h1h1h1 = mul(h1h1, h1);
    double t1 = tr(h1), t2 = tr(h2), t3 = tr(h3);
    double t11 = tr(h1h1), t12 = tr(h1h2), t111 = tr(h1h1h1);
    vp.trace_path[0] = 1.0;
    vp.trace_path[1] = t1 / 2.0;
    vp.trace_path[2] = (t1 * t1 + 4.0 * t2 - 2.0 * t11) / 8.0;
    vp.trace_path[3] = (t1 * t1 * t1 + 12.0 * t1 * t2 + 24.0 * t3 - 6.0 * t1 * t11 -
                        24.0 * t12 + 8.0 * t111) /
                       48.0;
    if (n == 3) {
      double t22 = tr(mul(h2, h2));
      double t13 = tr(mul(h1, h3));
      double t112 = tr(mul(h1h1, h2));
      double t1111 = tr(mul(h1h1h1, h1));
      vp.trace_path[4] =
          (t1 * t1 * t1 * t1 + 24.0 * t1 * t1 * t2 + 48.0 * t2 * t2 +
           96.0 * t1 * t3 + 192.0 * hc.tr_h4 - 12.0 * t1 * t1 * t11 -
           48.0 * t2 * t11 + 12.0 * t11 * t11 - 96.0 * t1 * t12 - 192.0 * t13 -
           96.0 * t22 + 32.0 * t1 * t111 + 192.0 * t112 - 48.0 * t1111) /
          384.0;
    }
  }

  // Closed forms.
  {
    DTensor lo = value_of(s.lo);
    DTensor lo2 = dalg::mul2(hinv, lo, lo);
    double H = s.H.value();
    double normlo2 = dalg::ip2(hinv, lo, lo);
    double trlo3 = dalg::tr2(hinv, dalg::mul2(hinv, lo2, lo));
    double lo_g = dalg::ip2(hinv, lo, amb.G_normal);
    vp.closed_path[0] = 1.0;
    vp.closed_path[1] = n * H;
    vp.closed_path[2] =
        0.5 * (-amb.ric00 - normlo2 + n * (n - 1.0) * H * H);
    vp.closed_path[3] = (-amb.d0_ric00 + 2.0 * lo_g - (3.0 * n - 2.0) * H * amb.ric00 +
                         2.0 * trlo3 - 3.0 * (n - 2.0) * H * normlo2 +
                         n * (n - 1.0) * (n - 2.0) * H * H * H) /
                        6.0;
    if (n == 3) {
      double lo_d0r = dalg::ip2(hinv, lo, amb.d0_R_0ij0);
      double lo2_g = dalg::ip2(hinv, lo2, amb.G_normal);
      double g_g = dalg::ip2(hinv, amb.G_normal, amb.G_normal);
      vp.closed_path[4] =
          (-amb.d0d0_ric00 + 2.0 * lo_d0r - 10.0 * H * amb.d0_ric00 +
           3.0 * amb.ric00 * amb.ric00 - 2.0 * g_g + 8.0 * H * lo_g - 8.0 * lo2_g -
           20.0 * H * H * amb.ric00 + 6.0 * normlo2 * amb.ric00) /
          24.0;
    }
  }

  // Flow series.
  for (int k = 0; k <= (n == 3 ? 4 : 3); ++k)
    vp.flow_path[k] = flow.v_of_r.var_coefficient(flow.n, k).value();

  const int kmax = (n == 3) ? 4 : 3;
  for (int k = 0; k <= kmax; ++k)
    vp.max_rel_mismatch =
        std::max(vp.max_rel_mismatch, rel_mismatch(vp.trace_path[k], vp.closed_path[k]));
  if (vp.max_rel_mismatch > 1e-8)
    throw InconsistencyError(
        "volume coefficients: trace-relation path and closed-form path disagree "
        "(relative mismatch " +
        std::to_string(vp.max_rel_mismatch) + ")");
  return vp;
}

double sigma2_of(int n, double v1) { return v1 / (2.0 * n); }

double sigma3_of(int n, double v1, double v2, double jbar) {
  if (n == 1) throw PoleError("sigma_(3) has a pole at n = 1");
  return 2.0 / (3.0 * (n - 1.0)) * v2 - v1 * v1 / (3.0 * n) + jbar / (3.0 * (n - 1.0));
}

double sigma4_of(int n, double v1, double v2, double v3, double jbar, double jbar_p,
                 double lap_sigma2) {
  if (n == 2)
    throw PoleError(
        "sigma_(4) has a pole at n = 2; its residue equals -3/8 B_2 (see "
        "residue_sigma4)");
  if (n == 1) throw PoleError("sigma_(4) has a pole at n = 1");
  const double nn = n;
  return 3.0 / (4.0 * (nn - 2.0)) * v3 -
         (9.0 * nn * nn - 20.0 * nn + 7.0) / (12.0 * nn * (nn - 1.0) * (nn - 2.0)) * v1 * v2 +
         (6.0 * nn * nn - 11.0 * nn + 1.0) / (24.0 * nn * nn * (nn - 2.0)) * v1 * v1 * v1 +
         (2.0 * nn - 1.0) / (6.0 * nn * (nn - 1.0) * (nn - 2.0)) * v1 * jbar +
         jbar_p / (4.0 * (nn - 2.0)) + lap_sigma2 / (4.0 * (nn - 2.0));
}

double residue_sigma4(double v1, double v2, double v3, double jbar, double jbar_p,
                      double lap_sigma2) {
  return 0.75 * v3 + v1 * v1 * v1 / 32.0 - v1 * v2 / 8.0 + v1 * jbar / 4.0 +
         jbar_p / 4.0 + lap_sigma2 / 4.0;
}

ScOracle sc_remainder_oracle(const SurfaceStack& s, const GeodesicFlow& flow, double tol) {
  const int n = s.n;
  const int d = n + 1;
  const int F = flow.flow_order;
  const std::vector<double>& base = flow.phi[0].base_point();
  const int rvar = n;
  ScOracle out;

  // sigma coefficient fields from the flow volume series and the recursion
  // solution; every ingredient is an (x)-jet extracted from the flow.
  std::vector<int> vmap(n);
  for (int i = 0; i < n; ++i) vmap[i] = i;
  auto promote = [&](const Jet& xjet) {
    return xjet.promoted(d, F, vmap, base);
  };
  Jet v1 = flow.v_of_r.var_coefficient(rvar, 1);
  Jet v2 = flow.v_of_r.var_coefficient(rvar, 2);
  Jet v3 = flow.v_of_r.var_coefficient(rvar, 3);
  Jet jbar0 = flow.jbar_along.var_coefficient(rvar, 0);
  Jet jbar1 = flow.jbar_along.var_coefficient(rvar, 1);

  Jet sigma2 = v1 / (2.0 * n);
  Jet sigma3 = 2.0 / (3.0 * (n - 1.0)) * v2 - pow_int(v1, 2) / (3.0 * n) +
               jbar0 / (3.0 * (n - 1.0));
  out.sigma2 = sigma2.value();
  out.sigma3 = sigma3.value();

  const Jet r = Jet::variable(d, F, base, rvar);
  Jet sigma_f = r + promote(sigma2) * pow_int(r, 2) + promote(sigma3) * pow_int(r, 3);
  if (n == 3) {
    Jet lap_sigma2 = flow.slice_laplacian(promote(sigma2)).var_coefficient(rvar, 0);
    const double nn = n;
    Jet sigma4 =
        3.0 / (4.0 * (nn - 2.0)) * v3 -
        (9.0 * nn * nn - 20.0 * nn + 7.0) / (12.0 * nn * (nn - 1.0) * (nn - 2.0)) * v1 * v2 +
        (6.0 * nn * nn - 11.0 * nn + 1.0) / (24.0 * nn * nn * (nn - 2.0)) * pow_int(v1, 3) +
        (2.0 * nn - 1.0) / (6.0 * nn * (nn - 1.0) * (nn - 2.0)) * v1 * jbar0 +
        jbar1 / (4.0 * (nn - 2.0)) + lap_sigma2 / (4.0 * (nn - 2.0));
    out.sigma4 = sigma4.value();
    sigma_f += promote(sigma4) * pow_int(r, 4);
  }

  // S(g, sigma) = (d_r sigma)^2 + h_r^{ij} d_i sigma d_j sigma
  //   - 2/(n+1) sigma (d_r^2 sigma + 1/2 tr(h_r^{-1} h_r') d_r sigma
  //                    + Delta_{h_r} sigma)
  //   - 1/(n(n+1)) sigma^2 scal-bar.
  Jet dr = sigma_f.partial(rvar);
  Jet S = pow_int(dr, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S += flow.h_r_inv.at(i, j) * sigma_f.partial(i) * sigma_f.partial(j);
  Jet trace_term(d, F - 1, base);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      trace_term += flow.h_r_inv.at(i, j) * flow.h_r.at(i, j).partial(rvar);
  Jet paren = dr.partial(rvar) + 0.5 * trace_term * dr + flow.slice_laplacian(sigma_f);
  S -= (2.0 / (n + 1.0)) * sigma_f * paren;
  S -= (1.0 / (n * (n + 1.0))) * pow_int(sigma_f, 2) * flow.scalbar_along;
  S -= 1.0;

  for (int k = 0; k <= n; ++k) {
    out.orders[k] = S.var_coefficient(rvar, k).value();
    if (std::abs(out.orders[k]) > tol)
      throw InconsistencyError(
          "singular Yamabe series: the coefficient of r^" + std::to_string(k) +
          " fails to vanish (" + std::to_string(out.orders[k]) +
          "), signalling an upstream inconsistency");
  }
  out.remainder = S.var_coefficient(rvar, n + 1).value();
  return out;
}

ExpansionData build_expansion(const SurfaceStack& s, const MetricField& g) {
  ExpansionData e;
  e.n = s.n;
  GeodesicFlow flow = geodesic_normal_flow(s, g, s.order + 1);
  e.h = h_coefficients(s, flow);
  e.v_paths = volume_coefficients(s, e.h, flow);
  e.v = e.v_paths.closed_path;
  double lap_sigma2 = 0.5 * s.lap(s.H).value();
  e.sigma2 = sigma2_of(s.n, e.v[1]);
  e.sigma3 = sigma3_of(s.n, e.v[1], e.v[2], s.amb.jbar);
  if (s.n == 3)
    e.sigma4 = sigma4_of(s.n, e.v[1], e.v[2], e.v[3], s.amb.jbar, s.amb.jbar_p, lap_sigma2);
  e.oracle = sc_remainder_oracle(s, flow);
  return e;
}

double delta_prime_residual(const SurfaceStack& s, const GeodesicFlow& flow,
                            const ScalarField& u) {
  const int n = s.n;
  const int d = n + 1;
  const int F = flow.flow_order;
  std::vector<double> base = s.x0;
  base.push_back(0.0);
  std::vector<int> vmap(n);
  for (int i = 0; i < n; ++i) vmap[i] = i;

  Jet u_x = lift(u, s.x0, s.order);
  Jet u_flow = u_x.promoted(d, F, vmap, base);
  double series = flow.slice_laplacian(u_flow).var_coefficient(n, 1).value();

  DTensor hinv = value_of(s.h_inv);
  DTensor L = value_of(s.L);
  DTensor hess_u = value_of(s.hess(u_x));
  DTensor du = value_of(s.grad_scalar(u_x));
  DTensor dH = value_of(s.grad_scalar(s.H));
  DTensor ric0 = value_of(s.ric0_pull);
  double formula = -2.0 * dalg::ip2(hinv, L, hess_u) - n * dalg::ip1(hinv, dH, du) -
                   2.0 * dalg::ip1(hinv, ric0, du);
  double scale = std::max({1.0, std::abs(series), std::abs(formula)});
  return std::abs(series - formula) / scale;
}

double divergence_prime_residual(const SurfaceStack& s, const GeodesicFlow& flow,
                                 const std::vector<ScalarField>& omega) {
  const int n = s.n;
  if (n != 3) throw ScopeError("divergence_prime_residual: stated for n = 3");
  const int d = n + 1;
  const int F = flow.flow_order;
  std::vector<double> base = s.x0;
  base.push_back(0.0);
  std::vector<int> vmap(n);
  for (int i = 0; i < n; ++i) vmap[i] = i;

  std::vector<Jet> om_x, om_flow;
  for (int i = 0; i < n; ++i) {
    om_x.push_back(lift(omega[i], s.x0, s.order));
    om_flow.push_back(om_x[i].promoted(d, F, vmap, base));
  }
  double series = flow.slice_divergence(om_flow).var_coefficient(n, 1).value();

  JTensor om(n, 1, om_x[0]);
  for (int i = 0; i < n; ++i) om.at(i) = om_x[i];
  DTensor hinv = value_of(s.h_inv);
  DTensor L = value_of(s.L);
  DTensor nab_om = value_of(s.cov(om));  // (a, i) = nabla_a omega_i
  DTensor divL = value_of(s.div_sym2(s.L));
  DTensor dH = value_of(s.grad_scalar(s.H));
  DTensor om_v = value_of(om);
  double l_nab = dalg::ip2(hinv, L, nab_om);
  double formula = -2.0 * l_nab - 2.0 * dalg::ip1(hinv, divL, om_v) +
                   3.0 * dalg::ip1(hinv, dH, om_v);
  double scale = std::max({1.0, std::abs(series), std::abs(formula)});
  return std::abs(series - formula) / scale;
}

}  // namespace yamabe
