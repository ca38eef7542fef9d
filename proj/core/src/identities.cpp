#include "yamabe/identities.hpp"

#include <cmath>

#include "stack_values.hpp"

namespace yamabe {

using internal::SV;

namespace {

/// Accumulates one side of an identity while tracking the largest term.
struct Acc {
  double sum = 0, scale = 0;
  Acc& add(double t) {
    sum += t;
    scale = std::max(scale, std::abs(t));
    return *this;
  }
};

IdentityResidual from_sides(const Acc& lhs, const Acc& rhs) {
  IdentityResidual r;
  r.raw = std::abs(lhs.sum - rhs.sum);
  r.scale = std::max(lhs.scale, rhs.scale);
  r.vacuous = r.scale < 1e-13;
  return r;
}

IdentityResidual from_tensor(const DTensor& diff, double scale) {
  IdentityResidual r;
  for (double v : diff.c) r.raw = std::max(r.raw, std::abs(v));
  r.scale = scale;
  r.vacuous = scale < 1e-13;
  return r;
}

double kappa1_of(const SV& v) {
  const SurfaceStack& s = v.s;
  DTensor n2lo = value_of(s.cov(s.cov(s.lo)));  // (a, b; i, j)
  const int n = v.n;
  double t1 = 0, t2 = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e)
            for (int f = 0; f < n; ++f) {
              double w = v.hinv.at(a, d) * v.hinv.at(b, f) * v.hinv.at(c, e) *
                         v.lo.at(e, f);
              // nabla^i nabla^j lo^k_i lo_{kj}: derivative1 = a~i pairs with
              // tensor slot2 d, derivative2 = b~j pairs with lo slot f, and
              // tensor slot1 c~k pairs with lo slot e.
              t1 += w * n2lo.at(a, b, c, d);
              t2 += w * n2lo.at(b, a, c, d);
            }
  return t1 - t2;
}

double kappa2_of(const SV& v) {
  const SurfaceStack& s = v.s;
  double lo_laplo = dalg::ip2(v.hinv, v.lo, value_of(s.lap_tensor2(s.lo)));
  DTensor grad_divlo = value_of(s.cov(s.div_sym2(s.lo)));  // (a, i)
  double lo_graddiv = dalg::ip2(v.hinv, v.lo, grad_divlo);
  return lo_laplo - 1.5 * lo_graddiv;
}

double norm_grad_lo2(const SV& v) {
  DTensor nlo = value_of(v.s.cov(v.s.lo));
  return dalg::ip3(v.hinv, nlo, nlo);
}

}  // namespace

std::pair<double, double> new3a_sign_residuals(const GeometryPoint& gp);

const std::vector<IdentityCatalogEntry>& identity_catalog() {
  static const std::vector<IdentityCatalogEntry> catalog = [] {
    std::vector<IdentityCatalogEntry> c;
    auto add = [&](const char* id, IdentityScope scope, const char* quote,
                   std::function<IdentityResidual(const GeometryPoint&)> f) {
      c.push_back({id, scope, quote, std::move(f)});
    };

    add("id_basic", IdentityScope::N3,
        "deldel(lo^2) = 2 lo_{jk} nabla^j delta(lo)^k + |nabla lo|^2 + ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(s.divdiv(v.lo2_jets()).value());
          DTensor grad_divlo = value_of(s.cov(s.div_sym2(s.lo)));
          // 2 lo_{jk} nabla^j delta(lo)^k
          rhs.add(2.0 * dalg::ip2(v.hinv, v.lo, grad_divlo));
          rhs.add(norm_grad_lo2(v));
          DTensor divlo = value_of(s.div_sym2(s.lo));
          rhs.add(0.5 * dalg::ip1(v.hinv, divlo, divlo));
          rhs.add(-0.5 * v.norm_w02);
          rhs.add(kappa1_of(v));
          return from_sides(lhs, rhs);
        });

    add("kappa1", IdentityScope::N3, "kappa_1 = 3 (lo^2, P) + J |lo|^2",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          Acc lhs, rhs;
          lhs.add(kappa1_of(v));
          rhs.add(3.0 * dalg::ip2(v.hinv, v.lo2, v.P));
          rhs.add(v.J * v.normlo2);
          return from_sides(lhs, rhs);
        });

    add("kappa1_flat", IdentityScope::Flat, "kappa_1 = 3 H tr(L^3) - |L|^4 (flat)",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          if (v.n != 3) throw ScopeError("kappa1_flat is stated for n = 3");
          Acc lhs, rhs;
          lhs.add(kappa1_of(v));
          DTensor L2 = dalg::mul2(v.hinv, v.L, v.L);
          double trL3 = dalg::tr2(v.hinv, dalg::mul2(v.hinv, L2, v.L));
          double normL2 = dalg::ip2(v.hinv, v.L, v.L);
          rhs.add(3.0 * v.H * trL3);
          rhs.add(-normL2 * normL2);
          return from_sides(lhs, rhs);
        });

    add("diff_simple", IdentityScope::N3,
        "kappa_1 - kappa_2 = lo^{ij} nabla^k W-bar_{kij0}",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          Acc lhs, rhs;
          lhs.add(kappa1_of(v));
          lhs.add(-kappa2_of(v));
          rhs.add(dalg::ip2(v.hinv, v.lo, v.div_w0_first_slot()));
          return from_sides(lhs, rhs);
        });

    add("laplace_L", IdentityScope::N3,
        "(lo, Delta lo) = 3 (lo, Hess H) + 3 (lo^2, P) + J|lo|^2 + ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(dalg::ip2(v.hinv, v.lo, value_of(s.lap_tensor2(s.lo))));
          rhs.add(3.0 * dalg::ip2(v.hinv, v.lo, v.hessH));
          rhs.add(3.0 * dalg::ip2(v.hinv, v.lo2, v.P));
          rhs.add(v.J * v.normlo2);
          DTensor grad_p0 = value_of(s.cov(s.p0_pull));
          rhs.add(3.0 * dalg::ip2(v.hinv, v.lo, grad_p0));
          rhs.add(-dalg::ip2(v.hinv, v.lo, v.div_w0_first_slot()));
          return from_sides(lhs, rhs);
        });

    add("pre_simons", IdentityScope::All,
        "nabla_k nabla_l L_{ij} = nabla_i nabla_j L_{kl} - nabla_i R-bar_{kjl0} - ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          const int n = v.n;
          DTensor n2L = value_of(s.cov(s.cov(s.L)));
          DTensor covR3 = value_of(s.cov(s.riem_pull3));  // (a; i, j, k)
          DTensor R = value_of(s.riem);
          double scale = 0;
          DTensor diff(n, 4, 0.0);
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                  double lhs = n2L.at(k, l, i, j);
                  double r1 = n2L.at(i, j, k, l);
                  double r2 = -covR3.at(i, k, j, l);
                  double r3 = -covR3.at(k, l, i, j);
                  double r4 = 0, r5 = 0;
                  for (int m = 0; m < n; ++m)
                    for (int ss = 0; ss < n; ++ss) {
                      r4 += v.hinv.at(m, ss) * R.at(k, i, ss, l) * v.L.at(m, j);
                      r5 += v.hinv.at(m, ss) * R.at(k, i, ss, j) * v.L.at(l, m);
                    }
                  double rhs = r1 + r2 + r3 + r4 + r5;
                  diff.at(k, l, i, j) = lhs - rhs;
                  for (double t : {lhs, r1, r2, r3, r4, r5})
                    scale = std::max(scale, std::abs(t));
                }
          return from_tensor(diff, scale);
        });

    add("pre_simons_trace", IdentityScope::All,
        "Delta(L)_{ij} = n Hess_{ij}(H) - nabla^k R-bar_{kij0} + nabla_i Ric-bar0_j + ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          const int n = v.n;
          DTensor lapL = value_of(s.lap_tensor2(s.L));
          DTensor covR3 = value_of(s.cov(s.riem_pull3));
          DTensor grad_ric0 = value_of(s.cov(s.ric0_pull));
          DTensor R = value_of(s.riem);
          DTensor L_up = v.lo_up();  // placeholder; recomputed below for L
          DTensor Lup(n, 2, 0.0);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              double acc = 0;
              for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                  acc += v.hinv.at(i, a) * v.hinv.at(j, b) * v.L.at(a, b);
              Lup.at(i, j) = acc;
            }
          double scale = 0;
          DTensor diff(n, 2, 0.0);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              double lhs = lapL.at(i, j);
              double r1 = n * v.hessH.at(i, j);
              double r2 = 0;
              for (int a = 0; a < n; ++a)
                for (int k = 0; k < n; ++k)
                  r2 -= v.hinv.at(a, k) * covR3.at(a, k, i, j);
              double r3 = grad_ric0.at(i, j);
              double r4 = 0;  // R_{ik}^k_m L^m_j
              for (int k = 0; k < n; ++k)
                for (int kk = 0; kk < n; ++kk)
                  for (int m = 0; m < n; ++m)
                    for (int mm = 0; mm < n; ++mm)
                      r4 += v.hinv.at(k, kk) * v.hinv.at(m, mm) * R.at(i, k, kk, mm) *
                            v.L.at(m, j);
              double r5 = 0;  // - R_{kijm} L^{km}
              for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m) r5 -= R.at(k, i, j, m) * Lup.at(k, m);
              double rhs = r1 + r2 + r3 + r4 + r5;
              diff.at(i, j) = lhs - rhs;
              for (double t : {lhs, r1, r2, r3, r4, r5})
                scale = std::max(scale, std::abs(t));
            }
          return from_tensor(diff, scale);
        });

    add("simons_full", IdentityScope::All,
        "nabla_i nabla_j L_{kl} = nabla_k nabla_l L_{ij} + L_{ij} L^2_{kl} - L_{kl} L^2_{ij} + ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          const int n = v.n;
          DTensor n2L = value_of(s.cov(s.cov(s.L)));
          DTensor L2 = dalg::mul2(v.hinv, v.L, v.L);
          DTensor Rt = value_of(s.riem_tang);
          const DTensor& nrf = s.amb.nabla_riem_frame;
          double scale = 0;
          DTensor diff(n, 4, 0.0);
          auto LR = [&](int a, int b, int cc, int dd, int e) {
            // L_a^m R-bar_{b cc dd m} ... contraction over the raised slot
            double acc = 0;
            for (int m = 0; m < n; ++m)
              for (int mm = 0; mm < n; ++mm)
                acc += v.L.at(a, m) * v.hinv.at(m, mm) * Rt.at(b, cc, dd, mm);
            (void)e;
            return acc;
          };
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                  double lhs = n2L.at(i, j, k, l);
                  Acc rhs;
                  rhs.add(n2L.at(k, l, i, j));
                  rhs.add(v.L.at(i, j) * L2.at(k, l));
                  rhs.add(-v.L.at(k, l) * L2.at(i, j));
                  rhs.add(v.L.at(i, l) * L2.at(j, k));
                  rhs.add(-v.L.at(j, k) * L2.at(i, l));
                  rhs.add(-LR(i, j, k, l, 0));  // - L_i^m R_{jklm}
                  rhs.add(-LR(j, i, k, l, 0));  // - L_j^m R_{iklm}
                  rhs.add(LR(k, l, i, j, 0));   // + L_k^m R_{lijm}
                  rhs.add(LR(l, k, i, j, 0));   // + L_l^m R_{kijm}
                  rhs.add(v.L.at(i, j) * v.gbar.at(k, l));
                  rhs.add(-v.L.at(k, l) * v.gbar.at(i, j));
                  rhs.add(nrf.at(i + 1, k + 1, j + 1, l + 1, 0));
                  rhs.add(nrf.at(k + 1, l + 1, i + 1, j + 1, 0));
                  diff.at(i, j, k, l) = lhs - rhs.sum;
                  scale = std::max({scale, std::abs(lhs), rhs.scale});
                }
          return from_tensor(diff, scale);
        });

    add("simons_trace", IdentityScope::All,
        "Delta(L)_{ij} = n Hess_{ij}(H) + n H L^2_{ij} - L_{ij}|L|^2 + ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          const int n = v.n;
          DTensor lapL = value_of(s.lap_tensor2(s.L));
          DTensor L2 = dalg::mul2(v.hinv, v.L, v.L);
          double normL2 = dalg::ip2(v.hinv, v.L, v.L);
          DTensor Rt = value_of(s.riem_tang);
          const DTensor& nrf = s.amb.nabla_riem_frame;
          DTensor A(n, 2, 0.0);  // A_{is} = h^{kl} R-bar_{ikls}
          for (int i = 0; i < n; ++i)
            for (int ss = 0; ss < n; ++ss) {
              double acc = 0;
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += v.hinv.at(k, l) * Rt.at(i, k, l, ss);
              A.at(i, ss) = acc;
            }
          DTensor Lup(n, 2, 0.0);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              double acc = 0;
              for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                  acc += v.hinv.at(i, a) * v.hinv.at(j, b) * v.L.at(a, b);
              Lup.at(i, j) = acc;
            }
          double scale = 0;
          DTensor diff(n, 2, 0.0);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              double lhs = lapL.at(i, j);
              Acc rhs;
              rhs.add(n * v.hessH.at(i, j));
              rhs.add(n * v.H * L2.at(i, j));
              rhs.add(-v.L.at(i, j) * normL2);
              double t1 = 0, t2 = 0;
              for (int ss = 0; ss < n; ++ss)
                for (int mm = 0; mm < n; ++mm) {
                  t1 += v.L.at(j, ss) * v.hinv.at(ss, mm) * A.at(i, mm);
                  t2 += v.L.at(i, ss) * v.hinv.at(ss, mm) * A.at(j, mm);
                }
              rhs.add(t1).add(t2);
              double t3 = 0;
              for (int rr = 0; rr < n; ++rr)
                for (int ss = 0; ss < n; ++ss) t3 += Lup.at(rr, ss) * Rt.at(rr, i, j, ss);
              rhs.add(-2.0 * t3);
              rhs.add(n * v.H * v.gbar.at(i, j));
              rhs.add(-v.L.at(i, j) * v.ric00);
              double t4 = 0;
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                  t4 += v.hinv.at(k, l) * nrf.at(l + 1, i + 1, k + 1, j + 1, 0);
              rhs.add(t4);
              double t5 = 0;
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                  t5 += v.hinv.at(k, l) * nrf.at(i + 1, j + 1, k + 1, l + 1, 0);
              rhs.add(t5);
              diff.at(i, j) = lhs - rhs.sum;
              scale = std::max({scale, std::abs(lhs), rhs.scale});
            }
          return from_tensor(diff, scale);
        });

    add("simons_flat", IdentityScope::Flat,
        "Delta(L) = n Hess(H) + n H L^2 - L |L|^2 and the |L|^2 scalar form",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          const int n = v.n;
          DTensor lapL = value_of(s.lap_tensor2(s.L));
          DTensor L2 = dalg::mul2(v.hinv, v.L, v.L);
          double normL2 = dalg::ip2(v.hinv, v.L, v.L);
          double scale = 0;
          DTensor diff(n, 2, 0.0);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              double lhs = lapL.at(i, j);
              double rhs = n * v.hessH.at(i, j) + n * v.H * L2.at(i, j) -
                           v.L.at(i, j) * normL2;
              diff.at(i, j) = lhs - rhs;
              scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
            }
          IdentityResidual tens = from_tensor(diff, scale);
          // scalar form: Delta(|L|^2)/2 = n (L, Hess H) + |nabla L|^2 + n H tr L^3 - |L|^4
          Jet normL2_jet = s.ip2(s.L, s.L);
          Acc lhs, rhs;
          lhs.add(0.5 * s.lap(normL2_jet).value());
          rhs.add(n * dalg::ip2(v.hinv, v.L, v.hessH));
          DTensor nL = value_of(s.cov(s.L));
          rhs.add(dalg::ip3(v.hinv, nL, nL));
          double trL3 = dalg::tr2(v.hinv, dalg::mul2(v.hinv, L2, v.L));
          rhs.add(n * v.H * trL3);
          rhs.add(-normL2 * normL2);
          IdentityResidual scal = from_sides(lhs, rhs);
          IdentityResidual out;
          out.raw = std::max(tens.raw, scal.raw);
          out.scale = std::max(tens.scale, scal.scale);
          out.vacuous = tens.vacuous && scal.vacuous;
          return out;
        });

    add("new3a", IdentityScope::N3,
        "deldel((lo^2)o) + (P, (lo^2)o) = 2/3 (lo, Delta lo) + 1/3 |nabla lo|^2 + ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(s.divdiv(v.lo2tf_jets()).value());
          lhs.add(dalg::ip2(v.hinv, v.P, v.lo2tf));
          rhs.add(2.0 / 3.0 * dalg::ip2(v.hinv, v.lo, value_of(s.lap_tensor2(s.lo))));
          rhs.add(norm_grad_lo2(v) / 3.0);
          DTensor divlo = value_of(s.div_sym2(s.lo));
          rhs.add(0.5 * dalg::ip1(v.hinv, divlo, divlo));
          rhs.add(-2.0 / 3.0 * v.J * v.normlo2);
          // +4/3, as the combination of the deldel(lo^2) display, the kappa_2
          // definition and the kappa_1 evaluation yields (each of which has
          // its own catalog entry); the lemma's display carries the opposite
          // sign on this term by a typo.
          rhs.add(4.0 / 3.0 * dalg::ip2(v.hinv, v.lo, v.div_w0_first_slot()));
          rhs.add(-0.5 * v.norm_w02);
          return from_sides(lhs, rhs);
        });

    add("diff_key", IdentityScope::N3,
        "Delta(|lo|^2) - 2 deldel(lo^2) = -2 (lo, Hess H) - 2 (lo, nabla P-bar_0) - ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(s.lap(v.normlo2_jet()).value());
          lhs.add(-2.0 * s.divdiv(v.lo2_jets()).value());
          rhs.add(-2.0 * dalg::ip2(v.hinv, v.lo, v.hessH));
          DTensor grad_p0 = value_of(s.cov(s.p0_pull));
          rhs.add(-2.0 * dalg::ip2(v.hinv, v.lo, grad_p0));
          DTensor divlo = value_of(s.div_sym2(s.lo));
          rhs.add(-dalg::ip1(v.hinv, divlo, divlo));
          rhs.add(-2.0 * dalg::ip2(v.hinv, v.lo, v.div_w0_first_slot()));
          rhs.add(v.norm_w02);
          return from_sides(lhs, rhs);
        });

    add("basic_div", IdentityScope::Flat,
        "Delta(|lo|^2)/2 - deldel(lo^2) = -(lo, Hess H) - 2 |dH|^2 (flat)",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          if (v.n != 3) throw ScopeError("basic_div is stated for n = 3");
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(0.5 * s.lap(v.normlo2_jet()).value());
          lhs.add(-s.divdiv(v.lo2_jets()).value());
          rhs.add(-dalg::ip2(v.hinv, v.lo, v.hessH));
          rhs.add(-2.0 * v.norm_dH2);
          return from_sides(lhs, rhs);
        });

    add("cm_tracefree", IdentityScope::N3,
        "nabla_i lo_{kj} - nabla_k lo_{ij} - 1/2 delta(lo)_k h_{ij} + 1/2 delta(lo)_i h_{kj} = W-bar_{kij0}",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          const int n = v.n;
          DTensor covlo = value_of(s.cov(s.lo));
          DTensor divlo = value_of(s.div_sym2(s.lo));
          double scale = 0;
          DTensor diff(n, 3, 0.0);
          for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) {
                double lhs = covlo.at(i, k, j) - covlo.at(k, i, j) -
                             0.5 * divlo.at(k) * v.h.at(i, j) +
                             0.5 * divlo.at(i) * v.h.at(k, j);
                double rhs = v.w0.at(k, i, j);
                diff.at(k, i, j) = lhs - rhs;
                scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
              }
          return from_tensor(diff, scale);
        });

    add("bianchi_r0", IdentityScope::All,
        "nabla-bar_0(G-bar)_{00} = -delta(Ric-bar_0) - n H Ric-bar_{00} + (L, Ric-bar)",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(v.d0_ric00);
          lhs.add(-0.5 * v.scal_p);
          rhs.add(-s.div_form(s.ric0_pull).value());
          rhs.add(-v.n * v.H * v.ric00);
          rhs.add(dalg::ip2(v.hinv, v.L, v.ric_pull));
          return from_sides(lhs, rhs);
        });

    add("nabla2G", IdentityScope::N3,
        "nabla-bar_0^2(G-bar)_{00} = -4 H nabla-bar_0(Ric-bar)_{00} + H scal-bar' + ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(v.d0d0_ric00);
          lhs.add(-0.5 * v.scal_pp);
          rhs.add(-4.0 * v.H * v.d0_ric00);
          rhs.add(v.H * v.scal_p);
          DTensor grad_ric0 = value_of(s.cov(s.ric0_pull));
          rhs.add(2.0 * dalg::ip2(v.hinv, v.lo, grad_ric0));
          rhs.add(-s.div_form(s.d0ric0_pull).value());
          double lo_d0ric = 0;
          for (int i = 0; i < v.n; ++i)
            for (int j = 0; j < v.n; ++j)
              for (int a = 0; a < v.n; ++a)
                for (int b = 0; b < v.n; ++b)
                  lo_d0ric += v.hinv.at(i, a) * v.hinv.at(j, b) * v.lo.at(a, b) *
                              s.amb.nabla_ric_frame.at(0, i + 1, j + 1);
          rhs.add(lo_d0ric);
          rhs.add(v.H * s.div_form(s.ric0_pull).value());
          rhs.add(-2.0 * dalg::ip1(v.hinv, v.dH, v.ric0));
          DTensor divlo = value_of(s.div_sym2(s.lo));
          rhs.add(2.0 * dalg::ip1(v.hinv, divlo, v.ric0));
          {  // - delta((lo Ric-bar)_0)
            JTensor om(v.n, 1, s.lo.at(0, 0));
            for (int i = 0; i < v.n; ++i) {
              Jet acc(s.lo.at(0, 0).arity(), s.lo.at(0, 0).order(),
                      s.lo.at(0, 0).base_point());
              for (int k = 0; k < v.n; ++k)
                for (int l = 0; l < v.n; ++l)
                  acc += s.lo.at(i, k) * s.h_inv.at(k, l) * s.ric0_pull.at(l);
              om.at(i) = acc;
            }
            rhs.add(-s.div_form(om).value());
          }
          double normL2 = dalg::ip2(v.hinv, v.L, v.L);
          rhs.add(normL2 * v.ric00);
          DTensor L2 = dalg::mul2(v.hinv, v.L, v.L);
          rhs.add(-dalg::ip2(v.hinv, L2, v.ric_pull));
          rhs.add(v.ric00 * v.ric00);
          rhs.add(-dalg::ip2(v.hinv, v.gbar, v.ric_pull));
          return from_sides(lhs, rhs);
        });

    add("del_nabla", IdentityScope::All,
        "delta(nabla-bar_0(Ric-bar)_0) = Delta(scal-bar)/2 - n delta(H Ric-bar_0) - ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(s.div_form(s.d0ric0_pull).value());
          rhs.add(0.5 * s.lap(s.scalbar_pull).value());
          {  // - n delta(H Ric-bar_0)
            JTensor om(v.n, 1, s.ric0_pull.at(0));
            for (int i = 0; i < v.n; ++i) om.at(i) = s.H * s.ric0_pull.at(i);
            rhs.add(-v.n * s.div_form(om).value());
          }
          {  // - delta((L Ric-bar)_0)
            JTensor om(v.n, 1, s.ric0_pull.at(0));
            for (int i = 0; i < v.n; ++i) {
              Jet acc(s.L.at(0, 0).arity(), s.L.at(0, 0).order(),
                      s.L.at(0, 0).base_point());
              for (int k = 0; k < v.n; ++k)
                for (int l = 0; l < v.n; ++l)
                  acc += s.L.at(i, k) * s.h_inv.at(k, l) * s.ric0_pull.at(l);
              om.at(i) = acc;
            }
            rhs.add(-s.div_form(om).value());
          }
          rhs.add(-s.divdiv(s.ric_pull).value());
          return from_sides(lhs, rhs);
        });

    add("deldel", IdentityScope::N3,
        "deldel(Ric-bar) = 2 Delta(J) + Delta(J-bar) - Delta(H^2) - 2 deldel(H lo) + ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(s.divdiv(s.ric_pull).value());
          rhs.add(2.0 * s.lap(s.J_intr).value());
          rhs.add(s.lap(s.jbar_pull).value());
          rhs.add(-s.lap(s.H * s.H).value());
          JTensor Hlo(v.n, 2, s.lo.at(0, 0));
          for (int i = 0; i < v.n; ++i)
            for (int j = 0; j < v.n; ++j) Hlo.at(i, j) = s.H * s.lo.at(i, j);
          rhs.add(-2.0 * s.divdiv(Hlo).value());
          rhs.add(2.0 * s.divdiv(v.lo2_jets()).value());
          rhs.add(-0.5 * s.lap(v.normlo2_jet()).value());
          rhs.add(2.0 * s.divdiv(s.w_hat).value());
          return from_sides(lhs, rhs);
        });

    add("deldel2", IdentityScope::All,
        "deldel(H lo) = (lo, Hess H) + 2 (dH, delta lo) + H deldel(lo)",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          JTensor Hlo(v.n, 2, s.lo.at(0, 0));
          for (int i = 0; i < v.n; ++i)
            for (int j = 0; j < v.n; ++j) Hlo.at(i, j) = s.H * s.lo.at(i, j);
          lhs.add(s.divdiv(Hlo).value());
          rhs.add(dalg::ip2(v.hinv, v.lo, v.hessH));
          DTensor divlo = value_of(s.div_sym2(s.lo));
          rhs.add(2.0 * dalg::ip1(v.hinv, v.dH, divlo));
          rhs.add(v.H * s.divdiv(s.lo).value());
          return from_sides(lhs, rhs);
        });

    add("van_term", IdentityScope::N3,
        "-(Ric00)^2 - (G, Ric) + 2|G|^2 + 2 Ric00 J-bar = 2 (P-bar, W-hat) + 2 |W-hat|^2",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          Acc lhs, rhs;
          lhs.add(-v.ric00 * v.ric00);
          lhs.add(-dalg::ip2(v.hinv, v.gbar, v.ric_pull));
          lhs.add(2.0 * dalg::ip2(v.hinv, v.gbar, v.gbar));
          lhs.add(2.0 * v.ric00 * v.jbar);
          rhs.add(2.0 * dalg::ip2(v.hinv, v.p_pull, v.what));
          rhs.add(2.0 * v.norm_what2);
          return from_sides(lhs, rhs);
        });

    add("help2", IdentityScope::N3,
        "(L, Ric-bar) = (lo, Ric-bar) + 6 H J-bar - H Ric-bar_{00} and its square form",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          Acc lhs1, rhs1;
          lhs1.add(dalg::ip2(v.hinv, v.L, v.ric_pull));
          rhs1.add(dalg::ip2(v.hinv, v.lo, v.ric_pull));
          rhs1.add(6.0 * v.H * v.jbar);
          rhs1.add(-v.H * v.ric00);
          IdentityResidual r1 = from_sides(lhs1, rhs1);
          Acc lhs2, rhs2;
          double normL2 = dalg::ip2(v.hinv, v.L, v.L);
          DTensor L2 = dalg::mul2(v.hinv, v.L, v.L);
          lhs2.add(normL2 * v.ric00);
          lhs2.add(-dalg::ip2(v.hinv, L2, v.ric_pull));
          rhs2.add(v.normlo2 * v.ric00);
          rhs2.add(-dalg::ip2(v.hinv, v.lo2, v.ric_pull));
          rhs2.add(-2.0 * v.H * dalg::ip2(v.hinv, v.lo, v.ric_pull));
          rhs2.add(4.0 * v.H * v.H * v.ric00);
          rhs2.add(-6.0 * v.H * v.H * v.jbar);
          IdentityResidual r2 = from_sides(lhs2, rhs2);
          IdentityResidual out;
          out.raw = std::max(r1.raw, r2.raw);
          out.scale = std::max(r1.scale, r2.scale);
          out.vacuous = r1.vacuous && r2.vacuous;
          return out;
        });

    add("fh", IdentityScope::N3,
        "6 (lo^2, P) - 2 |lo|^2 J = 6 H tr(lo^3) - |lo|^4 + 6 (lo^2, P-bar) - ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          Acc lhs, rhs;
          lhs.add(6.0 * dalg::ip2(v.hinv, v.lo2, v.P));
          lhs.add(-2.0 * v.normlo2 * v.J);
          rhs.add(6.0 * v.H * v.trlo3);
          rhs.add(-v.normlo2 * v.normlo2);
          rhs.add(6.0 * dalg::ip2(v.hinv, v.lo2, v.p_pull));
          rhs.add(-2.0 * v.normlo2 * v.jbar);
          rhs.add(2.0 * v.normlo2 * v.p00);
          rhs.add(-6.0 * dalg::ip2(v.hinv, v.lo2, v.what));
          return from_sides(lhs, rhs);
        });

    add("lw_t", IdentityScope::N3,
        "lo^{ij} nabla-bar^k W_{ikj0} = lo^{ij} nabla^k W_{ikj0} + (lo^2, W-hat) - ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          DTensor lo_up = v.lo_up();
          double barred = 0;
          for (int i = 0; i < v.n; ++i)
            for (int j = 0; j < v.n; ++j)
              for (int k = 0; k < v.n; ++k)
                for (int l = 0; l < v.n; ++l)
                  barred += lo_up.at(i, j) * v.hinv.at(k, l) *
                            s.amb.nabla_weyl_frame.at(l + 1, i + 1, k + 1, j + 1, 0);
          lhs.add(barred);
          rhs.add(dalg::ip2(v.hinv, v.lo, v.div_w0_second_slot()));
          rhs.add(dalg::ip2(v.hinv, v.lo2, v.what));
          rhs.add(-3.0 * v.H * dalg::ip2(v.hinv, v.lo, v.what));
          DTensor weyl_t = value_of(s.weyl_tang);
          double lolow = 0;
          for (int a = 0; a < v.n; ++a)
            for (int b = 0; b < v.n; ++b)
              for (int c = 0; c < v.n; ++c)
                for (int d = 0; d < v.n; ++d)
                  lolow += lo_up.at(a, b) * lo_up.at(c, d) * weyl_t.at(c, a, b, d);
          rhs.add(lolow);
          return from_sides(lhs, rhs);
        });

    add("hl1", IdentityScope::N3,
        "(lo, nabla-bar_0 Ric-bar) + 2 lo nabla-bar_0 W = 2 lo nabla-bar_0 R and the G-split",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          DTensor lo_up = v.lo_up();
          Acc lhs1, rhs1;
          double lo_d0ric = 0;
          for (int i = 0; i < v.n; ++i)
            for (int j = 0; j < v.n; ++j)
              lo_d0ric += lo_up.at(i, j) * s.amb.nabla_ric_frame.at(0, i + 1, j + 1);
          lhs1.add(lo_d0ric);
          lhs1.add(2.0 * dalg::ip2(v.hinv, v.lo, v.d0W));
          rhs1.add(2.0 * dalg::ip2(v.hinv, v.lo, v.d0R));
          IdentityResidual r1 = from_sides(lhs1, rhs1);
          Acc lhs2, rhs2;
          lhs2.add(dalg::ip2(v.hinv, v.lo, v.ric_pull));
          lhs2.add(2.0 * dalg::ip2(v.hinv, v.lo, v.what));
          rhs2.add(2.0 * dalg::ip2(v.hinv, v.lo, v.gbar));
          IdentityResidual r2 = from_sides(lhs2, rhs2);
          IdentityResidual out;
          out.raw = std::max(r1.raw, r2.raw);
          out.scale = std::max(r1.scale, r2.scale);
          out.vacuous = r1.vacuous && r2.vacuous;
          return out;
        });

    add("bach_deco", IdentityScope::N3,
        "(lo, B) = lo nabla-bar^0 W_{0ij0} + 2H (lo, W-hat) - 2 lo nabla^k W_{jki0} - ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          DTensor B = bach_tensor(s);
          lhs.add(dalg::ip2(v.hinv, v.lo, B));
          rhs.add(dalg::ip2(v.hinv, v.lo, v.d0W));
          rhs.add(2.0 * v.H * dalg::ip2(v.hinv, v.lo, v.what));
          rhs.add(-2.0 * dalg::ip2(v.hinv, v.lo, v.div_w0_second_slot()));
          rhs.add(-dalg::ip2(v.hinv, v.lo2, v.what));
          DTensor weyl_t = value_of(s.weyl_tang);
          DTensor lo_up = v.lo_up();
          double lolow = 0;
          for (int a = 0; a < v.n; ++a)
            for (int b = 0; b < v.n; ++b)
              for (int c = 0; c < v.n; ++c)
                for (int d = 0; d < v.n; ++d)
                  lolow += lo_up.at(a, b) * lo_up.at(c, d) * weyl_t.at(c, a, b, d);
          rhs.add(-lolow);
          return from_sides(lhs, rhs);
        });

    add("gauss_J", IdentityScope::N3,
        "J-bar - P-bar_{00} - J = |lo|^2/4 - 3/2 H^2",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          Acc lhs, rhs;
          lhs.add(v.jbar);
          lhs.add(-v.p00);
          lhs.add(-v.J);
          rhs.add(0.25 * v.normlo2);
          rhs.add(-1.5 * v.H * v.H);
          return from_sides(lhs, rhs);
        });

    add("trace_id", IdentityScope::N3, "|lo|^4 = 2 tr(lo^4)",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          Acc lhs, rhs;
          lhs.add(v.normlo2 * v.normlo2);
          DTensor lo3 = dalg::mul2(v.hinv, v.lo2, v.lo);
          double trlo4 = dalg::tr2(v.hinv, dalg::mul2(v.hinv, lo3, v.lo));
          rhs.add(2.0 * trlo4);
          return from_sides(lhs, rhs);
        });

    add("surprise", IdentityScope::N3,
        "delta(nabla-bar_0 Ric-bar_0) = 2 Delta(P-bar_{00}) + Delta(|lo|^2) - 2 Delta(H^2) - ...",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          Acc lhs, rhs;
          lhs.add(s.div_form(s.d0ric0_pull).value());
          rhs.add(2.0 * s.lap(s.p00_pull).value());
          rhs.add(s.lap(v.normlo2_jet()).value());
          rhs.add(-2.0 * s.lap(s.H * s.H).value());
          {  // -3 delta(H Ric-bar_0)
            JTensor om(v.n, 1, s.ric0_pull.at(0));
            for (int i = 0; i < v.n; ++i) om.at(i) = s.H * s.ric0_pull.at(i);
            rhs.add(-3.0 * s.div_form(om).value());
          }
          {  // - delta((L Ric-bar)_0)
            JTensor om(v.n, 1, s.ric0_pull.at(0));
            for (int i = 0; i < v.n; ++i) {
              Jet acc(s.L.at(0, 0).arity(), s.L.at(0, 0).order(),
                      s.L.at(0, 0).base_point());
              for (int k = 0; k < v.n; ++k)
                for (int l = 0; l < v.n; ++l)
                  acc += s.L.at(i, k) * s.h_inv.at(k, l) * s.ric0_pull.at(l);
              om.at(i) = acc;
            }
            rhs.add(-s.div_form(om).value());
          }
          JTensor Hlo(v.n, 2, s.lo.at(0, 0));
          for (int i = 0; i < v.n; ++i)
            for (int j = 0; j < v.n; ++j) Hlo.at(i, j) = s.H * s.lo.at(i, j);
          rhs.add(2.0 * s.divdiv(Hlo).value());
          rhs.add(-2.0 * s.divdiv(v.lo2_jets()).value());
          rhs.add(-2.0 * s.divdiv(s.w_hat).value());
          return from_sides(lhs, rhs);
        });

    add("surp2_einstein", IdentityScope::Einstein,
        "-2 lo nabla^k W_{kij0} + |W0|^2 - 2 deldel(W-hat) = 0 (Einstein)",
        [](const GeometryPoint& gp) {
          SV v(gp.surf());
          const SurfaceStack& s = v.s;
          if (v.n != 3) throw ScopeError("surp2_einstein needs n = 3");
          Acc lhs, rhs;
          lhs.add(-2.0 * dalg::ip2(v.hinv, v.lo, v.div_w0_first_slot()));
          lhs.add(v.norm_w02);
          lhs.add(-2.0 * s.divdiv(s.w_hat).value());
          return from_sides(lhs, rhs);
        });

    add("star_equiv", IdentityScope::N3,
        "star via the GGHW terms equals its rewritten display",
        [](const GeometryPoint& gp) {
          StarValues sv = star_values(gp);
          Acc lhs, rhs;
          lhs.add(sv.gghw_terms);
          rhs.add(sv.rewritten);
          return from_sides(lhs, rhs);
        });

    return c;
  }();
  return catalog;
}

std::pair<double, double> new3a_sign_residuals(const GeometryPoint& gp) {
  // Residuals of the NEW3a display with the |W0|^2 term carrying the paper's
  // sign (first) and the opposite sign from earlier literature (second).
  SV v(gp.surf());
  const SurfaceStack& s = gp.surf();
  double lhs = s.divdiv(v.lo2tf_jets()).value() + dalg::ip2(v.hinv, v.P, v.lo2tf);
  double common = 2.0 / 3.0 * dalg::ip2(v.hinv, v.lo, value_of(s.lap_tensor2(s.lo))) +
                  norm_grad_lo2(v) / 3.0;
  DTensor divlo = value_of(s.div_sym2(s.lo));
  common += 0.5 * dalg::ip1(v.hinv, divlo, divlo);
  common += -2.0 / 3.0 * v.J * v.normlo2;
  common += 4.0 / 3.0 * dalg::ip2(v.hinv, v.lo, v.div_w0_first_slot());
  double paper = common - 0.5 * v.norm_w02;
  double flipped = common + 0.5 * v.norm_w02;
  return {std::abs(lhs - paper), std::abs(lhs - flipped)};
}

bool identity_in_scope(const IdentityCatalogEntry& entry, const Scenario& s) {
  const int n = s.n();
  switch (entry.scope) {
    case IdentityScope::All:
      return true;
    case IdentityScope::Flat:
      // The flat-scoped displays of the catalog are stated for n = 3.
      return s.has_tag("flat") && (entry.id == "simons_flat" || n == 3);
    case IdentityScope::ConformallyFlat:
      return s.has_tag("conformally_flat") && n == 3;
    case IdentityScope::Einstein:
      return s.has_tag("einstein") && n == 3;
    case IdentityScope::N2:
      return n == 2;
    case IdentityScope::N3:
      return n == 3;
  }
  return false;
}

IdentityRunResult run_identity(const IdentityCatalogEntry& entry, const GeometryPoint& gp,
                               double tol) {
  IdentityRunResult row;
  row.identity_id = entry.id;
  row.scenario_id = gp.scenario().id;
  row.point = gp.x0();
  if (!identity_in_scope(entry, gp.scenario())) {
    row.status = "skipped";
    row.skip_reason = "scenario outside the identity's scope";
    return row;
  }
  try {
    IdentityResidual r = entry.eval(gp);
    row.raw_residual = r.raw;
    row.normalized_residual = r.normalized();
    if (r.vacuous)
      row.status = "vacuous";
    else
      row.status = (row.normalized_residual <= tol) ? "pass" : "fail";
  } catch (const ScopeError& e) {
    row.status = "skipped";
    row.skip_reason = e.what();
  }
  return row;
}

IdentitySuiteReport run_identity_suite(const std::vector<Scenario>& scenarios, double tol,
                                       int order) {
  IdentitySuiteReport rep;
  for (const Scenario& sc : scenarios) {
    for (const auto& pt : sc.points) {
      GeometryPoint gp(sc, pt, order);
      for (const auto& entry : identity_catalog()) {
        if (!identity_in_scope(entry, sc)) continue;
        IdentityRunResult row = run_identity(entry, gp, tol);
        if (row.status == "pass") {
          ++rep.passed;
          rep.max_normalized = std::max(rep.max_normalized, row.normalized_residual);
        } else if (row.status == "fail") {
          ++rep.failed;
          rep.max_normalized = std::max(rep.max_normalized, row.normalized_residual);
        } else if (row.status == "vacuous") {
          ++rep.vacuous;
        } else {
          ++rep.skipped;
        }
        rep.rows.push_back(std::move(row));
      }
    }
  }
  return rep;
}

}  // namespace yamabe
