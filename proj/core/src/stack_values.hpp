#pragma once

// Internal convenience cache of SurfaceStack point values shared by the
// formula and identity translation units. Not installed.

#include "yamabe/surface.hpp"

namespace yamabe::internal {

struct SV {
  const SurfaceStack& s;
  int n;
  DTensor h, hinv, L, lo, lo2, lo2tf, what, w0, gbar, ric_pull, ric0, p_pull, p0,
      d0R, d0W;
  DTensor P;  // intrinsic Schouten (n = 3)
  double H, J, jbar, jbar_p, jbar_pp, ric00, p00, normlo2, trlo3, scal_p, scal_pp,
      d0_ric00, d0d0_ric00;
  DTensor dH, hessH;
  double lapH, norm_dH2, norm_what2, norm_w02;

  explicit SV(const SurfaceStack& s_) : s(s_), n(s_.n) {
    h = value_of(s.h);
    hinv = value_of(s.h_inv);
    L = value_of(s.L);
    lo = value_of(s.lo);
    lo2 = dalg::mul2(hinv, lo, lo);
    normlo2 = dalg::ip2(hinv, lo, lo);
    trlo3 = dalg::tr2(hinv, dalg::mul2(hinv, lo2, lo));
    lo2tf = lo2;
    double tr_lo2 = dalg::tr2(hinv, lo2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lo2tf.at(i, j) -= tr_lo2 / n * h.at(i, j);
    what = value_of(s.w_hat);
    w0 = value_of(s.w0);
    gbar = value_of(s.gbar_pull);
    ric_pull = value_of(s.ric_pull);
    ric0 = value_of(s.ric0_pull);
    p_pull = value_of(s.p_pull);
    p0 = value_of(s.p0_pull);
    if (n == 3) P = value_of(s.P_intr);
    d0R = s.amb.d0_R_0ij0;
    d0W = s.amb.d0_W_0ij0;
    H = s.H.value();
    J = s.J_intr.value();
    jbar = s.amb.jbar;
    jbar_p = s.amb.jbar_p;
    jbar_pp = s.amb.jbar_pp;
    ric00 = s.amb.ric00;
    p00 = s.amb.p00;
    scal_p = s.amb.scal_p;
    scal_pp = s.amb.scal_pp;
    d0_ric00 = s.amb.d0_ric00;
    d0d0_ric00 = s.amb.d0d0_ric00;
    dH = value_of(s.grad_scalar(s.H));
    hessH = value_of(s.hess(s.H));
    lapH = dalg::tr2(hinv, hessH);
    norm_dH2 = dalg::ip1(hinv, dH, dH);
    norm_what2 = dalg::ip2(hinv, what, what);
    norm_w02 = dalg::ip3(hinv, w0, w0);
  }

  JTensor lo2_jets() const { return s.mul2(s.lo, s.lo); }

  JTensor lo2tf_jets() const {
    JTensor lo2j = lo2_jets();
    Jet tr = s.tr2(lo2j);
    JTensor out = lo2j;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.at(i, j) -= (1.0 / n) * tr * s.h.at(i, j);
    return out;
  }

  Jet normlo2_jet() const { return s.ip2(s.lo, s.lo); }

  /// nabla^k W-bar_{k i j 0} (derivative contracted into the first W0 slot).
  DTensor div_w0_first_slot() const {
    DTensor nw0 = value_of(s.cov(s.w0));  // (a; k, i, j)
    DTensor out(n, 2, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int a = 0; a < n; ++a)
          for (int k = 0; k < n; ++k) acc += hinv.at(a, k) * nw0.at(a, k, i, j);
        out.at(i, j) = acc;
      }
    return out;
  }

  /// nabla^k W-bar_{i k j 0} (second slot).
  DTensor div_w0_second_slot() const {
    DTensor nw0 = value_of(s.cov(s.w0));
    DTensor out(n, 2, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int a = 0; a < n; ++a)
          for (int k = 0; k < n; ++k) acc += hinv.at(a, k) * nw0.at(a, i, k, j);
        out.at(i, j) = acc;
      }
    return out;
  }

  /// Raised lo^{ij}.
  DTensor lo_up() const {
    DTensor out(n, 2, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) acc += hinv.at(i, a) * hinv.at(j, b) * lo.at(a, b);
        out.at(i, j) = acc;
      }
    return out;
  }
};

}  // namespace yamabe::internal
