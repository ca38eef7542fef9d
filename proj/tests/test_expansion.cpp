#include <doctest.h>

#include <cmath>

#include "yamabe/expansion.hpp"
#include "yamabe/scenario.hpp"

using namespace yamabe;

namespace {

double max_abs(const DTensor& t) {
  double m = 0;
  for (double v : t.c) m = std::max(m, std::abs(v));
  return m;
}

double max_diff(const DTensor& a, const DTensor& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
  return m;
}

struct Built {
  SurfaceStack s;
  GeodesicFlow flow;
  Built(const Scenario& sc, int point_index, int order = 6)
      : s(build_surface_stack(sc.embedding, sc.metric, sc.points[point_index], order)),
        flow(geodesic_normal_flow(s, sc.metric, order + 1)) {}
};

}  // namespace

TEST_CASE("geodesic flow satisfies the Gauss lemma gauge") {
  for (const char* name : {"graph_flat", "perturbed", "s4_round", "conf_flat"}) {
    Scenario sc = make_scenario(name);
    Built b(sc, 0);
    INFO(name);
    CHECK(b.flow.gauge_residual < 1e-9);
  }
}

TEST_CASE("flat background: h1 = 2L, h2 = L^2, h3 = 0, tr h4 = 0") {
  Scenario sc = make_scenario("graph_flat");
  Built b(sc, 1);
  HCoefficients hc = h_coefficients(b.s, b.flow);
  DTensor hinv = value_of(b.s.h_inv);
  DTensor L = value_of(b.s.L);
  DTensor L2 = dalg::mul2(hinv, L, L);
  double scale = std::max(1.0, max_abs(L));
  CHECK(max_diff(hc.h1, hc.h1_flow) < 1e-10 * scale);
  CHECK(max_diff(hc.h2, hc.h2_flow) < 1e-9 * scale);
  CHECK(max_diff(hc.h3, hc.h3_flow) < 1e-9 * scale);
  CHECK(max_diff(hc.h2, L2) < 1e-10 * scale);
  CHECK(max_abs(hc.h3) < 1e-10);
  CHECK(std::abs(hc.tr_h4) < 1e-10);
  // flow h4 trace agrees
  double tr_h4_flow = dalg::tr2(hinv, hc.h4_flow);
  CHECK(std::abs(tr_h4_flow) < 1e-9);
}

TEST_CASE("curved background: formula h-coefficients match the geodesic flow") {
  for (const char* name : {"perturbed", "s4_round", "conf_flat"}) {
    Scenario sc = make_scenario(name);
    Built b(sc, 2);
    HCoefficients hc = h_coefficients(b.s, b.flow);
    INFO(name);
    double scale = 1.0 + max_abs(hc.h2);
    CHECK(max_diff(hc.h1, hc.h1_flow) < 1e-9 * scale);
    CHECK(max_diff(hc.h2, hc.h2_flow) < 1e-9 * scale);
    CHECK(max_diff(hc.h3, hc.h3_flow) < 1e-8 * scale);
    DTensor hinv = value_of(b.s.h_inv);
    double tr_h4_flow = dalg::tr2(hinv, hc.h4_flow);
    CHECK(hc.tr_h4 == doctest::Approx(tr_h4_flow).epsilon(1e-7));
  }
}

TEST_CASE("round sphere: h_r = (1 + r/rho)^2 h exactly") {
  const double rho = 2.0;
  Scenario sc = make_scenario("sphere_s3", {{"rho", rho}});
  Built b(sc, 0);
  HCoefficients hc = h_coefficients(b.s, b.flow);
  DTensor h = value_of(b.s.h);
  // h2 = h / rho^2, h3 = 0
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(hc.h2.at(i, j) == doctest::Approx(h.at(i, j) / (rho * rho)).epsilon(1e-9));
  CHECK(max_abs(hc.h3) < 1e-10);
}

TEST_CASE("poincare-einstein style background: tr h4 = |P|^2 / 4") {
  // pe_like: h_r = (1 - r^2/4)^2 h with h the unit round S3, P = h/2,
  // so tr(h_(4)) = 3/16, L = 0 and G-normal = P.
  Scenario sc = make_scenario("pe_like");
  Built b(sc, 0);
  HCoefficients hc = h_coefficients(b.s, b.flow);
  CHECK(max_abs(value_of(b.s.L)) < 1e-11);
  DTensor hinv = value_of(b.s.h_inv);
  double tr_h4_flow = dalg::tr2(hinv, hc.h4_flow);
  CHECK(tr_h4_flow == doctest::Approx(3.0 / 16.0).epsilon(1e-8));
  CHECK(hc.tr_h4 == doctest::Approx(3.0 / 16.0).epsilon(1e-8));
  // G-normal equals the Schouten tensor of the slice metric (= h/2)
  DTensor h = value_of(b.s.h);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(b.s.amb.G_normal.at(i, j) == doctest::Approx(0.5 * h.at(i, j)).epsilon(1e-9));
}

TEST_CASE("normal derivatives: tensorial route equals the geodesic route") {
  Scenario sc = make_scenario("perturbed");
  Built b(sc, 3);
  const int rvar = 3;
  JetComposer comp(b.flow.phi);
  AmbientCoordJets raw = curvature_from_metric(sc.metric, b.flow.phi[0].base_point().empty()
                                                   ? std::vector<double>{}
                                                   : [&] {
                                                       std::vector<double> p(4);
                                                       for (int a = 0; a < 4; ++a)
                                                         p[a] = b.flow.phi[a].value();
                                                       return p;
                                                     }(),
                                               6, 1);
  // Ric(d_r, d_r) along the flow
  std::vector<Jet> dphi_r;
  for (int a = 0; a < 4; ++a) dphi_r.push_back(b.flow.phi[a].partial(rvar));
  Jet ric00(4, 6, b.flow.phi[0].base_point());
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) {
      Jet rr = comp.apply(raw.ricci.at(a, c));
      if (rr.is_zero()) continue;
      ric00 += rr * dphi_r[a] * dphi_r[c];
    }
  CHECK(ric00.var_coefficient(rvar, 1).value() ==
        doctest::Approx(b.s.amb.d0_ric00).epsilon(1e-9));
  CHECK(2.0 * ric00.var_coefficient(rvar, 2).value() ==
        doctest::Approx(b.s.amb.d0d0_ric00).epsilon(1e-8));
  // scalar curvature derivatives
  CHECK(b.flow.scalbar_along.var_coefficient(rvar, 1).value() ==
        doctest::Approx(b.s.amb.scal_p).epsilon(1e-9));
  CHECK(2.0 * b.flow.scalbar_along.var_coefficient(rvar, 2).value() ==
        doctest::Approx(b.s.amb.scal_pp).epsilon(1e-8));

  // d_r(R-bar_{0jk0}) = (nabla-bar_0 R-bar)_{0jk0} + (L G + G L)_{jk} at r = 0
  std::vector<std::vector<Jet>> dphi_x(3);
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 3; ++i) dphi_x[i].push_back(b.flow.phi[a].partial(i));
  DTensor hinv = value_of(b.s.h_inv);
  DTensor L = value_of(b.s.L);
  DTensor LG = dalg::mul2(hinv, L, b.s.amb.G_normal);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      Jet r0jk0(4, 4, b.flow.phi[0].base_point());
      for (int a = 0; a < 4; ++a)
        for (int bb = 0; bb < 4; ++bb)
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) {
              Jet rr = comp.apply(raw.riemann.at(a, bb, c, d));
              if (rr.is_zero()) continue;
              r0jk0 += rr * dphi_r[a] * dphi_x[j][bb] * dphi_x[k][c] * dphi_r[d];
            }
      double series = r0jk0.var_coefficient(rvar, 1).value();
      double formula = b.s.amb.d0_R_0ij0.at(j, k) + LG.at(j, k) + LG.at(k, j);
      CHECK(series == doctest::Approx(formula).epsilon(1e-8));
    }
}

TEST_CASE("volume coefficients: all three paths agree on curved backgrounds") {
  for (const char* name : {"perturbed", "s4_round"}) {
    Scenario sc = make_scenario(name);
    Built b(sc, 1);
    HCoefficients hc = h_coefficients(b.s, b.flow);
    VolumePaths vp = volume_coefficients(b.s, hc, b.flow);
    INFO(name);
    CHECK(vp.max_rel_mismatch < 1e-8);
    for (int k = 0; k <= 4; ++k) {
      CAPTURE(k);
      CHECK(std::abs(vp.flow_path[k] - vp.closed_path[k]) <
            1e-8 * (1.0 + std::abs(vp.closed_path[k])));
    }
  }
}

TEST_CASE("volume coefficients on exact shapes") {
  SUBCASE("sphere: v(r) = (1 + r/rho)^3") {
    const double rho = 2.0;
    Scenario sc = make_scenario("sphere_s3", {{"rho", rho}});
    Built b(sc, 0);
    VolumePaths vp = volume_coefficients(b.s, h_coefficients(b.s, b.flow), b.flow);
    CHECK(vp.closed_path[1] == doctest::Approx(3.0 / rho).epsilon(1e-10));
    CHECK(vp.closed_path[2] == doctest::Approx(3.0 / (rho * rho)).epsilon(1e-10));
    CHECK(vp.closed_path[3] == doctest::Approx(1.0 / (rho * rho * rho)).epsilon(1e-10));
    CHECK(std::abs(vp.closed_path[4]) < 1e-11);
  }
  SUBCASE("cylinder S2(a) x R: v(r) = (1 + r/a)^2") {
    const double a = 1.3;
    Scenario sc = make_scenario("cylinder_s2xr", {{"a", a}});
    Built b(sc, 1);
    VolumePaths vp = volume_coefficients(b.s, h_coefficients(b.s, b.flow), b.flow);
    CHECK(vp.closed_path[1] == doctest::Approx(2.0 / a).epsilon(1e-10));
    CHECK(vp.closed_path[2] == doctest::Approx(1.0 / (a * a)).epsilon(1e-10));
    CHECK(std::abs(vp.closed_path[3]) < 1e-11);
    CHECK(std::abs(vp.closed_path[4]) < 1e-11);
  }
  SUBCASE("n=2 cylinder S1(a) x R: v(r) = 1 + r/a") {
    const double a = 0.8;
    Scenario sc = make_scenario("cylinder_s1xr", {{"a", a}});
    Built b(sc, 0);
    VolumePaths vp = volume_coefficients(b.s, h_coefficients(b.s, b.flow), b.flow);
    CHECK(vp.closed_path[1] == doctest::Approx(1.0 / a).epsilon(1e-10));
    CHECK(std::abs(vp.closed_path[2]) < 1e-11);
    CHECK(std::abs(vp.closed_path[3]) < 1e-11);
  }
}

TEST_CASE("trace-vol identity: v'/v = tr(h_r^{-1} h_r')/2 through r^3") {
  Scenario sc = make_scenario("perturbed");
  Built b(sc, 0);
  const int rvar = 3;
  Jet lhs = b.flow.v_of_r.partial(rvar) * reciprocal(b.flow.v_of_r);
  Jet rhs(4, b.flow.h_r.at(0, 0).order() - 1, b.flow.phi[0].base_point());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rhs += 0.5 * b.flow.h_r_inv.at(i, j) * b.flow.h_r.at(i, j).partial(rvar);
  for (int k = 0; k <= 3; ++k)
    CHECK(lhs.var_coefficient(rvar, k).value() ==
          doctest::Approx(rhs.var_coefficient(rvar, k).value()).epsilon(1e-9));
}

TEST_CASE("sigma coefficients: exact values and poles") {
  SUBCASE("cylinder S2(a) x R") {
    const double a = 1.0;
    Scenario sc = make_scenario("cylinder_s2xr", {{"a", a}});
    Built b(sc, 0);
    ExpansionData e = build_expansion(b.s, sc.metric);
    CHECK(e.sigma2 == doctest::Approx(1.0 / (3 * a)).epsilon(1e-10));
    CHECK(e.sigma3 == doctest::Approx(-1.0 / (9 * a * a)).epsilon(1e-9));
    CHECK(e.sigma4 == doctest::Approx(1.0 / (27 * a * a * a)).epsilon(1e-9));
    // flat-background closed forms: sigma_F = r + r^2 H/2 - r^3 |lo|^2/(3(n-1)) + ...
    DTensor hinv = value_of(b.s.h_inv);
    DTensor lo = value_of(b.s.lo);
    double H = b.s.H.value();
    double normlo2 = dalg::ip2(hinv, lo, lo);
    CHECK(e.sigma2 == doctest::Approx(H / 2).epsilon(1e-11));
    CHECK(e.sigma3 == doctest::Approx(-normlo2 / 6.0).epsilon(1e-9));
    // oracle fields match the formula path
    CHECK(e.oracle.sigma2 == doctest::Approx(e.sigma2).epsilon(1e-9));
    CHECK(e.oracle.sigma3 == doctest::Approx(e.sigma3).epsilon(1e-9));
    CHECK(e.oracle.sigma4 == doctest::Approx(e.sigma4).epsilon(1e-9));
  }
  SUBCASE("sphere: sigma2 = 1/(2 rho), sigma3 = sigma4 = 0") {
    const double rho = 2.0;
    Scenario sc = make_scenario("sphere_s3", {{"rho", rho}});
    Built b(sc, 0);
    ExpansionData e = build_expansion(b.s, sc.metric);
    CHECK(e.sigma2 == doctest::Approx(1.0 / (2 * rho)).epsilon(1e-10));
    CHECK(std::abs(e.sigma3) < 1e-10);
    CHECK(std::abs(e.sigma4) < 1e-10);
  }
  SUBCASE("n=3 flat specialization of sigma4") {
    Scenario sc = make_scenario("graph_flat");
    Built b(sc, 0);
    ExpansionData e = build_expansion(b.s, sc.metric);
    DTensor hinv = value_of(b.s.h_inv);
    DTensor lo = value_of(b.s.lo);
    DTensor lo2 = dalg::mul2(hinv, lo, lo);
    double H = b.s.H.value();
    double normlo2 = dalg::ip2(hinv, lo, lo);
    double trlo3 = dalg::tr2(hinv, dalg::mul2(hinv, lo2, lo));
    double lapH = b.s.lap(b.s.H).value();
    double expect = (6.0 * trlo3 + 5.0 * H * normlo2 + 3.0 * lapH) / 24.0;
    CHECK(e.sigma4 == doctest::Approx(expect).epsilon(1e-8));
  }
  SUBCASE("pole guards") {
    CHECK_THROWS_AS(sigma4_of(2, 1, 1, 1, 0, 0, 0), PoleError);
    CHECK_THROWS_AS(sigma3_of(1, 1, 1, 0), PoleError);
  }
}

TEST_CASE("series consistency and the cylinder obstruction value") {
  const double a = 1.0;
  Scenario sc = make_scenario("cylinder_s2xr", {{"a", a}});
  Built b(sc, 1);
  ExpansionData e = build_expansion(b.s, sc.metric);
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(e.oracle.orders[k]) < 1e-9);
  CHECK(e.oracle.remainder == doctest::Approx(-1.0 / 27.0).epsilon(1e-9));
}

TEST_CASE("series consistency on curved scenarios") {
  for (const char* name : {"perturbed", "s4_round", "conf_flat", "umbilic_reflect"}) {
    Scenario sc = make_scenario(name);
    Built b(sc, 0);
    INFO(name);
    ScOracle o = sc_remainder_oracle(b.s, b.flow);
    for (int k = 0; k <= 3; ++k) {
      CAPTURE(k);
      CHECK(std::abs(o.orders[k]) < 1e-8);
    }
  }
}

TEST_CASE("n=2 oracle: sphere and cylinder") {
  SUBCASE("S2(rho): B2 = 0") {
    Scenario sc = make_scenario("sphere_s2", {{"rho", 1.5}});
    Built b(sc, 0);
    ScOracle o = sc_remainder_oracle(b.s, b.flow);
    CHECK(std::abs(o.remainder) < 1e-10);
  }
  SUBCASE("S1(a) x R: B2 = -1/(12 a^3)") {
    const double a = 1.0;
    Scenario sc = make_scenario("cylinder_s1xr", {{"a", a}});
    Built b(sc, 0);
    ScOracle o = sc_remainder_oracle(b.s, b.flow);
    CHECK(o.remainder == doctest::Approx(-1.0 / 12.0).epsilon(1e-9));
  }
}

TEST_CASE("residue law at n = 2") {
  for (const char* name : {"cylinder_s1xr", "perturbed_n2", "graph_flat_n2"}) {
    Scenario sc = make_scenario(name);
    Built b(sc, 0);
    INFO(name);
    ExpansionData e = build_expansion(b.s, sc.metric);
    double lap_sigma2 = 0.5 * b.s.lap(b.s.H).value();
    double res = residue_sigma4(e.v[1], e.v[2], e.v[3], b.s.amb.jbar, b.s.amb.jbar_p,
                                lap_sigma2);
    double b2 = e.oracle.remainder;
    CHECK(res == doctest::Approx(-3.0 / 8.0 * b2).epsilon(1e-8));
    if (std::string(name) == "cylinder_s1xr")
      CHECK(res == doctest::Approx(1.0 / 32.0).epsilon(1e-9));
  }
}

TEST_CASE("operator variation formulas against the flow series") {
  Scenario sc = make_scenario("perturbed");
  Built b(sc, 2);
  ScalarField u = parse_field("sin(x1) + x2^2*x3 + 0.3*x1*x3", 3);
  CHECK(delta_prime_residual(b.s, b.flow, u) < 1e-7);
  std::vector<ScalarField> omega{parse_field("x2 + 0.2*sin(x3)", 3),
                                 parse_field("x1*x3", 3),
                                 parse_field("cos(x1) + x2", 3)};
  CHECK(divergence_prime_residual(b.s, b.flow, omega) < 1e-7);
}
