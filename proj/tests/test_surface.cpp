#include <doctest.h>

#include <cmath>

#include "yamabe/scenario.hpp"
#include "yamabe/surface.hpp"

using namespace yamabe;

namespace {

double max_abs(const DTensor& t) {
  double m = 0;
  for (double v : t.c) m = std::max(m, std::abs(v));
  return m;
}

struct Common {
  DTensor h, hinv, L, lo;
  double H, normlo2, trlo3, trlo4;
  Common(const SurfaceStack& s) {
    h = value_of(s.h);
    hinv = value_of(s.h_inv);
    L = value_of(s.L);
    lo = value_of(s.lo);
    H = s.H.value();
    normlo2 = dalg::ip2(hinv, lo, lo);
    DTensor lo2 = dalg::mul2(hinv, lo, lo);
    DTensor lo3 = dalg::mul2(hinv, lo2, lo);
    DTensor lo4 = dalg::mul2(hinv, lo3, lo);
    trlo3 = dalg::tr2(hinv, lo3);
    trlo4 = dalg::tr2(hinv, lo4);
  }
};

}  // namespace

TEST_CASE("round sphere S3(rho): L = h/rho, H = 1/rho, lo = 0, scal = 6/rho^2") {
  const double rho = 2.0;
  Scenario sc = make_scenario("sphere_s3", {{"rho", rho}});
  SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[0], 6);
  Common c(s);
  CHECK(c.H == doctest::Approx(1.0 / rho).epsilon(1e-11));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(c.L.at(i, j) == doctest::Approx(c.h.at(i, j) / rho).epsilon(1e-10));
  CHECK(c.normlo2 < 1e-20);
  CHECK(s.scal_intr.value() == doctest::Approx(6.0 / (rho * rho)).epsilon(1e-10));
  // Gauss identity J = -|lo|^2/4 + 3/2 H^2 for flat backgrounds
  CHECK(s.J_intr.value() ==
        doctest::Approx(-c.normlo2 / 4 + 1.5 * c.H * c.H).epsilon(1e-10));
}

TEST_CASE("cylinder S2(a) x R: principal curvatures (1/a, 1/a, 0)") {
  const double a = 1.3;
  Scenario sc = make_scenario("cylinder_s2xr", {{"a", a}});
  SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[1], 6);
  Common c(s);
  CHECK(c.H == doctest::Approx(2.0 / (3.0 * a)).epsilon(1e-11));
  CHECK(c.normlo2 == doctest::Approx(2.0 / (3.0 * a * a)).epsilon(1e-10));
  CHECK(c.trlo3 == doctest::Approx(-2.0 / (9.0 * a * a * a)).epsilon(1e-10));
  // trace-free and trace identities
  CHECK(std::abs(dalg::tr2(c.hinv, c.lo)) < 1e-12);
  CHECK(c.normlo2 * c.normlo2 == doctest::Approx(2.0 * c.trlo4).epsilon(1e-10));
  // delta(lo) = 0: lo is parallel on the product
  DTensor divlo = value_of(s.div_sym2(s.lo));
  CHECK(max_abs(divlo) < 1e-11);
}

TEST_CASE("graph x4 = (x1^2 + 2 x2^2 + 3 x3^2)/2 at the origin: L = diag(1,2,3)") {
  Embedding e;
  e.chart_dim = 3;
  e.ambient_dim = 4;
  e.maps.push_back(parse_field("x1", 3));
  e.maps.push_back(parse_field("x2", 3));
  e.maps.push_back(parse_field("x3", 3));
  e.maps.push_back(parse_field("0.5*(x1^2 + 2*x2^2 + 3*x3^2)", 3));
  e.normal_orientation = 1.0;  // the frame construction points the normal down
  MetricField g = MetricField::flat(4);
  std::vector<double> x0{0.0, 0.0, 0.0};
  SurfaceStack s = build_surface_stack(e, g, x0, 6);
  Common c(s);
  CHECK(c.L.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.L.at(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.L.at(2, 2) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(c.L.at(0, 1)) < 1e-13);
  CHECK(c.H == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.normlo2 == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("surface invariants on a generic curved scenario") {
  Scenario sc = make_scenario("perturbed");
  for (int pi = 0; pi < 2; ++pi) {
    SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[pi], 6);
    Common c(s);
    CAPTURE(pi);

    // tr_h(lo) = 0 and nH = tr_h(L)
    CHECK(std::abs(dalg::tr2(c.hinv, c.lo)) < 1e-12);
    CHECK(dalg::tr2(c.hinv, c.L) == doctest::Approx(3.0 * c.H).epsilon(1e-12));

    // |lo|^4 = 2 tr(lo^4) for n = 3
    CHECK(c.normlo2 * c.normlo2 ==
          doctest::Approx(2.0 * c.trlo4).epsilon(1e-10));

    // Codazzi-Mainardi: nabla_j L_{ik} - nabla_i L_{jk} = R-bar_{ijk0}
    DTensor nL = value_of(s.cov(s.L));  // (a, i, j) = nabla_a L_{ij}
    DTensor r3 = value_of(s.riem_pull3);
    double scale = std::max(1.0, max_abs(nL));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double lhs = nL.at(j, i, k) - nL.at(i, j, k);
          double rhs = r3.at(i, j, k);
          CHECK(std::abs(lhs - rhs) < 1e-9 * scale);
        }

    // delta(lo) = 2 dH + 2 P-bar_0 (n = 3)
    DTensor divlo = value_of(s.div_sym2(s.lo));
    DTensor dH = value_of(s.grad_scalar(s.H));
    DTensor p0 = value_of(s.p0_pull);
    for (int i = 0; i < 3; ++i)
      CHECK(divlo.at(i) ==
            doctest::Approx(2.0 * dH.at(i) + 2.0 * p0.at(i)).epsilon(1e-9));

    // Intrinsic 3-curvature satisfies the Kulkarni-Nomizu identity (zero Weyl)
    DTensor R = value_of(s.riem);
    DTensor P = value_of(s.P_intr);
    double rscale = std::max(1.0, max_abs(R));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            double kn = P.at(i, k) * c.h.at(j, l) - P.at(j, k) * c.h.at(i, l) +
                        P.at(j, l) * c.h.at(i, k) - P.at(i, l) * c.h.at(j, k);
            CHECK(std::abs(R.at(i, j, k, l) + kn) < 1e-9 * rscale);
          }
  }
}

TEST_CASE("fialkov tensor identity") {
  SUBCASE("flat background, generic hypersurface") {
    Scenario sc = make_scenario("graph_flat");
    SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[0], 6);
    FialkovResult f = fialkov(s);
    CHECK(f.residual < 1e-10);
  }
  SUBCASE("round sphere: F = 0") {
    Scenario sc = make_scenario("sphere_s3");
    SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[0], 6);
    FialkovResult f = fialkov(s);
    CHECK(max_abs(f.F) < 1e-11);
    CHECK(f.residual < 1e-11);
  }
  SUBCASE("generic curved scenario") {
    Scenario sc = make_scenario("perturbed");
    SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[3], 6);
    FialkovResult f = fialkov(s);
    CHECK(f.residual < 1e-9);
  }
}

TEST_CASE("tangential operator anchors") {
  Scenario sc = make_scenario("plane_r4");
  SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[0], 6);
  // Laplacian sign convention: delta(d f) = sum of second partials on flat charts
  Jet f = lift(parse_field("x1^2", 3), sc.points[0], 6);
  CHECK(s.lap(f).value() == doctest::Approx(2.0));
}

TEST_CASE("insufficient jet order raises an order-budget error") {
  Scenario sc = make_scenario("graph_flat");
  SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[0], 4);
  // L has order 2; four covariant derivatives cannot fit
  CHECK_THROWS_AS(s.cov(s.cov(s.cov(s.lo))), OrderError);
}

TEST_CASE("n=2 surfaces: tr(lo^3) = 0 and the Willmore-equation rewrite") {
  Scenario sc = make_scenario("graph_flat_n2");
  SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[0], 6);
  Common c(s);
  CHECK(std::abs(c.trlo3) < 1e-12);
  // n=2 flat ambient: |lo|^2 = 2(H^2 - K) with K the Gauss curvature (= J)
  double K = s.J_intr.value();
  CHECK(c.normlo2 == doctest::Approx(2.0 * (c.H * c.H - K)).epsilon(1e-10));
}

TEST_CASE("umbilic scenario really is umbilic with active Weyl") {
  Scenario sc = make_scenario("umbilic_reflect");
  SurfaceStack s = build_surface_stack(sc.embedding, sc.metric, sc.points[0], 6);
  Common c(s);
  CHECK(max_abs(c.L) < 1e-12);
  CHECK(std::abs(c.H) < 1e-13);
  CHECK(max_abs(value_of(s.w_hat)) > 1e-6);
}

TEST_CASE("surface parity under normal flip") {
  Scenario sc = make_scenario("perturbed");
  Embedding flipped = sc.embedding;
  flipped.normal_orientation = -sc.embedding.normal_orientation;
  SurfaceStack s1 = build_surface_stack(sc.embedding, sc.metric, sc.points[0], 6);
  SurfaceStack s2 = build_surface_stack(flipped, sc.metric, sc.points[0], 6);
  Common c1(s1), c2(s2);
  CHECK(c1.H == doctest::Approx(-c2.H).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(c1.L.at(i, j) == doctest::Approx(-c2.L.at(i, j)).epsilon(1e-12));
      CHECK(c1.h.at(i, j) == doctest::Approx(c2.h.at(i, j)).epsilon(1e-13));
    }
  CHECK(c1.normlo2 == doctest::Approx(c2.normlo2).epsilon(1e-12));
  CHECK(c1.H * c1.trlo3 == doctest::Approx(c2.H * c2.trlo3).epsilon(1e-12));
}
