#include <doctest.h>

#include <cmath>
#include <random>

#include "yamabe/expr.hpp"
#include "yamabe/jet.hpp"

using namespace yamabe;

namespace {

MultiIndex mi(std::initializer_list<int> xs) {
  MultiIndex m{};
  int i = 0;
  for (int x : xs) m[i++] = static_cast<std::uint8_t>(x);
  return m;
}

Jet seed(int arity, int order, std::vector<double> base, int var) {
  return Jet::variable(arity, order, std::move(base), var);
}

}  // namespace

TEST_CASE("lift of x1^2 at the origin") {
  ScalarField f = parse_field("x1^2", 3);
  Jet j = lift(f, std::vector<double>{0, 0, 0}, 2);
  CHECK(j.coeff(mi({0, 0, 0})) == 0.0);
  CHECK(j.coeff(mi({1, 0, 0})) == 0.0);
  CHECK(j.coeff(mi({2, 0, 0})) == 1.0);
  CHECK(j.coeff(mi({1, 1, 0})) == 0.0);
}

TEST_CASE("lift of sin x1 at the origin carries the sine series") {
  ScalarField f = parse_field("sin(x1)", 3);
  Jet j = lift(f, std::vector<double>{0, 0, 0}, 3);
  CHECK(j.coeff(mi({0, 0, 0})) == doctest::Approx(0.0));
  CHECK(j.coeff(mi({1, 0, 0})) == doctest::Approx(1.0));
  CHECK(j.coeff(mi({2, 0, 0})) == doctest::Approx(0.0));
  CHECK(j.coeff(mi({3, 0, 0})) == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("lift of exp(x1*x2): coefficient of x1^2 x2^2 is 1/2") {
  // exp(u) = 1 + u + u^2/2 + ... with u = x1*x2 gives the (2,2) coefficient 1/2.
  ScalarField f = parse_field("exp(x1*x2)", 2);
  Jet j = lift(f, std::vector<double>{0, 0}, 4);
  CHECK(j.coeff(mi({2, 2})) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(j.coeff(mi({1, 1})) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(j.coeff(mi({0, 0})) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("degree-0 evaluation reproduces the real evaluation exactly") {
  ScalarField f = parse_field("exp(x1)*sin(x2) + x3^3/(1+x1^2)", 3);
  std::vector<double> p{0.3, -0.7, 1.1};
  Jet j = lift(f, p, 0);
  CHECK(j.value() == f.eval(p));
}

TEST_CASE("product truncation: (1+x1)(1-x1) at order 2") {
  std::vector<double> base{0, 0, 0};
  Jet x1 = seed(3, 2, base, 0);
  Jet p = (1.0 + x1) * (1.0 - x1);
  CHECK(p.coeff(mi({0, 0, 0})) == 1.0);
  CHECK(p.coeff(mi({1, 0, 0})) == 0.0);
  CHECK(p.coeff(mi({2, 0, 0})) == -1.0);
}

TEST_CASE("geometric series: 1/(1-x1) at order 3") {
  std::vector<double> base{0.0};
  Jet x1 = seed(1, 3, base, 0);
  Jet q = 1.0 / (1.0 - x1);
  CHECK(q.coeff(mi({0})) == doctest::Approx(1.0));
  CHECK(q.coeff(mi({1})) == doctest::Approx(1.0));
  CHECK(q.coeff(mi({2})) == doctest::Approx(1.0));
  CHECK(q.coeff(mi({3})) == doctest::Approx(1.0));
}

TEST_CASE("binomial series: sqrt(1+2x1) at order 2") {
  std::vector<double> base{0.0};
  Jet x1 = seed(1, 2, base, 0);
  Jet s = sqrt(1.0 + 2.0 * x1);
  CHECK(s.coeff(mi({0})) == doctest::Approx(1.0));
  CHECK(s.coeff(mi({1})) == doctest::Approx(1.0));
  CHECK(s.coeff(mi({2})) == doctest::Approx(-0.5));
}

TEST_CASE("partial derivative bookkeeping") {
  std::vector<double> base{0, 0, 0};
  SUBCASE("d/dx1 of x1^2 is 2 x1") {
    Jet j = pow_int(seed(3, 4, base, 0), 2);
    Jet d = j.partial(0);
    CHECK(d.order() == 3);
    CHECK(d.coeff(mi({1, 0, 0})) == 2.0);
    CHECK(d.coeff(mi({0, 0, 0})) == 0.0);
  }
  SUBCASE("d/dx2 of x1 x2 is x1") {
    Jet j = seed(3, 3, base, 0) * seed(3, 3, base, 1);
    Jet d = j.partial(1);
    CHECK(d.coeff(mi({1, 0, 0})) == 1.0);
    CHECK(d.coeff(mi({0, 1, 0})) == 0.0);
  }
  SUBCASE("d/dx1 of sin x1 is the cosine truncation") {
    Jet j = sin(seed(3, 3, base, 0));
    Jet d = j.partial(0);
    CHECK(d.coeff(mi({0, 0, 0})) == doctest::Approx(1.0));
    CHECK(d.coeff(mi({2, 0, 0})) == doctest::Approx(-0.5));
  }
  SUBCASE("order-0 jets cannot be differentiated") {
    Jet j = Jet::constant(3, 0, base, 1.0);
    CHECK_THROWS_AS(j.partial(0), OrderError);
  }
}

TEST_CASE("singular jets are rejected") {
  std::vector<double> base{0.0};
  Jet x1 = seed(1, 3, base, 0);
  CHECK_THROWS_AS(reciprocal(x1), SingularJetError);
  CHECK_THROWS_AS(sqrt(x1 - 1.0), SingularJetError);
  CHECK_THROWS_AS(log(x1), SingularJetError);
}

TEST_CASE("evaluation errors name the subexpression") {
  ScalarField f = parse_field("1/(x1 - 1)", 1);
  std::vector<double> p{1.0};
  CHECK_THROWS_WITH_AS(lift(f, p, 2), doctest::Contains("(x1 - 1)"), EvalError);
}

TEST_CASE("random polynomials of degree <= 4 lift exactly") {
  std::mt19937_64 rng(20240817);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_real_distribution<double> pt(-0.8, 0.8);
  for (int trial = 0; trial < 20; ++trial) {
    // random trivariate polynomial sum of c * x1^a x2^b x3^c with a+b+c <= 4
    std::vector<std::array<int, 4>> terms;
    ExprPtr root = Expr::constant(0.0);
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b)
        for (int c = 0; a + b + c <= 4; ++c) {
          int cv = coef(rng);
          if (cv == 0) continue;
          terms.push_back({a, b, c, cv});
          ExprPtr t = Expr::constant(cv);
          if (a) t = Expr::mul(t, Expr::pow(Expr::var(0), a));
          if (b) t = Expr::mul(t, Expr::pow(Expr::var(1), b));
          if (c) t = Expr::mul(t, Expr::pow(Expr::var(2), c));
          root = Expr::add(root, t);
        }
    ScalarField f{3, root};
    std::vector<double> base{pt(rng), pt(rng), pt(rng)};
    Jet j = lift(f, base, 6);
    // Analytic expansion: shift each monomial by the base point.
    auto binom = [](int n, int k) {
      double r = 1;
      for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
      return r;
    };
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b)
        for (int c = 0; a + b + c <= 4; ++c) {
          double expect = 0.0;
          for (auto& t : terms) {
            if (t[0] < a || t[1] < b || t[2] < c) continue;
            expect += t[3] * binom(t[0], a) * std::pow(base[0], t[0] - a) *
                      binom(t[1], b) * std::pow(base[1], t[1] - b) * binom(t[2], c) *
                      std::pow(base[2], t[2] - c);
          }
          double got = j.coeff(mi({a, b, c}));
          CHECK(got == doctest::Approx(expect).epsilon(1e-14));
        }
  }
}

TEST_CASE("differentiation commutes") {
  ScalarField f = parse_field("exp(x1*x2)*sin(x3) + x1^3*x2", 3);
  std::vector<double> base{0.2, -0.4, 0.5};
  Jet j = lift(f, base, 6);
  Jet d12 = j.partial(0).partial(1);
  Jet d21 = j.partial(1).partial(0);
  for (int i = 0; i < d12.table().count(); ++i)
    CHECK(d12.coeff_raw(i) == doctest::Approx(d21.coeff_raw(i)).epsilon(1e-13));
}

TEST_CASE("Leibniz rule after truncation alignment") {
  ScalarField fa = parse_field("sin(x1)*x2 + x3^2", 3);
  ScalarField fb = parse_field("exp(x2)*cos(x3) + x1", 3);
  std::vector<double> base{0.1, 0.3, -0.2};
  Jet a = lift(fa, base, 6);
  Jet b = lift(fb, base, 6);
  Jet lhs = (a * b).partial(0);
  Jet rhs = a.partial(0) * b + a * b.partial(0);
  for (int i = 0; i < lhs.table().count(); ++i)
    CHECK(lhs.coeff_raw(i) == doctest::Approx(rhs.coeff_raw(i)).epsilon(1e-13));
}

TEST_CASE("integration inverts differentiation and raises the order") {
  ScalarField f = parse_field("x1^2*x2 + sin(x2)", 2);
  std::vector<double> base{0.0, 0.0};
  Jet j = lift(f, base, 5);
  Jet roundtrip = j.partial(0).integrate(0);
  CHECK(roundtrip.order() == 5);
  // agrees with j except for the x1-free terms killed by d/dx1
  CHECK(roundtrip.coeff(mi({2, 1})) == doctest::Approx(1.0));
  CHECK(roundtrip.coeff(mi({0, 1})) == 0.0);
}

TEST_CASE("composition evaluates polynomials at jet arguments") {
  // outer(u, v) = u^2 + 3 v around (1, 2); args u = 1 + x1, v = 2 + x1*x2.
  std::vector<double> inner_base{0.0, 0.0};
  Jet x1 = seed(2, 4, inner_base, 0);
  Jet x2 = seed(2, 4, inner_base, 1);
  Jet u = 1.0 + x1;
  Jet v = 2.0 + x1 * x2;
  ScalarField outer = parse_field("x1^2 + 3*x2", 2);
  Jet out = compose(lift(outer, std::vector<double>{1.0, 2.0}, 4), std::vector<Jet>{u, v});
  // (1+x1)^2 + 3(2 + x1 x2) = 7 + 2 x1 + x1^2 + 3 x1 x2
  CHECK(out.coeff(mi({0, 0})) == doctest::Approx(7.0));
  CHECK(out.coeff(mi({1, 0})) == doctest::Approx(2.0));
  CHECK(out.coeff(mi({2, 0})) == doctest::Approx(1.0));
  CHECK(out.coeff(mi({1, 1})) == doctest::Approx(3.0));
}

TEST_CASE("composition against analytic outer matches direct evaluation") {
  // f(y) = exp(y1)*sin(y2): compose its jet with y = (x1+x2^2, x1*x2) around 0
  ScalarField f = parse_field("exp(x1)*sin(x2)", 2);
  std::vector<double> inner_base{0.25, -0.35};
  Jet x1 = seed(2, 6, inner_base, 0);
  Jet x2 = seed(2, 6, inner_base, 1);
  Jet y1 = x1 + pow_int(x2, 2);
  Jet y2 = x1 * x2;
  Jet outer = lift(f, std::vector<double>{y1.value(), y2.value()}, 6);
  Jet composed = compose(outer, std::vector<Jet>{y1, y2});
  // Direct: evaluate the tree on the inner jets.
  Jet direct = f.eval(std::vector<Jet>{y1, y2});
  for (int i = 0; i < composed.table().count(); ++i)
    CHECK(composed.coeff_raw(i) == doctest::Approx(direct.coeff_raw(i)).epsilon(1e-12));
}

TEST_CASE("var_coefficient extracts r-series coefficient fields") {
  // f(x1, x2, r) = (x1 + 2 x2 r + 3 r^2) -> r-coefficients
  std::vector<double> base{0.4, 0.6, 0.0};
  Jet x1 = seed(3, 5, base, 0);
  Jet x2 = seed(3, 5, base, 1);
  Jet r = seed(3, 5, base, 2) - 0.0;
  Jet f = x1 + 2.0 * x2 * r + 3.0 * pow_int(r, 2);
  Jet c0 = f.var_coefficient(2, 0);
  Jet c1 = f.var_coefficient(2, 1);
  Jet c2 = f.var_coefficient(2, 2);
  CHECK(c0.arity() == 2);
  CHECK(c0.value() == doctest::Approx(0.4));
  CHECK(c1.coeff(mi({0, 1})) == doctest::Approx(2.0));
  CHECK(c1.value() == doctest::Approx(1.2));
  CHECK(c2.value() == doctest::Approx(3.0));
}

TEST_CASE("arity and base-point mismatches are structural errors") {
  Jet a = seed(2, 3, {0.0, 0.0}, 0);
  Jet b = seed(3, 3, {0.0, 0.0, 0.0}, 0);
  CHECK_THROWS_AS(a * b, JetError);
  Jet c = seed(2, 3, {0.5, 0.0}, 0);
  CHECK_THROWS_AS(a + c, JetError);
}
