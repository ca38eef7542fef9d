#include "yamabe/metric.hpp"

namespace yamabe {

MetricField MetricField::flat(int dim) {
  MetricField g;
  g.dim = dim;
  g.comp.resize(dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      g.comp[a * dim + b] = ScalarField{dim, Expr::constant(a == b ? 1.0 : 0.0)};
  return g;
}

MetricField MetricField::from_components(int dim, std::vector<ScalarField> comps) {
  if (static_cast<int>(comps.size()) != dim * dim)
    throw Error("metric needs dim*dim component fields");
  MetricField g;
  g.dim = dim;
  g.comp = std::move(comps);
  return g;
}

MetricField MetricField::conformally_rescaled(const ScalarField& phi) const {
  if (phi.arity != dim) throw Error("conformal factor arity does not match metric dimension");
  ExprPtr factor = Expr::exp(Expr::mul(Expr::constant(2.0), phi.root));
  MetricField out;
  out.dim = dim;
  out.comp.resize(dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const ScalarField& gab = at(a, b);
      if (gab.is_zero())
        out.comp[a * dim + b] = gab;
      else
        out.comp[a * dim + b] = ScalarField{dim, Expr::mul(factor, gab.root)};
    }
  return out;
}

JTensor MetricField::lift_at(std::span<const double> p, int order) const {
  if (static_cast<int>(p.size()) != dim) throw Error("metric lift: wrong point dimension");
  Jet proto(dim, order, std::vector<double>(p.begin(), p.end()));
  JTensor out(dim, 2, proto);
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      Jet j = lift(at(a, b), p, order);
      out.at(a, b) = j;
      if (b != a) out.at(b, a) = j;
    }
  if (!is_positive_definite(value_of(out)))
    throw GeometryError("metric is not positive definite at the evaluation point");
  return out;
}

DTensor MetricField::eval_at(std::span<const double> p) const {
  DTensor out(dim, 2, 0.0);
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      double v = at(a, b).eval(p);
      out.at(a, b) = v;
      out.at(b, a) = v;
    }
  return out;
}

}  // namespace yamabe
