#pragma once

#include <span>
#include <vector>

#include "yamabe/expr.hpp"
#include "yamabe/tensor.hpp"

namespace yamabe {

/// A Riemannian metric on a single chart of dimension 3 or 4, with symmetric
/// components given by analytic expression trees. Positive definiteness is
/// checked at every lift.
struct MetricField {
  int dim = 0;
  std::vector<ScalarField> comp;  // row-major dim*dim, kept symmetric

  const ScalarField& at(int a, int b) const { return comp[a * dim + b]; }

  static MetricField flat(int dim);
  static MetricField from_components(int dim, std::vector<ScalarField> comps);

  /// e^{2 phi} g, phi an ambient scalar field on the same chart.
  MetricField conformally_rescaled(const ScalarField& phi) const;

  /// Jets of all components around p, with a positive definiteness check.
  JTensor lift_at(std::span<const double> p, int order) const;

  /// Plain values at p.
  DTensor eval_at(std::span<const double> p) const;
};

/// An embedded hypersurface chart: n+1 component maps of n chart variables.
struct Embedding {
  int chart_dim = 0;
  int ambient_dim = 0;
  std::vector<ScalarField> maps;
  double normal_orientation = 1.0;
};

}  // namespace yamabe
