#pragma once

#include <functional>

#include "yamabe/obstruction.hpp"

namespace yamabe {

/// Tensor-product trapezoidal quadrature of `integrand(stack) * dvol_h` over
/// the fundamental domain [0, 2*pi)^n of a closed (periodic) scenario; for
/// periodic analytic data this is spectrally accurate. `order` is the jet
/// order of the per-point stacks. Deterministic: per-point values are stored
/// and reduced sequentially.
double integrate_over_chart(const Scenario& s, int grid, int order,
                            const std::function<double(const SurfaceStack&)>& integrand);

/// The higher Willmore energy W3 = int (tr lo^3 + (lo, W-hat)) dvol (n = 3).
double integrate_w3(const Scenario& s, int grid, int order = 4);

/// W2 = int |lo|^2 dvol (n = 2).
double integrate_w2(const Scenario& s, int grid, int order = 4);

/// Embedding jets of the displaced surface iota_t = exp(t u N) at a numeric t,
/// via the truncated geodesic flow (series order `flow_order`, truncation
/// error ~ t^{flow_order+1}). Throws EmbeddingError with a step-size hint
/// when the displaced surface degenerates.
std::vector<Jet> displaced_embedding_jets(const SurfaceStack& base, const MetricField& g,
                                          const ScalarField& u, double t, int flow_order,
                                          int out_order);

struct FunctionalReport {
  std::string scenario_id;
  double w3 = 0;              // at t = 0
  double rhs = 0;             // 6 int u B3 dvol
  double variation_fd = 0;    // Richardson-extrapolated d/dt W3(iota_t)
  double residual = 0;        // |(-variation_fd) - rhs|
  double fd_order_pre = 0;    // observed central-difference order (~2)
  double fd_order_post = 0;   // observed post-Richardson order (~4)
  double quad_err = 0;        // |I(grid) - I(grid/2)| for the rhs integral
  std::vector<double> t_steps;
  std::vector<double> d_values;  // central differences per step
};

/// Verifies the first-variation law -d/dt W3(iota_t) = 6 int u B3 dvol by
/// central differences in t (steps `ts`, ascending) plus one Richardson step.
FunctionalReport normal_variation(const Scenario& s, const ScalarField& u,
                                  std::vector<double> ts, int grid);

/// Pointwise first-variation formulas at t = 0, checked by central
/// differences of the displaced stacks at one chart point:
///   var(h)[u] = 2 u L,   var(L)[u] = -Hess(u) + u L^2 - u G-bar,
///   3 var(H)[u] = -Delta(u) - u |L|^2 - u Ric-bar_{00},
///   var(dvol)[u] = 3 u H dvol.
struct VariationFormulaCheck {
  double residual_h = 0, residual_L = 0, residual_H = 0, residual_dvol = 0;
};
VariationFormulaCheck variation_formula_check(const Scenario& s, const ScalarField& u,
                                              std::span<const double> x0, double t0);

}  // namespace yamabe
