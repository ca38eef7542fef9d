#pragma once

#include <optional>
#include <span>
#include <vector>

#include "yamabe/metric.hpp"
#include "yamabe/tensor.hpp"

namespace yamabe {

/// Curvature of (X, g) as jets in the ambient chart coordinates around a
/// point. Conventions:
///   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z,
///   R_{abcd} = g(R(d_a, d_b) d_c, d_d),   Ric_{bc} = g^{ad} R_{abcd},
///   2 (dim-1) J = scal,   (dim-2) P = Ric - J g,
///   R = -(P [kn] g) + W with (P [kn] g)_{abcd} = P_{ac} g_{bd} - P_{bc} g_{ad}
///                                             + P_{bd} g_{ac} - P_{ad} g_{bc}.
/// Each derivative loses one jet order; `order` is the metric lift order.
struct AmbientCoordJets {
  int dim = 0;
  int order = 0;
  std::vector<double> p0;

  JTensor g, g_inv;    // order D
  JTensor gamma;       // Gamma^a_{bc} at (a, b, c), order D-1
  JTensor riemann;     // R_{abcd}, order D-2
  JTensor ricci;       // order D-2
  Jet scal;            // order D-2
  Jet jbar;            // scal / (2 (dim-1))
  JTensor schouten;    // order D-2
  JTensor weyl;        // order D-2
  // Populated when `depth` >= 1:
  JTensor nabla_ric;   // (nabla_a Ric)_{bc} at (a, b, c), order D-3
  JTensor nabla_riem;  // (nabla_e R)_{abcd} at (e, a, b, c, d), order D-3
  JTensor nabla_weyl;  // (nabla_e W)_{abcd}, order D-3
  JTensor dscal;       // rank 1, order D-3
  // Populated when `depth` >= 2:
  JTensor nabla2_ric;  // (nabla_a nabla_b Ric)_{cd}, order D-4
  JTensor hess_scal;   // (nabla_a nabla_b scal), order D-4
  int depth = 0;
};

/// Builds Christoffel symbols and curvature jets from the metric.
/// `depth` = number of covariant-derivative levels (0, 1 or 2).
AmbientCoordJets curvature_from_metric(const MetricField& g, std::span<const double> p0,
                                       int order, int depth = 2);

/// Lightweight variant for the geodesic flow: only g, g_inv, gamma, scal, jbar.
AmbientCoordJets metric_jets_only(const MetricField& g, std::span<const double> p0,
                                  int order);

/// All background-curvature quantities at one hypersurface point, expressed in
/// the adapted frame {E_0 = unit normal N, E_i = tangent coordinate vectors}.
/// Index 0 is the normal slot; tangential indices run over 1..n mapped to
/// 0..n-1 in the n-dimensional tensors.
struct AmbientStack {
  int n = 0;  // hypersurface dimension; ambient dimension is n+1

  // Full-frame tensors, dimension n+1, slot 0 = normal.
  DTensor frame_metric;      // diag(1, h)
  DTensor riemann;           // R-bar frame components
  DTensor ricci;
  DTensor schouten;
  DTensor weyl;
  DTensor einstein;          // Ric - (scal/2) g
  DTensor nabla_ric_frame;   // (nabla-bar Ric-bar) frame components
  DTensor nabla_riem_frame;  // rank 5
  DTensor nabla_weyl_frame;  // rank 5
  double scal = 0, jbar = 0;

  // Tangential slices (dimension n).
  DTensor G_normal;  // R-bar_{0ij0}
  DTensor W_hat;     // W-bar_{0ij0}
  DTensor W0;        // W-bar_{ijk0}
  DTensor ric0;      // Ric-bar_{i0}
  DTensor p0;        // P-bar_{i0}
  double p00 = 0, ric00 = 0;

  // Normal derivatives (covariant, contracted with the frame; identical to
  // derivatives along the unit-speed normal geodesic).
  double d0_ric00 = 0;    // (nabla-bar_0 Ric-bar)_{00}
  double d0d0_ric00 = 0;  // (nabla-bar_0^2 Ric-bar)_{00}
  double scal_p = 0, scal_pp = 0;
  double jbar_p = 0, jbar_pp = 0;
  DTensor d0_R_0ij0;  // (nabla-bar_0 R-bar)_{0ij0}
  DTensor d0_W_0ij0;  // (nabla-bar_0 W-bar)_{0ij0}

  // Ambient Cotton contraction, symmetrized: C-bar_{0(ij)} with the derivative
  // index running over all frame directions. Requires ambient dimension 4.
  DTensor cotton0;

  bool has_first_derivs = false;
  bool has_second_derivs = false;
};

/// Projects the coordinate curvature jets onto the adapted frame.
/// `frame` holds n+1 ambient vectors: frame[0] = unit normal, frame[1..n] =
/// tangent vectors; h is the induced metric on the tangent block.
AmbientStack adapt_frame(const AmbientCoordJets& raw,
                         const std::vector<std::vector<double>>& frame);

/// The hypersurface-Bach ingredient C-bar_{0(ij)}: recomputed from the stack's
/// stored frame tensors (the same contraction adapt_frame performs); exposed
/// separately so the two-path test in the suite can compare against the
/// Schouten-derivative form of the Cotton tensor.
DTensor cotton_hypersurface(const AmbientStack& stack);

}  // namespace yamabe
