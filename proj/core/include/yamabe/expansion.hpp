#pragma once

#include <array>

#include "yamabe/surface.hpp"

namespace yamabe {

/// Geodesic normal coordinates around the hypersurface chart point: jets in
/// (x^1..x^n, r) of the normal exponential map and of the induced metric
/// family h_r. The base point is (x0, 0); variable n is the distance r.
///
/// The flow jets are declared at `flow_order` total degree. Coefficients with
/// x-degree above the embedding order are zero-padded by promotion; every
/// quantity read out of the flow (r-coefficients at x-degree <= 3) lies well
/// inside the cone where the padding cannot propagate.
struct GeodesicFlow {
  int n = 0;
  int flow_order = 0;
  std::vector<Jet> phi;  // ambient components of Phi(x, r)
  JTensor h_r;           // slice metric, dim n, entries jets of arity n+1
  JTensor h_r_inv;
  Jet v_of_r;            // sqrt(det h_r / det h_0)
  Jet scalbar_along;     // ambient scalar curvature at Phi(x, r)
  Jet jbar_along;        // scal / (2 (dim-1))
  double gauge_residual = 0;  // Gauss-lemma residual: g(dPhi) block errors

  /// Laplacian of the slice metric family applied to an (x, r) jet.
  Jet slice_laplacian(const Jet& u) const;
  /// Divergence of a fixed 1-form (components as (x, r) jets, x-slots only).
  Jet slice_divergence(const std::vector<Jet>& omega) const;

  JTensor gamma_r;  // Christoffels of h_r in the x-variables
};

GeodesicFlow geodesic_normal_flow(const SurfaceStack& s, const MetricField& g,
                                  int flow_order);

/// The bare exponential-map jets exp(t V(x)) for an arbitrary initial
/// velocity field (ambient components as x-jets); variable n is t. Used by
/// the normal-variation machinery with V = u N.
std::vector<Jet> geodesic_flow_phi(const SurfaceStack& s, const MetricField& g,
                                   const std::vector<Jet>& velocity, int flow_order);

struct VolumePaths {
  std::array<double, 5> trace_path{};   // v_0..v_4 via the trace relations
  std::array<double, 5> closed_path{};  // closed-form expressions
  std::array<double, 5> flow_path{};    // r-series of dvol(h_r)/dvol(h)
  double max_rel_mismatch = 0;          // trace vs closed
};

struct HCoefficients {
  DTensor h1, h2, h3;  // metric expansion coefficients (formula path)
  double tr_h4 = 0;
  DTensor h1_flow, h2_flow, h3_flow, h4_flow;  // geodesic-flow path
};

/// Lemma-based h_(k) (h1 = 2L, h2 = L^2 - G, the h3 and tr h4 formulas),
/// plus the flow coefficients for cross-checking.
HCoefficients h_coefficients(const SurfaceStack& s, const GeodesicFlow& flow);

/// Volume coefficients via the trace relations and the closed forms; throws
/// InconsistencyError when the two exceed 1e-8 relative mismatch.
VolumePaths volume_coefficients(const SurfaceStack& s, const HCoefficients& hc,
                                const GeodesicFlow& flow);

/// sigma_(k) per the dimension-parametric solution of the recursion.
/// Poles: sigma3 at n = 1, sigma4 at n = 2 (PoleError mentions the residue).
double sigma2_of(int n, double v1);
double sigma3_of(int n, double v1, double v2, double jbar);
double sigma4_of(int n, double v1, double v2, double v3, double jbar, double jbar_p,
                 double lap_sigma2);

/// The n = 2 residue of sigma_(4); contract: equals -3/8 B_2.
double residue_sigma4(double v1, double v2, double v3, double jbar, double jbar_p,
                      double lap_sigma2);

struct ScOracle {
  std::array<double, 6> orders{};  // coefficients of r^0..r^n of S(g, sigma_F) - 1
  double remainder = 0;            // coefficient of r^{n+1}: the obstruction
  double sigma2 = 0, sigma3 = 0, sigma4 = 0;  // field values at x0
};

/// Assembles S(g, sigma_F) as a power series in r from the geodesic flow and
/// the recursion solution, verifies that orders r^0..r^n vanish (tolerance
/// `tol`, InconsistencyError otherwise) and returns the r^{n+1} coefficient.
/// Entirely independent of the curvature-formula paths: every ingredient
/// comes from the flow.
ScOracle sc_remainder_oracle(const SurfaceStack& s, const GeodesicFlow& flow,
                             double tol = 1e-8);

/// Everything the expansion module computes at one point.
struct ExpansionData {
  int n = 0;
  HCoefficients h;
  VolumePaths v_paths;
  std::array<double, 5> v{};  // validated values (closed-form path)
  double sigma2 = 0, sigma3 = 0, sigma4 = 0;
  ScOracle oracle;
};

ExpansionData build_expansion(const SurfaceStack& s, const MetricField& g);

/// First r-derivative of the slice Laplacian against the variation formula
///   Delta'(u) = -2 (L, Hess u) - n (dH, du) - 2 (Ric-bar_0, du);
/// returns the residual normalized by the largest term.
double delta_prime_residual(const SurfaceStack& s, const GeodesicFlow& flow,
                            const ScalarField& u);

/// Same for the divergence on 1-forms (n = 3):
///   delta'(omega) = -2 (L, nabla omega) - 2 (delta L, omega) + 3 (dH, omega).
double divergence_prime_residual(const SurfaceStack& s, const GeodesicFlow& flow,
                                 const std::vector<ScalarField>& omega);

}  // namespace yamabe
