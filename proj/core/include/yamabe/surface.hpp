#pragma once

#include <memory>
#include <span>
#include <vector>

#include "yamabe/ambient.hpp"
#include "yamabe/metric.hpp"

namespace yamabe {

/// Intrinsic and extrinsic geometry of an embedded hypersurface chart point.
/// All tensor fields are jets in the n chart coordinates; contractions with
/// the induced metric raise indices. Conventions:
///   L(X,Y) = -g(nabla-bar_X Y, N),  n H = tr_h L,  lo = L - H h,
///   Codazzi-Mainardi: nabla_j L_{ik} - nabla_i L_{jk} = R-bar_{ijk0}.
struct SurfaceStack {
  int n = 0;          // chart dimension (2 or 3)
  int order = 0;      // embedding lift order
  std::vector<double> x0;

  // Embedding and frame, as chart-jet fields of ambient components.
  std::vector<Jet> emb;                   // order D
  std::vector<std::vector<Jet>> tangent;  // tangent[i][a], order D-1
  std::vector<Jet> normal;                // N^a(x), order D-1
  double normal_orientation = 1.0;

  // Intrinsic geometry.
  JTensor h, h_inv;   // order D-1
  JTensor gamma;      // intrinsic Christoffels, order D-2
  JTensor riem;       // intrinsic R_{ijkl}, order D-3
  JTensor ric;        // order D-3
  Jet scal_intr;      // order D-3
  Jet J_intr;         // scal / (2(n-1)); equals the Gauss curvature for n=2
  JTensor P_intr;     // intrinsic Schouten (n = 3 only; empty for n = 2)

  // Extrinsic geometry.
  JTensor L;   // order D-2
  Jet H;       // order D-2
  JTensor lo;  // trace-free part of L

  // Pulled-back ambient quantities (frame-projected fields on the chart).
  JTensor g_pull, g_inv_pull;  // ambient metric along the surface (coords)
  JTensor ric_pull;            // Ric-bar(e_i, e_j)
  JTensor ric0_pull;           // Ric-bar(e_i, N)
  Jet ric00_pull;              // Ric-bar(N, N)
  JTensor p_pull, p0_pull;     // ambient Schouten slices
  Jet p00_pull;
  Jet scalbar_pull, jbar_pull;
  JTensor w_hat;      // W-bar(N, e_i, e_j, N)
  JTensor w0;         // W-bar(e_i, e_j, e_k, N)
  JTensor w0_first;   // W-bar(N, e_i, e_j, e_k)
  JTensor weyl_tang;  // W-bar(e_a, e_b, e_c, e_d)
  JTensor riem_pull3; // R-bar(e_i, e_j, e_k, N)
  JTensor riem_tang;  // R-bar(e_a, e_b, e_c, e_d)
  JTensor gbar_pull;  // R-bar(N, e_i, e_j, N)
  JTensor d0ric0_pull;  // (nabla-bar Ric-bar)(N; N, e_i), needs depth >= 1

  // Point values of the full ambient stack in the adapted frame.
  AmbientStack amb;

  // --- tangential operators (all with respect to the induced metric) -------
  JTensor cov(const JTensor& t) const;        // nabla_a T (first slot = a)
  JTensor grad_scalar(const Jet& f) const;    // df as rank-1
  JTensor hess(const Jet& f) const;           // nabla_a nabla_b f
  Jet lap(const Jet& f) const;                // non-positive: h^{ab} Hess_{ab}
  Jet div_form(const JTensor& omega) const;   // nabla^i omega_i
  JTensor div_sym2(const JTensor& b) const;   // (delta b)_i = nabla^j b_{ji}
  Jet divdiv(const JTensor& b) const;         // nabla^i nabla^j b_{ij}
  JTensor lap_tensor2(const JTensor& b) const;  // Bochner: h^{ab} (nabla^2 b)_{ab,ij}

  // Jet-level contractions with the induced metric.
  Jet ip_grad(const JTensor& a, const JTensor& b) const;  // rank-1 inner product
  Jet ip2(const JTensor& a, const JTensor& b) const;      // rank-2 inner product
  JTensor mul2(const JTensor& a, const JTensor& b) const; // (A B)_{ij} = A_i^k B_{kj}
  Jet tr2(const JTensor& a) const;                        // h^{ij} A_{ij}

  void require_order(int needed, const char* what) const;
};

/// Builds the full stack at a chart point. `order` is the embedding/metric
/// jet order (>= 4; the default 6 covers every operator chain in the suite).
/// `depth` is forwarded to curvature_from_metric (2 enables all second
/// normal derivatives; lower it for cheap bulk evaluations).
SurfaceStack build_surface_stack(const Embedding& emb, const MetricField& g,
                                 std::span<const double> x0, int order, int depth = 2);

/// Same, but the embedding is supplied directly as component jets (used by
/// the normal-variation flow, where the moved surface has no expression form).
/// `lean` skips the intrinsic curvature and most pulled families, keeping
/// only what extrinsic integrands need (h, N, L, lo, H, W-hat, G-bar).
SurfaceStack build_surface_stack_from_jets(std::vector<Jet> emb_jets, const MetricField& g,
                                           double normal_orientation, int depth = 2,
                                           bool lean = false);

/// The conformally invariant Fialkov combination F = i*P-bar - P + H lo + H^2/2 h
/// (n = 3), plus the residual of the identity F = lo^2 - |lo|^2/4 h + W-hat.
struct FialkovResult {
  DTensor F;        // values
  DTensor F_rhs;    // lo^2 - |lo|^2/4 h + W-hat
  double residual;  // max-abs componentwise difference
};
FialkovResult fialkov(const SurfaceStack& s);

// ---------------------------------------------------------------------------
// Double-precision tensor algebra on point values (contractions with h^{-1}).
// ---------------------------------------------------------------------------
namespace dalg {

double ip1(const DTensor& hinv, const DTensor& a, const DTensor& b);
double ip2(const DTensor& hinv, const DTensor& a, const DTensor& b);
double ip3(const DTensor& hinv, const DTensor& a, const DTensor& b);
double ip4(const DTensor& hinv, const DTensor& a, const DTensor& b);
DTensor mul2(const DTensor& hinv, const DTensor& a, const DTensor& b);
double tr2(const DTensor& hinv, const DTensor& a);
DTensor sym2(const DTensor& a);

}  // namespace dalg

}  // namespace yamabe
