#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "yamabe/expansion.hpp"
#include "yamabe/scenario.hpp"
#include "yamabe/surface.hpp"

namespace yamabe {

/// One evaluation site: stacks built once, expansion data built on demand.
class GeometryPoint {
 public:
  GeometryPoint(Scenario scenario, std::vector<double> x0, int order = 6);

  const Scenario& scenario() const { return scen_; }
  const std::vector<double>& x0() const { return x0_; }
  int order() const { return order_; }
  const SurfaceStack& surf() const { return surf_; }
  const ExpansionData& expansion() const;

 private:
  Scenario scen_;
  std::vector<double> x0_;
  int order_;
  SurfaceStack surf_;
  mutable std::unique_ptr<ExpansionData> expansion_;
};

enum class FormulaId {
  b2_volume,
  b2_bianchi,
  b2_acf,
  b2_flat,
  b3_oracle,
  b3_volume,
  b3_inter1,
  b3_main_prop,
  b3_final,
  b3_flat,
  b3_conformally_flat,
  b3_einstein,
  b3_gghw_arxiv,
  b3_gghw_published,
};

const char* to_string(FormulaId id);
FormulaId formula_from_string(const std::string& name);
const std::vector<FormulaId>& all_formula_ids();

/// True when the formula's scope matches the scenario (dimension and tags).
bool formula_applicable(FormulaId id, const Scenario& s);

/// The operator LOP(b) = deltadelta(b) + (P, b) on trace-free symmetric
/// 2-tensor fields (n = 3). Throws ScopeError for non-trace-free arguments.
double lop(const SurfaceStack& s, const JTensor& b_field);

/// Hypersurface Bach tensor B_ij = C-bar_{0(ij)} - H W-hat_ij
///                                + nabla^k W-bar_{0(ij)k}.
DTensor bach_tensor(const SurfaceStack& s);

/// Theorem-form B3 evaluated directly on a stack (the conformally invariant
/// route); used by the quadrature paths where no GeometryPoint exists.
double b3_final_on_stack(const SurfaceStack& s);

/// The named formulas. Scope mismatches (e.g. b3_flat on a curved background)
/// throw ScopeError.
double compute_b2(const GeometryPoint& gp, FormulaId id);
double compute_b3(const GeometryPoint& gp, FormulaId id);
double compute_obstruction(const GeometryPoint& gp, FormulaId id);

/// The star combination of the B3 comparison, through its two stated forms;
/// their difference is one of the equivalence checks.
struct StarValues {
  double gghw_terms = 0;  // 2 LOP(W) + 4|W|^2 + 2|W0|^2 - 2(lo,B) + 14(lo^2,W) - 2 lo lo W
  double rewritten = 0;   // 2 LOP(W) - 2 lo d0W + 4 lo divW + ... (the equivalent display)
};
StarValues star_values(const GeometryPoint& gp);

/// Rebuilds the whole pipeline with g-hat = e^{2 phi} g (same embedding) and
/// returns |e^{(n+1) phi} B-hat - B| together with both values.
struct ConformalCheck {
  double b = 0, b_hat = 0;
  double phi_at_point = 0;
  double residual = 0;
};
ConformalCheck conformal_check(const GeometryPoint& gp, const ScalarField& phi,
                               FormulaId id);

/// Per-point report: all applicable formula values and the pairwise residual
/// matrix, plus Bach/LOP/star diagnostics.
struct ObstructionReport {
  std::string scenario_id;
  std::vector<double> point;
  std::map<std::string, double> values;
  std::vector<std::vector<double>> residual_matrix;  // pairwise |difference|
  std::vector<std::string> formula_order;
  double max_pairwise = 0;
  DTensor bach;
  double lop_lo2tf = 0, lop_what = 0;
  StarValues star;
};
ObstructionReport obstruction_report(const GeometryPoint& gp);

}  // namespace yamabe
