#include "yamabe/obstruction.hpp"

#include <cmath>

#include "stack_values.hpp"

namespace yamabe {

using internal::SV;

GeometryPoint::GeometryPoint(Scenario scenario, std::vector<double> x0, int order)
    : scen_(std::move(scenario)),
      x0_(std::move(x0)),
      order_(order),
      surf_(build_surface_stack(scen_.embedding, scen_.metric, x0_, order_)) {}

const ExpansionData& GeometryPoint::expansion() const {
  if (!expansion_)
    expansion_ = std::make_unique<ExpansionData>(build_expansion(surf_, scen_.metric));
  return *expansion_;
}

const char* to_string(FormulaId id) {
  switch (id) {
    case FormulaId::b2_volume: return "b2_volume";
    case FormulaId::b2_bianchi: return "b2_bianchi";
    case FormulaId::b2_acf: return "b2_acf";
    case FormulaId::b2_flat: return "b2_flat";
    case FormulaId::b3_oracle: return "b3_oracle";
    case FormulaId::b3_volume: return "b3_volume";
    case FormulaId::b3_inter1: return "b3_inter1";
    case FormulaId::b3_main_prop: return "b3_main_prop";
    case FormulaId::b3_final: return "b3_final";
    case FormulaId::b3_flat: return "b3_flat";
    case FormulaId::b3_conformally_flat: return "b3_conformally_flat";
    case FormulaId::b3_einstein: return "b3_einstein";
    case FormulaId::b3_gghw_arxiv: return "b3_gghw_arxiv";
    case FormulaId::b3_gghw_published: return "b3_gghw_published";
  }
  return "?";
}

const std::vector<FormulaId>& all_formula_ids() {
  static const std::vector<FormulaId> ids = {
      FormulaId::b2_volume,      FormulaId::b2_bianchi,
      FormulaId::b2_acf,         FormulaId::b2_flat,
      FormulaId::b3_oracle,      FormulaId::b3_volume,
      FormulaId::b3_inter1,      FormulaId::b3_main_prop,
      FormulaId::b3_final,       FormulaId::b3_flat,
      FormulaId::b3_conformally_flat, FormulaId::b3_einstein,
      FormulaId::b3_gghw_arxiv,  FormulaId::b3_gghw_published};
  return ids;
}

FormulaId formula_from_string(const std::string& name) {
  for (FormulaId id : all_formula_ids())
    if (name == to_string(id)) return id;
  throw ScopeError("unknown formula id '" + name + "'");
}

bool formula_applicable(FormulaId id, const Scenario& s) {
  const int n = s.n();
  switch (id) {
    case FormulaId::b2_volume:
    case FormulaId::b2_bianchi:
    case FormulaId::b2_acf:
      return n == 2;
    case FormulaId::b2_flat:
      return n == 2 && s.has_tag("flat");
    case FormulaId::b3_flat:
      return n == 3 && s.has_tag("flat");
    case FormulaId::b3_conformally_flat:
      return n == 3 && s.has_tag("conformally_flat");
    case FormulaId::b3_einstein:
      return n == 3 && s.has_tag("einstein");
    default:
      return n == 3;
  }
}

namespace {

double require_tag(const GeometryPoint& gp, FormulaId id, const char* tag) {
  if (!gp.scenario().has_tag(tag))
    throw ScopeError(std::string(to_string(id)) + " requires a scenario tagged '" + tag +
                     "'");
  return 0;
}

}  // namespace

double lop(const SurfaceStack& s, const JTensor& b_field) {
  if (s.n != 3) throw ScopeError("LOP is defined on three-dimensional hypersurfaces");
  DTensor b = value_of(b_field);
  DTensor hinv = value_of(s.h_inv);
  double tr = dalg::tr2(hinv, b);
  double scale = 0;
  for (double v : b.c) scale = std::max(scale, std::abs(v));
  if (std::abs(tr) > 1e-10 * (1.0 + scale))
    throw ScopeError("LOP argument is not trace-free (tr = " + std::to_string(tr) + ")");
  double dd = s.divdiv(b_field).value();
  double pb = dalg::ip2(hinv, value_of(s.P_intr), b);
  return dd + pb;
}

DTensor bach_tensor(const SurfaceStack& s) {
  if (s.n != 3) throw ScopeError("the hypersurface Bach tensor needs n = 3");
  const int n = s.n;
  SV v(s);
  DTensor nw0f = value_of(s.cov(s.w0_first));  // (a; 0-slot dropped: i, j, k)
  DTensor term3(n, 2, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0;
      for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k)
          acc += v.hinv.at(a, k) * 0.5 * (nw0f.at(a, i, j, k) + nw0f.at(a, j, i, k));
      term3.at(i, j) = acc;
    }
  DTensor out(n, 2, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.at(i, j) = s.amb.cotton0.at(i, j) - v.H * v.what.at(i, j) + term3.at(i, j);
  return out;
}

namespace {

double b3_final_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  double lop_lo2tf = lop(s, v.lo2tf_jets());
  double lop_what = lop(s, s.w_hat);
  DTensor divw_slot1 = v.div_w0_first_slot();  // nabla^k W_{kij0}
  double lo_d0w = dalg::ip2(v.hinv, v.lo, v.d0W);
  double lo_divw = dalg::ip2(v.hinv, v.lo, divw_slot1);
  double lo_what = dalg::ip2(v.hinv, v.lo, v.what);
  double lo2_what = dalg::ip2(v.hinv, v.lo2, v.what);
  double twelve_b3 = 6.0 * lop_lo2tf + 2.0 * v.normlo2 * v.normlo2 + 2.0 * lop_what -
                     2.0 * lo_d0w - 4.0 * lo_divw - 4.0 * v.H * lo_what +
                     16.0 * lo2_what + 4.0 * v.norm_what2 + 2.0 * v.norm_w02;
  return twelve_b3 / 12.0;
}

double b3_flat_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  double lap_normlo2 = s.lap(v.normlo2_jet()).value();
  double lo_hessH = dalg::ip2(v.hinv, v.lo, v.hessH);
  double twelve_b3 = lap_normlo2 + 6.0 * lo_hessH + 6.0 * v.H * v.trlo3 +
                     v.normlo2 * v.normlo2 + 12.0 * v.norm_dH2;
  return twelve_b3 / 12.0;
}

double b3_einstein_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  double lo_d0w = dalg::ip2(v.hinv, v.lo, v.d0W);
  double lo_what = dalg::ip2(v.hinv, v.lo, v.what);
  double lo2_what = dalg::ip2(v.hinv, v.lo2, v.what);
  double lap_normlo2 = s.lap(v.normlo2_jet()).value();
  double lo_hessH = dalg::ip2(v.hinv, v.lo, v.hessH);
  double twelve_b3 = -2.0 * lo_d0w - 2.0 * v.H * lo_what + 8.0 * lo2_what +
                     2.0 * v.norm_what2 + 6.0 * lo_hessH + lap_normlo2 +
                     6.0 * v.H * v.trlo3 + v.normlo2 * v.normlo2 + 12.0 * v.norm_dH2;
  return twelve_b3 / 12.0;
}

double b3_conformally_flat_impl(const SV& v) {
  double lop_lo2tf = lop(v.s, v.lo2tf_jets());
  return (3.0 * lop_lo2tf + v.normlo2 * v.normlo2) / 6.0;
}

double b3_inter1_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  double lap_p00 = s.lap(s.p00_pull).value();
  double gbar2 = dalg::ip2(v.hinv, v.gbar, v.gbar);
  double dH_ric0 = dalg::ip1(v.hinv, v.dH, v.ric0);
  double part_a = (v.d0d0_ric00 - 0.5 * v.scal_pp) +
                  5.0 * v.H * (v.d0_ric00 - 0.5 * v.scal_p) + 2.0 * v.H * v.d0_ric00 +
                  2.0 * gbar2 - 2.0 * v.ric00 * v.ric00 + 2.0 * v.ric00 * v.jbar +
                  8.0 * v.H * v.H * v.ric00 - 12.0 * v.H * v.H * v.jbar +
                  6.0 * dH_ric0 + 2.0 * lap_p00;
  double lo_d0r = dalg::ip2(v.hinv, v.lo, v.d0R);
  double lo_gbar = dalg::ip2(v.hinv, v.lo, v.gbar);
  double lo2_gbar = dalg::ip2(v.hinv, v.lo2, v.gbar);
  double part_b = -2.0 * lo_d0r - 2.0 * v.H * lo_gbar + 8.0 * lo2_gbar -
                  4.0 * v.normlo2 * v.ric00 + 2.0 * v.normlo2 * v.jbar;
  double lap_normlo2 = s.lap(v.normlo2_jet()).value();
  double lo_hessH = dalg::ip2(v.hinv, v.lo, v.hessH);
  double part_c = lap_normlo2 + 6.0 * lo_hessH + 6.0 * v.H * v.trlo3 +
                  v.normlo2 * v.normlo2 + 12.0 * v.norm_dH2;
  return (part_a + part_b + part_c) / 12.0;
}

double b3_main_prop_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  double dd_lo2 = s.divdiv(v.lo2_jets()).value();
  DTensor div_lo = value_of(s.div_sym2(s.lo));
  double norm_divlo2 = dalg::ip1(v.hinv, div_lo, div_lo);
  DTensor grad_ric0 = value_of(s.cov(s.ric0_pull));  // (a, i)
  double lo_grad_ric0 = dalg::ip2(v.hinv, v.lo, grad_ric0);
  double lo2_ric = dalg::ip2(v.hinv, v.lo2, v.ric_pull);
  double p_what = dalg::ip2(v.hinv, v.p_pull, v.what);
  double dd_what = s.divdiv(s.w_hat).value();
  double lo_d0w = dalg::ip2(v.hinv, v.lo, v.d0W);
  double lo_what = dalg::ip2(v.hinv, v.lo, v.what);
  double lo2_what = dalg::ip2(v.hinv, v.lo2, v.what);
  double lo_hessH = dalg::ip2(v.hinv, v.lo, v.hessH);
  double twelve_b3 = 2.0 * dd_lo2 + 2.0 * norm_divlo2
                     + 2.0 * lo_grad_ric0 + v.normlo2 * v.ric00 + 3.0 * lo2_ric -
                     6.0 * v.normlo2 * v.jbar
                     + 2.0 * p_what + 2.0 * v.norm_what2 + 2.0 * dd_what -
                     2.0 * lo_d0w - 2.0 * v.H * lo_what + 8.0 * lo2_what
                     + 4.0 * lo_hessH + 6.0 * v.H * v.trlo3 + v.normlo2 * v.normlo2;
  return twelve_b3 / 12.0;
}

double b3_volume_impl(const GeometryPoint& gp, const SV& v) {
  const SurfaceStack& s = v.s;
  const ExpansionData& e = gp.expansion();
  const double v1 = e.v[1], v2 = e.v[2], v3 = e.v[3], v4 = e.v[4];
  double lap_normlo2 = s.lap(v.normlo2_jet()).value();
  double lo_hessH = dalg::ip2(v.hinv, v.lo, v.hessH);
  double lap_p00 = s.lap(s.p00_pull).value();
  double dH_ric0 = dalg::ip1(v.hinv, v.dH, v.ric0);
  return -2.0 * v4 + 0.5 * v1 * v3 + v2 * v2 / 3.0 - 7.0 / 18.0 * v1 * v1 * v2 +
         2.0 / 27.0 * v1 * v1 * v1 * v1 - v.jbar * v2 / 3.0 - 5.0 / 12.0 * v.jbar_p * v1 -
         0.25 * v.jbar_pp + lap_normlo2 / 12.0 + 0.5 * lo_hessH + lap_p00 / 6.0 +
         0.5 * dH_ric0 + v.norm_dH2;
}

double b3_gghw_arxiv_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  double lop_lo2tf = lop(s, v.lo2tf_jets());
  double lop_what = lop(s, s.w_hat);
  DTensor B = bach_tensor(s);
  double lo_B = dalg::ip2(v.hinv, v.lo, B);
  double lo2_what = dalg::ip2(v.hinv, v.lo2, v.what);
  // lo^{ab} lo^{cd} W-bar_{cabd}
  DTensor weyl_t = value_of(s.weyl_tang);
  DTensor lo_up(v.n, 2, 0.0);
  for (int i = 0; i < v.n; ++i)
    for (int j = 0; j < v.n; ++j) {
      double acc = 0;
      for (int a = 0; a < v.n; ++a)
        for (int b = 0; b < v.n; ++b)
          acc += v.hinv.at(i, a) * v.hinv.at(j, b) * v.lo.at(a, b);
      lo_up.at(i, j) = acc;
    }
  double lolow = 0;
  for (int a = 0; a < v.n; ++a)
    for (int b = 0; b < v.n; ++b)
      for (int c = 0; c < v.n; ++c)
        for (int d = 0; d < v.n; ++d)
          lolow += lo_up.at(a, b) * lo_up.at(c, d) * weyl_t.at(c, a, b, d);
  double star = 2.0 * lop_what + 4.0 * v.norm_what2 + 2.0 * v.norm_w02 - 2.0 * lo_B +
                14.0 * lo2_what - 2.0 * lolow;
  double twelve_b3 = 6.0 * lop_lo2tf + 2.0 * v.normlo2 * v.normlo2 + star;
  return twelve_b3 / 12.0;
}

double b3_gghw_published_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  const int n = v.n;
  double lop_lo2tf = lop(s, v.lo2tf_jets());
  // Fialkov tensor as a jet field: i*P-bar - P + H lo + H^2/2 h.
  JTensor F(n, 2, s.p_pull.at(0, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      F.at(i, j) = s.p_pull.at(i, j) - s.P_intr.at(i, j) + s.H * s.lo.at(i, j) +
                   0.5 * s.H * s.H * s.h.at(i, j);
  Jet trF = s.tr2(F);
  JTensor F0 = F;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) F0.at(i, j) -= (1.0 / n) * trF * s.h.at(i, j);
  double lop_F0 = lop(s, F0);
  DTensor B = bach_tensor(s);
  double lo_B = dalg::ip2(v.hinv, v.lo, B);
  DTensor Fv = value_of(F);
  DTensor F0v = value_of(F0);
  double F0_F = dalg::ip2(v.hinv, F0v, Fv);
  double F0_lo2 = dalg::ip2(v.hinv, F0v, v.lo2);
  double twelve_b3 = 4.0 * lop_lo2tf + 2.0 * lop_F0 - 2.0 * lo_B +
                     v.normlo2 * v.normlo2 + 4.0 * F0_F + 2.0 * F0_lo2 +
                     2.0 * v.norm_w02;
  return twelve_b3 / 12.0;
}

double b2_volume_impl(const GeometryPoint& gp, const SV& v) {
  const ExpansionData& e = gp.expansion();
  const double v1 = e.v[1], v2 = e.v[2], v3 = e.v[3];
  double lap_sigma2 = 0.5 * v.lapH;
  return -2.0 * v3 - v1 * v1 * v1 / 12.0 + v1 * v2 / 3.0 - 2.0 / 3.0 * lap_sigma2 -
         2.0 / 3.0 * v1 * v.jbar - 2.0 / 3.0 * v.jbar_p;
}

double b2_bianchi_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  double div_p0 = s.div_form(s.p0_pull).value();
  double lo_pbar = dalg::ip2(v.hinv, v.lo, v.p_pull);
  return -(v.lapH + v.H * v.normlo2 + div_p0 + lo_pbar) / 3.0;
}

double b2_acf_impl(const SV& v) {
  const SurfaceStack& s = v.s;
  double dd_lo = s.divdiv(s.lo).value();
  double lo_pbar = dalg::ip2(v.hinv, v.lo, v.p_pull);
  return -(dd_lo + v.H * v.normlo2 + lo_pbar) / 3.0;
}

double b2_flat_impl(const SV& v) {
  return -(v.H * v.normlo2 + v.lapH) / 3.0;
}

}  // namespace

double b3_final_on_stack(const SurfaceStack& s) {
  SV v(s);
  return b3_final_impl(v);
}

double compute_b2(const GeometryPoint& gp, FormulaId id) {
  if (gp.scenario().n() != 2) throw ScopeError("B2 formulas need a surface in a 3-manifold");
  SV v(gp.surf());
  switch (id) {
    case FormulaId::b2_volume: return b2_volume_impl(gp, v);
    case FormulaId::b2_bianchi: return b2_bianchi_impl(v);
    case FormulaId::b2_acf: return b2_acf_impl(v);
    case FormulaId::b2_flat:
      require_tag(gp, id, "flat");
      return b2_flat_impl(v);
    default:
      throw ScopeError(std::string(to_string(id)) + " is not a B2 formula");
  }
}

double compute_b3(const GeometryPoint& gp, FormulaId id) {
  if (gp.scenario().n() != 3)
    throw ScopeError("B3 formulas need a hypersurface in a 4-manifold");
  if (id == FormulaId::b3_oracle) return gp.expansion().oracle.remainder;
  SV v(gp.surf());
  switch (id) {
    case FormulaId::b3_volume: return b3_volume_impl(gp, v);
    case FormulaId::b3_inter1: return b3_inter1_impl(v);
    case FormulaId::b3_main_prop: return b3_main_prop_impl(v);
    case FormulaId::b3_final: return b3_final_impl(v);
    case FormulaId::b3_flat:
      require_tag(gp, id, "flat");
      return b3_flat_impl(v);
    case FormulaId::b3_conformally_flat:
      require_tag(gp, id, "conformally_flat");
      return b3_conformally_flat_impl(v);
    case FormulaId::b3_einstein:
      require_tag(gp, id, "einstein");
      return b3_einstein_impl(v);
    case FormulaId::b3_gghw_arxiv: return b3_gghw_arxiv_impl(v);
    case FormulaId::b3_gghw_published: return b3_gghw_published_impl(v);
    default:
      throw ScopeError(std::string(to_string(id)) + " is not a B3 formula");
  }
}

double compute_obstruction(const GeometryPoint& gp, FormulaId id) {
  return gp.scenario().n() == 2 ? compute_b2(gp, id) : compute_b3(gp, id);
}

StarValues star_values(const GeometryPoint& gp) {
  const SurfaceStack& s = gp.surf();
  SV v(s);
  StarValues out;
  {
    double lop_what = lop(s, s.w_hat);
    DTensor B = bach_tensor(s);
    double lo_B = dalg::ip2(v.hinv, v.lo, B);
    double lo2_what = dalg::ip2(v.hinv, v.lo2, v.what);
    DTensor weyl_t = value_of(s.weyl_tang);
    double lolow = 0;
    DTensor lo_up(v.n, 2, 0.0);
    for (int i = 0; i < v.n; ++i)
      for (int j = 0; j < v.n; ++j) {
        double acc = 0;
        for (int a = 0; a < v.n; ++a)
          for (int b = 0; b < v.n; ++b)
            acc += v.hinv.at(i, a) * v.hinv.at(j, b) * v.lo.at(a, b);
        lo_up.at(i, j) = acc;
      }
    for (int a = 0; a < v.n; ++a)
      for (int b = 0; b < v.n; ++b)
        for (int c = 0; c < v.n; ++c)
          for (int d = 0; d < v.n; ++d)
            lolow += lo_up.at(a, b) * lo_up.at(c, d) * weyl_t.at(c, a, b, d);
    out.gghw_terms = 2.0 * lop_what + 4.0 * v.norm_what2 + 2.0 * v.norm_w02 -
                     2.0 * lo_B + 14.0 * lo2_what - 2.0 * lolow;
  }
  {
    double lop_what = lop(s, s.w_hat);
    double lo_d0w = dalg::ip2(v.hinv, v.lo, v.d0W);
    DTensor divw_slot2 = v.div_w0_second_slot();  // nabla^k W_{ikj0}
    double lo_divw2 = dalg::ip2(v.hinv, v.lo, divw_slot2);
    double lo_what = dalg::ip2(v.hinv, v.lo, v.what);
    double lo2_what = dalg::ip2(v.hinv, v.lo2, v.what);
    out.rewritten = 2.0 * lop_what - 2.0 * lo_d0w + 4.0 * lo_divw2 -
                    4.0 * v.H * lo_what + 16.0 * lo2_what + 4.0 * v.norm_what2 +
                    2.0 * v.norm_w02;
  }
  return out;
}

ConformalCheck conformal_check(const GeometryPoint& gp, const ScalarField& phi,
                               FormulaId id) {
  const Scenario& sc = gp.scenario();
  const int n = sc.n();
  ConformalCheck out;
  out.b = compute_obstruction(gp, id);

  Scenario rescaled = sc;
  rescaled.metric = sc.metric.conformally_rescaled(phi);
  rescaled.tags.clear();
  for (const auto& t : sc.tags)
    if (t != "flat" && t != "einstein") rescaled.tags.push_back(t);
  GeometryPoint gp_hat(rescaled, gp.x0(), gp.order());
  out.b_hat = compute_obstruction(gp_hat, id);

  std::vector<double> p(sc.ambient_dim);
  for (int a = 0; a < sc.ambient_dim; ++a) p[a] = sc.embedding.maps[a].eval(gp.x0());
  out.phi_at_point = phi.eval(p);
  out.residual = std::abs(std::exp((n + 1.0) * out.phi_at_point) * out.b_hat - out.b);
  return out;
}

ObstructionReport obstruction_report(const GeometryPoint& gp) {
  ObstructionReport rep;
  rep.scenario_id = gp.scenario().id;
  rep.point = gp.x0();
  for (FormulaId id : all_formula_ids()) {
    if (!formula_applicable(id, gp.scenario())) continue;
    rep.formula_order.push_back(to_string(id));
    rep.values[to_string(id)] = compute_obstruction(gp, id);
  }
  const std::size_t m = rep.formula_order.size();
  rep.residual_matrix.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double d = std::abs(rep.values[rep.formula_order[i]] -
                          rep.values[rep.formula_order[j]]);
      rep.residual_matrix[i][j] = d;
      // The published GGHW variant is a documented falsification target, not
      // part of the agreement set.
      if (rep.formula_order[i] != "b3_gghw_published" &&
          rep.formula_order[j] != "b3_gghw_published")
        rep.max_pairwise = std::max(rep.max_pairwise, d);
    }
  if (gp.scenario().n() == 3) {
    rep.bach = bach_tensor(gp.surf());
    SV v(gp.surf());
    rep.lop_lo2tf = lop(gp.surf(), v.lo2tf_jets());
    rep.lop_what = lop(gp.surf(), gp.surf().w_hat);
    rep.star = star_values(gp);
  }
  return rep;
}

}  // namespace yamabe
