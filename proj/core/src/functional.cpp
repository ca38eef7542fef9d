#include "yamabe/functional.hpp"

#include <cmath>

#include "yamabe/expansion.hpp"
#include "yamabe/parallel.hpp"
#include "stack_values.hpp"

namespace yamabe {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> grid_point(const Scenario& s, int grid, std::size_t flat) {
  const int n = s.n();
  std::vector<double> x(n);
  for (int v = n - 1; v >= 0; --v) {
    x[v] = (kTwoPi / grid) * static_cast<double>(flat % grid);
    flat /= grid;
  }
  return x;
}

double dvol_ratio(const SurfaceStack& st) {
  return std::sqrt(tensor_det(value_of(st.h)));
}

}  // namespace

double integrate_over_chart(const Scenario& s, int grid, int order,
                            const std::function<double(const SurfaceStack&)>& integrand) {
  if (!s.has_tag("closed"))
    throw ScopeError("integrate_over_chart: scenario '" + s.id +
                     "' is not a closed (periodic) chart");
  const int n = s.n();
  std::size_t count = 1;
  for (int v = 0; v < n; ++v) count *= grid;
  std::vector<double> vals(count);
  parallel_for(count, [&](std::size_t flat) {
    std::vector<double> x = grid_point(s, grid, flat);
    SurfaceStack st = build_surface_stack(s.embedding, s.metric, x, order, 0);
    vals[flat] = integrand(st) * dvol_ratio(st);
  });
  double acc = 0;
  for (double v : vals) acc += v;
  double cell = 1;
  for (int v = 0; v < n; ++v) cell *= kTwoPi / grid;
  return acc * cell;
}

double integrate_w3(const Scenario& s, int grid, int order) {
  if (s.n() != 3) throw ScopeError("W3 is defined for hypersurfaces in 4-manifolds");
  return integrate_over_chart(s, grid, order, [](const SurfaceStack& st) {
    DTensor hinv = value_of(st.h_inv);
    DTensor lo = value_of(st.lo);
    DTensor lo2 = dalg::mul2(hinv, lo, lo);
    double trlo3 = dalg::tr2(hinv, dalg::mul2(hinv, lo2, lo));
    double lo_what = dalg::ip2(hinv, lo, value_of(st.w_hat));
    return trlo3 + lo_what;
  });
}

double integrate_w2(const Scenario& s, int grid, int order) {
  if (s.n() != 2) throw ScopeError("W2 is defined for surfaces in 3-manifolds");
  return integrate_over_chart(s, grid, order, [](const SurfaceStack& st) {
    DTensor hinv = value_of(st.h_inv);
    DTensor lo = value_of(st.lo);
    return dalg::ip2(hinv, lo, lo);
  });
}

std::vector<Jet> displaced_embedding_jets(const SurfaceStack& base, const MetricField& g,
                                          const ScalarField& u, double t, int flow_order,
                                          int out_order) {
  const int n = base.n;
  const int d = n + 1;
  Jet u_jet = lift(u, base.x0, base.order - 1);
  std::vector<Jet> velocity;
  velocity.reserve(d);
  for (int a = 0; a < d; ++a) velocity.push_back(u_jet * base.normal[a]);
  std::vector<Jet> phi = geodesic_flow_phi(base, g, velocity, flow_order);
  std::vector<Jet> out;
  out.reserve(d);
  for (int a = 0; a < d; ++a) out.push_back(phi[a].substituted(n, t).truncated(out_order));
  return out;
}

namespace {

double w3_integrand(const SurfaceStack& st) {
  DTensor hinv = value_of(st.h_inv);
  DTensor lo = value_of(st.lo);
  DTensor lo2 = dalg::mul2(hinv, lo, lo);
  double trlo3 = dalg::tr2(hinv, dalg::mul2(hinv, lo2, lo));
  double lo_what = dalg::ip2(hinv, lo, value_of(st.w_hat));
  return trlo3 + lo_what;
}

struct VariationSamples {
  std::vector<std::vector<double>> w3_at;  // per t in `ts` (signed)
  double rhs = 0;
};

/// One pass over the grid: per point, one full stack (serving B3 and the flow
/// initial data) and one displaced lean stack per t step.
VariationSamples variation_pass(const Scenario& s, const ScalarField& u,
                                const std::vector<double>& ts_signed, int grid,
                                int flow_order) {
  const int n = s.n();
  std::size_t count = 1;
  for (int v = 0; v < n; ++v) count *= grid;
  VariationSamples out;
  out.w3_at.assign(ts_signed.size(), std::vector<double>(count));
  std::vector<double> rhs_vals(count);
  parallel_for(count, [&](std::size_t flat) {
    std::vector<double> x = grid_point(s, grid, flat);
    SurfaceStack base = build_surface_stack(s.embedding, s.metric, x, 5, 1);
    rhs_vals[flat] =
        6.0 * u.eval(x) * b3_final_on_stack(base) * dvol_ratio(base);
    Jet u_jet = lift(u, base.x0, base.order - 1);
    std::vector<Jet> velocity;
    for (int a = 0; a < n + 1; ++a) velocity.push_back(u_jet * base.normal[a]);
    std::vector<Jet> phi = geodesic_flow_phi(base, s.metric, velocity, flow_order);
    for (std::size_t k = 0; k < ts_signed.size(); ++k) {
      std::vector<Jet> emb_t;
      for (int a = 0; a < n + 1; ++a)
        emb_t.push_back(phi[a].substituted(n, ts_signed[k]).truncated(4));
      try {
        SurfaceStack st = build_surface_stack_from_jets(
            std::move(emb_t), s.metric, s.embedding.normal_orientation, 0, true);
        out.w3_at[k][flat] = w3_integrand(st) * dvol_ratio(st);
      } catch (const EmbeddingError& e) {
        throw EmbeddingError(std::string(e.what()) +
                             " (displaced surface degenerated; try a smaller t step)");
      }
    }
  });
  double cell = 1;
  for (int v = 0; v < n; ++v) cell *= kTwoPi / grid;
  for (double v : rhs_vals) out.rhs += v;
  out.rhs *= cell;
  return out;
}

double sum_cells(const std::vector<double>& vals, int n, int grid) {
  double acc = 0;
  for (double v : vals) acc += v;
  double cell = 1;
  for (int v = 0; v < n; ++v) cell *= kTwoPi / grid;
  return acc * cell;
}

}  // namespace

FunctionalReport normal_variation(const Scenario& s, const ScalarField& u,
                                  std::vector<double> ts, int grid) {
  if (s.n() != 3) throw ScopeError("normal_variation: n = 3 scenarios only");
  if (!s.has_tag("closed")) throw ScopeError("normal_variation: closed scenarios only");
  std::sort(ts.begin(), ts.end());
  if (ts.size() < 2) throw ScopeError("normal_variation: need at least two t steps");

  FunctionalReport rep;
  rep.scenario_id = s.id;
  rep.t_steps = ts;
  const int flow_order = 6;

  rep.w3 = integrate_w3(s, grid, 4);

  std::vector<double> ts_signed;
  for (double t : ts) {
    ts_signed.push_back(t);
    ts_signed.push_back(-t);
  }
  VariationSamples samples = variation_pass(s, u, ts_signed, grid, flow_order);
  rep.rhs = samples.rhs;
  {
    VariationSamples coarse = variation_pass(s, u, {ts[0]}, grid / 2, flow_order);
    rep.quad_err = std::abs(rep.rhs - coarse.rhs);
  }
  for (std::size_t k = 0; k < ts.size(); ++k) {
    double wp = sum_cells(samples.w3_at[2 * k], s.n(), grid);
    double wm = sum_cells(samples.w3_at[2 * k + 1], s.n(), grid);
    rep.d_values.push_back((wp - wm) / (2.0 * ts[k]));
  }
  // One Richardson step per adjacent pair (assumes ts[k+1] = 2 ts[k]).
  std::vector<double> richardson;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k)
    richardson.push_back((4.0 * rep.d_values[k] - rep.d_values[k + 1]) / 3.0);
  rep.variation_fd = richardson.front();
  rep.residual = std::abs(-rep.variation_fd - rep.rhs);

  const double truth = -rep.rhs;
  auto order_of = [&](double coarse, double fine) {
    double ec = std::abs(coarse - truth), ef = std::abs(fine - truth);
    if (ef <= 0 || ec <= 0) return 0.0;
    return std::log2(ec / ef);
  };
  if (rep.d_values.size() >= 2)
    rep.fd_order_pre = order_of(rep.d_values[1], rep.d_values[0]);
  if (richardson.size() >= 2)
    rep.fd_order_post = order_of(richardson[1], richardson[0]);
  return rep;
}

VariationFormulaCheck variation_formula_check(const Scenario& s, const ScalarField& u,
                                              std::span<const double> x0, double t0) {
  const int order = 6;
  const int flow_order = 8;
  SurfaceStack base = build_surface_stack(s.embedding, s.metric, x0, order);
  const int n = base.n;

  struct Snapshot {
    DTensor h, L;
    double H, dvol;
  };
  auto snap = [&](double t) {
    std::vector<Jet> emb_t =
        displaced_embedding_jets(base, s.metric, u, t, flow_order, order - 1);
    SurfaceStack st = build_surface_stack_from_jets(std::move(emb_t), s.metric,
                                                    s.embedding.normal_orientation, 0);
    return Snapshot{value_of(st.h), value_of(st.L), st.H.value(), dvol_ratio(st)};
  };

  // Central differences with one Richardson step.
  Snapshot p1 = snap(t0), m1 = snap(-t0), p2 = snap(2 * t0), m2 = snap(-2 * t0);
  auto richardson = [&](double f_p1, double f_m1, double f_p2, double f_m2) {
    double d1 = (f_p1 - f_m1) / (2 * t0);
    double d2 = (f_p2 - f_m2) / (4 * t0);
    return (4 * d1 - d2) / 3;
  };

  internal::SV v(base);
  double u0 = u.eval(std::vector<double>(x0.begin(), x0.end()));
  Jet u_jet = lift(u, base.x0, order);
  DTensor hess_u = value_of(base.hess(u_jet));
  double lap_u = dalg::tr2(v.hinv, hess_u);
  DTensor L2 = dalg::mul2(v.hinv, v.L, v.L);
  double normL2 = dalg::ip2(v.hinv, v.L, v.L);

  VariationFormulaCheck out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dh = richardson(p1.h.at(i, j), m1.h.at(i, j), p2.h.at(i, j), m2.h.at(i, j));
      out.residual_h = std::max(out.residual_h, std::abs(dh - 2.0 * u0 * v.L.at(i, j)));
      double dL = richardson(p1.L.at(i, j), m1.L.at(i, j), p2.L.at(i, j), m2.L.at(i, j));
      double expect = -hess_u.at(i, j) + u0 * L2.at(i, j) - u0 * v.gbar.at(i, j);
      out.residual_L = std::max(out.residual_L, std::abs(dL - expect));
    }
  double dH = richardson(p1.H, m1.H, p2.H, m2.H);
  out.residual_H = std::abs(3.0 * dH - (-lap_u - u0 * normL2 - u0 * v.ric00));
  double dv = richardson(p1.dvol, m1.dvol, p2.dvol, m2.dvol);
  double dvol0 = dvol_ratio(base);
  out.residual_dvol = std::abs(dv - 3.0 * u0 * v.H * dvol0);
  return out;
}

}  // namespace yamabe
