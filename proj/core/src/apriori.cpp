#include "lanslab/apriori.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lanslab/errors.hpp"
#include "lanslab/inequality_lab.hpp"
#include "lanslab/spectral.hpp"

namespace lanslab {

namespace {

nlohmann::json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double safe_ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

// (a . grad) b, i.e. sum_i a_i d_i b_j, from physical samples.
VectorSamples advect(const VectorSamples& a, const TensorSamples& grad_b) {
  const int n = a.dim();
  VectorSamples out(a.grid());
  for (std::size_t x = 0; x < a.grid().num_points(); ++x)
    for (int j = 0; j < n; ++j) {
      Complex acc{};
      for (int i = 0; i < n; ++i) acc += a[i][x] * grad_b(j, i)[x];
      out[j][x] = acc;
    }
  return out;
}

VectorField spectral(const VectorSamples& s) { return dealias(forward_transform(s)); }

double samples_l2(const VectorSamples& s) { return lp_norm(s, 2.0); }

VectorField minus_a(const VectorField& f) { return laplacian(f) * -1.0; }

const VectorField& state_at(const Trajectory& v, double t, const VectorField& zero) {
  if (v.empty()) return zero;
  return v.at_time(t);
}

}  // namespace

double energy_pair(const VectorField& u, double alpha) {
  const double l2 = l2_norm(u);
  const double h1 = sobolev_seminorm(u, 1.0);
  return l2 * l2 + alpha * alpha * h1 * h1;
}

double CancellationResiduals::max_normalized() const { return std::max({i1, i2, i3}); }

CancellationResiduals cancellation_check(const VectorField& u, double alpha) {
  const VectorSamples us = inverse_transform(u);
  const TensorSamples gu = inverse_transform(gradient(u));
  const VectorSamples nl = advect(us, gu);
  const double un = l2_norm(u);
  CancellationResiduals r;

  const VectorField nls = spectral(nl);
  r.i1_raw = std::abs(inner_product(nls, u));
  r.i1 = safe_ratio(r.i1_raw, samples_l2(nl) * un);

  // Gradient part of the nonlinearity, removed by the projection.
  VectorField grad_part = nls;
  grad_part -= leray_project(nls);
  r.i3_raw = std::abs(inner_product(grad_part, u));
  r.i3 = safe_ratio(r.i3_raw, samples_l2(nl) * un);

  if (alpha != 0.0) {
    const VectorField lap = laplacian(u);
    const VectorSamples lap_s = inverse_transform(lap);
    const VectorSamples t1 = advect(us, inverse_transform(gradient(lap)));
    VectorSamples t2(u.grid());
    const int n = u.dim();
    for (std::size_t x = 0; x < u.grid().num_points(); ++x)
      for (int j = 0; j < n; ++j) {
        Complex acc{};
        for (int i = 0; i < n; ++i) acc += gu(i, j)[x] * lap_s[i][x];
        t2[j][x] = acc;
      }
    const double a2 = alpha * alpha;
    r.i2_raw = std::abs(a2 * (inner_product(spectral(t1), u) + inner_product(spectral(t2), u)));
    r.i2 = safe_ratio(r.i2_raw, a2 * (samples_l2(t1) + samples_l2(t2)) * un);
  }
  return r;
}

double h2p_norm(const VectorField& v, double p) { return lp_norm(bessel_potential(v, 2.0), p); }

// ----------------------------------------------------------------- Gronwall

namespace {

struct GronwallSeries {
  std::vector<double> times, e, g, vp;
};

GronwallSeries gronwall_series(const Trajectory& u, const Trajectory& v, double alpha, double a, double p) {
  if (u.empty()) throw std::invalid_argument("gronwall: empty trajectory");
  GronwallSeries s;
  const VectorField zero(u.state(0).grid());
  double acc = 0.0, prev_h = 0.0, prev_t = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.time(i);
    if (t < a * (1.0 - 1e-12) - 1e-300) continue;
    if (!v.empty() && !v.find_time(t)) throw std::invalid_argument("gronwall: v has no node at t = " + std::to_string(t));
    const VectorField& vs = state_at(v, t, zero);
    require_same_grid(u.state(i).grid(), vs.grid(), "gronwall_monitor");
    const double h = v.empty() ? 0.0 : h2p_norm(vs, p);
    if (!first) acc += 0.5 * (t - prev_t) * (h + prev_h);
    first = false;
    prev_t = t;
    prev_h = h;
    s.times.push_back(t);
    s.e.push_back(energy_pair(u.state(i), alpha));
    s.g.push_back(acc);
    s.vp.push_back(v.empty() ? 0.0 : lp_norm(vs, p));
  }
  if (s.times.empty()) throw std::invalid_argument("gronwall: no nodes after a");
  return s;
}

}  // namespace

double calibrate_gronwall_constant(const Trajectory& u, const Trajectory& v, double alpha, double a, double p) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gronwall: requires alpha > 0");
  const auto s = gronwall_series(u, v, alpha, a, p);
  double c = 0.0;
  // Sup of the step-wise growth rates, the constant of the differential form.
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    const double dg = s.g[i] - s.g[i - 1];
    if (dg <= 0.0 || s.e[i - 1] <= 0.0 || s.e[i] <= 0.0) continue;
    c = std::max(c, alpha * alpha * std::log(s.e[i] / s.e[i - 1]) / dg);
  }
  return c;
}

double EnergyReport::max_bound_ratio() const {
  double m = 0.0;
  for (double r : bound_ratio) m = std::max(m, r);
  return m;
}

nlohmann::json EnergyReport::to_json() const {
  return {{"times", times},           {"e_pair", e_pair},       {"h2", h2},
          {"h3", h3},                 {"v_integral", v_integral}, {"bound_ratio", bound_ratio},
          {"sign_condition", sign_condition}, {"constant", constant}, {"a", a},
          {"p", p},                   {"monotone", monotone},   {"max_bound_ratio", max_bound_ratio()}};
}

EnergyReport gronwall_monitor(const Trajectory& u, const Trajectory& v, double alpha, const GronwallOptions& opt) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gronwall: requires alpha > 0");
  const auto s = gronwall_series(u, v, alpha, opt.a, opt.p);
  EnergyReport r;
  r.a = opt.a;
  r.p = opt.p;
  r.constant = std::isnan(opt.constant) ? calibrate_gronwall_constant(u, v, alpha, opt.a, opt.p) : opt.constant;
  r.times = s.times;
  r.e_pair = s.e;
  r.v_integral = s.g;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const VectorField& ui = u.at_time(s.times[i]);
    r.h2.push_back(sobolev_seminorm(ui, 2.0));
    r.h3.push_back(sobolev_seminorm(ui, 3.0));
    const double bound = s.e[0] * std::exp(r.constant * s.g[i] / (alpha * alpha));
    r.bound_ratio.push_back(safe_ratio(s.e[i], bound));
    r.sign_condition.push_back(r.constant * s.vp[i] - 1.0);
    if (i > 0 && s.e[i] > s.e[i - 1] * (1.0 + 1e-12)) r.monotone = false;
  }
  return r;
}

// ------------------------------------------------------------- H^2 estimate

H2Terms h2_terms(const VectorField& u, const VectorField& v, const LansConfig& cfg) {
  require_same_grid(u.grid(), v.grid(), "h2_terms");
  const int n = u.dim();
  const VectorField au = minus_a(u);
  auto pair = [&](const VectorField& x) { return -inner_product(minus_a(leray_project(x)), au); };

  const VectorSamples us = inverse_transform(u);
  const TensorSamples gu = inverse_transform(gradient(u));
  H2Terms t;
  t.k1 = pair(spectral(advect(us, gu)));
  t.k2 = pair(reynolds_stress(u, u, cfg));

  const VectorSamples vs = inverse_transform(v);
  const TensorSamples gv = inverse_transform(gradient(v));
  TensorSamples uv(u.grid()), gg(u.grid());
  for (std::size_t x = 0; x < u.grid().num_points(); ++x)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        uv(i, j)[x] = us[i][x] * vs[j][x];
        Complex acc{};
        for (int k = 0; k < n; ++k) acc += gu(i, k)[x] * gv(k, j)[x];
        gg(i, j)[x] = acc;
      }
  t.l1 = pair(divergence(dealias(forward_transform(uv))));
  t.l2 = pair(divergence(helmholtz_inverse(dealias(forward_transform(gg)), cfg.alpha)));
  t.h3 = sobolev_seminorm(u, 3.0);
  return t;
}

namespace {

double term_value(const H2Terms& t, int i) {
  switch (i) {
    case 0:
      return t.k1;
    case 1:
      return t.k2;
    case 2:
      return t.l1;
    default:
      return t.l2;
  }
}

const char* term_name(int i) {
  static const char* names[4] = {"K1", "K2", "L1", "L2"};
  return names[i];
}

// H^3 seminorm keeping only the modes a grid of half the size would retain.
double coarse_h3(const VectorField& u) {
  const TorusGrid& g = u.grid();
  const int cut = static_cast<int>(std::floor(g.dealias_fraction() * (g.points_per_axis() / 2) / 2.0 + 1e-9));
  VectorField c = u;
  for_each_mode(g, [&](std::size_t idx, const std::array<int, 3>& k) {
    for (int a = 0; a < g.dim(); ++a)
      if (std::abs(k[a]) > cut) {
        for (std::size_t comp = 0; comp < c.components(); ++comp) c[comp][idx] = 0.0;
        return;
      }
  });
  return sobolev_seminorm(c, 3.0);
}

nlohmann::json terms_json(const std::vector<H2Terms>& terms) {
  nlohmann::json j;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> vals;
    for (const auto& t : terms) vals.push_back(term_value(t, i));
    j[term_name(i)] = vals;
  }
  std::vector<double> h3;
  for (const auto& t : terms) h3.push_back(t.h3);
  j["H3"] = h3;
  return j;
}

}  // namespace

nlohmann::json H2TermReport::to_json() const {
  nlohmann::json j = {{"times", times}, {"terms", terms_json(terms)}, {"h3_coarse_mismatch", h3_coarse_mismatch},
                      {"under_resolved", under_resolved}};
  for (int i = 0; i < 4; ++i) j["constants"][term_name(i)] = number(constant[i]);
  return j;
}

H2TermReport h2_term_monitor(const Trajectory& u, const Trajectory& v, const LansConfig& cfg) {
  if (u.empty()) throw std::invalid_argument("h2_term_monitor: empty trajectory");
  H2TermReport r;
  const VectorField zero(cfg.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.time(i);
    const H2Terms terms = h2_terms(u.state(i), state_at(v, t, zero), cfg);
    r.times.push_back(t);
    r.terms.push_back(terms);
    for (int k = 0; k < 4; ++k) {
      if (terms.h3 == 0.0) continue;
      r.constant[k] = std::max(r.constant[k], std::abs(term_value(terms, k)) / std::pow(terms.h3, kH2BoundExponents[k]));
    }
    if (terms.h3 > 0.0)
      r.h3_coarse_mismatch = std::max(r.h3_coarse_mismatch, std::abs(terms.h3 - coarse_h3(u.state(i))) / terms.h3);
  }
  r.under_resolved = r.h3_coarse_mismatch > 0.05;
  return r;
}

VectorField dilate(const VectorField& u, int lambda, double power) {
  if (lambda < 1) throw std::invalid_argument("dilate: lambda must be a positive integer");
  const TorusGrid& g = u.grid();
  const int cut = g.dealias_cutoff();
  double peak = 0.0;
  for (const auto& c : u)
    for (const auto& z : c) peak = std::max(peak, std::abs(z));
  const double scale = std::pow(double(lambda), -power);
  VectorField out(g, u.real_valued());
  for_each_mode(g, [&](std::size_t idx, const std::array<int, 3>& k) {
    bool nonzero = false;
    for (std::size_t comp = 0; comp < u.components(); ++comp) nonzero = nonzero || std::abs(u[comp][idx]) > 1e-14 * peak;
    if (!nonzero) return;
    std::array<int, 3> target{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
      target[a] = lambda * k[a];
      if (std::abs(target[a]) > cut) throw std::invalid_argument("dilate: dilated mode outside the retained band");
    }
    const std::size_t t = g.linear_index(target);
    for (std::size_t comp = 0; comp < u.components(); ++comp) out[comp][t] = u[comp][idx] * scale;
  });
  return out;
}

bool H2ExponentFit::within_bounds(double tolerance) const {
  for (int i = 0; i < 4; ++i)
    if (!std::isnan(slope[i]) && slope[i] > kH2BoundExponents[i] * (1.0 + tolerance)) return false;
  return true;
}

nlohmann::json H2ExponentFit::to_json() const {
  nlohmann::json j = {{"lambdas", lambdas}, {"h3", h3}, {"terms", terms_json(terms)}, {"within_bounds", within_bounds()}};
  for (int i = 0; i < 4; ++i) {
    j["slopes"][term_name(i)] = number(slope[i]);
    j["bounds"][term_name(i)] = kH2BoundExponents[i];
  }
  return j;
}

H2ExponentFit h2_exponent_check(const VectorField& u, const VectorField& v, const LansConfig& cfg,
                                const std::vector<int>& lambdas) {
  if (lambdas.size() < 2) throw std::invalid_argument("h2_exponent_check: need at least two dilation factors");
  H2ExponentFit fit;
  fit.lambdas = lambdas;
  for (int l : lambdas) {
    const H2Terms t = h2_terms(dilate(u, l), dilate(v, l, 2.0), cfg);
    fit.terms.push_back(t);
    fit.h3.push_back(t.h3);
  }
  for (int i = 0; i < 4; ++i) {
    std::vector<FitSample> s;
    bool vanishes = false;
    for (const auto& t : fit.terms) {
      const double val = std::abs(term_value(t, i));
      if (val == 0.0 || t.h3 == 0.0) vanishes = true;
      s.push_back({std::log(t.h3), std::log(val)});
    }
    fit.slope[i] = vanishes ? std::numeric_limits<double>::quiet_NaN() : least_squares(s).slope;
  }
  return fit;
}

// -------------------------------------------------------- interpolation split

double SplitConfig::theta() const {
  return (1.0 / p - 1.0 / p_tilde) / (0.5 - 1.0 / p_tilde);
}

void SplitConfig::validate() const {
  if (!(p > 2.0) || !(p_tilde > p)) throw std::invalid_argument("split: requires p_tilde > p > 2");
  if (!(q >= 1.0)) throw std::invalid_argument("split: requires q >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("split: requires epsilon > 0");
  if (j_cut < -1) throw std::invalid_argument("split: j_cut must be >= 0, or -1 for automatic");
}

SplitResult interpolation_split(const VectorField& w0, const SplitConfig& scfg, const DyadicPartition& part) {
  scfg.validate();
  require_same_grid(w0.grid(), part.grid(), "interpolation_split");
  const TorusGrid& g = part.grid();
  const int jmax = scfg.j_cut_max < 0 ? part.top_level() : std::min(scfg.j_cut_max, part.top_level());
  int jstart = scfg.j_cut;
  if (jstart < 0) {
    // Lowest threshold whose low-pass keeps the unit lattice modes.
    jstart = 0;
    while (std::ldexp(1.0, jstart + 1) <= g.wavenumber_unit()) ++jstart;
  }
  const BesovIndex tail{3.0 / scfg.p_tilde, scfg.p_tilde, scfg.q};
  SplitResult r(g);
  r.theta = scfg.theta();
  double best = std::numeric_limits<double>::infinity();
  for (int jc = jstart; jc <= jmax; ++jc) {
    // Closed form of S_{jc}: exactly one below 2^{jc} and zero above 2^{jc+1}.
    VectorField u0 = w0;
    const double radius = std::ldexp(1.0, jc + 1);
    for_each_mode(g, [&](std::size_t idx, const std::array<int, 3>& k) {
      const double m = cutoff_profile(part.profile(), std::sqrt(mode_wavenumbers(g, k).k2) / radius);
      if (m == 1.0) return;
      for (std::size_t c = 0; c < u0.components(); ++c) u0[c][idx] *= m;
    });
    VectorField v0 = w0;
    v0 -= u0;
    const double nv = besov_norm(v0, tail, part);
    r.sweep.push_back(nv);
    best = std::min(best, nv);
    if (nv < scfg.epsilon) {
      r.u0 = std::move(u0);
      r.v0 = std::move(v0);
      r.j_cut = jc;
      r.v0_norm = nv;
      return r;
    }
  }
  throw SplitUnreachable("interpolation_split: tail norm target " + std::to_string(scfg.epsilon) +
                             " unreachable, achievable minimum " + std::to_string(best),
                         best);
}

// --------------------------------------------------------- higher regularity

nlohmann::json HigherRegularityTrace::to_json() const {
  return {{"times", times}, {"weighted", weighted}, {"exponent", exponent},
          {"sup", sup},     {"first_value", first_value}, {"vanishing", vanishing}};
}

HigherRegularityTrace higher_regularity_trace(const Trajectory& traj, double k, double base,
                                              const DyadicPartition& part, double q) {
  if (k < base) throw std::invalid_argument("higher_regularity_trace: requires k >= base");
  HigherRegularityTrace r;
  r.exponent = (k - base) / 2.0;
  bool have_first = false;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (t <= 0.0 && r.exponent > 0.0) continue;
    const double w = std::pow(t, r.exponent) * besov_norm(traj.state(i), BesovIndex{k, 2.0, q}, part);
    r.times.push_back(t);
    r.weighted.push_back(w);
    r.sup = std::max(r.sup, w);
    if (!have_first && t > 0.0) {
      r.first_value = w;
      have_first = true;
    }
  }
  r.vanishing = have_first && r.first_value <= 0.5 * r.sup;
  return r;
}

double trace_refinement_change(const HigherRegularityTrace& coarse, const HigherRegularityTrace& fine) {
  return safe_ratio(std::abs(coarse.sup - fine.sup), fine.sup);
}

double bootstrap_consistency(const Trajectory& traj, double t1, const LansConfig& cfg, double resolve_dt,
                             const DyadicPartition& part, double q) {
  const auto i1 = traj.find_time(t1);
  if (!i1) throw std::invalid_argument("bootstrap_consistency: restart time is not a trajectory node");
  const double span = traj.times().back() - traj.time(*i1);
  if (span <= 0.0) return 0.0;
  const Trajectory re = solve_lans(traj.state(*i1), cfg, span, resolve_dt);
  const BesovIndex idx{1.5, 2.0, q};
  double worst = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i) {
    const auto j = traj.find_time(traj.time(*i1) + re.time(i));
    if (!j) continue;
    VectorField d = re.state(i);
    d -= traj.state(*j);
    worst = std::max(worst, besov_norm(d, idx, part));
  }
  return worst;
}

// ------------------------------------------------------------------ pipeline

nlohmann::json PipelineReport::to_json() const {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : picard.history)
    hist.push_back({{"iterate", h.iterate_index},
                    {"delta_norm", number(h.delta_norm)},
                    {"e_norm", number(h.e_norm)},
                    {"contraction_ratio", number(h.contraction_ratio)}});
  return {{"split",
           {{"j_cut", split.j_cut}, {"theta", split.theta}, {"v0_norm", split.v0_norm}, {"sweep", split.sweep}}},
          {"picard",
           {{"history", hist},
            {"residual", number(picard.residual)},
            {"max_ratio_after_first", number(picard.max_ratio_after_first)}}},
          {"times", times},
          {"discrepancy", discrepancy},
          {"self_error", self_error},
          {"max_discrepancy", max_discrepancy},
          {"max_self_error", max_self_error},
          {"pass", passed},
          {"monitors", monitors}};
}

PipelineReport run_pipeline(const VectorField& w0, const PipelineConfig& cfg) {
  cfg.lans.validate();
  cfg.split.validate();
  require_same_grid(w0.grid(), cfg.lans.grid, "run_pipeline");
  const DyadicPartition part(cfg.lans.grid);
  const double p = cfg.split.p;
  const double q = cfg.split.q;

  PipelineReport r(cfg.lans.grid);
  r.split = interpolation_split(w0, cfg.split, part);
  r.v = solve_lans(r.split.v0, cfg.lans, cfg.t_end, cfg.dt);

  MildSolverConfig m = cfg.picard;
  m.t_end = cfg.t_end;
  m.dt = cfg.dt;
  r.picard = picard_iterate(r.split.u0, r.v, cfg.lans, m);

  r.u = solve_mlans(r.split.u0, r.v, cfg.lans, cfg.t_end, cfg.dt);
  r.w = solve_lans(w0, cfg.lans, cfg.t_end, cfg.dt);
  const Trajectory w_half = solve_lans(w0, cfg.lans, cfg.t_end, cfg.dt / 2.0);

  const BesovIndex idx{3.0 / p, p, q};
  for (std::size_t i = 0; i < r.w.size(); ++i) {
    const double t = r.w.time(i);
    VectorField sum = r.u.at_time(t);
    sum += r.v.at_time(t);
    sum -= r.w.state(i);
    VectorField self = r.w.state(i);
    self -= w_half.at_time(t);
    r.times.push_back(t);
    r.discrepancy.push_back(besov_norm(sum, idx, part));
    r.self_error.push_back(besov_norm(self, idx, part));
  }
  r.max_discrepancy = *std::max_element(r.discrepancy.begin(), r.discrepancy.end());
  r.max_self_error = *std::max_element(r.self_error.begin(), r.self_error.end());
  r.passed = r.max_discrepancy <= cfg.tolerance_factor * r.max_self_error;

  if (cfg.monitors) {
    if (cfg.lans.alpha > 0.0) r.monitors["energy"] = gronwall_monitor(r.u, r.v, cfg.lans.alpha).to_json();
    const auto c = cancellation_check(r.u.back(), cfg.lans.alpha);
    r.monitors["cancellation"] = {{"I1", c.i1}, {"I2", c.i2}, {"I3", c.i3}};
    r.monitors["h2_terms"] = h2_term_monitor(r.u, r.v, cfg.lans).to_json();
    r.monitors["higher_regularity"] = higher_regularity_trace(r.u, 2.5, 1.5, part, q).to_json();
    const double t_mid = r.w.time(r.w.size() / 2);
    r.monitors["bootstrap"] = {{"restart_time", t_mid},
                               {"discrepancy", bootstrap_consistency(r.w, t_mid, cfg.lans, cfg.dt / 2.0, part, q)}};
  }
  return r;
}

}  // namespace lanslab
