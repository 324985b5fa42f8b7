#include "lanslab/lans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lanslab/errors.hpp"
#include "lanslab/spectral.hpp"

namespace lanslab {

void LansConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("LansConfig: alpha must be >= 0");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("LansConfig: nu must be > 0");
}

double relative_divergence(const VectorField& u) {
  double div2 = 0.0, grad2 = 0.0;
  const int n = u.dim();
  for_each_mode(u.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const auto w = mode_wavenumbers(u.grid(), k);
    Complex d{};
    double kd2 = 0.0;
    for (int j = 0; j < n; ++j) {
      d += w.k_diff[j] * u[j][idx];
      kd2 += w.k_diff[j] * w.k_diff[j];
    }
    div2 += std::norm(d);
    for (int j = 0; j < n; ++j) grad2 += kd2 * std::norm(u[j][idx]);
  });
  return grad2 == 0.0 ? 0.0 : std::sqrt(div2 / grad2);
}

namespace {

struct PhysicalVelocity {
  VectorSamples u;
  TensorSamples grad;
};

PhysicalVelocity to_physical(const VectorField& f, bool with_grad) {
  PhysicalVelocity p{inverse_transform(f), TensorSamples(f.grid(), f.real_valued())};
  if (with_grad) p.grad = inverse_transform(gradient(f));
  return p;
}

// Tensor entries (i, j) at component i * n + j, already forward transformed.
VectorField divergence_of(const TorusGrid& grid, const std::vector<ComplexArray>* flux,
                          const std::vector<ComplexArray>* stress, double alpha, bool real) {
  VectorField out(grid, real);
  const int n = grid.dim();
  const double a2 = alpha * alpha;
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& k) {
    const auto w = mode_wavenumbers(grid, k);
    const double c = 0.5 * a2 / (1.0 + a2 * w.k2);
    for (int i = 0; i < n; ++i) {
      Complex acc{};
      for (int j = 0; j < n; ++j) {
        Complex t{};
        if (flux) t += (*flux)[i * n + j][idx];
        if (stress) t += c * (*stress)[i * n + j][idx];
        acc += Complex(0.0, w.k_diff[j]) * t;
      }
      out[i][idx] = acc;
    }
  });
  dealias_in_place(out);
  return out;
}

std::vector<ComplexArray> symmetric_flux(const PhysicalVelocity& f, const PhysicalVelocity& g) {
  const auto& grid = f.u.grid();
  const int n = grid.dim();
  const std::size_t np = grid.num_points();
  std::vector<ComplexArray> t(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ComplexArray e(np);
      const auto *fi = f.u[i].data(), *fj = f.u[j].data(), *gi = g.u[i].data(), *gj = g.u[j].data();
      for (std::size_t m = 0; m < np; ++m) e[m] = 0.5 * (fi[m] * gj[m] + gi[m] * fj[m]);
      fft::forward(grid, e);
      if (i != j) t[j * n + i] = e;
      t[i * n + j] = std::move(e);
    }
  return t;
}

// Def(f) Rot(g) + Def(g) Rot(f), pointwise matrix products, forward transformed.
std::vector<ComplexArray> stress_tensor(const PhysicalVelocity& f, const PhysicalVelocity& g) {
  const auto& grid = f.u.grid();
  const int n = grid.dim();
  const std::size_t np = grid.num_points();
  std::vector<ComplexArray> t(n * n, ComplexArray(np));
  double df[3][3], rf[3][3], dg[3][3], rg[3][3];
  for (std::size_t m = 0; m < np; ++m) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double fij = f.grad[i * n + j][m].real(), fji = f.grad[j * n + i][m].real();
        const double gij = g.grad[i * n + j][m].real(), gji = g.grad[j * n + i][m].real();
        df[i][j] = 0.5 * (fij + fji);
        rf[i][j] = 0.5 * (fij - fji);
        dg[i][j] = 0.5 * (gij + gji);
        rg[i][j] = 0.5 * (gij - gji);
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += df[i][l] * rg[l][j] + dg[i][l] * rf[l][j];
        t[i * n + j][m] = acc;
      }
  }
  for (auto& e : t) fft::forward(grid, e);
  return t;
}

void check_grid(const VectorField& f, const LansConfig& cfg, const char* where) {
  require_same_grid(f.grid(), cfg.grid, where);
}

VectorField bilinear(const VectorField& f, const VectorField& g, const LansConfig& cfg, bool with_flux) {
  const bool stress = cfg.alpha != 0.0;
  const auto pf = to_physical(f, stress);
  const bool same = &f == &g;
  const PhysicalVelocity pg_store = same ? PhysicalVelocity{VectorSamples(f.grid()), TensorSamples(f.grid())}
                                         : to_physical(g, stress);
  const PhysicalVelocity& pg = same ? pf : pg_store;
  std::vector<ComplexArray> flux, st;
  if (with_flux) flux = symmetric_flux(pf, pg);
  if (stress) st = stress_tensor(pf, pg);
  return divergence_of(cfg.grid, with_flux ? &flux : nullptr, stress ? &st : nullptr, cfg.alpha,
                       f.real_valued() && g.real_valued());
}

void require_solenoidal(const VectorField& u, const char* where) {
  const double r = relative_divergence(u);
  if (r > 1e-8) {
    std::ostringstream os;
    os << where << ": input is not divergence-free (relative divergence " << r << ")";
    throw NotSolenoidal(os.str());
  }
}

// -P B(f, g)
VectorField projected_tendency(const VectorField& f, const VectorField& g, const LansConfig& cfg) {
  auto b = leray_project(bilinear(f, g, cfg, true));
  b *= -1.0;
  return b;
}

VectorField viscous(const VectorField& u, double nu) {
  auto l = laplacian(u);
  l *= nu;
  return l;
}

bool all_finite(const VectorField& f) {
  for (const auto& c : f)
    for (const auto& z : c)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

std::size_t step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("time stepping: need dt > 0 and t_end >= 0");
  const double steps = std::round(t_end / dt);
  if (std::abs(steps * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw std::invalid_argument("time stepping: t_end must be an integer multiple of dt");
  return static_cast<std::size_t>(steps);
}

template <class Tendency>
Trajectory march(const VectorField& x0, const LansConfig& cfg, double t_end, double dt, const MarchOptions& opt,
                 Tendency&& tendency) {
  cfg.validate();
  if (opt.output_every < 1) throw std::invalid_argument("march: output_every must be >= 1");
  const std::size_t steps = step_count(t_end, dt);
  VectorField x = dealias(x0);
  Trajectory traj;
  traj.append(0.0, x);
  for (std::size_t n = 0; n < steps; ++n) {
    if (opt.nonlinear) {
      const VectorField nn = tendency(x, n);
      VectorField stage = x;
      stage.axpy(dt, nn);
      stage = heat_propagate(stage, dt, cfg.nu);
      const VectorField na = tendency(stage, n + 1);
      x.axpy(0.5 * dt, nn);
      x = heat_propagate(x, dt, cfg.nu);
      x.axpy(0.5 * dt, na);
      x = leray_project(x);
      dealias_in_place(x);
    } else {
      x = heat_propagate(x, dt, cfg.nu);
    }
    if (!all_finite(x)) {
      std::ostringstream os;
      os << "time marcher: non-finite state at step " << (n + 1) << " (t = " << (n + 1) * dt << ")";
      throw SolverBlowup(os.str(), n + 1);
    }
    if ((n + 1) % static_cast<std::size_t>(opt.output_every) == 0 || n + 1 == steps)
      traj.append(static_cast<double>(n + 1) * dt, x);
  }
  traj.provenance = {{"alpha", cfg.alpha},
                     {"nu", cfg.nu},
                     {"points_per_axis", cfg.grid.points_per_axis()},
                     {"dim", cfg.grid.dim()},
                     {"box_length", cfg.grid.box_length()},
                     {"dealias_fraction", cfg.grid.dealias_fraction()},
                     {"dt", dt},
                     {"t_end", t_end},
                     {"nonlinear", opt.nonlinear},
                     {"scheme", "integrating-factor Heun"}};
  return traj;
}

}  // namespace

VectorField reynolds_stress(const VectorField& f, const VectorField& g, const LansConfig& cfg) {
  check_grid(f, cfg, "reynolds_stress");
  check_grid(g, cfg, "reynolds_stress");
  if (cfg.alpha == 0.0) return VectorField(cfg.grid, f.real_valued() && g.real_valued());
  return bilinear(f, g, cfg, false);
}

VectorField lans_bilinear(const VectorField& f, const VectorField& g, const LansConfig& cfg) {
  check_grid(f, cfg, "lans_bilinear");
  check_grid(g, cfg, "lans_bilinear");
  return bilinear(f, g, cfg, true);
}

VectorField lans_rhs(const VectorField& w, const LansConfig& cfg) {
  cfg.validate();
  check_grid(w, cfg, "lans_rhs");
  require_solenoidal(w, "lans_rhs");
  auto out = viscous(w, cfg.nu);
  out += projected_tendency(w, w, cfg);
  return out;
}

VectorField mlans_rhs(const VectorField& u, const VectorField& v, const LansConfig& cfg) {
  cfg.validate();
  check_grid(u, cfg, "mlans_rhs");
  check_grid(v, cfg, "mlans_rhs");
  require_solenoidal(u, "mlans_rhs");
  require_solenoidal(v, "mlans_rhs");
  VectorField g = u;
  g.axpy(2.0, v);
  auto out = viscous(u, cfg.nu);
  out += projected_tendency(u, g, cfg);
  return out;
}

template <Rank R>
SpectralField<R> heat_propagate(const SpectralField<R>& f, double t, double nu) {
  if (t < 0.0) throw std::invalid_argument("heat_propagate: t must be >= 0");
  SpectralField<R> out(f.grid(), f.real_valued());
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const double m = std::exp(-nu * t * mode_wavenumbers(f.grid(), k).k2);
    for (std::size_t c = 0; c < f.components(); ++c) out[c][idx] = m * f[c][idx];
  });
  return out;
}

template ScalarField heat_propagate<Rank::scalar>(const ScalarField&, double, double);
template VectorField heat_propagate<Rank::vector>(const VectorField&, double, double);
template TensorField heat_propagate<Rank::tensor>(const TensorField&, double, double);

void Trajectory::append(double t, VectorField state) {
  if (!times_.empty()) {
    if (!(t > times_.back())) throw std::invalid_argument("Trajectory: times must be strictly increasing");
    require_same_grid(states_.front().grid(), state.grid(), "Trajectory::append");
  }
  times_.push_back(t);
  states_.push_back(std::move(state));
}

std::optional<std::size_t> Trajectory::find_time(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t - 1e-9 * std::max(1.0, std::abs(t)));
  if (it != times_.end() && std::abs(*it - t) <= 1e-9 * std::max(1.0, std::abs(t)))
    return static_cast<std::size_t>(it - times_.begin());
  return std::nullopt;
}

const VectorField& Trajectory::at_time(double t) const {
  if (auto i = find_time(t)) return states_[*i];
  std::ostringstream os;
  os << "Trajectory: no stored state at t = " << t;
  throw std::out_of_range(os.str());
}

TrajectoryDiagnostics diagnose(const Trajectory& traj) {
  TrajectoryDiagnostics d;
  if (traj.empty()) return d;
  for (const auto& s : traj.states()) {
    d.max_relative_divergence = std::max(d.max_relative_divergence, relative_divergence(s));
    for (std::size_t c = 0; c < s.components(); ++c)
      d.mean_mode_drift = std::max(d.mean_mode_drift, std::abs(s[c][0] - traj.state(0)[c][0]));
    d.dealiased = d.dealiased && is_dealiased(s);
  }
  return d;
}

Trajectory solve_lans(const VectorField& w0, const LansConfig& cfg, double t_end, double dt,
                      const MarchOptions& opt) {
  check_grid(w0, cfg, "solve_lans");
  require_solenoidal(w0, "solve_lans");
  auto traj = march(w0, cfg, t_end, dt, opt,
                    [&](const VectorField& x, std::size_t) { return projected_tendency(x, x, cfg); });
  traj.provenance["equation"] = "lans";
  return traj;
}

Trajectory solve_mlans(const VectorField& u0, const Trajectory& v, const LansConfig& cfg, double t_end, double dt,
                       const MarchOptions& opt) {
  check_grid(u0, cfg, "solve_mlans");
  require_solenoidal(u0, "solve_mlans");
  const std::size_t steps = step_count(t_end, dt);
  std::vector<const VectorField*> vs(steps + 1, nullptr);
  if (!v.empty()) {
    check_grid(v.state(0), cfg, "solve_mlans");
    for (std::size_t n = 0; n <= steps; ++n) {
      auto i = v.find_time(static_cast<double>(n) * dt);
      if (!i) {
        std::ostringstream os;
        os << "solve_mlans: v trajectory has no state at step time " << n * dt;
        throw std::invalid_argument(os.str());
      }
      vs[n] = &v.state(*i);
    }
  }
  auto traj = march(u0, cfg, t_end, dt, opt, [&](const VectorField& x, std::size_t n) {
    if (!vs[n]) return projected_tendency(x, x, cfg);
    VectorField g = x;
    g.axpy(2.0, *vs[n]);
    return projected_tendency(x, g, cfg);
  });
  traj.provenance["equation"] = "mlans";
  return traj;
}

void MildSolverConfig::validate(int dim) const {
  if (!(t_end > 0.0) || !(dt > 0.0)) throw std::invalid_argument("MildSolverConfig: t_end and dt must be > 0");
  if (!(picard_tol > 0.0)) throw std::invalid_argument("MildSolverConfig: picard_tol must be > 0");
  if (picard_max_iters < 1) throw std::invalid_argument("MildSolverConfig: picard_max_iters must be >= 1");
  if (!(weight_a >= 0.0)) throw std::invalid_argument("MildSolverConfig: weight_a must be >= 0");
  weight_index.validate();
  if (critical_regime) {
    const double expected = 0.5 * (weight_index.s - dim / weight_index.p);
    if (std::abs(weight_a - expected) > 1e-12) {
      std::ostringstream os;
      os << "MildSolverConfig: weight_a = " << weight_a << " but (s - n/p)/2 = " << expected;
      throw std::invalid_argument(os.str());
    }
  }
}

double weighted_norm(const Trajectory& traj, double a, const BesovIndex& idx, double T,
                     const DyadicPartition& part) {
  if (traj.empty()) throw std::invalid_argument("weighted_norm: empty trajectory");
  if (a < 0.0) throw std::invalid_argument("weighted_norm: a must be >= 0");
  double sup = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (t > T * (1.0 + 1e-12)) break;
    const double w = std::pow(t, a);
    if (w == 0.0) continue;
    sup = std::max(sup, w * besov_norm(traj.state(i), idx, part));
  }
  return sup;
}

double e_norm(const Trajectory& traj, const VectorField& u0, const ENormIndices& idx, const DyadicPartition& part) {
  if (traj.empty()) throw std::invalid_argument("e_norm: empty trajectory");
  double base = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    VectorField d = traj.state(i);
    d -= heat_propagate(u0, t, idx.nu);
    base = std::max(base, besov_norm(d, idx.base, part));
    const double w = std::pow(t, idx.a);
    if (w != 0.0) weighted = std::max(weighted, w * besov_norm(traj.state(i), idx.weighted, part));
  }
  return base + weighted;
}

PicardResult picard_iterate(const VectorField& u0, const Trajectory& v, const LansConfig& cfg,
                            const MildSolverConfig& mcfg) {
  cfg.validate();
  mcfg.validate(cfg.grid.dim());
  check_grid(u0, cfg, "picard_iterate");
  require_solenoidal(u0, "picard_iterate");
  const std::size_t steps = step_count(mcfg.t_end, mcfg.dt);
  const double h = mcfg.dt;
  const DyadicPartition part(cfg.grid);
  const BesovIndex base{0.5 * cfg.grid.dim(), 2.0, mcfg.weight_index.q};

  std::vector<double> times(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) times[i] = static_cast<double>(i) * h;

  std::vector<const VectorField*> vs(steps + 1, nullptr);
  if (!v.empty()) {
    check_grid(v.state(0), cfg, "picard_iterate");
    for (std::size_t i = 0; i <= steps; ++i) {
      auto k = v.find_time(times[i]);
      if (!k) {
        std::ostringstream os;
        os << "picard_iterate: v trajectory has no state at node t = " << times[i];
        throw std::invalid_argument(os.str());
      }
      vs[i] = &v.state(*k);
    }
  }

  const VectorField u0d = dealias(u0);
  auto heat0 = [&](std::size_t i) { return heat_propagate(u0d, times[i], cfg.nu); };
  auto tendency = [&](const VectorField& x, std::size_t i) {
    if (!vs[i]) return projected_tendency(x, x, cfg);
    VectorField g = x;
    g.axpy(2.0, *vs[i]);
    return projected_tendency(x, g, cfg);
  };

  // One application of the Duhamel map.
  auto apply_map = [&](const std::vector<VectorField>& cur) {
    std::vector<VectorField> next;
    next.reserve(steps + 1);
    next.push_back(u0d);
    VectorField acc(cfg.grid, u0d.real_valued());
    VectorField prev = tendency(cur[0], 0);
    for (std::size_t i = 1; i <= steps; ++i) {
      if (mcfg.quad_rule == DuhamelRule::trapezoid) {
        VectorField ni = tendency(cur[i], i);
        acc.axpy(0.5 * h, prev);
        acc = heat_propagate(acc, h, cfg.nu);
        acc.axpy(0.5 * h, ni);
        prev = std::move(ni);
      } else {
        acc.axpy(h, prev);
        acc = heat_propagate(acc, h, cfg.nu);
        if (i < steps) prev = tendency(cur[i], i);
      }
      VectorField ui = heat0(i);
      ui += acc;
      ui = leray_project(ui);
      dealias_in_place(ui);
      next.push_back(std::move(ui));
    }
    return next;
  };

  auto distance = [&](const std::vector<VectorField>& a, const std::vector<VectorField>& b) {
    double sup_base = 0.0, sup_w = 0.0;
    for (std::size_t i = 0; i <= steps; ++i) {
      VectorField d = a[i];
      d -= b[i];
      sup_base = std::max(sup_base, besov_norm(d, base, part));
      const double w = std::pow(times[i], mcfg.weight_a);
      if (w != 0.0) sup_w = std::max(sup_w, w * besov_norm(d, mcfg.weight_index, part));
    }
    return sup_base + sup_w;
  };

  auto to_trajectory = [&](std::vector<VectorField>& states) {
    Trajectory t;
    for (std::size_t i = 0; i <= steps; ++i) t.append(times[i], std::move(states[i]));
    return t;
  };

  std::vector<VectorField> cur;
  cur.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) cur.push_back(heat0(i));

  PicardResult result;
  double first_delta = 0.0, prev_delta = 0.0, last_ratio = 0.0;
  for (int m = 1; m <= mcfg.picard_max_iters; ++m) {
    auto next = apply_map(cur);
    const double delta = distance(next, cur);
    IterationState st;
    st.iterate_index = m;
    st.delta_norm = delta;
    st.contraction_ratio = (m >= 2 && prev_delta > 0.0) ? delta / prev_delta : 0.0;
    cur = std::move(next);
    {
      double base_sup = 0.0, w_sup = 0.0;
      for (std::size_t i = 0; i <= steps; ++i) {
        VectorField d = cur[i];
        d -= heat0(i);
        base_sup = std::max(base_sup, besov_norm(d, base, part));
        const double w = std::pow(times[i], mcfg.weight_a);
        if (w != 0.0) w_sup = std::max(w_sup, w * besov_norm(cur[i], mcfg.weight_index, part));
      }
      st.e_norm = base_sup + w_sup;
    }
    result.history.push_back(st);
    if (m >= 2) {
      last_ratio = st.contraction_ratio;
      result.max_ratio_after_first = std::max(result.max_ratio_after_first, last_ratio);
    }
    if (m == 1) first_delta = delta;
    prev_delta = delta;

    if (!std::isfinite(delta) || (first_delta > 0.0 && delta > 1e6 * first_delta)) break;
    if (delta < mcfg.picard_tol) {
      auto again = apply_map(cur);
      result.residual = distance(again, cur);
      result.solution = to_trajectory(cur);
      result.solution.provenance = {{"alpha", cfg.alpha},
                                    {"nu", cfg.nu},
                                    {"dt", h},
                                    {"t_end", mcfg.t_end},
                                    {"iterations", m},
                                    {"quad_rule", mcfg.quad_rule == DuhamelRule::trapezoid ? "trapezoid"
                                                                                          : "left_endpoint"}};
      return result;
    }
  }
  std::ostringstream os;
  os << "picard_iterate: no convergence after " << result.history.size() << " iterations, last contraction ratio "
     << last_ratio << " (target " << mcfg.contraction_target << "); data too large for horizon T = " << mcfg.t_end;
  throw PicardNonConvergence(os.str(), last_ratio, static_cast<int>(result.history.size()));
}

}  // namespace lanslab
