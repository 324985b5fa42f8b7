#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "lanslab/field.hpp"
#include "lanslab/littlewood_paley.hpp"

namespace lanslab {

struct LansConfig {
  double alpha = 0.0;  // filter width
  double nu = 1.0;     // viscosity
  TorusGrid grid{3, 32};
  void validate() const;
};

// ||div u||_2 / ||grad u||_2, zero for constant fields.
double relative_divergence(const VectorField& u);

// div tau(f, g), tau = (alpha^2/2)(1 - alpha^2 Lap)^{-1}[Def(f) Rot(g) + Def(g) Rot(f)]
// with matrix products; dealiased.
VectorField reynolds_stress(const VectorField& f, const VectorField& g, const LansConfig& cfg);
// Symmetric bilinear flux div((f(x)g + g(x)f)/2) + reynolds_stress(f, g), dealiased, not projected.
VectorField lans_bilinear(const VectorField& f, const VectorField& g, const LansConfig& cfg);
// nu Lap w - P[div(w (x) w) + div tau(w, w)]
VectorField lans_rhs(const VectorField& w, const LansConfig& cfg);
// nu Lap u - P[div(u(x)u + u(x)v + v(x)u) + div tau(u, u) + 2 div tau(u, v)]
VectorField mlans_rhs(const VectorField& u, const VectorField& v, const LansConfig& cfg);

// Multiplier exp(-nu t |k|^2).
template <Rank R>
SpectralField<R> heat_propagate(const SpectralField<R>& f, double t, double nu = 1.0);

class Trajectory {
 public:
  Trajectory() = default;

  void append(double t, VectorField state);
  bool empty() const noexcept { return times_.empty(); }
  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<VectorField>& states() const noexcept { return states_; }
  double time(std::size_t i) const { return times_.at(i); }
  const VectorField& state(std::size_t i) const { return states_.at(i); }
  const VectorField& back() const { return states_.back(); }

  // Node whose time matches t within a relative 1e-9.
  std::optional<std::size_t> find_time(double t) const;
  const VectorField& at_time(double t) const;

  nlohmann::json provenance;

 private:
  std::vector<double> times_;
  std::vector<VectorField> states_;
};

struct TrajectoryDiagnostics {
  double max_relative_divergence = 0.0;
  double mean_mode_drift = 0.0;
  bool dealiased = true;
};
TrajectoryDiagnostics diagnose(const Trajectory& traj);

struct MarchOptions {
  bool nonlinear = true;
  int output_every = 1;  // store every k-th step (the final step is always stored)
};

// Integrating-factor Heun scheme: exp(nu dt Lap) exact, nonlinearity by the
// explicit trapezoid predictor-corrector. Throws SolverBlowup on non-finite
// states.
Trajectory solve_lans(const VectorField& w0, const LansConfig& cfg, double t_end, double dt,
                      const MarchOptions& opt = {});
// v must provide states at every step time k * dt.
Trajectory solve_mlans(const VectorField& u0, const Trajectory& v, const LansConfig& cfg, double t_end, double dt,
                       const MarchOptions& opt = {});

enum class DuhamelRule {
  trapezoid,      // second order, exp factor exact at both ends
  left_endpoint,  // first order
};

struct MildSolverConfig {
  double t_end = 0.05;
  double dt = 1e-3;
  DuhamelRule quad_rule = DuhamelRule::trapezoid;
  double picard_tol = 1e-10;
  int picard_max_iters = 60;
  double weight_a = 0.25;
  BesovIndex weight_index{2.0, 2.0, 2.0};
  double contraction_target = 0.5;
  // Require weight_a = (s - n/2)/2 for the weighted index.
  bool critical_regime = true;
  void validate(int dim) const;
};

struct IterationState {
  int iterate_index = 0;
  double delta_norm = 0.0;         // E-type distance to the previous iterate
  double e_norm = 0.0;             // composite E norm of this iterate
  double contraction_ratio = 0.0;  // delta_norm / previous delta_norm (0 for the first)
};

struct PicardResult {
  Trajectory solution;
  std::vector<IterationState> history;
  double residual = 0.0;  // E-distance between the solution and one more application of the map
  double max_ratio_after_first = 0.0;
};

// Fixed point of u = exp(nu t Lap) u0 + Duhamel integral of -P B(u, u + 2v).
// An empty v means v = 0. Throws PicardNonConvergence.
PicardResult picard_iterate(const VectorField& u0, const Trajectory& v, const LansConfig& cfg,
                            const MildSolverConfig& mcfg);

// sup over stored nodes with 0 <= t <= T of t^a ||u(t)||_{B^s_{p,q}}
double weighted_norm(const Trajectory& traj, double a, const BesovIndex& idx, double T,
                     const DyadicPartition& part);

struct ENormIndices {
  BesovIndex base;      // (n/2, 2, q)
  BesovIndex weighted;  // (s, 2, q)
  double a = 0.25;
  double nu = 1.0;
};
// sup_t ||u(t) - exp(nu t Lap) u0||_{base} + sup_t t^a ||u(t)||_{weighted}
double e_norm(const Trajectory& traj, const VectorField& u0, const ENormIndices& idx, const DyadicPartition& part);

}  // namespace lanslab
