#pragma once

#include <limits>
#include <nlohmann/json.hpp>
#include <vector>

#include "lanslab/field.hpp"
#include "lanslab/lans.hpp"
#include "lanslab/littlewood_paley.hpp"

namespace lanslab {

// ||u||_2^2 + alpha^2 ||u||_{H^1}^2 (homogeneous, Fourier multiplier).
double energy_pair(const VectorField& u, double alpha);

// Residuals of the three terms that vanish for solenoidal u:
//   I1 = (u.grad u, u)
//   I2 = alpha^2 [(u.grad Lap u, u) + ((grad u)^T Lap u, u)]
//   I3 = (grad-part of u.grad u, u)
// raw values are trilinear in u; normalized values divide by the
// Cauchy-Schwarz bound of each pairing and are scale free.
struct CancellationResiduals {
  double i1 = 0.0, i2 = 0.0, i3 = 0.0;
  double i1_raw = 0.0, i2_raw = 0.0, i3_raw = 0.0;
  double max_normalized() const;
};
CancellationResiduals cancellation_check(const VectorField& u, double alpha);

// (1 - Lap) v followed by the L^p quadrature norm.
double h2p_norm(const VectorField& v, double p);

struct EnergyReport {
  std::vector<double> times;
  std::vector<double> e_pair;
  std::vector<double> h2;
  std::vector<double> h3;
  std::vector<double> v_integral;      // int_a^t ||v||_{H^{2,p}} ds
  std::vector<double> bound_ratio;     // e_pair / Gronwall bound
  std::vector<double> sign_condition;  // C ||v(t)||_{L^p} - 1
  double constant = 0.0;               // C used for the bound
  double a = 0.0;
  double p = 6.0;
  bool monotone = true;  // e_pair nonincreasing within round-off
  double max_bound_ratio() const;
  nlohmann::json to_json() const;
};

struct GronwallOptions {
  double a = 0.0;  // start of the monitored window
  double p = 6.0;  // integrability of the v norms
  double tolerance = 1e-2;
  // NaN: calibrate on this run. A finite value is applied as is.
  double constant = std::numeric_limits<double>::quiet_NaN();
};

// Smallest C >= 0 with e(t) <= e(s) exp(C alpha^{-2} int_s^t ||v||_{H^{2,p}})
// between consecutive nodes s < t, hence also from a.
double calibrate_gronwall_constant(const Trajectory& u, const Trajectory& v, double alpha, double a = 0.0,
                                   double p = 6.0);
// An empty v means v = 0. Both trajectories must share their time nodes.
EnergyReport gronwall_monitor(const Trajectory& u, const Trajectory& v, double alpha,
                              const GronwallOptions& opt = {});

struct H2Terms {
  double k1 = 0.0;  // -(A P (u.grad u), A u)
  double k2 = 0.0;  // -(A P div tau(u, u), A u)
  double l1 = 0.0;  // -(A P div(u (x) v), A u)
  double l2 = 0.0;  // -(A P div (1 - alpha^2 Lap)^{-1} (grad u grad v), A u)
  double h3 = 0.0;  // ||u||_{H^3}, homogeneous
};
H2Terms h2_terms(const VectorField& u, const VectorField& v, const LansConfig& cfg);

// Exponents of ||u||_{H^3} in the bounds for K1, K2, L1, L2.
inline constexpr double kH2BoundExponents[4] = {15.0 / 8.0, 15.0 / 8.0, 1.5, 1.0};

struct H2TermReport {
  std::vector<double> times;
  std::vector<H2Terms> terms;
  // max_t |term| / ||u||_{H^3}^{exponent}, the fitted constants
  double constant[4] = {0.0, 0.0, 0.0, 0.0};
  double h3_coarse_mismatch = 0.0;  // worst relative gap between N and N/2 H^3 evaluations
  bool under_resolved = false;      // mismatch above 5%
  nlohmann::json to_json() const;
};
H2TermReport h2_term_monitor(const Trajectory& u, const Trajectory& v, const LansConfig& cfg);

// u(lambda x) lambda^{-power} for integer lambda. power = 1 keeps the H^1
// seminorm fixed, power = 2 keeps the H^2 seminorm fixed. Throws if a dilated
// mode leaves the retained band.
VectorField dilate(const VectorField& u, int lambda, double power = 1.0);

struct H2ExponentFit {
  std::vector<int> lambdas;
  std::vector<double> h3;
  std::vector<H2Terms> terms;
  double slope[4] = {0.0, 0.0, 0.0, 0.0};  // d log|term| / d log ||u||_{H^3}
  bool within_bounds(double tolerance = 0.05) const;
  nlohmann::json to_json() const;
};
// Fits over the dilation family u(lambda x)/lambda, v(lambda x)/lambda^2,
// which holds the sizes of u in H^1 and of v in H^2 fixed while
// ||u||_{H^3} grows like lambda^2.
H2ExponentFit h2_exponent_check(const VectorField& u, const VectorField& v, const LansConfig& cfg,
                                const std::vector<int>& lambdas);

struct SplitConfig {
  double p = 6.0;
  double p_tilde = 30.0;
  double q = 2.0;
  double epsilon = 1e-3;
  int j_cut = -1;      // first threshold tried; < 0 starts at the lowest populated level
  int j_cut_max = -1;  // < 0: partition top level
  // Solves 3/p = 3 theta/2 + 3 (1 - theta)/p_tilde.
  double theta() const;
  void validate() const;
};

struct SplitResult {
  explicit SplitResult(const TorusGrid& g) : u0(g), v0(g) {}
  VectorField u0;  // S_{J_c} w0
  VectorField v0;  // w0 - u0
  int j_cut = 0;
  double theta = 0.0;
  double v0_norm = 0.0;        // ||v0||_{B^{3/p~}_{p~,q}}
  std::vector<double> sweep;   // ||v0|| for every threshold tried, in order
};
// Raises J_c until ||v0|| < epsilon; throws SplitUnreachable with the best
// value seen otherwise.
SplitResult interpolation_split(const VectorField& w0, const SplitConfig& scfg, const DyadicPartition& part);

struct HigherRegularityTrace {
  std::vector<double> times;
  std::vector<double> weighted;  // t^{(k-base)/2} ||u(t)||_{B^k_{2,q}}
  double exponent = 0.0;
  double sup = 0.0;
  double first_value = 0.0;  // at the smallest positive time
  bool vanishing = false;    // first value at most half the sup
  nlohmann::json to_json() const;
};
HigherRegularityTrace higher_regularity_trace(const Trajectory& traj, double k, double base,
                                              const DyadicPartition& part, double q = 2.0);

// Relative change of the weighted sup between two step sizes; above 10%
// flags the small-time region as under-resolved.
double trace_refinement_change(const HigherRegularityTrace& coarse, const HigherRegularityTrace& fine);

// Re-solves LANS from traj(t1) with step resolve_dt and returns the max over
// shared nodes of the B^{3/2}_{2,q} distance to traj.
double bootstrap_consistency(const Trajectory& traj, double t1, const LansConfig& cfg, double resolve_dt,
                             const DyadicPartition& part, double q = 2.0);

struct PipelineConfig {
  LansConfig lans;
  double t_end = 0.05;
  double dt = 0.0025;
  SplitConfig split;
  MildSolverConfig picard;  // t_end and dt are overwritten from above
  double tolerance_factor = 10.0;
  bool monitors = true;
};

struct PipelineReport {
  explicit PipelineReport(const TorusGrid& g) : split(g) {}
  SplitResult split;
  PicardResult picard;
  std::vector<double> times;
  std::vector<double> discrepancy;  // ||(u + v) - w||_{B^{3/p}_{p,q}}
  std::vector<double> self_error;   // ||w_dt - w_{dt/2}|| in the same norm
  double max_discrepancy = 0.0;
  double max_self_error = 0.0;
  bool passed = false;
  nlohmann::json monitors = nlohmann::json::object();
  Trajectory u, v, w;
  nlohmann::json to_json() const;
};
// Split w0, solve v from v0 by LANS, certify u by Picard iteration, march u by
// mLANS, solve w from w0 directly and compare. Propagates SplitUnreachable and
// PicardNonConvergence.
PipelineReport run_pipeline(const VectorField& w0, const PipelineConfig& cfg);

}  // namespace lanslab
