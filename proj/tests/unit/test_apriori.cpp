#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lanslab/apriori.hpp"
#include "lanslab/errors.hpp"
#include "lanslab/inequality_lab.hpp"
#include "lanslab/random_fields.hpp"
#include "lanslab/spectral.hpp"
#include "test_util.hpp"

using namespace lanslab;
using lanslab::testing::max_abs;
using lanslab::testing::max_abs_diff;
using lanslab::testing::Point;
using lanslab::testing::sample_scalar;
using lanslab::testing::sample_vector;

namespace {

VectorField field(const TorusGrid& g, unsigned seed, double norm = 1.0, double slope = 1.5, double k_max = 1e9) {
  return random_solenoidal(g, seed, {.spectral_slope = slope, .k_max = k_max, .l2_norm = norm});
}

// Solenoidal part with rms 0.1 plus 0.1 grad sin x1.
VectorField divergent_control(const TorusGrid& g, unsigned seed) {
  auto u = field(g, seed, 0.1 * std::sqrt(g.volume()), 2.5, 3.0);
  auto gs = gradient(sample_scalar(g, [](const Point& x) { return std::sin(x[0]); }));
  gs *= 0.1;
  u += gs;
  return u;
}

// Small box: the critical norms are dilation invariant while the Duhamel
// map's Lipschitz constant grows like 1/L, so 100x data is genuinely large.
PipelineConfig small_box_pipeline() {
  const double s = 1e-4;
  PipelineConfig cfg;
  cfg.lans = LansConfig{0.3 * s, 1e-8, TorusGrid(3, 32, 2 * std::numbers::pi * s)};
  return cfg;
}

VectorField scaled_to(const VectorField& u, double target, const DyadicPartition& part) {
  VectorField out = u;
  out *= target / besov_norm(u, {1.5, 2, 2}, part);
  return out;
}

}  // namespace

TEST(EnergyPair, TrivialCases) {
  const TorusGrid g(3, 16);
  EXPECT_EQ(energy_pair(VectorField(g), 0.7), 0.0);
  const auto u = field(g, 1);
  EXPECT_NEAR(energy_pair(u, 0.0), std::pow(l2_norm(u), 2), 1e-14);
}

TEST(EnergyPair, SingleModeClosedForm) {
  const TorusGrid g(3, 16);
  const double A = 0.37;
  // u = A cos(2 x1) e2: |u|^2 integrates to A^2 V / 2, |grad u|^2 to 4 A^2 V / 2.
  const auto u = sample_vector(g, [&](const Point& x) { return Point{0.0, A * std::cos(2 * x[0]), 0.0}; });
  const double V = std::pow(2 * std::numbers::pi, 3);
  const double expected = A * A * V / 2 * (1 + 4);
  EXPECT_NEAR(energy_pair(u, 1.0), expected, 1e-10 * expected);
  // Quadrature path for the L^2 part.
  const double quad = std::pow(lp_norm(inverse_transform(u), 2.0), 2);
  EXPECT_NEAR(quad, A * A * V / 2, 1e-10 * quad);
}

TEST(Cancellation, SolenoidalFieldsVanish) {
  const TorusGrid g(3, 16);
  for (unsigned s = 0; s < 5; ++s) {
    const auto c = cancellation_check(field(g, s, 3.0), 0.5);
    EXPECT_LT(c.max_normalized(), 1e-10) << "seed " << s;
  }
}

TEST(Cancellation, ZeroField) {
  const TorusGrid g(3, 16);
  const auto c = cancellation_check(VectorField(g), 0.5);
  EXPECT_EQ(c.max_normalized(), 0.0);
  EXPECT_EQ(c.i1_raw + c.i2_raw + c.i3_raw, 0.0);
}

TEST(Cancellation, DivergenceInjectedControlExceedsThreshold) {
  const TorusGrid g(3, 16);
  for (unsigned s = 0; s < 5; ++s) EXPECT_GT(cancellation_check(divergent_control(g, s), 0.5).max_normalized(), 1e-3);
}

TEST(Cancellation, RawResidualsAreCubicInAmplitude) {
  const TorusGrid g(3, 16);
  const auto u = divergent_control(g, 3);
  const auto c1 = cancellation_check(u, 0.5);
  for (double a : {0.5, 2.0, 3.0}) {
    auto ua = u;
    ua *= a;
    const auto ca = cancellation_check(ua, 0.5);
    const double k = a * a * a;
    EXPECT_NEAR(ca.i1_raw, k * c1.i1_raw, 1e-10 * k * c1.i1_raw);
    EXPECT_NEAR(ca.i2_raw, k * c1.i2_raw, 1e-10 * k * c1.i2_raw);
    EXPECT_NEAR(ca.i3_raw, k * c1.i3_raw, 1e-10 * k * c1.i3_raw);
    EXPECT_NEAR(ca.max_normalized(), c1.max_normalized(), 1e-12);
  }
}

TEST(Gronwall, ZeroVMonotoneOnEverySeed) {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, 16)};
  for (unsigned s = 1; s <= 3; ++s) {
    const auto u = solve_mlans(field(cfg.grid, s, 10.0), Trajectory{}, cfg, 0.2, 0.005);
    const auto r = gronwall_monitor(u, Trajectory{}, cfg.alpha);
    EXPECT_TRUE(r.monotone) << "seed " << s;
    EXPECT_EQ(r.constant, 0.0);
    EXPECT_LE(r.max_bound_ratio(), 1.0 + 1e-12);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      EXPECT_TRUE(std::isfinite(r.e_pair[i]) && r.e_pair[i] >= 0.0);
      EXPECT_TRUE(std::isfinite(r.h3[i]) && r.h3[i] >= 0.0);
    }
  }
}

TEST(Gronwall, ZeroStateRatioZero) {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, 16)};
  Trajectory u;
  for (int i = 0; i <= 4; ++i) u.append(0.01 * i, VectorField(cfg.grid));
  const auto r = gronwall_monitor(u, Trajectory{}, cfg.alpha);
  EXPECT_EQ(r.max_bound_ratio(), 0.0);
}

TEST(Gronwall, CalibratedConstantHoldsOnFreshSeeds) {
  const LansConfig cfg{0.2, 0.01, TorusGrid(3, 16)};
  auto run = [&](unsigned s) {
    const auto v = solve_lans(field(cfg.grid, 20 + s, 30.0, 1.5, 4.0), cfg, 0.2, 0.005);
    return std::make_pair(solve_mlans(field(cfg.grid, 10 + s, 1.0, 1.5, 8.0), v, cfg, 0.2, 0.005), v);
  };
  const auto [u1, v1] = run(1);
  const double C = calibrate_gronwall_constant(u1, v1, cfg.alpha);
  EXPECT_GT(C, 0.0);
  EXPECT_LE(gronwall_monitor(u1, v1, cfg.alpha).max_bound_ratio(), 1.0 + 1e-12);
  for (unsigned s : {2u, 3u}) {
    const auto [u, v] = run(s);
    GronwallOptions o;
    o.constant = C;
    const auto r = gronwall_monitor(u, v, cfg.alpha, o);
    EXPECT_EQ(r.constant, C);
    EXPECT_LE(r.max_bound_ratio(), 1.01) << "seed " << s;
    EXPECT_EQ(r.sign_condition.size(), r.times.size());
  }
}

TEST(Gronwall, RejectsBadInput) {
  const LansConfig cfg{0.2, 0.01, TorusGrid(3, 16)};
  Trajectory u, v;
  u.append(0.0, field(cfg.grid, 1));
  u.append(0.1, field(cfg.grid, 2));
  v.append(0.0, field(cfg.grid, 3));
  v.append(0.05, field(cfg.grid, 4));
  EXPECT_THROW(gronwall_monitor(u, v, cfg.alpha), std::invalid_argument);
  EXPECT_THROW(gronwall_monitor(u, Trajectory{}, 0.0), std::invalid_argument);
  EXPECT_THROW(gronwall_monitor(Trajectory{}, Trajectory{}, 0.2), std::invalid_argument);
}

TEST(H2Terms, ZeroFieldAllZero) {
  const LansConfig cfg{0.5, 1.0, TorusGrid(3, 16)};
  const auto t = h2_terms(VectorField(cfg.grid), field(cfg.grid, 2), cfg);
  EXPECT_EQ(t.k1, 0.0);
  EXPECT_EQ(t.k2, 0.0);
  EXPECT_EQ(t.l1, 0.0);
  EXPECT_EQ(t.l2, 0.0);
  EXPECT_EQ(t.h3, 0.0);
}

TEST(H2Terms, DilateScalesSeminorms) {
  const TorusGrid g(3, 32);
  const auto u = field(g, 5, 1.0, 1.0, 2.0);
  const auto u3 = dilate(u, 3);
  EXPECT_NEAR(sobolev_seminorm(u3, 1.0), sobolev_seminorm(u, 1.0), 1e-12 * sobolev_seminorm(u, 1.0));
  EXPECT_NEAR(sobolev_seminorm(u3, 3.0), 9.0 * sobolev_seminorm(u, 3.0), 1e-11 * sobolev_seminorm(u3, 3.0));
  const auto v3 = dilate(u, 3, 2.0);
  EXPECT_NEAR(sobolev_seminorm(v3, 2.0), sobolev_seminorm(u, 2.0), 1e-12 * sobolev_seminorm(u, 2.0));
  EXPECT_THROW(dilate(u, 6), std::invalid_argument);
  EXPECT_THROW(dilate(u, 0), std::invalid_argument);
}

TEST(H2Terms, ExponentsWithinBounds) {
  const TorusGrid g(3, 32);
  const auto u = field(g, 5, 1.0, 1.0, 2.0);
  const auto v = field(g, 6, 1.0, 1.0, 2.0);
  for (double alpha : {0.5, 2.0}) {
    const LansConfig cfg{alpha, 0.05, g};
    const auto fit = h2_exponent_check(u, v, cfg, {1, 2, 3, 4, 5});
    EXPECT_GE(fit.h3.front(), 1.0);
    EXPECT_LE(fit.slope[0], 15.0 / 8.0);
    EXPECT_LE(fit.slope[1], 15.0 / 8.0);
    EXPECT_LE(fit.slope[2], 1.5);
    EXPECT_LE(fit.slope[3], 1.0);
    EXPECT_TRUE(fit.within_bounds());
    // K1 and L1 are exact powers of lambda on this family.
    EXPECT_NEAR(fit.slope[0], 1.0, 1e-9);
    EXPECT_NEAR(fit.slope[2], 0.5, 1e-9);
  }
}

TEST(H2Terms, MonitorFlagsUnderResolution) {
  const LansConfig cfg{0.5, 0.05, TorusGrid(3, 16)};
  const auto smooth = solve_mlans(field(cfg.grid, 1, 1.0, 2.0, 2.0), Trajectory{}, cfg, 0.02, 0.005);
  const auto rough = solve_mlans(field(cfg.grid, 1, 1.0, 0.0), Trajectory{}, cfg, 0.02, 0.005);
  const auto a = h2_term_monitor(smooth, Trajectory{}, cfg);
  EXPECT_FALSE(a.under_resolved);
  EXPECT_EQ(a.terms.size(), smooth.size());
  EXPECT_TRUE(h2_term_monitor(rough, Trajectory{}, cfg).under_resolved);
  const auto j = a.to_json();
  EXPECT_TRUE(j["terms"].contains("K1"));
  EXPECT_TRUE(j["constants"].contains("L2"));
}

TEST(Split, ThetaSolvesInterpolationIdentity) {
  for (auto [p, pt] : {std::pair{6.0, 30.0}, {3.0, 4.0}, {2.5, 100.0}}) {
    SplitConfig c;
    c.p = p;
    c.p_tilde = pt;
    const double th = c.theta();
    EXPECT_NEAR(3 / p, 1.5 * th + 3 * (1 - th) / pt, 1e-12);
  }
}

TEST(Split, ValidatesConfig) {
  SplitConfig c;
  c.p = 2.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.p = 6.0;
  c.p_tilde = 5.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.p_tilde = 30.0;
  c.epsilon = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Split, BandLimitedDataHasNoTail) {
  const TorusGrid g(3, 32);
  const DyadicPartition part(g);
  const auto w0 = field(g, 2, 1.0, 1.0, 1.9);
  const auto r = interpolation_split(w0, SplitConfig{}, part);
  EXPECT_EQ(r.j_cut, 1);  // the mask is exactly one below 2^{j_cut}
  EXPECT_EQ(max_abs(r.v0), 0.0);
  EXPECT_EQ(max_abs_diff(r.u0, w0), 0.0);
}

TEST(Split, ExactDecompositionAndMonotoneSweep) {
  const TorusGrid g(3, 32);
  const DyadicPartition part(g);
  const auto w0 = field(g, 3, 1.0, 0.5);
  SplitConfig c;
  c.epsilon = 1e-12;  // force the full sweep
  const auto r = interpolation_split(w0, c, part);
  for (std::size_t i = 1; i < r.sweep.size(); ++i) EXPECT_LE(r.sweep[i], r.sweep[i - 1] * (1 + 1e-12));
  auto sum = r.u0;
  sum += r.v0;
  EXPECT_LE(max_abs_diff(sum, w0), 1e-15 * max_abs(w0));

  const auto hit = interpolation_split(w0, SplitConfig{}, part);
  EXPECT_LT(hit.v0_norm, 1e-3);
  EXPECT_LE(hit.j_cut, part.top_level());
  EXPECT_GT(max_abs(hit.u0), 0.0);
}

TEST(Split, UnreachableNamesMinimum) {
  const TorusGrid g(3, 32);
  const DyadicPartition part(g);
  const auto w0 = field(g, 3, 1.0, 0.5);
  SplitConfig c;
  c.j_cut_max = 1;
  try {
    interpolation_split(w0, c, part);
    FAIL() << "expected SplitUnreachable";
  } catch (const SplitUnreachable& e) {
    EXPECT_GT(e.achievable_minimum(), c.epsilon);
    EXPECT_NE(std::string(e.what()).find("unreachable"), std::string::npos);
  }
}

TEST(HigherRegularity, ZeroExponentIsSupNorm) {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, 16)};
  const DyadicPartition part(cfg.grid);
  const auto u = solve_mlans(field(cfg.grid, 1), Trajectory{}, cfg, 0.02, 0.005);
  const auto tr = higher_regularity_trace(u, 1.5, 1.5, part);
  EXPECT_EQ(tr.exponent, 0.0);
  double m = 0.0;
  for (const auto& s : u.states()) m = std::max(m, besov_norm(s, {1.5, 2, 2}, part));
  EXPECT_DOUBLE_EQ(tr.sup, m);
  EXPECT_EQ(tr.times.size(), u.size());
  EXPECT_THROW(higher_regularity_trace(u, 1.0, 1.5, part), std::invalid_argument);
}

TEST(HigherRegularity, HeatAndMLansTracesAgree) {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, 32)};
  const DyadicPartition part(cfg.grid);
  const auto u0 = scaled_to(field(cfg.grid, 7, 1.0, 1.0), 1.0, part);
  const auto heat = solve_lans(u0, cfg, 0.05, 0.0025, {.nonlinear = false});
  const auto a = solve_mlans(u0, Trajectory{}, cfg, 0.05, 0.0025);
  const auto b = solve_mlans(u0, Trajectory{}, cfg, 0.05, 0.00125);
  const auto th = higher_regularity_trace(heat, 2.5, 1.5, part);
  const auto ta = higher_regularity_trace(a, 2.5, 1.5, part);
  const auto tb = higher_regularity_trace(b, 2.5, 1.5, part);
  EXPECT_EQ(th.exponent, 0.5);
  EXPECT_TRUE(std::isfinite(ta.sup));
  EXPECT_TRUE(ta.vanishing);
  EXPECT_TRUE(tb.vanishing);
  EXPECT_LT(tb.first_value, ta.first_value);
  EXPECT_LT(trace_refinement_change(ta, tb), 0.1);
  EXPECT_LE(ta.sup, 3.0 * th.sup);
  EXPECT_GE(ta.sup, th.sup / 3.0);
}

TEST(HigherRegularity, HeatGainMatchesSmoothingExponent) {
  const TorusGrid g(3, 64, 2 * std::numbers::pi, 1.0);
  const DyadicPartition part(g);
  const HeatSmoothingIndices idx{1.5, 2, 2.5, 2, 2};
  const auto f = saturating_heat_data(g, idx, 4);
  const auto fit = verify_heat_smoothing(idx, f, part);
  EXPECT_NEAR(heat_smoothing_exponent(idx, 3), -0.5, 1e-15);
  EXPECT_TRUE(fit.passed()) << fit.diagnostic;
  // Weighted by the matching power the trace stays bounded over decades of t.
  const double s1 = heat_weighted_sup(f, {2.5, 2, 2}, 0.5, 0.1, part);
  const double s2 = heat_weighted_sup(f, {2.5, 2, 2}, 0.5, 0.01, part);
  EXPECT_TRUE(std::isfinite(s1));
  EXPECT_LE(s2, s1 * (1 + 1e-12));
}

TEST(Bootstrap, RestartAtZeroIsExact) {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, 16)};
  const DyadicPartition part(cfg.grid);
  const auto w = solve_lans(field(cfg.grid, 4), cfg, 0.02, 0.005);
  EXPECT_EQ(bootstrap_consistency(w, 0.0, cfg, 0.005, part), 0.0);
  EXPECT_THROW(bootstrap_consistency(w, 0.0123, cfg, 0.005, part), std::invalid_argument);
}

TEST(Bootstrap, MidpointRestartWithinSelfErrorAndSecondOrder) {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, 32)};
  const DyadicPartition part(cfg.grid);
  const auto u0 = scaled_to(field(cfg.grid, 7, 1.0, 1.0), 1.0, part);
  const double dt = 0.0025;
  const auto a = solve_lans(u0, cfg, 0.05, dt);
  const auto b = solve_lans(u0, cfg, 0.05, dt / 2);
  auto d = a.back();
  d -= b.back();
  const double self = besov_norm(d, {1.5, 2, 2}, part);
  const double ba = bootstrap_consistency(a, 0.025, cfg, dt / 2, part);
  const double bb = bootstrap_consistency(b, 0.025, cfg, dt / 4, part);
  EXPECT_LT(ba, 10 * self);
  EXPECT_GT(ba / bb, 3.5);
  EXPECT_LT(ba / bb, 4.5);
}

TEST(Pipeline, BandLimitedDataTakesTrivialBranch) {
  PipelineConfig cfg;
  cfg.lans = LansConfig{0.3, 0.05, TorusGrid(3, 16)};
  cfg.monitors = false;
  const auto w0 = field(cfg.lans.grid, 2, 1.0, 1.0, 1.9);
  const auto r = run_pipeline(w0, cfg);
  EXPECT_EQ(max_abs(r.split.v0), 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_discrepancy, 10 * r.max_self_error);
  EXPECT_EQ(r.times.size(), r.w.size());
}

TEST(Pipeline, RoughDataRecombines) {
  auto cfg = small_box_pipeline();
  const DyadicPartition part(cfg.lans.grid);
  const auto w0 = scaled_to(field(cfg.lans.grid, 7, 1.0, 1.0), 0.1, part);
  const auto r = run_pipeline(w0, cfg);
  EXPECT_GT(max_abs(r.split.u0), 0.0);
  EXPECT_GT(max_abs(r.split.v0), 0.0);
  EXPECT_LT(r.split.v0_norm, 1e-3);
  EXPECT_LT(r.picard.residual, 1e-8);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_discrepancy, 10 * r.max_self_error);
  const auto j = r.to_json();
  for (const char* key : {"cancellation", "h2_terms", "higher_regularity", "bootstrap", "energy"})
    EXPECT_TRUE(j["monitors"].contains(key)) << key;
  EXPECT_LT(j["monitors"]["cancellation"]["I1"].get<double>(), 1e-10);
}

TEST(Pipeline, LargeDataReportsPicardFailure) {
  auto cfg = small_box_pipeline();
  cfg.monitors = false;
  const DyadicPartition part(cfg.lans.grid);
  const auto w0 = scaled_to(field(cfg.lans.grid, 7, 1.0, 1.0), 10.0, part);
  try {
    run_pipeline(w0, cfg);
    FAIL() << "expected PicardNonConvergence";
  } catch (const PicardNonConvergence& e) {
    EXPECT_GT(e.last_ratio(), 1.0);
  }
}
