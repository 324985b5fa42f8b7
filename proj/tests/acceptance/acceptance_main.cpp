// Acceptance suite: one PASS/FAIL line per criterion. With integer arguments
// only those criteria run; the exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lanslab/apriori.hpp"
#include "lanslab/errors.hpp"
#include "lanslab/inequality_lab.hpp"
#include "lanslab/lans.hpp"
#include "lanslab/littlewood_paley.hpp"
#include "lanslab/random_fields.hpp"
#include "lanslab/spectral.hpp"
#include "test_util.hpp"

using namespace lanslab;
using lanslab::testing::rel_l2_diff;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

VectorField solenoidal(const TorusGrid& g, unsigned seed, double norm, double slope, double k_max = kInf) {
  return random_solenoidal(g, seed, {.spectral_slope = slope, .k_max = k_max, .l2_norm = norm});
}

VectorField scaled_to(const VectorField& u, double target, const DyadicPartition& part) {
  VectorField out = u;
  out *= target / besov_norm(u, {1.5, 2, 2}, part);
  return out;
}

// Box of side 2 pi 1e-4 with alpha and nu rescaled; the critical norms do not
// see the dilation but the Duhamel map's Lipschitz constant grows like 1/L.
LansConfig small_box(int n = 32) {
  const double s = 1e-4;
  return LansConfig{0.3 * s, 1e-8, TorusGrid(3, n, 2 * std::numbers::pi * s)};
}

Outcome c1_partition() {
  const TorusGrid grids[] = {TorusGrid(3, 32), TorusGrid(3, 64, 2 * std::numbers::pi, 1.0), TorusGrid(2, 64),
                             TorusGrid(3, 16, 1.0)};
  double unity = 0.0, leak = 0.0;
  for (const auto& g : grids) {
    for (auto profile : {BumpProfile::smooth_exponential, BumpProfile::cosine_taper}) {
      const DyadicPartition part(g, profile);
      const int cut = g.dealias_cutoff();
      for_each_mode(g, [&](std::size_t idx, const std::array<int, 3>& k) {
        const double r = g.wavenumber_unit() * std::sqrt(double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
        const bool resolved = std::abs(k[0]) <= cut && std::abs(k[1]) <= cut && std::abs(k[2]) <= cut;
        double sum = 0.0;
        for (int j = 0; j <= part.top_level(); ++j) {
          const double v = part.mask(j)[idx];
          sum += v;
          const bool outside = j == 0 ? r >= 2.0 : (r <= std::ldexp(1.0, j - 1) || r >= std::ldexp(1.0, j + 1));
          if (outside || v < 0.0) leak = std::max(leak, std::abs(v));
          for (int l = j + 2; l <= part.top_level(); ++l) leak = std::max(leak, std::abs(v * part.mask(l)[idx]));
        }
        if (resolved) unity = std::max(unity, std::abs(sum - 1.0));
      });
    }
  }
  return {unity <= 1e-12 && leak <= 1e-14, "unity " + num(unity) + " support leak " + num(leak)};
}

Outcome c2_paraproduct() {
  double worst = 0.0;
  for (unsigned s = 0; s < 50; ++s) {
    const TorusGrid g(3, s % 2 ? 32 : 16);
    const DyadicPartition part(g);
    const double band = 0.5 * g.dealias_cutoff() + (s % 3);
    const auto f = random_scalar(g, 1000 + s, {.spectral_slope = 0.5 + 0.05 * s, .k_max = band});
    const auto h = random_scalar(g, 2000 + s, {.spectral_slope = 2.5 - 0.04 * s, .k_max = band});
    worst = std::max(worst, rel_l2_diff(paraproduct_split(f, h, part).total(), multiply(f, h)));
  }
  return {worst <= 1e-10, "max relative error " + num(worst) + " over 50 pairs"};
}

Outcome fits(const std::vector<ExponentFit>& list, double tol) {
  Outcome o{true, ""};
  for (const auto& f : list) {
    const double rel = std::abs(f.measured_slope - f.predicted_slope) / std::abs(f.predicted_slope);
    o.pass = o.pass && f.passed() && rel <= tol && f.r_squared >= kMinRSquared;
    o.detail += num(f.measured_slope) + "/" + num(f.predicted_slope) + " (r2 " + num(f.r_squared) + ") ";
  }
  o.detail = "measured/predicted " + o.detail;
  return o;
}

Outcome c3_bernstein() {
  const TorusGrid g(3, 64, 2 * std::numbers::pi, 1.0);
  std::vector<ExponentFit> list;
  for (const auto& [beta, p, q] : {std::array{0.0, 2.0, kInf}, std::array{1.0, 2.0, 2.0}, std::array{1.0, 2.0, 4.0}})
    list.push_back(verify_bernstein(p, q, beta, g));
  return fits(list, 0.05);
}

Outcome c4_heat() {
  const TorusGrid g(3, 64, 2 * std::numbers::pi, 1.0);
  const DyadicPartition part(g);
  std::vector<ExponentFit> list;
  for (const HeatSmoothingIndices& idx :
       {HeatSmoothingIndices{1.5, 2, 2.5, 2, 2}, HeatSmoothingIndices{0.5, 2, 0.5, 4, 2},
        HeatSmoothingIndices{1, 2, 2, 4, 2}}) {
    auto fit = verify_heat_smoothing(idx, saturating_heat_data(g, idx, 1), part);
    if (std::abs(fit.predicted_slope - heat_smoothing_exponent(idx, 3)) > 1e-15) fit.verdict = Verdict::fail;
    list.push_back(fit);
  }
  return fits(list, 0.10);
}

Outcome c5_product() {
  Outcome o{true, "growth"};
  for (const ProductIndices& idx : {ProductIndices{1, 2, 1, 2, 2, 2}, ProductIndices{0.5, 2, 0.5, 4, 2, 2},
                                    ProductIndices{1, 2, 0.25, 6, 3, 2}}) {
    const auto fit = verify_product_estimate(idx, {.grid_sizes = {32, 64}});
    o.pass = o.pass && fit.passed() && fit.refinement_growth < 2.0;
    o.detail += " " + num(fit.refinement_growth);
  }
  const std::pair<ProductIndices, std::string> rejected[] = {
      {{2, 2, 1, 2, 2, 2}, "s1 < n/p1"},
      {{1, 2, 1.5, 2, 2, 2}, "s2 < n/p2"},
      {{-1, 2, 0.5, 2, 2, 2}, "s1 + s2 > 0"},
      {{0.5, 4, 0.5, 4, 1, 2}, "1/p <= 1/p1 + 1/p2"},
  };
  int correct = 0;
  for (const auto& [idx, expected] : rejected) {
    try {
      check_product_hypotheses(idx, 3);
    } catch (const HypothesisViolation& e) {
      correct += e.condition() == expected;
    }
    try {
      verify_product_estimate(idx, {.members = 2});
    } catch (const HypothesisViolation& e) {
      correct += e.condition() == expected;
    }
  }
  o.pass = o.pass && correct == 2 * int(std::size(rejected));
  o.detail += "; rejections " + std::to_string(correct) + "/" + std::to_string(2 * std::size(rejected));
  return o;
}

Outcome c6_cancellation() {
  const TorusGrid g(3, 32);
  const double rms = 0.1 * std::sqrt(g.volume());
  VectorField grad_sine = gradient(testing::sample_scalar(g, [](const testing::Point& x) { return std::sin(x[0]); }));
  grad_sine *= 0.1;
  double worst = 0.0, control = kInf;
  for (unsigned m = 0; m < 20; ++m) {
    const double alpha = 0.1 + 0.05 * m;
    worst = std::max(worst, cancellation_check(solenoidal(g, 300 + m, rms, 1.5), alpha).max_normalized());
    auto d = solenoidal(g, 400 + m, rms, 2.5, 3.0);
    d += grad_sine;
    control = std::min(control, cancellation_check(d, alpha).max_normalized());
  }
  return {worst <= 1e-10 && control > 1e-3, "solenoidal max " + num(worst) + ", control min " + num(control)};
}

Outcome c7_derivation() {
  double worst = 0.0;
  for (unsigned s = 0; s < 20; ++s) {
    const LansConfig cfg{0.1 + 0.05 * s, 0.01 + 0.02 * s, TorusGrid(3, 32)};
    const auto u = solenoidal(cfg.grid, 500 + s, 1.0, 1.5), v = solenoidal(cfg.grid, 600 + s, 0.2 + 0.1 * s, 1.2);
    auto rhs = mlans_rhs(u, v, cfg);
    rhs += lans_rhs(v, cfg);
    worst = std::max(worst, rel_l2_diff(lans_rhs(u + v, cfg), rhs));
  }
  return {worst <= 1e-11, "max relative error " + num(worst) + " over 20 pairs"};
}

Outcome c8_picard() {
  const auto cfg = small_box();
  const DyadicPartition part(cfg.grid);
  const auto u0 = scaled_to(solenoidal(cfg.grid, 5, 1.0, 1.0), 1e-2, part);
  MildSolverConfig m;
  m.t_end = 0.05;
  m.dt = 0.0025;
  const auto r = picard_iterate(u0, Trajectory{}, cfg, m);
  double worst = 0.0;
  for (std::size_t i = 1; i < r.history.size(); ++i) worst = std::max(worst, r.history[i].contraction_ratio);
  bool control = false;
  double control_ratio = 0.0;
  VectorField big = u0;
  big *= 100.0;
  try {
    picard_iterate(big, Trajectory{}, cfg, m);
  } catch (const PicardNonConvergence& e) {
    control = true;
    control_ratio = e.last_ratio();
  }
  return {worst <= 0.5 && r.residual < 1e-8 && control,
          "max ratio " + num(worst) + " in " + std::to_string(r.history.size()) + " iterates, residual " +
              num(r.residual) + ", 100x data " + (control ? "non-convergent (ratio " + num(control_ratio) + ")" : "converged")};
}

Outcome c9_gronwall() {
  bool monotone = true;
  {
    const LansConfig cfg{0.3, 0.05, TorusGrid(3, 32)};
    for (unsigned s = 1; s <= 3; ++s) {
      const auto u = solve_mlans(solenoidal(cfg.grid, s, 10.0, 1.5), Trajectory{}, cfg, 0.2, 0.005);
      monotone = monotone && gronwall_monitor(u, Trajectory{}, cfg.alpha).monotone;
    }
  }
  const LansConfig cfg{0.2, 0.01, TorusGrid(3, 32)};
  auto run = [&](unsigned s) {
    auto v = solve_lans(solenoidal(cfg.grid, 20 + s, 30.0, 1.5, 4.0), cfg, 0.2, 0.005);
    auto u = solve_mlans(solenoidal(cfg.grid, 10 + s, 1.0, 1.5, 8.0), v, cfg, 0.2, 0.005);
    return std::make_pair(std::move(u), std::move(v));
  };
  const auto [u1, v1] = run(1);
  GronwallOptions o;
  o.constant = calibrate_gronwall_constant(u1, v1, cfg.alpha);
  double worst = 0.0;
  for (unsigned s : {2u, 3u}) {
    const auto [u, v] = run(s);
    worst = std::max(worst, gronwall_monitor(u, v, cfg.alpha, o).max_bound_ratio());
  }
  return {monotone && worst <= 1.01, std::string("v = 0 ") + (monotone ? "monotone" : "NOT monotone") +
                                         ", C " + num(o.constant) + ", fresh-seed bound ratio " + num(worst)};
}

Outcome c10_pipeline() {
  PipelineConfig cfg;
  cfg.lans = small_box();
  cfg.split.p = 6.0;
  cfg.monitors = false;
  const DyadicPartition part(cfg.lans.grid);
  const auto r = run_pipeline(scaled_to(solenoidal(cfg.lans.grid, 7, 1.0, 1.0), 0.1, part), cfg);
  const bool ok = r.passed && r.max_discrepancy <= 10 * r.max_self_error && r.times.back() >= 0.05 - 1e-12;
  return {ok, "J_c " + std::to_string(r.split.j_cut) + ", discrepancy " + num(r.max_discrepancy) + ", self error " +
                  num(r.max_self_error)};
}

Outcome c11_trace() {
  const LansConfig cfg{0.3, 0.05, TorusGrid(3, 32)};
  const DyadicPartition part(cfg.grid);
  const auto u0 = scaled_to(solenoidal(cfg.grid, 7, 1.0, 1.0), 1.0, part);
  const auto a = higher_regularity_trace(solve_mlans(u0, Trajectory{}, cfg, 0.05, 0.0025), 2.5, 1.5, part);
  const auto b = higher_regularity_trace(solve_mlans(u0, Trajectory{}, cfg, 0.05, 0.00125), 2.5, 1.5, part);
  const double change = trace_refinement_change(a, b);
  const bool ok = std::isfinite(a.sup) && std::isfinite(b.sup) && a.vanishing && b.vanishing &&
                  b.first_value < a.first_value && change < 0.1;
  return {ok, "sup " + num(a.sup) + ", first value " + num(a.first_value) + " -> " + num(b.first_value) +
                  " on refinement, sup change " + num(change)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "littlewood_paley_partition", c1_partition},
      {2, "paraproduct_reconstruction", c2_paraproduct},
      {3, "bernstein_slopes", c3_bernstein},
      {4, "heat_smoothing", c4_heat},
      {5, "product_estimate", c5_product},
      {6, "cancellations", c6_cancellation},
      {7, "mlans_derivation_identity", c7_derivation},
      {8, "picard_contraction", c8_picard},
      {9, "gronwall_energy", c9_gronwall},
      {10, "split_solve_recombine", c10_pipeline},
      {11, "higher_regularity_trace", c11_trace},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    std::istringstream is(argv[i]);
    int id = 0;
    if (!(is >> id) || id < 1 || id > int(all.size())) {
      std::cerr << "usage: " << argv[0] << " [criterion 1-" << all.size() << "]...\n";
      return 2;
    }
    only.insert(id);
  }
  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s  C%-2d %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures;
}
