#include "commands.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "lanslab/apriori.hpp"
#include "lanslab/errors.hpp"
#include "lanslab/inequality_lab.hpp"
#include "lanslab/lans.hpp"
#include "lanslab/random_fields.hpp"
#include "lanslab/spectral.hpp"
#include "manifest.hpp"

namespace lanslab::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RunManifest make_manifest(const Settings& s, const std::string& command, nlohmann::json params) {
  RunManifest m;
  m.command = command;
  m.config = s.config;
  m.out = s.out;
  m.seed = s.seed;
  m.version = version_string();
  m.params = std::move(params);
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

VectorField initial_data(const TorusGrid& g, std::uint64_t seed, double slope, double norm, double q) {
  if (norm == 0.0) return VectorField(g);
  VectorField u = random_solenoidal(g, seed, {.spectral_slope = slope});
  const DyadicPartition part(g);
  u *= norm / besov_norm(u, BesovIndex{1.5, 2.0, q}, part);
  return u;
}

// Setup errors are usage errors; anything thrown later is a run failure.
template <class F>
auto setup(F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// ------------------------------------------------------------------ verify

struct Outcome {
  std::string name;
  Verdict verdict = Verdict::inconclusive;
  std::string detail;
};

class VerifyRun {
 public:
  VerifyRun(const Settings& s, std::ostream& out)
      : s_(s), out_(out), n_(s.n_value(64)), writer_(s.out / "verify", make_manifest(s, "verify", s.to_json())) {}

  void run(const std::string& suite) {
    if (suite == "bernstein") return bernstein();
    if (suite == "heat") return heat();
    if (suite == "product") return product();
    if (suite == "embedding") return embedding();
    if (suite == "ladyzhenskaya") return ladyzhenskaya();
    if (suite == "cancellation") return cancellation();
    throw UsageError("unknown suite '" + suite + "'");
  }

  ExitCode finish() {
    nlohmann::json checks = nlohmann::json::array();
    bool fail = false, inconclusive = false;
    for (const auto& o : outcomes_) {
      checks.push_back({{"case", o.name}, {"verdict", to_string(o.verdict)}, {"detail", o.detail}});
      fail = fail || o.verdict == Verdict::fail;
      inconclusive = inconclusive || o.verdict == Verdict::inconclusive;
    }
    const ExitCode code = fail ? ExitCode::fail : inconclusive ? ExitCode::inconclusive : ExitCode::pass;
    writer_.write_json("summary.json", {{"checks", checks}, {"exit_code", static_cast<int>(code)}});
    return code;
  }

 private:
  void record(Outcome o) {
    out_ << std::left << std::setw(13) << to_string(o.verdict) << o.name;
    if (!o.detail.empty()) out_ << "  " << o.detail;
    out_ << '\n';
    outcomes_.push_back(std::move(o));
  }

  // Resolution guard; returns false after recording an inconclusive outcome.
  bool resolved(const std::string& name, int coarsest) {
    if (coarsest >= kMinResolvedN) return true;
    const std::string why = "under-resolved: N = " + std::to_string(coarsest) + " < " + std::to_string(kMinResolvedN);
    writer_.write_json(name + ".json", {{"case", name}, {"verdict", "inconclusive"}, {"pass", false}, {"diagnostic", why}});
    record({name, Verdict::inconclusive, why});
    return false;
  }

  void emit(const std::string& name, const ExponentFit& fit, const std::string& detail) {
    writer_.write_json(name + ".json", to_json(fit));
    auto os = writer_.open_csv(name + ".csv");
    write_samples_csv(os, fit);
    record({name, fit.verdict, detail + (fit.diagnostic.empty() ? "" : "  " + fit.diagnostic)});
  }

  EnsembleOptions ensemble() const {
    EnsembleOptions eo;
    eo.seed = s_.seed;
    eo.members = s_.members;
    eo.grid_sizes = {n_ / 2, n_};
    return eo;
  }

  void bernstein() {
    const std::array<std::array<double, 3>, 3> cases{{{0, 2, kInf}, {1, 2, 2}, {1, 2, 4}}};
    for (const auto& [beta, p, q] : cases) {
      const std::string name = "bernstein_beta" + fmt(beta) + "_p" + fmt(p) + "_q" + fmt(q);
      if (!resolved(name, n_)) continue;
      BernsteinOptions o;
      o.seed = s_.seed;
      const auto fit = verify_bernstein(p, q, beta, TorusGrid(3, n_, s_.box(), 1.0), o);
      emit(name, fit, "slope " + fmt(fit.measured_slope) + " predicted " + fmt(fit.predicted_slope));
    }
  }

  void heat() {
    const HeatSmoothingIndices sets[] = {{1.5, 2, 2.5, 2, 2}, {0.5, 2, 0.5, 4, 2}, {1, 2, 2, 4, 2}};
    for (const auto& idx : sets) {
      const std::string name = "heat_s1_" + fmt(idx.s1) + "_p1_" + fmt(idx.p1) + "_s2_" + fmt(idx.s2) + "_p2_" + fmt(idx.p2);
      if (!resolved(name, n_)) continue;
      const TorusGrid g(3, n_, s_.box(), 1.0);
      const DyadicPartition part(g);
      HeatSmoothingOptions o;
      o.seed = s_.seed;
      const auto fit = verify_heat_smoothing(idx, saturating_heat_data(g, idx, s_.seed), part, o);
      emit(name, fit, "exponent " + fmt(fit.measured_slope) + " predicted " + fmt(fit.predicted_slope));
    }
  }

  void product() {
    const ProductIndices admissible[] = {{1, 2, 1, 2, 2, 2}, {0.5, 2, 0.5, 4, 2, 2}, {1, 2, 0.25, 6, 3, 2}};
    for (const auto& idx : admissible) {
      const std::string name = "product_" + fmt(idx.s1) + "_" + fmt(idx.p1) + "_" + fmt(idx.s2) + "_" + fmt(idx.p2) +
                               "_" + fmt(idx.p) + "_" + fmt(idx.q);
      if (!resolved(name, n_ / 2)) continue;
      const auto fit = verify_product_estimate(idx, ensemble());
      emit(name, fit, "growth " + fmt(fit.refinement_growth));
    }
    const std::pair<ProductIndices, std::string> rejected[] = {
        {{2, 2, 1, 2, 2, 2}, "s1 < n/p1"},
        {{1, 2, 1.5, 2, 2, 2}, "s2 < n/p2"},
        {{-1, 2, 0.5, 2, 2, 2}, "s1 + s2 > 0"},
        {{0.5, 4, 0.5, 4, 1, 2}, "1/p <= 1/p1 + 1/p2"},
    };
    for (std::size_t i = 0; i < std::size(rejected); ++i) {
      const auto& [idx, expected] = rejected[i];
      const std::string name = "product_reject_" + std::to_string(i + 1);
      std::string got = "accepted";
      try {
        check_product_hypotheses(idx, 3);
      } catch (const HypothesisViolation& e) {
        got = e.condition();
      }
      const bool ok = got == expected;
      writer_.write_json(name + ".json", {{"case", name},
                                          {"indices", {idx.s1, idx.p1, idx.s2, idx.p2, idx.p, idx.q}},
                                          {"expected", expected},
                                          {"reported", got},
                                          {"verdict", ok ? "pass" : "fail"},
                                          {"pass", ok}});
      record({name, ok ? Verdict::pass : Verdict::fail, "rejected: " + got});
    }
  }

  void embedding() {
    std::vector<std::pair<EmbeddingCase, EmbeddingParams>> cases;
    EmbeddingParams a;
    a.beta1 = a.beta2 = 1.0;
    a.q1 = 1.0;
    a.q2 = kInf;
    cases.emplace_back(EmbeddingCase::q_monotone, a);
    EmbeddingParams b;
    b.beta2 = 0.5;
    cases.emplace_back(EmbeddingCase::p_embedding, b);
    EmbeddingParams c;
    c.s = 1.0;
    c.r = 1.5;
    c.p = 3.0;
    cases.emplace_back(EmbeddingCase::sobolev_besov, c);
    EmbeddingParams d;
    d.s = 1.5;
    cases.emplace_back(EmbeddingCase::sobolev_equals, d);
    for (const auto& [kind, prm] : cases) {
      const std::string name = std::string("embedding_") + to_string(kind);
      if (!resolved(name, n_ / 2)) continue;
      const auto fit = verify_embedding(kind, prm, ensemble());
      emit(name, fit, "max constant " + fmt(fit.max_constant) + " growth " + fmt(fit.refinement_growth));
    }
  }

  void ladyzhenskaya() {
    const std::string name = "ladyzhenskaya_r1_1_r2_3";
    if (!resolved(name, n_ / 2)) return;
    const auto fit = verify_ladyzhenskaya(1.0, 3.0, ensemble());
    emit(name, fit, "max constant " + fmt(fit.max_constant) + " growth " + fmt(fit.refinement_growth));
  }

  void cancellation() {
    const std::string name = "cancellation";
    if (!resolved(name, n_)) return;
    const TorusGrid g(3, n_, s_.box());
    const double alpha = s_.alpha_value(0.5);
    auto os = writer_.open_csv(name + ".csv");
    os << "# case=" << name << " seed=" << s_.seed << '\n' << "member,kind,I1,I2,I3\n";
    double worst = 0.0, control = kInf;
    std::seed_seq seq{static_cast<std::uint32_t>(s_.seed), static_cast<std::uint32_t>(s_.seed >> 32)};
    std::vector<std::uint32_t> seeds(40);
    seq.generate(seeds.begin(), seeds.end());
    const double rms = 0.1 * std::sqrt(g.volume());
    ScalarSamples sine(g);
    for_each_point(g, [&](std::size_t i, const std::array<double, 3>& x) {
      sine[0][i] = std::sin(2.0 * std::numbers::pi * x[0] / g.box_length());
    });
    VectorField grad_sine = gradient(forward_transform(sine));
    grad_sine *= 0.1 * g.box_length() / (2.0 * std::numbers::pi);
    for (int m = 0; m < 20; ++m) {
      const auto u = random_solenoidal(g, seeds[m], {.spectral_slope = 1.5, .l2_norm = rms});
      const auto c = cancellation_check(u, alpha);
      worst = std::max(worst, c.max_normalized());
      os << m << ",solenoidal," << c.i1 << ',' << c.i2 << ',' << c.i3 << '\n';
      auto d = random_solenoidal(g, seeds[20 + m], {.spectral_slope = 2.5, .k_max = 3.0, .l2_norm = rms});
      d += grad_sine;
      const auto cd = cancellation_check(d, alpha);
      control = std::min(control, cd.max_normalized());
      os << m << ",control," << cd.i1 << ',' << cd.i2 << ',' << cd.i3 << '\n';
    }
    const bool ok = worst <= 1e-10 && control > 1e-3;
    writer_.write_json(name + ".json", {{"case", name},
                                        {"members", 20},
                                        {"alpha", alpha},
                                        {"max_residual", worst},
                                        {"residual_tolerance", 1e-10},
                                        {"control_min", control},
                                        {"control_threshold", 1e-3},
                                        {"verdict", ok ? "pass" : "fail"},
                                        {"pass", ok}});
    record({name, ok ? Verdict::pass : Verdict::fail, "max residual " + fmt(worst) + " control min " + fmt(control)});
  }

  const Settings& s_;
  std::ostream& out_;
  int n_;
  ArtifactWriter writer_;
  std::vector<Outcome> outcomes_;
};

// ------------------------------------------------------------------- solve

struct CellValues {
  double alpha, nu, dt;
  int n;
};

struct SolveOutcome {
  VectorField final_state;
  nlohmann::json summary;
};

LansConfig lans_config(const Settings& s, const CellValues& c) {
  return setup([&] {
    if (s.equation == "ns" && c.alpha != 0.0) throw UsageError("--equation ns requires alpha = 0");
    if (!(c.dt > 0.0) || !(s.t_end > 0.0)) throw UsageError("dt and t_end must be positive");
    if (s.output_every < 1) throw UsageError("output_every must be >= 1");
    LansConfig cfg{c.alpha, c.nu, TorusGrid(3, c.n, s.box(), s.dealias_fraction)};
    cfg.validate();
    return cfg;
  });
}

SolveOutcome run_solve(const Settings& s, const CellValues& c, const ArtifactWriter& w) {
  const LansConfig cfg = lans_config(s, c);
  const DyadicPartition part(cfg.grid);
  const VectorField u0 = initial_data(cfg.grid, s.seed, s.init_slope, s.init_norm, s.q);
  MarchOptions mo;
  mo.output_every = s.output_every;
  Trajectory traj;
  if (s.equation == "lans" || s.equation == "ns") {
    traj = solve_lans(u0, cfg, s.t_end, c.dt, mo);
  } else if (s.equation == "heat") {
    mo.nonlinear = false;
    traj = solve_lans(u0, cfg, s.t_end, c.dt, mo);
  } else {
    Trajectory v;
    if (s.v_norm > 0.0) {
      const VectorField v0 = initial_data(cfg.grid, s.seed + 1, s.init_slope, s.v_norm, s.q);
      v = solve_lans(v0, cfg, s.t_end, c.dt);
    }
    traj = solve_mlans(u0, v, cfg, s.t_end, c.dt, mo);
  }

  auto os = w.open_csv("trajectory.csv");
  os << "# equation=" << s.equation << " seed=" << s.seed << '\n'
     << "t,l2,energy_pair,h1,besov_3_2,relative_divergence\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& u = traj.state(i);
    os << traj.time(i) << ',' << l2_norm(u) << ',' << energy_pair(u, cfg.alpha) << ',' << sobolev_seminorm(u, 1.0)
       << ',' << besov_norm(u, BesovIndex{1.5, 2.0, s.q}, part) << ',' << relative_divergence(u) << '\n';
  }
  const auto diag = diagnose(traj);
  nlohmann::json summary = {
      {"equation", s.equation},
      {"alpha", cfg.alpha},
      {"nu", cfg.nu},
      {"n", c.n},
      {"dt", c.dt},
      {"t_end", traj.times().back()},
      {"steps_stored", traj.size()},
      {"navier_stokes_limit", cfg.alpha == 0.0},
      {"initial", {{"l2", l2_norm(u0)}, {"besov_3_2", besov_norm(u0, BesovIndex{1.5, 2.0, s.q}, part)}}},
      {"final",
       {{"l2", l2_norm(traj.back())},
        {"energy_pair", energy_pair(traj.back(), cfg.alpha)},
        {"besov_3_2", besov_norm(traj.back(), BesovIndex{1.5, 2.0, s.q}, part)}}},
      {"diagnostics",
       {{"max_relative_divergence", diag.max_relative_divergence},
        {"mean_mode_drift", diag.mean_mode_drift},
        {"dealiased", diag.dealiased}}},
  };
  if (s.checkpoints) {
    summary["checkpoints"] = {w.write_checkpoint("initial", u0, 0.0),
                              w.write_checkpoint("final", traj.back(), traj.times().back())};
  }
  return {traj.back(), summary};
}

nlohmann::json cell_params(const Settings& s, const CellValues& c) {
  auto j = s.to_json();
  j["alpha"] = {c.alpha};
  j["nu"] = {c.nu};
  j["n"] = {c.n};
  j["dt"] = {c.dt};
  return j;
}

// ---------------------------------------------------------------- pipeline

void write_pipeline_csv(const ArtifactWriter& w, const PipelineReport& r, std::uint64_t seed) {
  auto os = w.open_csv("discrepancy.csv");
  os << "# case=pipeline seed=" << seed << '\n' << "t,discrepancy,self_error\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    os << r.times[i] << ',' << r.discrepancy[i] << ',' << r.self_error[i] << '\n';
}

}  // namespace

ExitCode cmd_verify(const Settings& s, std::ostream& out) {
  auto suites = split_list(s.suite);
  if (suites.empty()) throw UsageError("verify needs --suite (bernstein, heat, product, embedding, ladyzhenskaya, "
                                       "cancellation or all)");
  if (std::find(suites.begin(), suites.end(), "all") != suites.end())
    suites = {"bernstein", "heat", "product", "embedding", "ladyzhenskaya", "cancellation"};
  static const std::vector<std::string> known = {"bernstein",     "heat",         "product", "embedding",
                                                 "ladyzhenskaya", "cancellation"};
  for (const auto& name : suites)
    if (std::find(known.begin(), known.end(), name) == known.end()) throw UsageError("unknown suite '" + name + "'");
  if (s.members < 1) throw UsageError("members must be >= 1");
  VerifyRun run(s, out);
  for (const auto& name : suites) run.run(name);
  return run.finish();
}

ExitCode cmd_solve(const Settings& s, std::ostream& out) {
  const CellValues c{s.alpha_value(s.equation == "ns" ? 0.0 : 0.3), s.nu_value(0.05), s.dt_value(0.0025),
                     s.n_value(32)};
  lans_config(s, c);
  const ArtifactWriter w(s.out / "solve", make_manifest(s, "solve", s.to_json()));
  auto r = run_solve(s, c, w);
  w.write_json("summary.json", r.summary);
  out << "solve " << s.equation << " alpha " << c.alpha << " nu " << c.nu << " n " << c.n << " dt " << c.dt
      << ": final l2 " << r.summary["final"]["l2"].get<double>() << "\n";
  return ExitCode::pass;
}

ExitCode cmd_pipeline(const Settings& s, std::ostream& out) {
  PipelineConfig cfg;
  const int n = s.n_value(32);
  setup([&] {
    cfg.lans = LansConfig{s.alpha_value(0.3), s.nu_value(0.05), TorusGrid(3, n, s.box(), s.dealias_fraction)};
    cfg.lans.validate();
    cfg.t_end = s.t_end;
    cfg.dt = s.dt_value(0.0025);
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw UsageError("dt and t_end must be positive");
    cfg.split.p = s.p;
    cfg.split.p_tilde = s.p_tilde;
    cfg.split.q = s.q;
    cfg.split.epsilon = s.epsilon;
    cfg.split.j_cut = s.j_cut;
    cfg.split.j_cut_max = s.j_cut_max;
    cfg.split.validate();
    cfg.picard.picard_tol = s.picard_tol;
    cfg.picard.picard_max_iters = s.picard_max_iters;
    cfg.tolerance_factor = s.tolerance_factor;
    cfg.monitors = s.monitors;
    return 0;
  });
  const ArtifactWriter w(s.out / "pipeline", make_manifest(s, "pipeline", s.to_json()));
  if (n < kMinResolvedN) {
    const std::string why = "under-resolved: N = " + std::to_string(n) + " < " + std::to_string(kMinResolvedN);
    w.write_json("report.json", {{"status", "inconclusive"}, {"pass", false}, {"diagnostic", why}});
    out << "inconclusive pipeline  " << why << '\n';
    return ExitCode::inconclusive;
  }
  const VectorField w0 = initial_data(cfg.lans.grid, s.seed, s.init_slope, s.init_norm, s.q);
  try {
    const PipelineReport r = run_pipeline(w0, cfg);
    auto j = r.to_json();
    j["status"] = r.passed ? "pass" : "fail";
    j["tolerance_factor"] = cfg.tolerance_factor;
    if (s.checkpoints) {
      const double t = r.w.times().back();
      j["checkpoints"] = {w.write_checkpoint("u_final", r.u.back(), t), w.write_checkpoint("v_final", r.v.back(), t),
                          w.write_checkpoint("w_final", r.w.back(), t)};
    }
    w.write_json("report.json", j);
    write_pipeline_csv(w, r, s.seed);
    out << (r.passed ? "pass" : "fail") << " pipeline  j_cut " << r.split.j_cut << " max discrepancy "
        << r.max_discrepancy << " vs " << cfg.tolerance_factor << " x self error " << r.max_self_error << '\n';
    return r.passed ? ExitCode::pass : ExitCode::fail;
  } catch (const SplitUnreachable& e) {
    w.write_json("report.json", {{"status", "split_unreachable"},
                                 {"pass", false},
                                 {"achievable_minimum", e.achievable_minimum()},
                                 {"epsilon", cfg.split.epsilon},
                                 {"diagnostic", e.what()}});
    out << "fail pipeline  " << e.what() << '\n';
    return ExitCode::fail;
  } catch (const PicardNonConvergence& e) {
    w.write_json("report.json", {{"status", "picard_nonconvergence"},
                                 {"pass", false},
                                 {"last_contraction_ratio", e.last_ratio()},
                                 {"iterations", e.iterations()},
                                 {"diagnostic", e.what()}});
    out << "fail pipeline  " << e.what() << '\n';
    return ExitCode::fail;
  }
}

ExitCode cmd_sweep(const Settings& s, std::ostream& out) {
  const std::vector<double> alphas = s.alpha.empty() ? std::vector<double>{0.3} : s.alpha;
  const std::vector<double> nus = s.nu.empty() ? std::vector<double>{0.05} : s.nu;
  const std::vector<int> ns = s.n.empty() ? std::vector<int>{32} : s.n;
  const std::vector<double> dts = s.dt.empty() ? std::vector<double>{0.0025} : s.dt;
  std::vector<CellValues> cells;
  for (double a : alphas)
    for (double nu : nus)
      for (int n : ns)
        for (double dt : dts) cells.push_back({a, nu, dt, n});

  const ArtifactWriter top(s.out / "sweep", make_manifest(s, "sweep", s.to_json()));

  struct CellResult {
    bool ok = false;
    std::string error;
    std::string hash;
    std::optional<VectorField> final_state;
    nlohmann::json summary;
  };
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      CellResult& r = results[i];
      try {
        std::ostringstream dir;
        dir << "cell_" << std::setw(3) << std::setfill('0') << i;
        const ArtifactWriter w(top.dir() / dir.str(), make_manifest(s, "sweep-cell", cell_params(s, cells[i])));
        r.hash = w.hash();
        try {
          auto o = run_solve(s, cells[i], w);
          r.summary = o.summary;
          r.final_state = std::move(o.final_state);
          r.ok = true;
          w.write_json("summary.json", r.summary);
        } catch (const std::exception& e) {
          r.error = e.what();
          w.write_json("summary.json", {{"status", "failed"}, {"error", r.error}});
        }
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const int jobs = s.jobs > 0 ? s.jobs : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int k = 0; k < std::min<int>(jobs, static_cast<int>(cells.size())); ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool any_failed = false;
  nlohmann::json listing = nlohmann::json::array();
  {
    auto os = top.open_csv("cells.csv");
    os << "cell,alpha,nu,n,dt,status,final_l2,manifest_hash,error\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      const auto& r = results[i];
      any_failed = any_failed || !r.ok;
      const double l2 = r.ok ? r.summary["final"]["l2"].get<double>() : std::nan("");
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      os << i << ',' << c.alpha << ',' << c.nu << ',' << c.n << ',' << c.dt << ',' << (r.ok ? "ok" : "failed") << ','
         << l2 << ',' << r.hash << ',' << err << '\n';
      listing.push_back({{"cell", i},
                         {"alpha", c.alpha},
                         {"nu", c.nu},
                         {"n", c.n},
                         {"dt", c.dt},
                         {"status", r.ok ? "ok" : "failed"},
                         {"manifest_hash", r.hash},
                         {"error", r.error}});
      out << (r.ok ? "ok     " : "failed ") << "cell " << i << " alpha " << c.alpha << " nu " << c.nu << " n " << c.n
          << " dt " << c.dt << (r.ok ? "" : "  " + r.error) << '\n';
    }
  }

  // Self-convergence: consecutive dt within each (alpha, nu, n) group, final
  // states compared in relative L^2.
  nlohmann::json table = nlohmann::json::array();
  {
    std::map<std::tuple<double, double, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (results[i].ok) groups[{cells[i].alpha, cells[i].nu, cells[i].n}].push_back(i);
    auto os = top.open_csv("convergence.csv");
    os << "alpha,nu,n,dt_coarse,dt_fine,relative_l2_difference,observed_order\n";
    for (auto& [key, idx] : groups) {
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return cells[a].dt > cells[b].dt; });
      double prev = std::nan("");
      double prev_ratio = std::nan("");
      for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        const auto& a = *results[idx[k]].final_state;
        const auto& b = *results[idx[k + 1]].final_state;
        VectorField d = a;
        d -= b;
        const double nb = l2_norm(b);
        const double e = nb == 0.0 ? l2_norm(d) : l2_norm(d) / nb;
        const double ratio = cells[idx[k]].dt / cells[idx[k + 1]].dt;
        // Order from two consecutive differences with a common refinement ratio.
        double order = std::nan("");
        if (k > 0 && prev > 0.0 && e > 0.0 && std::abs(ratio - prev_ratio) < 1e-9 * ratio)
          order = std::log(prev / e) / std::log(ratio);
        os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ',' << cells[idx[k]].dt << ','
           << cells[idx[k + 1]].dt << ',' << e << ',' << order << '\n';
        table.push_back({{"alpha", std::get<0>(key)},
                         {"nu", std::get<1>(key)},
                         {"n", std::get<2>(key)},
                         {"dt_coarse", cells[idx[k]].dt},
                         {"dt_fine", cells[idx[k + 1]].dt},
                         {"relative_l2_difference", e},
                         {"observed_order", std::isnan(order) ? nlohmann::json(nullptr) : nlohmann::json(order)}});
        prev = e;
        prev_ratio = ratio;
      }
    }
  }
  top.write_json("summary.json", {{"cells", listing}, {"convergence", table}, {"failed", any_failed}});
  return any_failed ? ExitCode::fail : ExitCode::pass;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  if (auto code = parse_command_line(argc, argv, s, out, err)) return static_cast<int>(*code);
  try {
    ExitCode code = ExitCode::usage;
    if (s.command == "verify") code = cmd_verify(s, out);
    if (s.command == "solve") code = cmd_solve(s, out);
    if (s.command == "pipeline") code = cmd_pipeline(s, out);
    if (s.command == "sweep") code = cmd_sweep(s, out);
    return static_cast<int>(code);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::fail);
  }
}

}  // namespace lanslab::cli
