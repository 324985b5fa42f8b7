#include "lanslab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "lanslab/errors.hpp"
#include "lanslab/lans.hpp"
#include "lanslab/random_fields.hpp"
#include "lanslab/spectral.hpp"

namespace lanslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

nlohmann::json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::uint64_t member_seed(std::uint64_t seed, std::uint64_t member, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(member), static_cast<std::uint32_t>(tag)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

// Largest block j whose annulus 2^{j-1} < |k| < 2^{j+1} sits inside radius kmax (physical).
int largest_full_level(double kmax) {
  int j = 0;
  while (std::ldexp(1.0, j + 2) <= kmax * (1.0 + 1e-12)) ++j;
  return j;
}

// c_k = amplitude(|k|) * rho_k * exp(-i k.x0) for lattice |k_i| <= band, mean zero.
template <class Amp>
ScalarField coherent_field(const TorusGrid& grid, std::uint64_t seed, int band, Amp amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, grid.points_per_axis() - 1);
  std::array<double, 3> x0{0.0, 0.0, 0.0};
  const double h = grid.box_length() / grid.points_per_axis();
  for (int a = 0; a < grid.dim(); ++a) x0[a] = h * pick(rng);
  const auto rho = symmetric_uniform_weights(grid, rng(), 0.5, 1.5);
  ScalarField f(grid);
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& lat) {
    for (int a = 0; a < grid.dim(); ++a)
      if (std::abs(lat[a]) > band || 2 * std::abs(lat[a]) == grid.points_per_axis()) return;
    const auto w = mode_wavenumbers(grid, lat);
    const double r = std::sqrt(w.k2);
    if (r == 0.0) return;
    const double a = amplitude(r, idx);
    if (a == 0.0) return;
    double phase = 0.0;
    for (int d = 0; d < grid.dim(); ++d) phase -= w.k[d] * x0[d];
    f[0][idx] = a * rho[idx] * Complex(std::cos(phase), std::sin(phase));
  });
  f.set_real_valued(true);
  return f;
}

ScalarField coherent_shell(const DyadicPartition& part, int j, std::uint64_t seed, int band) {
  const auto& mask = part.mask(j);
  return coherent_field(part.grid(), seed, band, [&](double, std::size_t idx) { return mask[idx]; });
}

ScalarField coherent_power_law(const TorusGrid& grid, double gamma, std::uint64_t seed, int band) {
  return coherent_field(grid, seed, band, [&](double r, std::size_t) { return std::pow(r, -gamma); });
}

double allowed_error(double predicted, double tolerance) {
  return tolerance * (predicted != 0.0 ? std::abs(predicted) : 1.0);
}

void grade_slope(ExponentFit& fit) {
  if (!std::isfinite(fit.measured_slope)) {
    fit.verdict = Verdict::fail;
    fit.diagnostic = "non-finite slope";
  } else if (!(fit.r_squared >= kMinRSquared)) {
    fit.verdict = Verdict::inconclusive;
    fit.diagnostic = "r^2 below " + std::to_string(kMinRSquared);
  } else if (std::abs(fit.measured_slope - fit.predicted_slope) <= allowed_error(fit.predicted_slope, fit.tolerance)) {
    fit.verdict = Verdict::pass;
  } else {
    fit.verdict = Verdict::fail;
    fit.diagnostic = "slope outside tolerance";
  }
}

// Refinement study over grid sizes: ratio(member, partition) per grid, max per grid.
template <class Ratio>
void run_refinement(ExponentFit& fit, const EnsembleOptions& opt, Ratio ratio) {
  if (opt.members < 1) throw std::invalid_argument("ensemble needs at least one member");
  if (opt.grid_sizes.empty()) throw std::invalid_argument("ensemble needs at least one grid size");
  fit.seed = opt.seed;
  fit.ensemble_size = static_cast<std::size_t>(opt.members);
  fit.grid_sizes = opt.grid_sizes;
  fit.x_label = "log2_N";
  fit.y_label = "log2_max_ratio";
  fit.tolerance = opt.max_growth;
  fit.predicted_slope = 0.0;
  fit.max_constant = 0.0;
  fit.min_constant = kInf;
  for (int n : opt.grid_sizes) {
    const TorusGrid grid(opt.dim, n);
    const DyadicPartition part(grid);
    double hi = 0.0;
    for (int m = 0; m < opt.members; ++m) {
      const double r = ratio(part, m);
      if (std::isnan(r)) {
        hi = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      hi = std::max(hi, r);
      fit.min_constant = std::min(fit.min_constant, r);
    }
    fit.constants_by_grid.push_back(hi);
    fit.max_constant = std::isnan(hi) ? hi : std::max(fit.max_constant, hi);
    fit.samples.push_back({std::log2(static_cast<double>(n)), std::log2(hi)});
  }
  double growth = 1.0;
  for (std::size_t i = 1; i < fit.constants_by_grid.size(); ++i) {
    const double a = fit.constants_by_grid[i - 1], b = fit.constants_by_grid[i];
    const double g = (a > 0.0) ? b / a : (b > 0.0 ? kInf : 1.0);
    growth = std::max(growth, g);
  }
  fit.refinement_growth = growth;
  fit.measured_slope = std::log2(growth);
  if (!std::isfinite(fit.max_constant)) {
    fit.verdict = Verdict::fail;
    fit.diagnostic = "non-finite ensemble constant";
  } else if (!(growth < opt.max_growth)) {
    fit.verdict = Verdict::fail;
    fit.diagnostic = "constant grows under refinement";
  } else {
    fit.verdict = Verdict::pass;
  }
}

// Shared ensemble for norm inequalities. saturating_gamma is the power-law
// exponent that makes the right-hand side borderline.
ScalarField ensemble_member(const DyadicPartition& part, std::uint64_t seed, int m, double saturating_gamma) {
  const TorusGrid& grid = part.grid();
  const int band = grid.dealias_cutoff() / 2;
  const int jtop = std::max(1, std::min(part.top_level(), largest_full_level(grid.wavenumber_unit() * band)));
  std::mt19937_64 rng(member_seed(seed, static_cast<std::uint64_t>(m), 7));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  switch (m % 3) {
    case 0: {
      RandomFieldOptions ro;
      ro.spectral_slope = 0.5 + 2.5 * uni(rng);
      ro.k_max = band;
      return random_scalar(grid, rng(), ro);
    }
    case 1: {
      const int j = std::max(1, jtop - static_cast<int>(uni(rng) * 3.0));
      return coherent_shell(part, j, rng(), band);
    }
    default:
      return coherent_power_law(grid, saturating_gamma, rng(), band);
  }
}

double ratio_or_zero(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
  return lhs / rhs;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

LineFit least_squares(const std::vector<FitSample>& s) {
  if (s.size() < 2) throw std::invalid_argument("least_squares: need at least two samples");
  const double n = static_cast<double>(s.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : s) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : s) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
    syy += (p.y - my) * (p.y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: abscissae coincide");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ssr = 0.0;
  for (const auto& p : s) {
    const double e = p.y - (out.intercept + out.slope * p.x);
    ssr += e * e;
  }
  const double scale = std::max(1.0, my * my);
  if (syy <= 1e-24 * scale * n)
    out.r_squared = 1.0;
  else
    out.r_squared = std::clamp(1.0 - ssr / syy, 0.0, 1.0);
  return out;
}

nlohmann::json to_json(const ExponentFit& fit) {
  nlohmann::json j;
  j["case"] = fit.check;
  j["params"] = fit.params;
  j["seed"] = fit.seed;
  j["measured"] = number(fit.measured_slope);
  j["predicted"] = number(fit.predicted_slope);
  j["tolerance"] = number(fit.tolerance);
  j["r_squared"] = number(fit.r_squared);
  j["max_constant"] = number(fit.max_constant);
  j["min_constant"] = number(fit.min_constant);
  j["grid_sizes"] = fit.grid_sizes;
  auto consts = nlohmann::json::array();
  for (double c : fit.constants_by_grid) consts.push_back(number(c));
  j["constants_by_grid"] = consts;
  j["refinement_growth"] = number(fit.refinement_growth);
  j["ensemble_size"] = fit.ensemble_size;
  j["verdict"] = to_string(fit.verdict);
  j["pass"] = fit.passed();
  if (!fit.diagnostic.empty()) j["diagnostic"] = fit.diagnostic;
  return j;
}

void write_samples_csv(std::ostream& os, const ExponentFit& fit) {
  os << "# case=" << fit.check << " seed=" << fit.seed << '\n';
  os << fit.x_label << ',' << fit.y_label << '\n';
  os.precision(17);
  for (const auto& s : fit.samples) os << s.x << ',' << s.y << '\n';
}

// ---------------------------------------------------------------- Bernstein

ExponentFit verify_bernstein(double p, double q, double beta, const TorusGrid& grid, const BernsteinOptions& opt) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw std::invalid_argument("verify_bernstein: exponents must be >= 1");
  if (p > q) throw HypothesisViolation("p <= q", "verify_bernstein: requires p <= q");
  if (!(beta >= 0.0)) throw std::invalid_argument("verify_bernstein: beta must be >= 0");
  if (opt.members < 1) throw std::invalid_argument("verify_bernstein: members must be >= 1");

  const DyadicPartition part(grid);
  const int n = grid.dim();
  const int band = grid.dealias_cutoff();
  int jmax = std::min(part.top_level(), largest_full_level(grid.wavenumber_unit() * band));
  if (opt.level_max >= 0) jmax = std::min(jmax, opt.level_max);
  const int jmin = std::max(1, opt.level_min);
  if (jmax - jmin < 1) throw std::invalid_argument("verify_bernstein: grid resolves fewer than two shells");

  ExponentFit fit;
  fit.check = "bernstein";
  fit.params = {{"p", number(p)}, {"q", number(q)}, {"beta", beta}, {"dim", n}, {"N", grid.points_per_axis()},
                {"levels", {jmin, jmax}}, {"members", opt.members}};
  fit.seed = opt.seed;
  fit.tolerance = opt.tolerance;
  fit.ensemble_size = static_cast<std::size_t>(opt.members);
  fit.predicted_slope = beta + n * (inv(p) - inv(q));
  fit.x_label = "j";
  fit.y_label = "log2_ratio";
  fit.max_constant = 0.0;
  fit.min_constant = kInf;
  fit.grid_sizes = {grid.points_per_axis()};

  const double unit = grid.wavenumber_unit();
  for (int j = jmin; j <= jmax; ++j) {
    double worst = 0.0;
    for (int m = 0; m < opt.members; ++m) {
      const ScalarField g = coherent_shell(part, j, member_seed(opt.seed, static_cast<std::uint64_t>(m), j), band);
      const ScalarField ag = laplacian_power(g, beta);
      const double gp = lp_norm(g, p);
      const double r = lp_norm(ag, q) / gp;
      worst = std::max(worst, r);
      // Reverse inequality for annulus-supported g, in physical 2^j units.
      const double lower = lp_norm(ag, p) / (std::pow(unit * std::ldexp(1.0, j), beta) * gp);
      fit.min_constant = std::min(fit.min_constant, lower);
    }
    fit.samples.push_back({static_cast<double>(j), std::log2(worst)});
    const double c = worst / std::pow(unit * std::ldexp(1.0, j), fit.predicted_slope);
    fit.max_constant = std::max(fit.max_constant, c);
  }
  fit.constants_by_grid = {fit.max_constant};
  const LineFit lf = least_squares(fit.samples);
  fit.measured_slope = lf.slope;
  fit.r_squared = lf.r_squared;
  grade_slope(fit);
  return fit;
}

// ---------------------------------------------------------- heat smoothing

double heat_smoothing_exponent(const HeatSmoothingIndices& idx, int dim) {
  return 0.0 - (idx.s2 - idx.s1 + dim * inv(idx.p1) - dim * inv(idx.p2)) / 2.0;
}

ScalarField saturating_heat_data(const TorusGrid& grid, const HeatSmoothingIndices& idx, std::uint64_t seed) {
  const double gamma = idx.s1 + grid.dim() * (1.0 - inv(idx.p1));
  return coherent_power_law(grid, gamma, seed, grid.dealias_cutoff());
}

ExponentFit verify_heat_smoothing(const HeatSmoothingIndices& idx, const ScalarField& f, const DyadicPartition& part,
                                  const HeatSmoothingOptions& opt) {
  if (!(idx.p1 >= 1.0) || !(idx.p2 >= 1.0) || !(idx.q >= 1.0))
    throw std::invalid_argument("verify_heat_smoothing: integrability indices must be >= 1");
  if (idx.p1 > idx.p2) throw std::invalid_argument("verify_heat_smoothing: requires p1 <= p2");
  if (idx.s1 > idx.s2) throw std::invalid_argument("verify_heat_smoothing: requires s1 <= s2");
  if (!(opt.t_min > 0.0) || !(opt.t_max > opt.t_min) || opt.t_max >= 1.0 || opt.t_samples < 2)
    throw std::invalid_argument("verify_heat_smoothing: need 0 < t_min < t_max < 1 and >= 2 samples");
  require_same_grid(f.grid(), part.grid(), "verify_heat_smoothing");

  const int n = part.grid().dim();
  ExponentFit fit;
  fit.check = "heat_smoothing";
  fit.params = {{"s1", idx.s1}, {"p1", number(idx.p1)}, {"s2", idx.s2}, {"p2", number(idx.p2)},
                {"q", number(idx.q)}, {"dim", n}, {"N", part.grid().points_per_axis()},
                {"t_min", opt.t_min}, {"t_max", opt.t_max}, {"t_samples", opt.t_samples}};
  fit.seed = opt.seed;
  fit.tolerance = opt.tolerance;
  fit.ensemble_size = 1;
  fit.predicted_slope = heat_smoothing_exponent(idx, n);
  fit.x_label = "log_t";
  fit.y_label = "log_norm";
  fit.grid_sizes = {part.grid().points_per_axis()};

  const double data = besov_norm(f, BesovIndex{idx.s1, idx.p1, idx.q}, part);
  const BesovIndex target{idx.s2, idx.p2, idx.q};
  std::vector<double> norms;
  fit.max_constant = 0.0;
  const double l0 = std::log(opt.t_min), l1 = std::log(opt.t_max);
  for (int i = 0; i < opt.t_samples; ++i) {
    const double t = std::exp(l0 + (l1 - l0) * i / (opt.t_samples - 1));
    const double v = besov_norm(heat_propagate(f, t, opt.nu), target, part);
    norms.push_back(v);
    fit.samples.push_back({std::log(t), std::log(v)});
    if (data > 0.0) fit.max_constant = std::max(fit.max_constant, v * std::pow(t, -fit.predicted_slope) / data);
  }
  fit.constants_by_grid = {fit.max_constant};

  if (data == 0.0) {
    fit.measured_slope = 0.0;
    fit.r_squared = 1.0;
    const bool zero = std::all_of(norms.begin(), norms.end(), [](double v) { return v == 0.0; });
    fit.verdict = zero ? Verdict::pass : Verdict::fail;
    return fit;
  }
  const LineFit lf = least_squares(fit.samples);
  fit.measured_slope = lf.slope;
  fit.r_squared = lf.r_squared;
  if (fit.predicted_slope == 0.0) {
    // Each block is damped by the semigroup, so the norm must not increase.
    bool monotone = true;
    for (std::size_t i = 1; i < norms.size(); ++i) monotone = monotone && norms[i] <= norms[i - 1] * (1.0 + 1e-12);
    fit.verdict = monotone ? Verdict::pass : Verdict::fail;
    if (!monotone) fit.diagnostic = "norm increased along the heat flow";
    return fit;
  }
  grade_slope(fit);
  return fit;
}

double heat_weighted_sup(const ScalarField& f, const BesovIndex& idx, double sigma, double T,
                         const DyadicPartition& part, int t_samples, double nu) {
  if (!(T > 0.0) || t_samples < 1) throw std::invalid_argument("heat_weighted_sup: need T > 0");
  double best = 0.0;
  const double l1 = std::log(T), l0 = l1 - std::log(1e3);
  for (int i = 0; i < t_samples; ++i) {
    const double t = t_samples == 1 ? T : std::exp(l0 + (l1 - l0) * i / (t_samples - 1));
    best = std::max(best, std::pow(t, sigma) * besov_norm(heat_propagate(f, t, nu), idx, part));
  }
  return best;
}

// ---------------------------------------------------------- product estimate

double product_regularity(const ProductIndices& idx, int dim) {
  return idx.s1 + idx.s2 - dim * (inv(idx.p1) + inv(idx.p2) - inv(idx.p));
}

void check_product_hypotheses(const ProductIndices& idx, int dim) {
  if (!(idx.p1 >= 1.0) || !(idx.p2 >= 1.0) || !(idx.p >= 1.0) || !(idx.q >= 1.0))
    throw std::invalid_argument("product estimate: integrability indices must be >= 1");
  if (!(idx.s1 < dim * inv(idx.p1)))
    throw HypothesisViolation("s1 < n/p1", "product estimate: hypothesis s1 < n/p1 fails");
  if (!(idx.s2 < dim * inv(idx.p2)))
    throw HypothesisViolation("s2 < n/p2", "product estimate: hypothesis s2 < n/p2 fails");
  if (!(idx.s1 + idx.s2 > 0.0))
    throw HypothesisViolation("s1 + s2 > 0", "product estimate: hypothesis s1 + s2 > 0 fails");
  if (!(inv(idx.p) <= inv(idx.p1) + inv(idx.p2) + 1e-15))
    throw HypothesisViolation("1/p <= 1/p1 + 1/p2", "product estimate: requires 1/p <= 1/p1 + 1/p2");
}

double product_ratio(const ScalarField& f, const ScalarField& g, const ProductIndices& idx,
                     const DyadicPartition& part) {
  const int n = part.grid().dim();
  const double nf = besov_norm(f, BesovIndex{idx.s1, idx.p1, idx.q}, part);
  const double ng = besov_norm(g, BesovIndex{idx.s2, idx.p2, idx.q}, part);
  if (nf == 0.0 || ng == 0.0) return 0.0;
  const double s = product_regularity(idx, n);
  const double nfg = besov_norm(multiply(f, g), BesovIndex{s, idx.p, idx.q}, part);
  return nfg / (nf * ng);
}

ExponentFit verify_product_estimate(const ProductIndices& idx, const EnsembleOptions& opt) {
  check_product_hypotheses(idx, opt.dim);
  ExponentFit fit;
  fit.check = "product_estimate";
  fit.params = {{"s1", idx.s1}, {"p1", number(idx.p1)}, {"s2", idx.s2},      {"p2", number(idx.p2)},
                {"p", number(idx.p)}, {"q", number(idx.q)}, {"s", product_regularity(idx, opt.dim)},
                {"dim", opt.dim}};
  const double gf = idx.s1 + opt.dim * (1.0 - inv(idx.p1));
  const double gg = idx.s2 + opt.dim * (1.0 - inv(idx.p2));
  run_refinement(fit, opt, [&](const DyadicPartition& part, int m) {
    const TorusGrid& grid = part.grid();
    const int band = grid.dealias_cutoff() / 2;
    const int jtop = std::max(1, std::min(part.top_level(), largest_full_level(grid.wavenumber_unit() * band)));
    std::mt19937_64 rng(member_seed(opt.seed, static_cast<std::uint64_t>(m), 11));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ScalarField f(grid), g(grid);
    switch (m % 4) {
      case 0: {
        RandomFieldOptions ro;
        ro.k_max = band;
        ro.spectral_slope = 0.5 + 2.5 * uni(rng);
        f = random_scalar(grid, rng(), ro);
        ro.spectral_slope = 0.5 + 2.5 * uni(rng);
        g = random_scalar(grid, rng(), ro);
        break;
      }
      case 1: {
        // Same seed puts both shells' phases at the same point.
        const std::uint64_t s = rng();
        const int jf = std::max(1, jtop - static_cast<int>(uni(rng) * 3.0));
        const int jg = std::max(1, jtop - static_cast<int>(uni(rng) * 3.0));
        f = coherent_shell(part, jf, s, band);
        g = coherent_shell(part, jg, s, band);
        break;
      }
      case 2: {
        const std::uint64_t s = rng();
        f = coherent_power_law(grid, gf, s, band);
        g = coherent_power_law(grid, gg, s, band);
        break;
      }
      default: {
        const std::uint64_t s = rng();
        if (uni(rng) < 0.5) {
          f = coherent_shell(part, 1, s, band);
          g = coherent_shell(part, jtop, s, band);
        } else {
          f = coherent_shell(part, jtop, s, band);
          g = coherent_shell(part, 1, s, band);
        }
        break;
      }
    }
    return product_ratio(f, g, idx, part);
  });
  return fit;
}

// ---------------------------------------------------------------- embeddings

const char* to_string(EmbeddingCase c) {
  switch (c) {
    case EmbeddingCase::q_monotone:
      return "q_monotone";
    case EmbeddingCase::p_embedding:
      return "p_embedding";
    case EmbeddingCase::sobolev_besov:
      return "sobolev_besov";
    case EmbeddingCase::sobolev_equals:
      return "sobolev_equals";
  }
  return "unknown";
}

EmbeddingCase embedding_case_from_string(const std::string& name) {
  for (auto c : {EmbeddingCase::q_monotone, EmbeddingCase::p_embedding, EmbeddingCase::sobolev_besov,
                 EmbeddingCase::sobolev_equals})
    if (name == to_string(c)) return c;
  throw std::invalid_argument("unknown embedding case: " + name);
}

void check_embedding_params(EmbeddingCase c, const EmbeddingParams& prm) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("embedding: requires ") + what);
  };
  switch (c) {
    case EmbeddingCase::q_monotone:
      need(prm.p >= 1.0, "p >= 1");
      need(prm.q1 >= 1.0 && prm.q1 <= prm.q2, "1 <= q1 <= q2");
      need(prm.beta1 <= prm.beta2, "beta1 <= beta2");
      break;
    case EmbeddingCase::p_embedding:
      need(prm.p1 >= 1.0 && prm.p1 <= prm.p2, "1 <= p1 <= p2");
      need(prm.q >= 1.0, "q >= 1");
      break;
    case EmbeddingCase::sobolev_besov:
      need(prm.r > prm.s && prm.s > 0.0, "r > s > 0");
      need(prm.p >= 1.0 && prm.q >= 1.0, "p, q >= 1");
      break;
    case EmbeddingCase::sobolev_equals:
      need(std::isfinite(prm.s), "finite s");
      break;
  }
}

ExponentFit verify_embedding(EmbeddingCase c, const EmbeddingParams& prm, const EnsembleOptions& opt,
                             double comparability) {
  check_embedding_params(c, prm);
  const int n = opt.dim;
  ExponentFit fit;
  fit.check = std::string("embedding_") + to_string(c);
  double gamma = 0.0;  // saturating power law for the right-hand norm
  std::function<double(const ScalarField&, const DyadicPartition&)> lhs, rhs;
  switch (c) {
    case EmbeddingCase::q_monotone:
      fit.params = {{"beta1", prm.beta1}, {"beta2", prm.beta2}, {"p", number(prm.p)},
                    {"q1", number(prm.q1)}, {"q2", number(prm.q2)}};
      gamma = prm.beta2 + n * (1.0 - inv(prm.p));
      lhs = [&](const ScalarField& f, const DyadicPartition& part) {
        return besov_norm(f, BesovIndex{prm.beta1, prm.p, prm.q2}, part);
      };
      rhs = [&](const ScalarField& f, const DyadicPartition& part) {
        return besov_norm(f, BesovIndex{prm.beta2, prm.p, prm.q1}, part);
      };
      break;
    case EmbeddingCase::p_embedding: {
      const double g1 = prm.beta2 + n * (inv(prm.p1) - inv(prm.p2));
      fit.params = {{"gamma2", prm.beta2}, {"gamma1", g1}, {"p1", number(prm.p1)}, {"p2", number(prm.p2)},
                    {"q", number(prm.q)}};
      gamma = g1 + n * (1.0 - inv(prm.p1));
      lhs = [&](const ScalarField& f, const DyadicPartition& part) {
        return besov_norm(f, BesovIndex{prm.beta2, prm.p2, prm.q}, part);
      };
      rhs = [&, g1](const ScalarField& f, const DyadicPartition& part) {
        return besov_norm(f, BesovIndex{g1, prm.p1, prm.q}, part);
      };
      break;
    }
    case EmbeddingCase::sobolev_besov:
      fit.params = {{"s", prm.s}, {"r", prm.r}, {"p", number(prm.p)}, {"q", number(prm.q)}};
      gamma = prm.r + n * (1.0 - inv(prm.p));
      lhs = [&](const ScalarField& f, const DyadicPartition&) { return lp_norm(bessel_potential(f, prm.s), prm.p); };
      rhs = [&](const ScalarField& f, const DyadicPartition& part) {
        return besov_norm(f, BesovIndex{prm.r, prm.p, prm.q}, part);
      };
      break;
    case EmbeddingCase::sobolev_equals:
      fit.params = {{"s", prm.s}, {"comparability", comparability}};
      gamma = prm.s + n / 2.0;
      lhs = [&](const ScalarField& f, const DyadicPartition&) { return l2_norm(bessel_potential(f, prm.s)); };
      rhs = [&](const ScalarField& f, const DyadicPartition& part) {
        return besov_norm(f, BesovIndex{prm.s, 2.0, 2.0}, part);
      };
      break;
  }
  fit.params["dim"] = n;
  run_refinement(fit, opt, [&](const DyadicPartition& part, int m) {
    const ScalarField f = ensemble_member(part, opt.seed, m, gamma);
    return ratio_or_zero(lhs(f, part), rhs(f, part));
  });
  if (c == EmbeddingCase::sobolev_equals && fit.verdict == Verdict::pass) {
    if (fit.max_constant > comparability || fit.min_constant < 1.0 / comparability) {
      fit.verdict = Verdict::fail;
      fit.diagnostic = "ratio outside the comparability band";
    }
  }
  return fit;
}

// ------------------------------------------------------------- Ladyzhenskaya

double ladyzhenskaya_ratio(const ScalarField& f, double r1, double r2) {
  if (!(r1 > 0.0) || !(r1 < r2)) throw std::invalid_argument("ladyzhenskaya: requires 0 < r1 < r2");
  if (std::abs(f[0][0]) > 1e-12 * l2_norm(f))
    throw std::invalid_argument("ladyzhenskaya: field must have zero mean");
  const double theta = r1 / r2;
  const double lhs = sobolev_seminorm(f, r1);
  const double rhs = std::pow(l2_norm(f), 1.0 - theta) * std::pow(sobolev_seminorm(f, r2), theta);
  return ratio_or_zero(lhs, rhs);
}

ExponentFit verify_ladyzhenskaya(double r1, double r2, const EnsembleOptions& opt) {
  if (!(r1 > 0.0) || !(r1 < r2)) throw std::invalid_argument("ladyzhenskaya: requires 0 < r1 < r2");
  ExponentFit fit;
  fit.check = "ladyzhenskaya";
  fit.params = {{"r1", r1}, {"r2", r2}, {"dim", opt.dim}};
  run_refinement(fit, opt, [&](const DyadicPartition& part, int m) {
    const ScalarField f = ensemble_member(part, opt.seed, m, r2 + opt.dim / 2.0);
    return ladyzhenskaya_ratio(f, r1, r2);
  });
  return fit;
}

}  // namespace lanslab
