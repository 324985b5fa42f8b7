#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "lanslab/field.hpp"
#include "lanslab/littlewood_paley.hpp"

namespace lanslab {

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

// Fits below this r^2 are reported as inconclusive.
inline constexpr double kMinRSquared = 0.98;

struct FitSample {
  double x;  // level j, log t or log2 N depending on the check
  double y;  // log of the measured norm or ratio
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;  // 1 when the data has no spread to explain
};
LineFit least_squares(const std::vector<FitSample>& samples);

struct ExponentFit {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  double measured_slope = std::numeric_limits<double>::quiet_NaN();
  double predicted_slope = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  double max_constant = std::numeric_limits<double>::quiet_NaN();
  double min_constant = std::numeric_limits<double>::quiet_NaN();
  // Ensemble max per refinement level, same order as grid_sizes.
  std::vector<int> grid_sizes;
  std::vector<double> constants_by_grid;
  double refinement_growth = std::numeric_limits<double>::quiet_NaN();
  std::size_t ensemble_size = 0;
  Verdict verdict = Verdict::inconclusive;
  std::string diagnostic;
  std::string x_label = "x";
  std::string y_label = "y";
  std::vector<FitSample> samples;

  bool passed() const noexcept { return verdict == Verdict::pass; }
};

nlohmann::json to_json(const ExponentFit& fit);
void write_samples_csv(std::ostream& os, const ExponentFit& fit);

// Bernstein: ||A^{beta/2} g||_q against ||g||_p for g supported in block j.
// Members are coherent single-shell fields (random real amplitudes, all phases
// aligned at a random grid point), which saturate the p -> q gain. Levels run
// from level_min to the largest block whose annulus fits inside the retained
// cube; use a grid with dealias fraction 1 to reach higher levels.
struct BernsteinOptions {
  std::uint64_t seed = 1;
  int members = 4;
  int level_min = 1;
  int level_max = -1;  // < 0 picks the largest fully resolved block
  double tolerance = 0.05;
};
ExponentFit verify_bernstein(double p, double q, double beta, const TorusGrid& grid,
                             const BernsteinOptions& opt = {});

struct HeatSmoothingIndices {
  double s1 = 0.0;
  double p1 = 2.0;
  double s2 = 0.0;
  double p2 = 2.0;
  double q = 2.0;
};
double heat_smoothing_exponent(const HeatSmoothingIndices& idx, int dim);

// Coefficients with modulus ~ |k|^{-(s1 + n(1 - 1/p1))} and phases aligned at a
// random point. Every block then has the same B^{s1}_{p1,.} weight, which
// saturates the heat-smoothing bound.
ScalarField saturating_heat_data(const TorusGrid& grid, const HeatSmoothingIndices& idx, std::uint64_t seed);

struct HeatSmoothingOptions {
  std::uint64_t seed = 1;
  double t_min = 2.5e-3;
  double t_max = 0.1;
  int t_samples = 9;
  double tolerance = 0.10;
  double nu = 1.0;
};
// Fits log ||e^{t Lap} f||_{B^{s2}_{p2,q}} against log t. A zero predicted
// exponent is checked as monotone decay instead of a fit.
ExponentFit verify_heat_smoothing(const HeatSmoothingIndices& idx, const ScalarField& f, const DyadicPartition& part,
                                  const HeatSmoothingOptions& opt = {});
// sup over sampled t in (0, T] of t^sigma ||e^{t Lap} f||_{B^{s}_{p,q}}.
double heat_weighted_sup(const ScalarField& f, const BesovIndex& idx, double sigma, double T,
                         const DyadicPartition& part, int t_samples = 12, double nu = 1.0);

struct ProductIndices {
  double s1 = 1.0;
  double p1 = 2.0;
  double s2 = 1.0;
  double p2 = 2.0;
  double p = 2.0;
  double q = 2.0;
};
// s = s1 + s2 - n (1/p1 + 1/p2 - 1/p)
double product_regularity(const ProductIndices& idx, int dim);
// Throws HypothesisViolation naming the first failed condition.
void check_product_hypotheses(const ProductIndices& idx, int dim);
// ||fg||_{B^s_{p,q}} / (||f||_{B^{s1}_{p1,q}} ||g||_{B^{s2}_{p2,q}}), 0 when a factor vanishes.
double product_ratio(const ScalarField& f, const ScalarField& g, const ProductIndices& idx,
                     const DyadicPartition& part);

// Ensemble drawn independently on every grid in grid_sizes. Members cycle
// through power-law fields, coherent shell pairs at the finest resolved levels,
// coherent power laws and low-high pairs. Fields are band-limited to half the
// dealias cutoff so products are resolved exactly.
struct EnsembleOptions {
  std::uint64_t seed = 1;
  int members = 100;
  std::vector<int> grid_sizes = {32, 64};
  int dim = 3;
  double max_growth = 2.0;
};

ExponentFit verify_product_estimate(const ProductIndices& idx, const EnsembleOptions& opt = {});

enum class EmbeddingCase {
  q_monotone,      // ||f||_{B^{b1}_{p,q2}} <= C ||f||_{B^{b2}_{p,q1}}, b1 <= b2, q1 <= q2
  p_embedding,     // ||f||_{B^{g2}_{p2,q}} <= C ||f||_{B^{g1}_{p1,q}}, g1 = g2 + n(1/p1 - 1/p2)
  sobolev_besov,   // ||f||_{H^{s,p}} <= C ||f||_{B^r_{p,q}}, r > s > 0
  sobolev_equals,  // ||f||_{H^{s,2}} comparable to ||f||_{B^s_{2,2}}
};
const char* to_string(EmbeddingCase c);
EmbeddingCase embedding_case_from_string(const std::string& name);

// Fields used per case: q_monotone (beta1, beta2, p, q1, q2); p_embedding
// (beta2 = g2, p1, p2, q); sobolev_besov (s, r, p, q); sobolev_equals (s).
struct EmbeddingParams {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double s = 1.0;
  double r = 1.5;
  double p = 2.0;
  double p1 = 2.0;
  double p2 = 4.0;
  double q = 2.0;
  double q1 = 1.0;
  double q2 = 2.0;
};
// Throws std::invalid_argument when the orderings for the case do not hold.
void check_embedding_params(EmbeddingCase c, const EmbeddingParams& prm);
// For sobolev_equals the bound band is [1/comparability, comparability].
ExponentFit verify_embedding(EmbeddingCase c, const EmbeddingParams& prm, const EnsembleOptions& opt = {},
                             double comparability = 4.0);

// ||f||_{H^{r1}} <= C ||f||_{L^2}^{1 - r1/r2} ||f||_{H^{r2}}^{r1/r2}, homogeneous norms.
double ladyzhenskaya_ratio(const ScalarField& f, double r1, double r2);
ExponentFit verify_ladyzhenskaya(double r1, double r2, const EnsembleOptions& opt = {});

}  // namespace lanslab
