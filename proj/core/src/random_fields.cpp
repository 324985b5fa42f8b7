#include "lanslab/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lanslab/spectral.hpp"

namespace lanslab {
namespace {

template <Rank R>
SpectralField<R> shaped_noise(const TorusGrid& grid, std::uint64_t seed, const RandomFieldOptions& opt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Samples<R> noise(grid);
  for (auto& comp : noise)
    for (auto& z : comp) z = Complex(normal(rng), 0.0);
  auto f = forward_transform(noise);
  const double kmax = std::min(opt.k_max, static_cast<double>(grid.dealias_cutoff()));
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& k) {
    const double r = std::sqrt(double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
    const double m = (r >= opt.k_min && r <= kmax && r > 0.0) ? std::pow(r, -opt.spectral_slope) : 0.0;
    for (auto& comp : f) comp[idx] *= m;
  });
  dealias_in_place(f);
  return f;
}

template <Rank R>
void normalize(SpectralField<R>& f, double target) {
  if (target <= 0.0) return;
  const double n = l2_norm(f);
  if (n > 0.0) f *= target / n;
}

}  // namespace

ScalarField random_scalar(const TorusGrid& grid, std::uint64_t seed, const RandomFieldOptions& opt) {
  auto f = shaped_noise<Rank::scalar>(grid, seed, opt);
  normalize(f, opt.l2_norm);
  return f;
}

VectorField random_solenoidal(const TorusGrid& grid, std::uint64_t seed, const RandomFieldOptions& opt) {
  auto f = leray_project(shaped_noise<Rank::vector>(grid, seed, opt));
  normalize(f, opt.l2_norm);
  return f;
}

std::vector<double> symmetric_uniform_weights(const TorusGrid& grid, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(lo, hi);
  std::vector<double> raw(grid.num_points());
  for (auto& v : raw) v = uni(rng);
  std::vector<double> out(raw.size());
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& k) {
    const std::size_t mirror = grid.linear_index({-k[0], -k[1], -k[2]});
    out[idx] = 0.5 * (raw[idx] + raw[mirror]);
  });
  return out;
}

}  // namespace lanslab
