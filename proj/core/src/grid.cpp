#include "lanslab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lanslab {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

TorusGrid::TorusGrid(int dim, int points_per_axis, double box_length, double dealias_fraction)
    : dim_(dim), n_(points_per_axis), length_(box_length), fraction_(dealias_fraction) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("TorusGrid: dim must be 2 or 3, got " + std::to_string(dim));
  if (points_per_axis < 8 || !is_power_of_two(points_per_axis))
    throw std::invalid_argument("TorusGrid: points_per_axis must be a power of two >= 8, got " +
                                std::to_string(points_per_axis));
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw std::invalid_argument("TorusGrid: box_length must be positive");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw std::invalid_argument("TorusGrid: dealias_fraction must lie in (0, 1]");
  cutoff_ = static_cast<int>(std::floor(fraction_ * n_ / 2.0 + 1e-9));
  total_ = 1;
  for (int d = 0; d < dim_; ++d) total_ *= static_cast<std::size_t>(n_);
}

double TorusGrid::cell_volume() const noexcept { return std::pow(length_ / n_, dim_); }

double TorusGrid::volume() const noexcept { return std::pow(length_, dim_); }

double TorusGrid::max_resolved_radius() const noexcept {
  return wavenumber_unit() * cutoff_ * std::sqrt(static_cast<double>(dim_));
}

std::size_t TorusGrid::linear_index(const std::array<int, 3>& k) const noexcept {
  auto wrap = [this](int v) { return static_cast<std::size_t>(((v % n_) + n_) % n_); };
  const std::size_t n = static_cast<std::size_t>(n_);
  if (dim_ == 2) return wrap(k[0]) * n + wrap(k[1]);
  return (wrap(k[0]) * n + wrap(k[1])) * n + wrap(k[2]);
}

}  // namespace lanslab
