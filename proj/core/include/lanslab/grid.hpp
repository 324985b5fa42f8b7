#pragma once

#include <array>
#include <cstddef>
#include <numbers>

namespace lanslab {

// Periodic box [0, L)^n sampled with N points per axis.
class TorusGrid {
 public:
  TorusGrid(int dim, int points_per_axis, double box_length = 2.0 * std::numbers::pi,
            double dealias_fraction = 2.0 / 3.0);

  int dim() const noexcept { return dim_; }
  int points_per_axis() const noexcept { return n_; }
  double box_length() const noexcept { return length_; }
  double dealias_fraction() const noexcept { return fraction_; }

  std::size_t num_points() const noexcept { return total_; }
  double wavenumber_unit() const noexcept { return 2.0 * std::numbers::pi / length_; }
  double cell_volume() const noexcept;
  double volume() const noexcept;

  // Largest lattice index kept by the dealiasing rule, floor(fraction * N / 2).
  int dealias_cutoff() const noexcept { return cutoff_; }
  // Largest physical wavenumber modulus among modes that survive dealiasing.
  double max_resolved_radius() const noexcept;

  // Lattice frequency of FFT index i along one axis, in {-N/2+1, ..., N/2}.
  int lattice_index(int i) const noexcept { return i <= n_ / 2 ? i : i - n_; }
  // Linear FFT position of lattice frequency k (row-major, axis 0 slowest).
  std::size_t linear_index(const std::array<int, 3>& k) const noexcept;

  bool operator==(const TorusGrid&) const = default;

 private:
  int dim_;
  int n_;
  double length_;
  double fraction_;
  int cutoff_;
  std::size_t total_;
};

// Calls fn(linear_index, k) for every lattice mode; k is in lattice units and
// k[2] = 0 in two dimensions.
template <class Fn>
void for_each_mode(const TorusGrid& g, Fn&& fn) {
  const int n = g.points_per_axis();
  const int nz = g.dim() == 3 ? n : 1;
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a) {
    const int ka = g.lattice_index(a);
    for (int b = 0; b < n; ++b) {
      const int kb = g.lattice_index(b);
      for (int c = 0; c < nz; ++c, ++idx) {
        const int kc = g.dim() == 3 ? g.lattice_index(c) : 0;
        fn(idx, std::array<int, 3>{ka, kb, kc});
      }
    }
  }
}

// Calls fn(linear_index, x) for every grid point x (physical coordinates).
template <class Fn>
void for_each_point(const TorusGrid& g, Fn&& fn) {
  const int n = g.points_per_axis();
  const int nz = g.dim() == 3 ? n : 1;
  const double h = g.box_length() / n;
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < nz; ++c, ++idx)
        fn(idx, std::array<double, 3>{a * h, b * h, g.dim() == 3 ? c * h : 0.0});
}

}  // namespace lanslab
