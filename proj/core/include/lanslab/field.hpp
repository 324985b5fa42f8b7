#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lanslab/errors.hpp"
#include "lanslab/fft.hpp"
#include "lanslab/grid.hpp"

namespace lanslab {

enum class Rank { scalar, vector, tensor };
enum class Space { spectral, physical };

constexpr std::size_t component_count(Rank r, int dim) noexcept {
  switch (r) {
    case Rank::scalar: return 1;
    case Rank::vector: return static_cast<std::size_t>(dim);
    case Rank::tensor: return static_cast<std::size_t>(dim * dim);
  }
  return 0;
}

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
  if (!(a == b)) throw ShapeMismatch(std::string(where) + ": grid mismatch");
}

// A scalar, vector or n x n tensor field on a torus grid. In spectral space the
// arrays hold Fourier coefficients in FFT order; in physical space they hold
// grid samples. Tensor entry (i, j) lives at component i * dim + j.
template <Rank R, Space S>
class FieldData {
 public:
  static constexpr Rank rank = R;
  static constexpr Space space = S;

  explicit FieldData(const TorusGrid& grid, bool real_valued = true)
      : grid_(grid),
        comps_(component_count(R, grid.dim()), ComplexArray(grid.num_points())),
        real_(real_valued) {}

  const TorusGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  std::size_t components() const noexcept { return comps_.size(); }

  ComplexArray& operator[](std::size_t c) { return comps_[c]; }
  const ComplexArray& operator[](std::size_t c) const { return comps_[c]; }

  ComplexArray& operator()(int i, int j)
    requires(R == Rank::tensor)
  {
    return comps_[static_cast<std::size_t>(i * grid_.dim() + j)];
  }
  const ComplexArray& operator()(int i, int j) const
    requires(R == Rank::tensor)
  {
    return comps_[static_cast<std::size_t>(i * grid_.dim() + j)];
  }

  // True when the field is real-valued in physical space.
  bool real_valued() const noexcept { return real_; }
  void set_real_valued(bool v) noexcept { real_ = v; }

  void set_zero() {
    for (auto& c : comps_) std::fill(c.begin(), c.end(), Complex{});
  }

  FieldData& operator+=(const FieldData& o) {
    require_same_grid(grid_, o.grid_, "field +=");
    for (std::size_t c = 0; c < comps_.size(); ++c) {
      auto* a = comps_[c].data();
      const auto* b = o.comps_[c].data();
      for (std::size_t i = 0, n = comps_[c].size(); i < n; ++i) a[i] += b[i];
    }
    real_ = real_ && o.real_;
    return *this;
  }
  FieldData& operator-=(const FieldData& o) {
    require_same_grid(grid_, o.grid_, "field -=");
    for (std::size_t c = 0; c < comps_.size(); ++c) {
      auto* a = comps_[c].data();
      const auto* b = o.comps_[c].data();
      for (std::size_t i = 0, n = comps_[c].size(); i < n; ++i) a[i] -= b[i];
    }
    real_ = real_ && o.real_;
    return *this;
  }
  FieldData& operator*=(double s) {
    for (auto& c : comps_)
      for (auto& z : c) z *= s;
    return *this;
  }
  FieldData& operator*=(Complex s) {
    for (auto& c : comps_)
      for (auto& z : c) z *= s;
    real_ = real_ && s.imag() == 0.0;
    return *this;
  }
  // this += s * o
  FieldData& axpy(double s, const FieldData& o) {
    require_same_grid(grid_, o.grid_, "field axpy");
    for (std::size_t c = 0; c < comps_.size(); ++c) {
      auto* a = comps_[c].data();
      const auto* b = o.comps_[c].data();
      for (std::size_t i = 0, n = comps_[c].size(); i < n; ++i) a[i] += s * b[i];
    }
    real_ = real_ && o.real_;
    return *this;
  }

  friend FieldData operator+(FieldData a, const FieldData& b) { return a += b; }
  friend FieldData operator-(FieldData a, const FieldData& b) { return a -= b; }
  friend FieldData operator*(double s, FieldData a) { return a *= s; }
  friend FieldData operator*(FieldData a, double s) { return a *= s; }

  auto begin() noexcept { return comps_.begin(); }
  auto end() noexcept { return comps_.end(); }
  auto begin() const noexcept { return comps_.begin(); }
  auto end() const noexcept { return comps_.end(); }

 private:
  TorusGrid grid_;
  std::vector<ComplexArray> comps_;
  bool real_;
};

template <Rank R>
using SpectralField = FieldData<R, Space::spectral>;
template <Rank R>
using Samples = FieldData<R, Space::physical>;

using ScalarField = SpectralField<Rank::scalar>;
using VectorField = SpectralField<Rank::vector>;
using TensorField = SpectralField<Rank::tensor>;
using ScalarSamples = Samples<Rank::scalar>;
using VectorSamples = Samples<Rank::vector>;
using TensorSamples = Samples<Rank::tensor>;

}  // namespace lanslab
