#include "lanslab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lanslab {

ModeWavenumbers mode_wavenumbers(const TorusGrid& grid, const std::array<int, 3>& lattice) {
  ModeWavenumbers w{};
  const double unit = grid.wavenumber_unit();
  const int nyq = grid.points_per_axis() / 2;
  w.k2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    w.k[d] = unit * lattice[d];
    w.k_diff[d] = lattice[d] == nyq ? 0.0 : w.k[d];
    w.k2 += w.k[d] * w.k[d];
  }
  return w;
}

namespace {

template <Rank R, class Fn>
SpectralField<R> scaled_by(const SpectralField<R>& f, Fn&& multiplier) {
  SpectralField<R> out(f.grid(), f.real_valued());
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const double m = multiplier(mode_wavenumbers(f.grid(), k));
    for (std::size_t c = 0; c < f.components(); ++c) out[c][idx] = m * f[c][idx];
  });
  return out;
}

constexpr Complex kI{0.0, 1.0};

}  // namespace

template <Rank R>
SpectralField<R> forward_transform(const Samples<R>& f) {
  SpectralField<R> out(f.grid());
  bool real = true;
  for (std::size_t c = 0; c < f.components(); ++c) {
    out[c] = f[c];
    for (const auto& z : f[c])
      if (z.imag() != 0.0) {
        real = false;
        break;
      }
    fft::forward(f.grid(), out[c]);
  }
  out.set_real_valued(real);
  return out;
}

template <Rank R>
Samples<R> inverse_transform(const SpectralField<R>& f) {
  Samples<R> out(f.grid(), f.real_valued());
  for (std::size_t c = 0; c < f.components(); ++c) {
    out[c] = f[c];
    fft::inverse(f.grid(), out[c]);
    if (f.real_valued())
      for (auto& z : out[c]) z.imag(0.0);
  }
  return out;
}

VectorField gradient(const ScalarField& f) {
  VectorField out(f.grid(), f.real_valued());
  const int n = f.dim();
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const auto w = mode_wavenumbers(f.grid(), k);
    for (int j = 0; j < n; ++j) out[j][idx] = kI * w.k_diff[j] * f[0][idx];
  });
  return out;
}

TensorField gradient(const VectorField& f) {
  TensorField out(f.grid(), f.real_valued());
  const int n = f.dim();
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const auto w = mode_wavenumbers(f.grid(), k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j)[idx] = kI * w.k_diff[j] * f[i][idx];
  });
  return out;
}

ScalarField divergence(const VectorField& f) {
  ScalarField out(f.grid(), f.real_valued());
  const int n = f.dim();
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const auto w = mode_wavenumbers(f.grid(), k);
    Complex acc{};
    for (int j = 0; j < n; ++j) acc += kI * w.k_diff[j] * f[j][idx];
    out[0][idx] = acc;
  });
  return out;
}

VectorField divergence(const TensorField& t) {
  VectorField out(t.grid(), t.real_valued());
  const int n = t.dim();
  for_each_mode(t.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const auto w = mode_wavenumbers(t.grid(), k);
    for (int i = 0; i < n; ++i) {
      Complex acc{};
      for (int j = 0; j < n; ++j) acc += kI * w.k_diff[j] * t(i, j)[idx];
      out[i][idx] = acc;
    }
  });
  return out;
}

TensorField transpose(const TensorField& t) {
  TensorField out(t.grid(), t.real_valued());
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) out(i, j) = t(j, i);
  return out;
}

template <Rank R>
SpectralField<R> laplacian_power(const SpectralField<R>& f, double beta) {
  if (beta < 0.0) {
    double peak = 0.0, mean = 0.0;
    for (std::size_t c = 0; c < f.components(); ++c) {
      for (const auto& z : f[c]) peak = std::max(peak, std::abs(z));
      mean = std::max(mean, std::abs(f[c][0]));
    }
    if (mean > 1e-12 * peak)
      throw SingularModeError("laplacian_power: negative power applied to a field with nonzero mean");
  }
  return scaled_by(f, [beta](const ModeWavenumbers& w) {
    if (w.k2 == 0.0) return beta == 0.0 ? 1.0 : 0.0;
    return std::pow(w.k2, 0.5 * beta);
  });
}

template <Rank R>
SpectralField<R> laplacian(const SpectralField<R>& f) {
  return scaled_by(f, [](const ModeWavenumbers& w) { return -w.k2; });
}

template <Rank R>
SpectralField<R> helmholtz_inverse(const SpectralField<R>& f, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("helmholtz_inverse: alpha must be >= 0");
  const double a2 = alpha * alpha;
  return scaled_by(f, [a2](const ModeWavenumbers& w) { return 1.0 / (1.0 + a2 * w.k2); });
}

template <Rank R>
SpectralField<R> helmholtz_apply(const SpectralField<R>& f, double alpha) {
  const double a2 = alpha * alpha;
  return scaled_by(f, [a2](const ModeWavenumbers& w) { return 1.0 + a2 * w.k2; });
}

template <Rank R>
SpectralField<R> bessel_potential(const SpectralField<R>& f, double s) {
  return scaled_by(f, [s](const ModeWavenumbers& w) { return std::pow(1.0 + w.k2, 0.5 * s); });
}

VectorField leray_project(const VectorField& u) {
  VectorField out(u.grid(), u.real_valued());
  const int n = u.dim();
  for_each_mode(u.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const auto w = mode_wavenumbers(u.grid(), k);
    double kd2 = 0.0;
    Complex dot{};
    for (int j = 0; j < n; ++j) {
      kd2 += w.k_diff[j] * w.k_diff[j];
      dot += w.k_diff[j] * u[j][idx];
    }
    if (kd2 == 0.0) {
      for (int j = 0; j < n; ++j) out[j][idx] = u[j][idx];
      return;
    }
    const Complex s = dot / kd2;
    for (int j = 0; j < n; ++j) out[j][idx] = u[j][idx] - w.k_diff[j] * s;
  });
  return out;
}

DefRot def_rot(const VectorField& f) {
  const TensorField g = gradient(f);
  DefRot out{TensorField(f.grid(), f.real_valued()), TensorField(f.grid(), f.real_valued())};
  const int n = f.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& a = g(i, j);
      const auto& b = g(j, i);
      auto& d = out.def(i, j);
      auto& r = out.rot(i, j);
      for (std::size_t m = 0; m < a.size(); ++m) {
        d[m] = 0.5 * (a[m] + b[m]);
        r[m] = 0.5 * (a[m] - b[m]);
      }
    }
  return out;
}

template <Rank R>
void dealias_in_place(SpectralField<R>& f) {
  const int cut = f.grid().dealias_cutoff();
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    if (std::abs(k[0]) > cut || std::abs(k[1]) > cut || std::abs(k[2]) > cut)
      for (std::size_t c = 0; c < f.components(); ++c) f[c][idx] = Complex{};
  });
}

template <Rank R>
bool is_dealiased(const SpectralField<R>& f) {
  const int cut = f.grid().dealias_cutoff();
  bool ok = true;
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    if (std::abs(k[0]) > cut || std::abs(k[1]) > cut || std::abs(k[2]) > cut)
      for (std::size_t c = 0; c < f.components(); ++c)
        if (f[c][idx] != Complex{}) ok = false;
  });
  return ok;
}

template <Rank R>
double lp_norm(const Samples<R>& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const std::size_t np = f.grid().num_points();
  const std::size_t nc = f.components();
  auto modulus2 = [&](std::size_t i) {
    double m = 0.0;
    for (std::size_t c = 0; c < nc; ++c) m += std::norm(f[c][i]);
    return m;
  };
  if (std::isinf(p)) {
    double mx = 0.0;
    for (std::size_t i = 0; i < np; ++i) mx = std::max(mx, modulus2(i));
    return std::sqrt(mx);
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < np; ++i) acc += modulus2(i);
    return std::sqrt(acc * f.grid().cell_volume());
  }
  const double half_p = 0.5 * p;
  for (std::size_t i = 0; i < np; ++i) acc += std::pow(modulus2(i), half_p);
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

template <Rank R>
double lp_norm(const SpectralField<R>& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  return lp_norm(inverse_transform(f), p);
}

template <Rank R>
double l2_norm(const SpectralField<R>& f) {
  double acc = 0.0;
  for (const auto& comp : f)
    for (const auto& z : comp) acc += std::norm(z);
  return std::sqrt(acc * f.grid().volume());
}

template <Rank R>
double sobolev_seminorm(const SpectralField<R>& f, double s) {
  double acc = 0.0;
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const auto w = mode_wavenumbers(f.grid(), k);
    if (w.k2 == 0.0 && s != 0.0) return;
    const double weight = s == 0.0 ? 1.0 : std::pow(w.k2, s);
    for (std::size_t c = 0; c < f.components(); ++c) acc += weight * std::norm(f[c][idx]);
  });
  return std::sqrt(acc * f.grid().volume());
}

template <Rank R>
double inner_product(const SpectralField<R>& f, const SpectralField<R>& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  double acc = 0.0;
  for (std::size_t c = 0; c < f.components(); ++c)
    for (std::size_t i = 0; i < f[c].size(); ++i)
      acc += f[c][i].real() * g[c][i].real() + f[c][i].imag() * g[c][i].imag();
  return acc * f.grid().volume();
}

template <Rank R>
double conjugate_asymmetry(const SpectralField<R>& f) {
  double peak = 0.0, worst = 0.0;
  for_each_mode(f.grid(), [&](std::size_t idx, const std::array<int, 3>& k) {
    const std::size_t mirror = f.grid().linear_index({-k[0], -k[1], -k[2]});
    for (std::size_t c = 0; c < f.components(); ++c) {
      peak = std::max(peak, std::abs(f[c][idx]));
      worst = std::max(worst, std::abs(f[c][mirror] - std::conj(f[c][idx])));
    }
  });
  return peak == 0.0 ? 0.0 : worst / peak;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  auto pa = inverse_transform(a);
  const auto pb = inverse_transform(b);
  for (std::size_t i = 0; i < pa[0].size(); ++i) pa[0][i] *= pb[0][i];
  pa.set_real_valued(a.real_valued() && b.real_valued());
  auto out = forward_transform(pa);
  out.set_real_valued(pa.real_valued());
  dealias_in_place(out);
  return out;
}

#define LANSLAB_INSTANTIATE(R)                                                          \
  template SpectralField<R> forward_transform<R>(const Samples<R>&);                    \
  template Samples<R> inverse_transform<R>(const SpectralField<R>&);                    \
  template SpectralField<R> laplacian_power<R>(const SpectralField<R>&, double);        \
  template SpectralField<R> laplacian<R>(const SpectralField<R>&);                      \
  template SpectralField<R> helmholtz_inverse<R>(const SpectralField<R>&, double);      \
  template SpectralField<R> helmholtz_apply<R>(const SpectralField<R>&, double);        \
  template SpectralField<R> bessel_potential<R>(const SpectralField<R>&, double);       \
  template void dealias_in_place<R>(SpectralField<R>&);                                 \
  template bool is_dealiased<R>(const SpectralField<R>&);                               \
  template double lp_norm<R>(const Samples<R>&, double);                                \
  template double lp_norm<R>(const SpectralField<R>&, double);                          \
  template double l2_norm<R>(const SpectralField<R>&);                                  \
  template double sobolev_seminorm<R>(const SpectralField<R>&, double);                 \
  template double inner_product<R>(const SpectralField<R>&, const SpectralField<R>&);   \
  template double conjugate_asymmetry<R>(const SpectralField<R>&);

LANSLAB_INSTANTIATE(Rank::scalar)
LANSLAB_INSTANTIATE(Rank::vector)
LANSLAB_INSTANTIATE(Rank::tensor)

#undef LANSLAB_INSTANTIATE

}  // namespace lanslab
