#pragma once

#include <array>

#include "lanslab/field.hpp"

namespace lanslab {

// Physical wavenumbers of a lattice mode. The derivative wavenumber drops the
// unpaired Nyquist frequency so that derivatives of real fields stay real.
struct ModeWavenumbers {
  std::array<double, 3> k;       // (2 pi / L) * lattice index
  std::array<double, 3> k_diff;  // as k, with the Nyquist component set to zero
  double k2;                     // |k|^2 from the full k
};

ModeWavenumbers mode_wavenumbers(const TorusGrid& grid, const std::array<int, 3>& lattice);

template <Rank R>
SpectralField<R> forward_transform(const Samples<R>& f);
template <Rank R>
Samples<R> inverse_transform(const SpectralField<R>& f);

VectorField gradient(const ScalarField& f);
// (grad f)_{ij} = d_j f_i
TensorField gradient(const VectorField& f);
ScalarField divergence(const VectorField& f);
// (div T)_i = sum_j d_j T_{ij}
VectorField divergence(const TensorField& t);
TensorField transpose(const TensorField& t);

// A^{beta/2} with A = -Laplacian, i.e. the multiplier |k|^beta.
// Throws SingularModeError when beta < 0 and the mean mode is nonzero.
template <Rank R>
SpectralField<R> laplacian_power(const SpectralField<R>& f, double beta);
template <Rank R>
SpectralField<R> laplacian(const SpectralField<R>& f);
// (1 - alpha^2 Laplacian)^{-1}
template <Rank R>
SpectralField<R> helmholtz_inverse(const SpectralField<R>& f, double alpha);
// (1 - alpha^2 Laplacian)
template <Rank R>
SpectralField<R> helmholtz_apply(const SpectralField<R>& f, double alpha);
// (1 - Laplacian)^{s/2}
template <Rank R>
SpectralField<R> bessel_potential(const SpectralField<R>& f, double s);

// Projection onto divergence-free fields, identity on the mean mode.
VectorField leray_project(const VectorField& u);

struct DefRot {
  TensorField def;
  TensorField rot;
};
DefRot def_rot(const VectorField& f);

// Zeroes every coefficient with max_i |k_i| above the grid's dealias cutoff.
template <Rank R>
void dealias_in_place(SpectralField<R>& f);
template <Rank R>
SpectralField<R> dealias(SpectralField<R> f) {
  dealias_in_place(f);
  return f;
}
template <Rank R>
bool is_dealiased(const SpectralField<R>& f);

// Equal-weight quadrature L^p norm; vectors use the pointwise Euclidean modulus.
// p = infinity gives the grid maximum.
template <Rank R>
double lp_norm(const Samples<R>& f, double p);
template <Rank R>
double lp_norm(const SpectralField<R>& f, double p);

// L^2 norm from the coefficients (Parseval).
template <Rank R>
double l2_norm(const SpectralField<R>& f);
// Homogeneous Sobolev seminorm (L^n sum |k|^{2s} |c_k|^2)^{1/2}.
template <Rank R>
double sobolev_seminorm(const SpectralField<R>& f, double s);
// Real part of the L^2 pairing, integral of f . conj(g).
template <Rank R>
double inner_product(const SpectralField<R>& f, const SpectralField<R>& g);
// max_k |c(-k) - conj(c(k))| divided by max_k |c(k)|; zero for real fields.
template <Rank R>
double conjugate_asymmetry(const SpectralField<R>& f);

// Dealiased coefficients of the pointwise product of two scalar fields.
ScalarField multiply(const ScalarField& a, const ScalarField& b);

}  // namespace lanslab
