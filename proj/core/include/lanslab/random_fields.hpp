#pragma once

#include <cstdint>
#include <limits>

#include "lanslab/field.hpp"

namespace lanslab {

// Band-limited random data built from real Gaussian noise, so every field is
// real-valued. Band limits are in lattice units; coefficient moduli decay
// like |k|^{-spectral_slope} inside the band.
struct RandomFieldOptions {
  double spectral_slope = 2.0;
  double k_min = 1.0;
  double k_max = std::numeric_limits<double>::infinity();  // clipped to the dealias cutoff
  double l2_norm = 1.0;  // target L^2 norm; <= 0 keeps the raw scale
};

ScalarField random_scalar(const TorusGrid& grid, std::uint64_t seed, const RandomFieldOptions& opt = {});
// Mean-zero, divergence-free, dealiased.
VectorField random_solenoidal(const TorusGrid& grid, std::uint64_t seed, const RandomFieldOptions& opt = {});

// Uniform draws symmetrized over k <-> -k, indexed by FFT position. Useful as a
// random real multiplier that keeps fields real-valued.
std::vector<double> symmetric_uniform_weights(const TorusGrid& grid, std::uint64_t seed, double lo, double hi);

}  // namespace lanslab
