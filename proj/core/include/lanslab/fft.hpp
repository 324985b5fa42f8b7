#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

#include "lanslab/grid.hpp"

namespace lanslab {

using Complex = std::complex<double>;

// Allocator returning SIMD-aligned storage from fftw_malloc.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() noexcept = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t count);
  void deallocate(T* p, std::size_t) noexcept;

  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

void* fftw_aligned_alloc(std::size_t bytes);
void fftw_aligned_free(void* p) noexcept;

template <class T>
T* FftwAllocator<T>::allocate(std::size_t count) {
  if (count == 0) return nullptr;
  void* p = fftw_aligned_alloc(count * sizeof(T));
  if (!p) throw std::bad_alloc();
  return static_cast<T*>(p);
}

template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_aligned_free(p);
}

using ComplexArray = std::vector<Complex, FftwAllocator<Complex>>;

namespace fft {

// In-place forward transform. Produces coefficients c_k with
// f(x) = sum_k c_k exp(i k.x), i.e. the raw DFT divided by N^n.
void forward(const TorusGrid& grid, ComplexArray& data);

// In-place synthesis: evaluates sum_k c_k exp(i k.x) at the grid points.
void inverse(const TorusGrid& grid, ComplexArray& data);

// Number of distinct plans currently cached (for diagnostics and tests).
std::size_t cached_plan_count();

}  // namespace fft
}  // namespace lanslab
