#include "lanslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "lanslab/errors.hpp"

namespace lanslab {

void* fftw_aligned_alloc(std::size_t bytes) { return fftw_malloc(bytes); }
void fftw_aligned_free(void* p) noexcept { fftw_free(p); }

namespace fft {
namespace {

using PlanKey = std::tuple<int, int, int>;  // dim, N, sign

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::map<PlanKey, fftw_plan>& plan_cache() {
  static std::map<PlanKey, fftw_plan> cache;
  return cache;
}

// FFTW planning is not thread-safe; execution with new-array execute is.
fftw_plan get_plan(const TorusGrid& grid, int sign) {
  const PlanKey key{grid.dim(), grid.points_per_axis(), sign};
  std::lock_guard lock(planner_mutex());
  auto& cache = plan_cache();
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  ComplexArray scratch(grid.num_points());
  int dims[3] = {grid.points_per_axis(), grid.points_per_axis(), grid.points_per_axis()};
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft(grid.dim(), dims, buf, buf, sign, FFTW_ESTIMATE);
  if (!plan) throw std::runtime_error("fft: plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

void check_size(const TorusGrid& grid, const ComplexArray& data) {
  if (data.size() != grid.num_points())
    throw ShapeMismatch("fft: array size " + std::to_string(data.size()) +
                        " does not match grid size " + std::to_string(grid.num_points()));
}

}  // namespace

void forward(const TorusGrid& grid, ComplexArray& data) {
  check_size(grid, data);
  fftw_plan plan = get_plan(grid, FFTW_FORWARD);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
  const double scale = 1.0 / static_cast<double>(grid.num_points());
  for (auto& z : data) z *= scale;
}

void inverse(const TorusGrid& grid, ComplexArray& data) {
  check_size(grid, data);
  fftw_plan plan = get_plan(grid, FFTW_BACKWARD);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

std::size_t cached_plan_count() {
  std::lock_guard lock(planner_mutex());
  return plan_cache().size();
}

}  // namespace fft
}  // namespace lanslab
