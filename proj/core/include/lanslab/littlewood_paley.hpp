#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <vector>

#include "lanslab/field.hpp"

namespace lanslab {

// Smooth cutoff chi with chi = 1 on [0, 1/2] and chi = 0 on [1, inf).
// Block 0 is chi(r / 2), block j >= 1 is chi(r / 2^{j+1}) - chi(r / 2^j).
enum class BumpProfile {
  smooth_exponential,  // C-infinity transition built from exp(-1/x)
  cosine_taper,        // C^1 cos^2 transition
};

double cutoff_profile(BumpProfile profile, double r);

struct BesovIndex {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  void validate() const;
};

class DyadicPartition {
 public:
  // top_level < 0 selects the smallest J with 2^J >= the largest resolved
  // wavenumber, so every dealiased mode is covered and blocks telescope exactly.
  explicit DyadicPartition(const TorusGrid& grid, BumpProfile profile = BumpProfile::smooth_exponential,
                           int top_level = -1);

  const TorusGrid& grid() const noexcept { return grid_; }
  BumpProfile profile() const noexcept { return profile_; }
  int top_level() const noexcept { return top_; }
  int num_blocks() const noexcept { return top_ + 1; }

  // Radial multiplier of block j at physical radius r.
  double block_value(int j, double r) const;
  // Multiplier of block j sampled at every lattice mode, FFT order.
  const std::vector<double>& mask(int j) const;
  // False when block j has no lattice support on this grid.
  bool block_nonempty(int j) const;

  template <Rank R>
  SpectralField<R> delta(const SpectralField<R>& f, int j) const;
  // S_j = sum of blocks 0..j.
  template <Rank R>
  SpectralField<R> low_pass(const SpectralField<R>& f, int j) const;

 private:
  void check_level(int j, const char* where) const;

  TorusGrid grid_;
  BumpProfile profile_;
  int top_;
  std::vector<std::vector<double>> masks_;
  std::vector<bool> nonempty_;
};

template <Rank R>
struct LPBlocks {
  std::vector<SpectralField<R>> blocks;
  SpectralField<R> sum() const;
};

template <Rank R>
LPBlocks<R> decompose(const SpectralField<R>& f, const DyadicPartition& part);

struct BesovShell {
  int j;
  double shell_norm;  // ||Delta_j f||_{L^p}
  double weighted;    // 2^{js} ||Delta_j f||_{L^p}
};

// Appendix form sum_{j>=0} (2^{js} ||Delta_j f||_p)^q, block 0 being the low
// pass part. homogeneous = true skips block 0.
template <Rank R>
std::vector<BesovShell> besov_profile(const SpectralField<R>& f, const BesovIndex& idx, const DyadicPartition& part,
                                      bool homogeneous = false);
template <Rank R>
double besov_norm(const SpectralField<R>& f, const BesovIndex& idx, const DyadicPartition& part,
                  bool homogeneous = false);
double lq_sum(const std::vector<BesovShell>& shells, double q);

void write_besov_csv(std::ostream& os, const std::vector<BesovShell>& shells);
nlohmann::json besov_summary(const std::vector<BesovShell>& shells, const BesovIndex& idx);

struct ParaproductPieces {
  ScalarField low_f_high_g;  // sum_k S_{k-3} f Delta_k g
  ScalarField low_g_high_f;  // sum_k S_{k-3} g Delta_k f
  ScalarField resonant;      // sum_k Delta_k f sum_{|l|<=2} Delta_{k+l} g
  ScalarField total() const;
};

ParaproductPieces paraproduct_split(const ScalarField& f, const ScalarField& g, const DyadicPartition& part);
// The single level-k term S_{k-3} f Delta_k g, dealiased.
ScalarField low_high_term(const ScalarField& f, const ScalarField& g, int k, const DyadicPartition& part);

// Physical-space L^p norm of the level-j kernel (inverse transform of its multiplier).
double kernel_lp_norm(const DyadicPartition& part, int j, double p);

}  // namespace lanslab
