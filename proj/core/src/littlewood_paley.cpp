#include "lanslab/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lanslab/spectral.hpp"

namespace lanslab {

namespace {

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

}  // namespace

double cutoff_profile(BumpProfile profile, double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double x = 2.0 * r - 1.0;
  switch (profile) {
    case BumpProfile::smooth_exponential: return 1.0 - smooth_step(x);
    case BumpProfile::cosine_taper: {
      const double c = std::cos(0.5 * std::numbers::pi * x);
      return c * c;
    }
  }
  return 0.0;
}

void BesovIndex::validate() const {
  if (!(p >= 1.0)) throw std::invalid_argument("BesovIndex: p must be >= 1");
  if (!(q >= 1.0)) throw std::invalid_argument("BesovIndex: q must be >= 1");
  if (!std::isfinite(s)) throw std::invalid_argument("BesovIndex: s must be finite");
}

DyadicPartition::DyadicPartition(const TorusGrid& grid, BumpProfile profile, int top_level)
    : grid_(grid), profile_(profile) {
  const double resolved = grid.max_resolved_radius();
  if (top_level < 0) {
    top_ = std::max(1, static_cast<int>(std::ceil(std::log2(resolved) - 1e-12)));
  } else {
    top_ = top_level;
  }
  if (top_ < 1) throw std::invalid_argument("DyadicPartition: top level must be >= 1");
  // Largest modulus anywhere on the lattice; block J must reach it.
  const double lattice_max =
      grid.wavenumber_unit() * (grid.points_per_axis() / 2) * std::sqrt(static_cast<double>(grid.dim()));
  if (std::ldexp(1.0, top_ - 1) >= lattice_max)
    throw std::invalid_argument("DyadicPartition: top level " + std::to_string(top_) +
                                " too large for grid, block has no lattice support");

  masks_.assign(top_ + 1, std::vector<double>(grid.num_points(), 0.0));
  nonempty_.assign(top_ + 1, false);
  const double unit = grid.wavenumber_unit();
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& k) {
    const double r = unit * std::sqrt(double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
    for (int j = 0; j <= top_; ++j) {
      const double v = block_value(j, r);
      masks_[j][idx] = v;
      if (v != 0.0) nonempty_[j] = true;
    }
  });
}

double DyadicPartition::block_value(int j, double r) const {
  if (j == 0) return cutoff_profile(profile_, r / 2.0);
  return cutoff_profile(profile_, r / std::ldexp(1.0, j + 1)) - cutoff_profile(profile_, r / std::ldexp(1.0, j));
}

void DyadicPartition::check_level(int j, const char* where) const {
  if (j < 0 || j > top_)
    throw std::out_of_range(std::string(where) + ": level " + std::to_string(j) + " outside [0, " +
                            std::to_string(top_) + "]");
}

const std::vector<double>& DyadicPartition::mask(int j) const {
  check_level(j, "DyadicPartition::mask");
  return masks_[j];
}

bool DyadicPartition::block_nonempty(int j) const {
  check_level(j, "DyadicPartition::block_nonempty");
  return nonempty_[j];
}

template <Rank R>
SpectralField<R> DyadicPartition::delta(const SpectralField<R>& f, int j) const {
  check_level(j, "delta_j");
  require_same_grid(grid_, f.grid(), "delta_j");
  SpectralField<R> out(f.grid(), f.real_valued());
  const auto& m = masks_[j];
  for (std::size_t c = 0; c < f.components(); ++c)
    for (std::size_t i = 0; i < m.size(); ++i) out[c][i] = m[i] * f[c][i];
  return out;
}

template <Rank R>
SpectralField<R> DyadicPartition::low_pass(const SpectralField<R>& f, int j) const {
  check_level(j, "s_j");
  require_same_grid(grid_, f.grid(), "s_j");
  SpectralField<R> out(f.grid(), f.real_valued());
  for (std::size_t i = 0; i < grid_.num_points(); ++i) {
    double m = 0.0;
    for (int l = 0; l <= j; ++l) m += masks_[l][i];
    for (std::size_t c = 0; c < f.components(); ++c) out[c][i] = m * f[c][i];
  }
  return out;
}

template <Rank R>
SpectralField<R> LPBlocks<R>::sum() const {
  if (blocks.empty()) throw std::logic_error("LPBlocks::sum: no blocks");
  SpectralField<R> out = blocks.front();
  for (std::size_t j = 1; j < blocks.size(); ++j) out += blocks[j];
  return out;
}

template <Rank R>
LPBlocks<R> decompose(const SpectralField<R>& f, const DyadicPartition& part) {
  LPBlocks<R> out;
  out.blocks.reserve(part.num_blocks());
  for (int j = 0; j <= part.top_level(); ++j) out.blocks.push_back(part.delta(f, j));
  return out;
}

template <Rank R>
std::vector<BesovShell> besov_profile(const SpectralField<R>& f, const BesovIndex& idx, const DyadicPartition& part,
                                      bool homogeneous) {
  idx.validate();
  require_same_grid(part.grid(), f.grid(), "besov_norm");
  std::vector<BesovShell> shells;
  const double vol = f.grid().volume();
  for (int j = homogeneous ? 1 : 0; j <= part.top_level(); ++j) {
    double norm = 0.0;
    if (part.block_nonempty(j)) {
      if (idx.p == 2.0) {
        const auto& m = part.mask(j);
        double acc = 0.0;
        for (std::size_t c = 0; c < f.components(); ++c)
          for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i] != 0.0) acc += m[i] * m[i] * std::norm(f[c][i]);
        norm = std::sqrt(acc * vol);
      } else {
        norm = lp_norm(part.delta(f, j), idx.p);
      }
    }
    shells.push_back({j, norm, std::pow(2.0, j * idx.s) * norm});
  }
  return shells;
}

double lq_sum(const std::vector<BesovShell>& shells, double q) {
  if (std::isinf(q)) {
    double mx = 0.0;
    for (const auto& s : shells) mx = std::max(mx, s.weighted);
    return mx;
  }
  double acc = 0.0;
  for (const auto& s : shells) acc += std::pow(s.weighted, q);
  return std::pow(acc, 1.0 / q);
}

template <Rank R>
double besov_norm(const SpectralField<R>& f, const BesovIndex& idx, const DyadicPartition& part, bool homogeneous) {
  return lq_sum(besov_profile(f, idx, part, homogeneous), idx.q);
}

void write_besov_csv(std::ostream& os, const std::vector<BesovShell>& shells) {
  os << "j,shell_lp_norm,weighted_term\n" << std::setprecision(17);
  for (const auto& s : shells) os << s.j << ',' << s.shell_norm << ',' << s.weighted << '\n';
}

nlohmann::json besov_summary(const std::vector<BesovShell>& shells, const BesovIndex& idx) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : shells) rows.push_back({{"j", s.j}, {"shell_norm", s.shell_norm}, {"weighted", s.weighted}});
  auto num = [](double v) { return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v); };
  return {{"s", idx.s}, {"p", num(idx.p)}, {"q", num(idx.q)}, {"norm", lq_sum(shells, idx.q)}, {"shells", rows}};
}

ScalarField ParaproductPieces::total() const {
  ScalarField out = low_f_high_g;
  out += low_g_high_f;
  out += resonant;
  return out;
}

namespace {

std::vector<ScalarSamples> physical_blocks(const ScalarField& f, const DyadicPartition& part) {
  std::vector<ScalarSamples> out;
  for (int j = 0; j <= part.top_level(); ++j) {
    if (part.block_nonempty(j)) {
      out.push_back(inverse_transform(part.delta(f, j)));
    } else {
      out.emplace_back(f.grid(), f.real_valued());
    }
  }
  return out;
}

void accumulate_product(ComplexArray& acc, const ComplexArray& a, const ComplexArray& b) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a[i] * b[i];
}

ScalarField to_dealiased_spectral(ScalarSamples s, bool real) {
  s.set_real_valued(real);
  auto out = forward_transform(s);
  out.set_real_valued(real);
  dealias_in_place(out);
  return out;
}

}  // namespace

ParaproductPieces paraproduct_split(const ScalarField& f, const ScalarField& g, const DyadicPartition& part) {
  require_same_grid(f.grid(), g.grid(), "paraproduct_split");
  require_same_grid(part.grid(), f.grid(), "paraproduct_split");
  const int top = part.top_level();
  const bool real = f.real_valued() && g.real_valued();
  const auto fb = physical_blocks(f, part);
  const auto gb = physical_blocks(g, part);

  ScalarSamples p1(f.grid()), p2(f.grid()), res(f.grid());
  ScalarSamples low_f(f.grid()), low_g(f.grid());  // S_{k-3} running sums
  for (int k = 3; k <= top; ++k) {
    for (std::size_t i = 0; i < low_f[0].size(); ++i) {
      low_f[0][i] += fb[k - 3][0][i];
      low_g[0][i] += gb[k - 3][0][i];
    }
    if (part.block_nonempty(k)) {
      accumulate_product(p1[0], low_f[0], gb[k][0]);
      accumulate_product(p2[0], low_g[0], fb[k][0]);
    }
  }
  ComplexArray near(f.grid().num_points());
  for (int k = 0; k <= top; ++k) {
    if (!part.block_nonempty(k)) continue;
    std::fill(near.begin(), near.end(), Complex{});
    for (int l = std::max(0, k - 2); l <= std::min(top, k + 2); ++l)
      for (std::size_t i = 0; i < near.size(); ++i) near[i] += gb[l][0][i];
    accumulate_product(res[0], fb[k][0], near);
  }
  return {to_dealiased_spectral(std::move(p1), real), to_dealiased_spectral(std::move(p2), real),
          to_dealiased_spectral(std::move(res), real)};
}

ScalarField low_high_term(const ScalarField& f, const ScalarField& g, int k, const DyadicPartition& part) {
  require_same_grid(f.grid(), g.grid(), "low_high_term");
  if (k < 3) return ScalarField(f.grid(), f.real_valued() && g.real_valued());
  return multiply(part.low_pass(f, k - 3), part.delta(g, k));
}

double kernel_lp_norm(const DyadicPartition& part, int j, double p) {
  ScalarField kernel(part.grid());
  const auto& m = part.mask(j);
  for (std::size_t i = 0; i < m.size(); ++i) kernel[0][i] = m[i];
  return lp_norm(kernel, p);
}

#define LANSLAB_INSTANTIATE(R)                                                                              \
  template SpectralField<R> DyadicPartition::delta<R>(const SpectralField<R>&, int) const;                 \
  template SpectralField<R> DyadicPartition::low_pass<R>(const SpectralField<R>&, int) const;              \
  template struct LPBlocks<R>;                                                                              \
  template LPBlocks<R> decompose<R>(const SpectralField<R>&, const DyadicPartition&);                       \
  template std::vector<BesovShell> besov_profile<R>(const SpectralField<R>&, const BesovIndex&,             \
                                                    const DyadicPartition&, bool);                          \
  template double besov_norm<R>(const SpectralField<R>&, const BesovIndex&, const DyadicPartition&, bool);

LANSLAB_INSTANTIATE(Rank::scalar)
LANSLAB_INSTANTIATE(Rank::vector)
LANSLAB_INSTANTIATE(Rank::tensor)

#undef LANSLAB_INSTANTIATE

}  // namespace lanslab
