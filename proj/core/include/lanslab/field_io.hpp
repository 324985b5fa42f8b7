#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lanslab/field.hpp"

namespace lanslab {

// Binary container layout, all values little-endian:
//   char[8]  magic "LANSFLD1"
//   uint32   format version (1)
//   uint32   rank (0 scalar, 1 vector, 2 tensor)
//   uint32   dim
//   uint32   points_per_axis
//   uint32   components
//   uint32   real-valued flag
//   float64  box_length
//   float64  dealias_fraction
//   float64  time stamp
//   then components * N^dim pairs (re, im) of float64 in FFT index order.
struct FieldHeader {
  Rank rank = Rank::vector;
  int dim = 3;
  int points_per_axis = 0;
  int components = 0;
  bool real_valued = true;
  double box_length = 0.0;
  double dealias_fraction = 0.0;
  double time = 0.0;
};

template <Rank R>
void write_field(std::ostream& os, const SpectralField<R>& f, double time = 0.0);
template <Rank R>
SpectralField<R> read_field(std::istream& is, FieldHeader* header = nullptr);
FieldHeader read_field_header(std::istream& is);

template <Rank R>
void save_field(const std::filesystem::path& path, const SpectralField<R>& f, double time = 0.0);
template <Rank R>
SpectralField<R> load_field(const std::filesystem::path& path, FieldHeader* header = nullptr);

// Physical-space samples as CSV: one row per grid point with coordinates and
// the real part of every component (imaginary parts too for complex fields).
// Lines in `preamble` are written first, each prefixed by "# ".
template <Rank R>
void write_samples_csv(std::ostream& os, const SpectralField<R>& f, const std::string& preamble = {});

}  // namespace lanslab
