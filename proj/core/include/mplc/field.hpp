#pragma once

#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <string>

#include "mplc/grid.hpp"

namespace mplc {

using Complex = std::complex<double>;
using ArrayXXcd = Eigen::ArrayXXcd;
using ArrayXXd = Eigen::ArrayXXd;

// Sampled complex scalar amplitude on a Grid. amplitude(ix, iy) is the value
// at physical position (grid.x(ix), grid.y(iy)); the x index is contiguous
// in memory.
struct ComplexField {
  Grid grid;
  ArrayXXcd amplitude;  // shape (nx, ny)

  ComplexField() = default;
  ComplexField(const Grid& g, ArrayXXcd amp);
  static ComplexField zero(const Grid& g);

  // Integrated |amplitude|^2 over the plane, in field units * m^2.
  double power() const;

  // Scales to unit power. Throws on a field with no power.
  ComplexField& normalize();
};

// Discrete inner product  sum conj(u) * v * pitch^2. Grids must match.
Complex overlap(const ComplexField& u, const ComplexField& v);

// Binary field file: little-endian u32 nx, u32 ny, f64 pitch, then nx*ny
// interleaved (re, im) f64 pairs with the x index fastest.
void save_cfd(const ComplexField& field, const std::filesystem::path& path);
ComplexField load_cfd(const std::filesystem::path& path);

}  // namespace mplc
