#include "mplc/field.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mplc {

ComplexField::ComplexField(const Grid& g, ArrayXXcd amp) : grid(g), amplitude(std::move(amp)) {
  if (amplitude.rows() != grid.nx || amplitude.cols() != grid.ny)
    throw std::invalid_argument("ComplexField: amplitude shape does not match grid");
}

ComplexField ComplexField::zero(const Grid& g) {
  return ComplexField(g, ArrayXXcd::Zero(g.nx, g.ny));
}

double ComplexField::power() const {
  return amplitude.abs2().sum() * grid.pitch * grid.pitch;
}

ComplexField& ComplexField::normalize() {
  const double p = power();
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("ComplexField::normalize: field has no finite power");
  amplitude *= 1.0 / std::sqrt(p);
  return *this;
}

Complex overlap(const ComplexField& u, const ComplexField& v) {
  if (u.grid != v.grid) throw std::invalid_argument("overlap: grid mismatch");
  return (u.amplitude.conjugate() * v.amplitude).sum() * u.grid.pitch * u.grid.pitch;
}

void save_cfd(const ComplexField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_cfd: cannot open " + path.string());
  const std::uint32_t nx = static_cast<std::uint32_t>(field.grid.nx);
  const std::uint32_t ny = static_cast<std::uint32_t>(field.grid.ny);
  const double pitch = field.grid.pitch;
  out.write(reinterpret_cast<const char*>(&nx), 4);
  out.write(reinterpret_cast<const char*>(&ny), 4);
  out.write(reinterpret_cast<const char*>(&pitch), 8);
  // column-major storage with x contiguous == (re, im) pairs, x fastest
  out.write(reinterpret_cast<const char*>(field.amplitude.data()),
            static_cast<std::streamsize>(field.grid.samples() * 2 * sizeof(double)));
  if (!out) throw std::runtime_error("save_cfd: write failed for " + path.string());
}

ComplexField load_cfd(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_cfd: cannot open " + path.string());
  std::uint32_t nx = 0, ny = 0;
  double pitch = 0.0;
  in.read(reinterpret_cast<char*>(&nx), 4);
  in.read(reinterpret_cast<char*>(&ny), 4);
  in.read(reinterpret_cast<char*>(&pitch), 8);
  if (!in) throw std::runtime_error("load_cfd: truncated header in " + path.string());
  Grid grid(static_cast<int>(nx), static_cast<int>(ny), pitch);
  ArrayXXcd amp(grid.nx, grid.ny);
  in.read(reinterpret_cast<char*>(amp.data()),
          static_cast<std::streamsize>(grid.samples() * 2 * sizeof(double)));
  if (!in) throw std::runtime_error("load_cfd: truncated payload in " + path.string());
  return ComplexField(grid, std::move(amp));
}

}  // namespace mplc
