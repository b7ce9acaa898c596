#pragma once

#include <cstdint>
#include <stdexcept>

namespace mplc {

// Uniformly sampled transverse plane. The grid center (nx/2, ny/2) sits at
// physical coordinate (0, 0); sample counts must be even so Fourier bins
// pair up symmetrically.
struct Grid {
  int nx = 256;
  int ny = 256;
  double pitch = 12.5e-6;  // meters per sample (SLM pixel size)

  Grid() = default;
  Grid(int nx_, int ny_, double pitch_) : nx(nx_), ny(ny_), pitch(pitch_) {
    if (nx < 16 || ny < 16) throw std::invalid_argument("Grid: nx, ny must be >= 16");
    if (nx % 2 != 0 || ny % 2 != 0) throw std::invalid_argument("Grid: nx, ny must be even");
    if (!(pitch > 0.0)) throw std::invalid_argument("Grid: pitch must be positive");
  }

  double x(int ix) const { return (ix - nx / 2) * pitch; }
  double y(int iy) const { return (iy - ny / 2) * pitch; }

  // FFT bin spatial frequency [1/m] for unshifted bin index k.
  double fx(int k) const { return (k < nx / 2 ? k : k - nx) / (nx * pitch); }
  double fy(int k) const { return (k < ny / 2 ? k : k - ny) / (ny * pitch); }

  double nyquist() const { return 1.0 / (2.0 * pitch); }
  double width() const { return nx * pitch; }
  double height() const { return ny * pitch; }
  std::int64_t samples() const { return static_cast<std::int64_t>(nx) * ny; }

  bool operator==(const Grid& o) const {
    return nx == o.nx && ny == o.ny && pitch == o.pitch;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace mplc
