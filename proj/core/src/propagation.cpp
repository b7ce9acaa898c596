#include "mplc/propagation.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace mplc {
namespace {

// FFTW planning is not thread-safe; plan once per (nx, ny, sign) and reuse.
// Plans are created FFTW_UNALIGNED so they can execute on Eigen-owned memory.
class FftPlanCache {
 public:
  static fftw_plan get(int nx, int ny, int sign) {
    static FftPlanCache cache;
    std::lock_guard<std::mutex> lock(cache.mutex_);
    const auto key = std::make_tuple(nx, ny, sign);
    auto it = cache.plans_.find(key);
    if (it != cache.plans_.end()) return it->second;
    std::size_t n = static_cast<std::size_t>(nx) * ny;
    fftw_complex* buf = fftw_alloc_complex(n);
    if (!buf) throw std::bad_alloc();
    // row-major (n0, n1) = (ny, nx): the x index is contiguous in our fields
    fftw_plan plan = fftw_plan_dft_2d(ny, nx, buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!plan) throw std::runtime_error("FftPlanCache: fftw planning failed");
    cache.plans_.emplace(key, plan);
    return plan;
  }

 private:
  FftPlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void fft2_inplace(ArrayXXcd& data, int sign) {
  fftw_plan plan = FftPlanCache::get(static_cast<int>(data.rows()),
                                     static_cast<int>(data.cols()), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

// exp(i kz(f) z) on the propagating band, zero outside; kz = k sqrt(1 - (lambda f)^2).
struct TransferFunction {
  ArrayXXcd h;
};

using TfKey = std::tuple<int, int, double, double, double>;  // nx, ny, pitch, lambda, z

const ArrayXXcd& transfer_function(const Grid& grid, double wavelength, double z) {
  static std::mutex mutex;
  static std::map<TfKey, std::unique_ptr<TransferFunction>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const TfKey key{grid.nx, grid.ny, grid.pitch, wavelength, z};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second->h;

  auto tf = std::make_unique<TransferFunction>();
  tf->h.resize(grid.nx, grid.ny);
  const double k0 = 2.0 * M_PI / wavelength;
  const double f_nyq2 = grid.nyquist() * grid.nyquist();
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double fy = grid.fy(iy);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double fx = grid.fx(ix);
      const double f2 = fx * fx + fy * fy;
      const double s = 1.0 - wavelength * wavelength * f2;
      if (s <= 0.0 || f2 > f_nyq2) {
        tf->h(ix, iy) = 0.0;  // evanescent or beyond the circular Nyquist band
      } else {
        tf->h(ix, iy) = std::polar(1.0, k0 * std::sqrt(s) * z);
      }
    }
  }
  const ArrayXXcd& ref = tf->h;
  cache.emplace(key, std::move(tf));
  return ref;
}

}  // namespace

ComplexField propagate(const ComplexField& field, double distance, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("propagate: wavelength must be positive");
  if (distance == 0.0) return field;
  ArrayXXcd spectrum = field.amplitude;
  fft2_inplace(spectrum, FFTW_FORWARD);
  spectrum *= transfer_function(field.grid, wavelength, distance);
  fft2_inplace(spectrum, FFTW_BACKWARD);
  spectrum *= 1.0 / static_cast<double>(field.grid.samples());
  return ComplexField(field.grid, std::move(spectrum));
}

ArrayXXcd fourier_lowpass(const ArrayXXcd& data, const Grid& grid, double f_radius,
                          double rolloff) {
  ArrayXXcd spectrum = data;
  fft2_inplace(spectrum, FFTW_FORWARD);
  const double f_inner = (1.0 - rolloff) * f_radius;
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double fy = grid.fy(iy);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double fx = grid.fx(ix);
      const double f = std::sqrt(fx * fx + fy * fy);
      if (f > f_radius) {
        spectrum(ix, iy) = 0.0;
      } else if (f > f_inner) {
        const double t = (f - f_inner) / (f_radius - f_inner);
        spectrum(ix, iy) *= 0.5 * (1.0 + std::cos(M_PI * t));
      }
    }
  }
  fft2_inplace(spectrum, FFTW_BACKWARD);
  spectrum *= 1.0 / static_cast<double>(grid.samples());
  return spectrum;
}

double spectrum_energy_within(const ArrayXXcd& data, const Grid& grid, double f_radius) {
  ArrayXXcd spectrum = data;
  fft2_inplace(spectrum, FFTW_FORWARD);
  const double r2 = f_radius * f_radius;
  double inside = 0.0, total = 0.0;
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double fy = grid.fy(iy);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double fx = grid.fx(ix);
      const double e = std::norm(spectrum(ix, iy));
      total += e;
      if (fx * fx + fy * fy <= r2) inside += e;
    }
  }
  return total > 0.0 ? inside / total : 1.0;
}

}  // namespace mplc
