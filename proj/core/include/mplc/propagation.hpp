#pragma once

#include "mplc/field.hpp"

namespace mplc {

// Scalar free-space propagation over a signed distance using the angular
// spectrum of plane waves. The transfer function is hard-limited to the
// circular grid Nyquist band and evanescent components are dropped, so power
// is conserved for band-limited fields. distance == 0 returns the input
// unchanged. Negative distances realize the adjoint (backward) pass.
ComplexField propagate(const ComplexField& field, double distance, double wavelength);

// Circular Fourier low-pass: zeroes all spatial frequencies with
// fx^2 + fy^2 > f_radius^2. rolloff > 0 replaces the hard edge with a
// raised-cosine taper over [(1 - rolloff) f_radius, f_radius], suppressing
// the ring artifacts of a sharp cut while keeping the result strictly
// band-limited.
ArrayXXcd fourier_lowpass(const ArrayXXcd& data, const Grid& grid, double f_radius,
                          double rolloff = 0.0);

// Fraction of spectral energy inside the circular band fx^2+fy^2 <= f_radius^2.
double spectrum_energy_within(const ArrayXXcd& data, const Grid& grid, double f_radius);

}  // namespace mplc
