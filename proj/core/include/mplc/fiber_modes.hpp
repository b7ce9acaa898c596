#pragma once

#include <stdexcept>
#include <vector>

#include "mplc/field.hpp"

namespace mplc {

// Weakly guiding step-index fiber. render_scale magnifies the field pattern
// when rasterizing (the target modes are measured at 10x for resolution).
struct FiberSpec {
  double core_radius = 25e-6;
  double numerical_aperture = 0.2;
  double wavelength = 808e-9;
  double render_scale = 10.0;
};

class NotGuidedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Normalized frequency V = 2 pi a NA / lambda.
double v_number(const FiberSpec& spec);

struct LpParameters {
  double u = 0.0;  // core transverse parameter
  double w = 0.0;  // cladding decay parameter, u^2 + w^2 = V^2
};

// m-th root (m >= 1, ordered by increasing u) of the LP_lm characteristic
// equation u J_{l+1}(u)/J_l(u) = w K_{l+1}(w)/K_l(w), found by bisection
// between consecutive zeros of J_l. Throws NotGuidedError past cutoff.
LpParameters solve_lp(const FiberSpec& spec, int l, int m);

// Residual of the characteristic equation in ratio form at (u, w).
double lp_residual(const FiberSpec& spec, int l, const LpParameters& p);

enum class LpOrientation { cos, sin };

// Real normalized LP_lm field rendered at render_scale * core_radius:
// J_l(u r/a') cos(l phi) in the core, matched K_l(w r/a') cos(l phi) outside.
ComplexField lp_field(const FiberSpec& spec, int l, int m, LpOrientation orientation,
                      const Grid& grid, double cx = 0.0, double cy = 0.0);

// All guided u-roots for azimuthal order l, ordered by increasing u.
std::vector<double> lp_roots(const FiberSpec& spec, int l);

}  // namespace mplc
