#include "mplc/fiber_modes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mplc {

namespace {

double bessel_j(int l, double x) { return std::cyl_bessel_j(static_cast<double>(l), x); }

double bessel_k(int l, double x) {
  if (x > 700.0) return 0.0;  // below double underflow anyway
  return std::cyl_bessel_k(static_cast<double>(l), x);
}

// characteristic function in ratio form; poles at zeros of J_l
double characteristic(int l, double u, double v_num) {
  const double w = std::sqrt(std::max(v_num * v_num - u * u, 0.0));
  const double lhs = u * bessel_j(l + 1, u) / bessel_j(l, u);
  const double rhs = (w > 0.0) ? w * bessel_k(l + 1, w) / bessel_k(l, w) : 0.0;
  return lhs - rhs;
}

// zeros of J_l on (0, hi) by sign-change scan plus bisection
std::vector<double> bessel_j_zeros(int l, double hi) {
  std::vector<double> zeros;
  const double step = 0.02;
  double prev_x = step / 2.0;
  double prev_v = bessel_j(l, prev_x);
  for (double x = prev_x + step; x < hi; x += step) {
    const double v = bessel_j(l, x);
    if (prev_v == 0.0) zeros.push_back(prev_x);
    if (prev_v * v < 0.0) {
      double a = prev_x, b = x;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        if (bessel_j(l, a) * bessel_j(l, mid) <= 0.0)
          b = mid;
        else
          a = mid;
      }
      zeros.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_v = v;
  }
  return zeros;
}

}  // namespace

double v_number(const FiberSpec& spec) {
  if (!(spec.core_radius > 0.0) || !(spec.numerical_aperture > 0.0) ||
      !(spec.wavelength > 0.0) || !(spec.render_scale > 0.0))
    throw std::invalid_argument("v_number: fiber parameters must be positive");
  return 2.0 * M_PI * spec.core_radius * spec.numerical_aperture / spec.wavelength;
}

std::vector<double> lp_roots(const FiberSpec& spec, int l) {
  if (l < 0) throw std::invalid_argument("lp_roots: azimuthal index must be >= 0");
  const double v_num = v_number(spec);
  // bracket endpoints: 0, zeros of J_l, V; one root candidate per interval
  std::vector<double> brackets = bessel_j_zeros(l, v_num);
  brackets.insert(brackets.begin(), 0.0);
  brackets.push_back(v_num * (1.0 - 1e-12));

  std::vector<double> roots;
  const double inset = 1e-9;
  for (std::size_t k = 0; k + 1 < brackets.size(); ++k) {
    double a = brackets[k] + inset;
    double b = brackets[k + 1] - inset;
    if (!(b > a)) continue;
    double fa = characteristic(l, a, v_num);
    const double fb = characteristic(l, b, v_num);
    if (!std::isfinite(fa) || !std::isfinite(fb) || fa * fb > 0.0) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = characteristic(l, mid, v_num);
      if (fa * fm <= 0.0) {
        b = mid;
      } else {
        a = mid;
        fa = fm;
      }
      if (b - a < 1e-15 * v_num) break;
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

LpParameters solve_lp(const FiberSpec& spec, int l, int m) {
  if (m < 1) throw std::invalid_argument("solve_lp: radial index must be >= 1");
  const std::vector<double> roots = lp_roots(spec, l);
  if (static_cast<std::size_t>(m) > roots.size())
    throw NotGuidedError("solve_lp: LP" + std::to_string(l) + std::to_string(m) +
                         " is not guided (V = " + std::to_string(v_number(spec)) + ")");
  const double u = roots[static_cast<std::size_t>(m - 1)];
  const double v_num = v_number(spec);
  return {u, std::sqrt(v_num * v_num - u * u)};
}

double lp_residual(const FiberSpec& spec, int l, const LpParameters& p) {
  return characteristic(l, p.u, v_number(spec));
}

ComplexField lp_field(const FiberSpec& spec, int l, int m, LpOrientation orientation,
                      const Grid& grid, double cx, double cy) {
  const LpParameters lp = solve_lp(spec, l, m);
  const double scaled_a = spec.render_scale * spec.core_radius;
  // cladding decay length a'/w past the core edge; require the rendered mode
  // inside the grid
  const double extent = scaled_a * (1.0 + 8.0 / lp.w);
  if (std::abs(cx) + extent > grid.width() / 2.0 || std::abs(cy) + extent > grid.height() / 2.0)
    throw std::invalid_argument("lp_field: rendered mode does not fit the grid");

  const double edge_j = bessel_j(l, lp.u);
  const double edge_k = bessel_k(l, lp.w);
  if (edge_k == 0.0) throw std::runtime_error("lp_field: cladding normalization underflow");
  const double match = edge_j / edge_k;

  ArrayXXd amp(grid.nx, grid.ny);
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y = grid.y(iy) - cy;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x(ix) - cx;
      const double r = std::hypot(x, y);
      const double radial = (r < scaled_a) ? bessel_j(l, lp.u * r / scaled_a)
                                           : match * bessel_k(l, lp.w * r / scaled_a);
      double azimuthal = 1.0;
      if (l > 0) {
        const double phi = std::atan2(y, x);
        azimuthal = (orientation == LpOrientation::cos) ? std::cos(l * phi) : std::sin(l * phi);
      }
      amp(ix, iy) = radial * azimuthal;
    }
  }
  ComplexField field(grid, amp.cast<Complex>());
  field.normalize();
  return field;
}

}  // namespace mplc
