#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "mplc/mplc.hpp"
#include "mplc/modes.hpp"
#include "mplc/propagation.hpp"

using namespace mplc;

namespace {

constexpr double kWavelength = 810e-9;

Grid default_grid() { return Grid(256, 256, 12.5e-6); }

// intensity-weighted second-moment beam radius, 2 sqrt(<x^2>)
double measured_waist(const ComplexField& field) {
  double w2 = 0.0, total = 0.0;
  for (int iy = 0; iy < field.grid.ny; ++iy)
    for (int ix = 0; ix < field.grid.nx; ++ix) {
      const double intensity = std::norm(field.amplitude(ix, iy));
      w2 += intensity * field.grid.x(ix) * field.grid.x(ix);
      total += intensity;
    }
  return 2.0 * std::sqrt(w2 / total);
}

ArrayXXd random_smooth_mask(const Grid& g, unsigned seed) {
  ArrayXXd mask(g.nx, g.ny);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double x = g.x(ix), y = g.y(iy);
      mask(ix, iy) = 1.3 * std::sin(2.0 * M_PI * 2000.0 * x + seed) +
                     0.9 * std::cos(2.0 * M_PI * 1500.0 * y - 0.3 * seed);
    }
  return mask;
}

}  // namespace

TEST_SUITE_BEGIN("propagation");

TEST_CASE("zero distance is the exact identity") {
  const ComplexField spot = gaussian_spot(default_grid(), 0.0, 0.0, 150e-6);
  const ComplexField out = propagate(spot, 0.0, kWavelength);
  CHECK(std::memcmp(out.amplitude.data(), spot.amplitude.data(),
                    sizeof(Complex) * static_cast<std::size_t>(spot.grid.samples())) == 0);
}

TEST_CASE("uniform plane wave keeps its amplitude profile") {
  const Grid g = default_grid();
  ComplexField plane(g, ArrayXXcd::Constant(g.nx, g.ny, 1.0));
  plane.normalize();
  const ComplexField out = propagate(plane, 76e-3, kWavelength);
  const double peak = plane.amplitude.abs().maxCoeff();
  CHECK((out.amplitude.abs() - plane.amplitude.abs()).abs().maxCoeff() < 1e-9 * peak);
}

TEST_CASE("gaussian beam spreads by the analytic waist law") {
  const Grid g = default_grid();
  const double w0 = 150e-6;
  const double rayleigh = M_PI * w0 * w0 / kWavelength;
  const ComplexField beam = gaussian_spot(g, 0.0, 0.0, w0);
  const double z = 2.0 * rayleigh;
  const ComplexField far = propagate(beam, z, kWavelength);
  const double expected = w0 * std::sqrt(1.0 + (z / rayleigh) * (z / rayleigh));
  CHECK(measured_waist(far) == doctest::Approx(expected).epsilon(0.01));
  CHECK(measured_waist(beam) == doctest::Approx(w0).epsilon(0.01));
}

TEST_CASE("propagation and masks conserve power") {
  const Grid g = default_grid();
  ComplexField field = gaussian_spot(g, 0.0, 300e-6, 150e-6);
  for (int plane = 0; plane < 5; ++plane) {
    const double before = field.power();
    field = apply_mask(field, random_smooth_mask(g, static_cast<unsigned>(plane)));
    field = propagate(field, 76e-3, kWavelength);
    CHECK(std::abs(field.power() - before) < 1e-6 * before);
  }
}

TEST_CASE("apply_mask basics") {
  const Grid g = default_grid();
  const ComplexField spot = gaussian_spot(g, 0.0, 0.0, 150e-6);

  const ComplexField same = apply_mask(spot, ArrayXXd::Zero(g.nx, g.ny));
  CHECK((same.amplitude - spot.amplitude).abs().maxCoeff() == 0.0);

  const double c = 1.234;
  const ComplexField shifted = apply_mask(spot, ArrayXXd::Constant(g.nx, g.ny, c));
  const Complex phase = std::polar(1.0, c);
  CHECK((shifted.amplitude - phase * spot.amplitude).abs().maxCoeff() < 1e-15);
  CHECK(shifted.power() == doctest::Approx(spot.power()).epsilon(1e-12));

  CHECK_THROWS_AS(apply_mask(spot, ArrayXXd::Zero(64, 64)), std::invalid_argument);
}

TEST_CASE("linear phase ramp steers the far-field centroid by the grating equation") {
  const Grid g = default_grid();
  const ComplexField spot = gaussian_spot(g, 0.0, 0.0, 150e-6);
  const double nu = 0.1 * g.nyquist();  // 4000 cycles/m
  ArrayXXd ramp(g.nx, g.ny);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) ramp(ix, iy) = 2.0 * M_PI * nu * g.x(ix);

  const double z = 76e-3;
  const ComplexField steered = propagate(apply_mask(spot, ramp), z, kWavelength);
  double cx = 0.0, total = 0.0;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double intensity = std::norm(steered.amplitude(ix, iy));
      cx += intensity * g.x(ix);
      total += intensity;
    }
  cx /= total;
  CHECK(cx == doctest::Approx(kWavelength * z * nu).epsilon(0.02));
}

TEST_CASE("forward pass with zero masks reduces to free propagation") {
  const Grid g = default_grid();
  const MplcGeometry geo(g, kWavelength, 5, 76e-3);
  const MaskStack stack(geo);
  const ComplexField spot = gaussian_spot(g, 0.0, 0.0, 150e-6);
  const ComplexField via_stack = mplc_forward(spot, stack);
  const ComplexField direct = propagate(spot, 5 * 76e-3, kWavelength);
  // the two routes accumulate ~3e6 rad of propagation phase, so they agree
  // only to the ulp of that phase
  CHECK((via_stack.amplitude - direct.amplitude).abs().maxCoeff() <
        1e-8 * direct.amplitude.abs().maxCoeff());
}

TEST_CASE("forward pass is linear") {
  const Grid g(128, 128, 12.5e-6);
  MplcGeometry geo(g, kWavelength, 3, 76e-3);
  MaskStack stack(geo);
  for (int p = 0; p < 3; ++p) stack.masks[p] = random_smooth_mask(g, 10 + p);

  const ComplexField u = gaussian_spot(g, 0.0, 150e-6, 100e-6);
  const ComplexField v = gaussian_spot(g, 0.0, -150e-6, 100e-6);
  ComplexField sum(g, u.amplitude + v.amplitude);
  const ComplexField lhs = mplc_forward(sum, stack);
  const ComplexField rhs(g, mplc_forward(u, stack).amplitude + mplc_forward(v, stack).amplitude);
  CHECK((lhs.amplitude - rhs.amplitude).abs().maxCoeff() <
        1e-10 * rhs.amplitude.abs().maxCoeff());
}

TEST_CASE("adjoint pass satisfies the reciprocity identity") {
  const Grid g(128, 128, 12.5e-6);
  MplcGeometry geo(g, kWavelength, 4, 76e-3);
  MaskStack stack(geo);
  for (int p = 0; p < 4; ++p) stack.masks[p] = random_smooth_mask(g, 100 + p);

  const ComplexField u = gaussian_spot(g, 50e-6, 120e-6, 90e-6);
  const ComplexField v = gaussian_spot(g, -80e-6, -60e-6, 110e-6);
  const Complex lhs = overlap(mplc_forward(u, stack), v);
  const Complex rhs = overlap(u, mplc_adjoint(v, stack));
  CHECK(std::abs(lhs - rhs) < 1e-8);
}

TEST_CASE("transfer matrix of a zero-mask stack against propagated outputs") {
  const Grid g = default_grid();
  const MplcGeometry geo(g, kWavelength, 5, 76e-3);
  const MaskStack stack(geo);
  // 6-waist spacing: residual spot overlaps ~exp(-18), orthonormal at 1e-6
  ModeSet inputs = spot_column(g, 3, 150e-6, 900e-6);
  ModeSet outputs;
  for (int k = 0; k < inputs.size(); ++k)
    outputs.add(mplc_forward(inputs[k], stack), "out" + std::to_string(k));

  const TransferMatrix tm = extract_transfer_matrix(stack, inputs, outputs);
  CHECK((tm.entries - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(tm.efficiency == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tm.unitarity_deviation < 1e-6);
  CHECK(tm.max_singular_value <= 1.0 + 1e-6);
}

TEST_CASE("mask stack bundle round trip") {
  const Grid g(64, 64, 12.5e-6);
  MplcGeometry geo(g, kWavelength, 2, 50e-3);
  MaskStack stack(geo);
  stack.masks[0] = random_smooth_mask(g, 7).unaryExpr([](double v) {
    return std::fmod(std::abs(v), 2.0 * M_PI);
  });
  stack.masks[1] = random_smooth_mask(g, 8).unaryExpr([](double v) {
    return std::fmod(std::abs(v), 2.0 * M_PI);
  });

  namespace fs = std::filesystem;
  const fs::path dir1 = fs::temp_directory_path() / "mplc_test_bundle.mplc";
  const fs::path dir2 = fs::temp_directory_path() / "mplc_test_bundle2.mplc";
  save_mask_stack(stack, dir1, R"({"task":"test"})");
  const MaskStack loaded = load_mask_stack(dir1);
  CHECK(loaded.geometry.plane_count == 2);
  CHECK(loaded.geometry.grid == g);
  // storage is f32; the reload must be exact at that precision
  for (int p = 0; p < 2; ++p)
    CHECK((loaded.masks[p].cast<float>() - stack.masks[p].cast<float>()).abs().maxCoeff() == 0.0f);

  save_mask_stack(loaded, dir2, R"({"task":"test"})");
  for (int p = 0; p < 2; ++p) {
    std::ifstream f1(dir1 / ("mask_00" + std::to_string(p) + ".f32"), std::ios::binary);
    std::ifstream f2(dir2 / ("mask_00" + std::to_string(p) + ".f32"), std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    CHECK(b1.size() == static_cast<std::size_t>(g.samples()) * sizeof(float));
  }
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_SUITE_END();
