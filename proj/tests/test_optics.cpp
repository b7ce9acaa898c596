#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>

#include "mplc/field.hpp"
#include "mplc/modes.hpp"

using namespace mplc;

namespace {

Grid default_grid() { return Grid(256, 256, 12.5e-6); }

}  // namespace

TEST_SUITE_BEGIN("optics");

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid(8, 256, 12.5e-6), std::invalid_argument);
  CHECK_THROWS_AS(Grid(256, 255, 12.5e-6), std::invalid_argument);
  CHECK_THROWS_AS(Grid(256, 256, 0.0), std::invalid_argument);
  const Grid g = default_grid();
  CHECK(g.x(g.nx / 2) == 0.0);
  CHECK(g.y(g.ny / 2) == 0.0);
  CHECK(g.fx(0) == 0.0);
  CHECK(g.fx(g.nx / 2) == doctest::Approx(-g.nyquist()));
}

TEST_CASE("centered gaussian spot is normalized with peak at center") {
  const Grid g = default_grid();
  const ComplexField spot = gaussian_spot(g, 0.0, 0.0, 150e-6);
  CHECK(spot.power() == doctest::Approx(1.0).epsilon(1e-9));
  Eigen::Index peak_x = 0, peak_y = 0;
  spot.amplitude.abs().maxCoeff(&peak_x, &peak_y);
  CHECK(peak_x == g.nx / 2);
  CHECK(peak_y == g.ny / 2);
}

TEST_CASE("displaced equal-waist spots follow the closed-form overlap") {
  // For amplitude exp(-r^2/w^2) the analytic overlap of two spots a distance
  // s apart is exp(-s^2 / (2 w^2)).
  const Grid g = default_grid();
  const double w = 150e-6;
  for (const double s : {2.0 * w, 4.0 * w}) {
    const ComplexField u = gaussian_spot(g, 0.0, s / 2.0, w);
    const ComplexField v = gaussian_spot(g, 0.0, -s / 2.0, w);
    const double expected = std::exp(-s * s / (2.0 * w * w));
    CHECK(std::abs(overlap(u, v)) == doctest::Approx(expected).epsilon(1e-6));
  }
  // s = 4w lands at exp(-8), which keeps the default 4-waist column spacing
  // below the 1e-3 crosstalk budget
  CHECK(std::exp(-8.0) < 1e-3);
}

TEST_CASE("spot preconditions") {
  const Grid g = default_grid();
  CHECK_THROWS_AS(gaussian_spot(g, 0.0, 0.0, 1.9 * g.pitch), std::invalid_argument);
  const double w = 12.0 * g.pitch;
  const double edge = g.width() / 2.0;
  CHECK_THROWS_AS(gaussian_spot(g, edge - w, 0.0, w), std::invalid_argument);
}

TEST_CASE("overlap is hermitian and bounded") {
  const Grid g = default_grid();
  const ComplexField u = gaussian_spot(g, 0.0, 200e-6, 150e-6);
  ComplexField v = gaussian_spot(g, 0.0, -100e-6, 150e-6);
  v.amplitude *= Complex(0.0, 1.0);  // quarter-wave global phase keeps it complex
  v.normalize();

  CHECK(std::abs(overlap(u, u) - 1.0) < 1e-9);
  const Complex uv = overlap(u, v);
  const Complex vu = overlap(v, u);
  CHECK(std::abs(uv - std::conj(vu)) < 1e-12);
  CHECK(std::abs(uv) <= 1.0 + 1e-9);

  const Grid other(128, 128, 12.5e-6);
  CHECK_THROWS_AS(overlap(u, gaussian_spot(other, 0.0, 0.0, 150e-6)), std::invalid_argument);
}

TEST_CASE("superpose reproduces single modes and DFT orthogonality") {
  const Grid g = default_grid();
  // 6-waist spacing keeps residual overlaps ~exp(-18), i.e. orthonormal to
  // the 1e-6 power tolerance exercised here
  ModeSet spots = spot_column(g, 3, 150e-6, 900e-6);

  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(3);
  e0(0) = 1.0;
  const ComplexField first = superpose(spots, e0);
  CHECK((first.amplitude - spots[0].amplitude).abs().maxCoeff() < 1e-14);

  const Complex omega = std::polar(1.0, 2.0 * M_PI / 3.0);
  Eigen::VectorXcd row1(3), row2(3);
  for (int m = 0; m < 3; ++m) {
    row1(m) = std::pow(omega, m) / std::sqrt(3.0);
    row2(m) = std::pow(omega, 2 * m) / std::sqrt(3.0);
  }
  const ComplexField f1 = superpose(spots, row1);
  const ComplexField f2 = superpose(spots, row2);
  CHECK(f1.power() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(overlap(f1, f2)) < 1e-6);

  Eigen::VectorXcd wrong(2);
  wrong << 1.0, 0.0;
  CHECK_THROWS_AS(superpose(spots, wrong), std::invalid_argument);
}

TEST_CASE("superpose is linear") {
  const Grid g(128, 128, 12.5e-6);
  ModeSet spots = spot_column(g, 2, 100e-6, 400e-6);
  Eigen::VectorXcd c1(2), c2(2);
  c1 << Complex(0.3, 0.1), Complex(-0.2, 0.7);
  c2 << Complex(-1.1, 0.4), Complex(0.5, -0.3);
  const Complex alpha(0.6, -0.2), beta(1.3, 0.9);

  const ComplexField lhs = superpose(spots, alpha * c1 + beta * c2);
  const ComplexField rhs(g, alpha * superpose(spots, c1).amplitude +
                                beta * superpose(spots, c2).amplitude);
  const double scale = rhs.amplitude.abs().maxCoeff();
  CHECK((lhs.amplitude - rhs.amplitude).abs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("default spot column stays below the crosstalk budget") {
  ModeSet spots = spot_column(default_grid(), 4, 150e-6, 600e-6);
  CHECK(spots.max_crosstalk() < 1e-3);
  for (int k = 0; k < spots.size(); ++k)
    CHECK(spots[k].power() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cfd round trip is bit exact") {
  const Grid g(64, 64, 10e-6);
  ComplexField field = gaussian_spot(g, 50e-6, -80e-6, 60e-6);
  field.amplitude *= Complex(0.8, 0.6);

  const auto path = std::filesystem::temp_directory_path() / "mplc_test_field.cfd";
  save_cfd(field, path);
  const ComplexField loaded = load_cfd(path);
  REQUIRE(loaded.grid == field.grid);
  CHECK(std::memcmp(loaded.amplitude.data(), field.amplitude.data(),
                    sizeof(Complex) * static_cast<std::size_t>(g.samples())) == 0);
  std::filesystem::remove(path);
}

TEST_SUITE_END();
