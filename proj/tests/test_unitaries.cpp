#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "mplc/unitary.hpp"

using namespace mplc;
using Complexd = std::complex<double>;

namespace {

double unitarity_defect(const Eigen::MatrixXcd& m) {
  return (m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols()))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace

TEST_SUITE_BEGIN("unitaries");

TEST_CASE("construction rejects non-unitary matrices") {
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(3, 3);
  bad(0, 0) = 1.5;
  CHECK_THROWS_AS((UnitaryMatrix{bad}), std::invalid_argument);
  CHECK_THROWS_AS((UnitaryMatrix{Eigen::MatrixXcd::Zero(2, 3)}), std::invalid_argument);
}

TEST_CASE("dft matches the closed form") {
  CHECK_THROWS_AS(dft(1), std::invalid_argument);

  const UnitaryMatrix f2 = dft(2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(f2(0, 0) - Complexd(r, 0)) < 1e-15);
  CHECK(std::abs(f2(0, 1) - Complexd(r, 0)) < 1e-15);
  CHECK(std::abs(f2(1, 0) - Complexd(r, 0)) < 1e-15);
  CHECK(std::abs(f2(1, 1) - Complexd(-r, 0)) < 1e-15);

  for (int n : {2, 3, 5, 8}) {
    const UnitaryMatrix f = dft(n);
    CHECK(unitarity_defect(f.matrix()) < 1e-12);
    CHECK((f.matrix().cwiseAbs().array() - 1.0 / std::sqrt(n)).abs().maxCoeff() < 1e-13);
    const Eigen::MatrixXcd product = f.matrix() * dft(n, true).matrix();
    CHECK((product - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("haar samples are unitary and reproducible per seed") {
  const UnitaryMatrix a = haar_random(4, 42);
  const UnitaryMatrix b = haar_random(4, 42);
  const UnitaryMatrix c = haar_random(4, 43);
  CHECK(unitarity_defect(a.matrix()) < 1e-12);
  CHECK(std::memcmp(a.matrix().data(), b.matrix().data(), sizeof(Complexd) * 16) == 0);
  CHECK((a.matrix() - c.matrix()).cwiseAbs().maxCoeff() > 1e-3);

  // samples from different seeds are not aligned
  for (std::uint64_t s = 0; s < 6; ++s) {
    const UnitaryMatrix u = haar_random(4, s);
    const UnitaryMatrix v = haar_random(4, s + 100);
    CHECK(std::abs((u.matrix().adjoint() * v.matrix()).trace()) / 4.0 < 0.9);
  }
}

TEST_CASE("haar first-entry moment matches 1/N") {
  const int n = 4;
  const int samples = 10000;
  double mean = 0.0;
  for (int s = 0; s < samples; ++s)
    mean += std::norm(haar_random(n, 1000 + static_cast<std::uint64_t>(s))(0, 0));
  mean /= samples;
  CHECK(mean == doctest::Approx(0.25).epsilon(0.04));  // 0.25 +- 0.01
}

TEST_CASE("haar N |U00|^2 follows the finite-N Porter-Thomas family") {
  // |U00|^2 ~ Beta(1, N-1), so P(N |U00|^2 <= x) = 1 - (1 - x/N)^(N-1)
  const int n = 4;
  const int samples = 10000;
  std::vector<double> draws(samples);
  for (int s = 0; s < samples; ++s)
    draws[static_cast<std::size_t>(s)] =
        n * std::norm(haar_random(n, 77000 + static_cast<std::uint64_t>(s))(0, 0));
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (std::size_t k = 0; k < draws.size(); ++k) {
    const double cdf = 1.0 - std::pow(1.0 - draws[k] / n, n - 1);
    ks = std::max({ks, (k + 1.0) / samples - cdf, cdf - static_cast<double>(k) / samples});
  }
  CHECK(ks < 0.05);
}

TEST_CASE("block_diag and phase ramps") {
  const UnitaryMatrix blocks2[] = {identity_unitary(2), identity_unitary(2)};
  CHECK((block_diag(blocks2).matrix() - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() ==
        0.0);

  const UnitaryMatrix blocks[] = {dft(2), dft(2, true)};
  const UnitaryMatrix u = block_diag(blocks);
  CHECK(unitarity_defect(u.matrix()) < 1e-12);
  CHECK(u.matrix().block(0, 2, 2, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.matrix().block(2, 0, 2, 2).cwiseAbs().maxCoeff() == 0.0);

  CHECK((input_phase_ramp(Eigen::VectorXd::Zero(3)).matrix() -
         Eigen::MatrixXcd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  Eigen::VectorXd phases(2);
  phases << 0.3, -1.2;
  const UnitaryMatrix ramp = input_phase_ramp(phases);
  CHECK(std::abs(ramp(0, 0) - std::polar(1.0, 0.3)) < 1e-15);
  CHECK(std::abs(ramp(1, 1) - std::polar(1.0, -1.2)) < 1e-15);
  CHECK(std::abs(ramp(0, 1)) == 0.0);
}

TEST_CASE("json serialization round trips bit-exactly") {
  const UnitaryMatrix u = haar_random(5, 7);
  const UnitaryMatrix v = UnitaryMatrix::from_json(u.to_json());
  CHECK(std::memcmp(u.matrix().data(), v.matrix().data(), sizeof(Complexd) * 25) == 0);
}

TEST_SUITE_END();
