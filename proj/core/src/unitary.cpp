#include "mplc/unitary.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mplc {

using nlohmann::json;

UnitaryMatrix::UnitaryMatrix(Eigen::MatrixXcd entries) : matrix_(std::move(entries)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1)
    throw std::invalid_argument("UnitaryMatrix: matrix must be square and non-empty");
  const Eigen::MatrixXcd defect =
      matrix_.adjoint() * matrix_ - Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols());
  if (defect.cwiseAbs().maxCoeff() >= 1e-12)
    throw std::invalid_argument("UnitaryMatrix: matrix is not unitary to 1e-12");
}

std::string UnitaryMatrix::to_json() const {
  json j;
  j["n"] = dim();
  json rows = json::array();
  for (int r = 0; r < dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < dim(); ++c) row.push_back({matrix_(r, c).real(), matrix_(r, c).imag()});
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j.dump(2);
}

UnitaryMatrix UnitaryMatrix::from_json(const std::string& text) {
  json j = json::parse(text);
  const int n = j.at("n").get<int>();
  Eigen::MatrixXcd m(n, n);
  const auto& rows = j.at("entries");
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m(r, c) = std::complex<double>(rows.at(r).at(c).at(0).get<double>(),
                                     rows.at(r).at(c).at(1).get<double>());
  return UnitaryMatrix(std::move(m));
}

void UnitaryMatrix::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("UnitaryMatrix::save: cannot open " + path.string());
  out << to_json() << "\n";
}

UnitaryMatrix UnitaryMatrix::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("UnitaryMatrix::load: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

UnitaryMatrix identity_unitary(int n) {
  return UnitaryMatrix(Eigen::MatrixXcd::Identity(n, n));
}

UnitaryMatrix dft(int n, bool conjugated) {
  if (n < 2) throw std::invalid_argument("dft: dimension must be >= 2");
  Eigen::MatrixXcd m(n, n);
  const double sign = conjugated ? -1.0 : 1.0;
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      m(j, k) = std::polar(norm, sign * 2.0 * M_PI * j * k / n);
  return UnitaryMatrix(std::move(m));
}

namespace {

// Uniform in (0, 1]: 53 mantissa bits of the engine output.
double uniform_open0(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller pair; spelled out so the sequence is engine-defined and
// identical across standard libraries.
std::complex<double> standard_complex_normal(std::mt19937_64& rng) {
  const double u1 = uniform_open0(rng);
  const double u2 = uniform_open0(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * M_PI * u2;
  // variance 1/2 per quadrature: standard complex normal
  return {r * std::cos(t) / std::numbers::sqrt2, r * std::sin(t) / std::numbers::sqrt2};
}

}  // namespace

UnitaryMatrix haar_random(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("haar_random: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXcd ginibre(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) ginibre(r, c) = standard_complex_normal(rng);

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::VectorXcd r_diag = qr.matrixQR().diagonal();
  for (int c = 0; c < n; ++c) {
    const double mag = std::abs(r_diag(c));
    // Folding the R phases into Q makes the law exactly Haar
    q.col(c) *= (mag > 0.0) ? r_diag(c) / mag : std::complex<double>(1.0, 0.0);
  }
  return UnitaryMatrix(std::move(q));
}

UnitaryMatrix block_diag(std::span<const UnitaryMatrix> blocks) {
  if (blocks.empty()) throw std::invalid_argument("block_diag: need at least one block");
  int total = 0;
  for (const auto& b : blocks) total += b.dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total, total);
  int offset = 0;
  for (const auto& b : blocks) {
    m.block(offset, offset, b.dim(), b.dim()) = b.matrix();
    offset += b.dim();
  }
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix input_phase_ramp(const Eigen::VectorXd& phases) {
  if (phases.size() < 1) throw std::invalid_argument("input_phase_ramp: empty phase vector");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(phases.size(), phases.size());
  for (int k = 0; k < phases.size(); ++k) m(k, k) = std::polar(1.0, phases(k));
  return UnitaryMatrix(std::move(m));
}

}  // namespace mplc
