#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace mplc {

// Square complex matrix verified unitary at construction
// (max-norm ||U^H U - I|| < 1e-12).
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Eigen::MatrixXcd entries);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::complex<double> operator()(int i, int j) const { return matrix_(i, j); }

  std::string to_json() const;
  static UnitaryMatrix from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static UnitaryMatrix load(const std::filesystem::path& path);

 private:
  Eigen::MatrixXcd matrix_;
};

UnitaryMatrix identity_unitary(int n);

// DFT matrix, entry (j, m) = omega^{+-j m} / sqrt(N) with omega = exp(2 pi i / N)
// and zero-based indices; conjugated selects the minus sign.
UnitaryMatrix dft(int n, bool conjugated = false);

// Haar-distributed unitary: complex Ginibre draw, QR factorization, then the
// R diagonal phases folded into Q. RNG is std::mt19937_64 driving an explicit
// Box-Muller transform, so samples are reproducible bit-for-bit per seed on
// any conforming platform.
UnitaryMatrix haar_random(int n, std::uint64_t seed);

UnitaryMatrix block_diag(std::span<const UnitaryMatrix> blocks);

// diag(exp(i phases[m])).
UnitaryMatrix input_phase_ramp(const Eigen::VectorXd& phases);

}  // namespace mplc
