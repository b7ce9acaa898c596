#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mplc/field.hpp"

namespace mplc {

// Ordered set of normalized fields sharing one grid.
class ModeSet {
 public:
  ModeSet() = default;

  // Appends a copy of the field, normalized. Grids must match across members.
  void add(ComplexField field, std::string label = {});

  int size() const { return static_cast<int>(modes_.size()); }
  bool empty() const { return modes_.empty(); }
  const Grid& grid() const;
  const ComplexField& operator[](int i) const { return modes_.at(i); }
  const std::string& label(int i) const { return labels_.at(i); }
  const std::vector<ComplexField>& fields() const { return modes_; }

  // Largest |<u_i|u_j>| over i != j (0 for fewer than two modes).
  double max_crosstalk() const;

 private:
  std::vector<ComplexField> modes_;
  std::vector<std::string> labels_;
};

// Normalized Gaussian spot exp(-r^2 / waist^2) centered at (cx, cy).
// Rejects under-resolved waists (< 2 pitch) and spots whose 3-waist support
// leaves the grid.
ComplexField gaussian_spot(const Grid& grid, double cx, double cy, double waist);

// Linear combination sum_k coefficients[k] * modes[k].
ComplexField superpose(const ModeSet& modes, const Eigen::VectorXcd& coefficients);

// Equally spaced vertical column of n spots centered on the y axis, ordered
// top to bottom. Enforces the pairwise-crosstalk tolerance of a spot basis.
ModeSet spot_column(const Grid& grid, int n, double waist, double spacing,
                    double crosstalk_tolerance = 1e-3);

}  // namespace mplc
