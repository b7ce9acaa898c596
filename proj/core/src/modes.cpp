#include "mplc/modes.hpp"

#include <cmath>
#include <stdexcept>

namespace mplc {

void ModeSet::add(ComplexField field, std::string label) {
  if (!modes_.empty() && field.grid != modes_.front().grid)
    throw std::invalid_argument("ModeSet::add: grid mismatch");
  field.normalize();
  modes_.push_back(std::move(field));
  labels_.push_back(std::move(label));
}

const Grid& ModeSet::grid() const {
  if (modes_.empty()) throw std::logic_error("ModeSet::grid: empty set");
  return modes_.front().grid;
}

double ModeSet::max_crosstalk() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < modes_.size(); ++i)
    for (std::size_t j = i + 1; j < modes_.size(); ++j)
      worst = std::max(worst, std::abs(overlap(modes_[i], modes_[j])));
  return worst;
}

ComplexField gaussian_spot(const Grid& grid, double cx, double cy, double waist) {
  if (waist < 2.0 * grid.pitch)
    throw std::invalid_argument("gaussian_spot: waist under-resolved (< 2 pixels)");
  const double half_w = grid.width() / 2.0;
  const double half_h = grid.height() / 2.0;
  if (cx - 3.0 * waist < -half_w || cx + 3.0 * waist > half_w - grid.pitch ||
      cy - 3.0 * waist < -half_h || cy + 3.0 * waist > half_h - grid.pitch)
    throw std::invalid_argument("gaussian_spot: spot clipped by grid edge");

  ArrayXXcd amp(grid.nx, grid.ny);
  const double inv_w2 = 1.0 / (waist * waist);
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double dy = grid.y(iy) - cy;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double dx = grid.x(ix) - cx;
      amp(ix, iy) = std::exp(-(dx * dx + dy * dy) * inv_w2);
    }
  }
  ComplexField field(grid, std::move(amp));
  field.normalize();
  return field;
}

ComplexField superpose(const ModeSet& modes, const Eigen::VectorXcd& coefficients) {
  if (coefficients.size() != modes.size())
    throw std::invalid_argument("superpose: coefficient count != mode count");
  if (modes.empty()) throw std::invalid_argument("superpose: empty mode set");
  ArrayXXcd amp = ArrayXXcd::Zero(modes.grid().nx, modes.grid().ny);
  for (int k = 0; k < modes.size(); ++k) amp += coefficients[k] * modes[k].amplitude;
  return ComplexField(modes.grid(), std::move(amp));
}

ModeSet spot_column(const Grid& grid, int n, double waist, double spacing,
                    double crosstalk_tolerance) {
  if (n < 1) throw std::invalid_argument("spot_column: need at least one spot");
  ModeSet set;
  for (int k = 0; k < n; ++k) {
    const double cy = (0.5 * (n - 1) - k) * spacing;  // top to bottom
    set.add(gaussian_spot(grid, 0.0, cy, waist), "spot" + std::to_string(k + 1));
  }
  if (set.max_crosstalk() > crosstalk_tolerance)
    throw std::invalid_argument("spot_column: spot crosstalk exceeds tolerance");
  return set;
}

}  // namespace mplc
