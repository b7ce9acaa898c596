#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "mplc/field.hpp"
#include "mplc/modes.hpp"

namespace mplc {

// Unfolded transmissive equivalent of the SLM/mirror cavity: plane_count
// phase masks, each followed by one free-space propagation of plane_spacing.
// The output plane sits one spacing after the last mask.
struct MplcGeometry {
  Grid grid;
  double wavelength = 810e-9;
  int plane_count = 5;
  double plane_spacing = 76e-3;

  MplcGeometry() = default;
  MplcGeometry(const Grid& g, double wl, int planes, double spacing);
};

struct MaskStack {
  MplcGeometry geometry;
  std::vector<ArrayXXd> masks;  // phase in radians, values in [0, 2pi)

  MaskStack() = default;
  explicit MaskStack(const MplcGeometry& geo);  // all-zero masks
  MaskStack(MplcGeometry geo, std::vector<ArrayXXd> masks_);
};

// Effective mode-space matrix of a device together with its quality metrics.
struct TransferMatrix {
  Eigen::MatrixXcd entries;      // n_out x n_in
  double efficiency = 0.0;       // (1/n_in) sum |T_ij|^2
  double unitarity_deviation = 0.0;  // ||T^H T - efficiency*I||_F / n_in
  double max_singular_value = 0.0;
};

// Pointwise multiplication by exp(i mask). Power is conserved exactly.
ComplexField apply_mask(const ComplexField& field, const ArrayXXd& mask);

// Full forward pass: mask, propagate, ..., mask, propagate.
ComplexField mplc_forward(const ComplexField& input, const MaskStack& stack);

// Adjoint pass (conjugate masks, reversed order, negative distances); the
// reciprocity identity is overlap(mplc_forward(u), v) == overlap(u, mplc_adjoint(v)).
ComplexField mplc_adjoint(const ComplexField& output, const MaskStack& stack);

// T_ij = overlap(output_i, forward(input_j)) plus efficiency/unitarity metrics.
TransferMatrix extract_transfer_matrix(const MaskStack& stack, const ModeSet& inputs,
                                       const ModeSet& outputs);

// A .mplc bundle is a directory holding manifest.json plus one 32-bit float
// binary phase array per plane (row-major, x fastest, radians).
// creation_parameters is free-form JSON text recorded in the manifest ("{}"
// if empty).
void save_mask_stack(const MaskStack& stack, const std::filesystem::path& bundle_dir,
                     const std::string& creation_parameters = {});
MaskStack load_mask_stack(const std::filesystem::path& bundle_dir);

}  // namespace mplc
