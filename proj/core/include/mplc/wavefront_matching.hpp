#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mplc/mplc.hpp"
#include "mplc/unitary.hpp"

namespace mplc {

struct DesignOptions {
  int iterations = 30;          // paper regime: 20 to 50 sweeps
  double angle_fraction = 0.25;  // usable fraction of the maximal diffraction angle
  Eigen::VectorXd mode_weights;  // empty = uniform
  double convergence_tolerance = 1e-5;  // minimum per-iteration mean-fidelity gain
  int capacity_bound = 16;       // spot-packing limit on the default grid
};

struct DesignReport {
  std::vector<double> fidelity_trace;    // mean mode fidelity after each iteration
  Eigen::VectorXd per_mode_fidelity;     // |<target_j|forward(input_j)>|^2
  double matrix_statistical_fidelity = 0.0;  // Bhattacharyya of |T|^2 vs |U|^2/n
  double efficiency = 0.0;
  int iterations_run = 0;
  bool converged = false;

  std::string to_json() const;
};

// One wavefront-matching plane update: the phase of the weighted coherent sum
// sum_m w_m conj(forward_m) backward_m, low-pass filtered to
// angle_fraction * Nyquist before phase extraction, wrapped to [0, 2pi).
ArrayXXd update_mask(const std::vector<ComplexField>& forward_fields,
                     const std::vector<ComplexField>& backward_fields,
                     const Eigen::VectorXd& weights, double angle_fraction);

// Wavefront matching: alternating first->last / last->first plane sweeps from
// all-zero masks until the iteration budget or convergence. The effective
// target for input j is sum_k U_kj outputs[k].
std::pair<MaskStack, DesignReport> design(const ModeSet& inputs, const ModeSet& outputs,
                                          const UnitaryMatrix& target,
                                          const MplcGeometry& geometry,
                                          const DesignOptions& options = {});

// Adds a piston phase over each input spot's support on the first mask so
// that the transfer-matrix column phases match the target's. Requires
// spatially disjoint input supports.
MaskStack correct_global_phases(const MaskStack& stack, const ModeSet& inputs,
                                const ModeSet& outputs, const UnitaryMatrix& target);

// Band-limit figure of merit: for each plane, the fraction of the transmitted
// light's spectral energy (every input mode propagated to that plane and
// multiplied by its mask) inside angle_fraction * Nyquist. This is the
// spectrum the device imprints on the light; the bare screen also carries
// vortex and dark-area structure that no light ever samples.
Eigen::VectorXd band_concentration(const MaskStack& stack, const ModeSet& inputs,
                                   double angle_fraction);

}  // namespace mplc
