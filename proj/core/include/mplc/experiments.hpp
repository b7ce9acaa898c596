#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mplc/certification.hpp"
#include "mplc/fiber_modes.hpp"
#include "mplc/mplc.hpp"
#include "mplc/two_photon.hpp"
#include "mplc/wavefront_matching.hpp"

namespace mplc {

inline constexpr const char* kRunSchemaVersion = "mplc-run/1";

// Everything a reproducible run needs; serializes to the published JSON
// config schema and is copied verbatim into each run's output directory.
struct ExperimentConfig {
  // grid
  int nx = 256;
  int ny = 256;
  double pitch = 12.5e-6;
  // geometry
  double wavelength = 810e-9;
  int plane_count = 5;
  double plane_spacing = 76e-3;
  // spot layout
  double spot_waist = 150e-6;
  double spot_spacing = 600e-6;
  // designer
  DesignOptions designer;
  // experiment parameters
  int dimension = 2;        // local dimension d for certify / phase-scan
  int haar_modes = 4;
  int haar_count = 50;
  int phase_samples = 13;   // 1D scan sample count (inclusive span of 2 pi)
  int scan_resolution = 24; // 2D scan samples per axis
  std::vector<int> planes_list = {1, 2, 3, 5, 7, 10};
  int samples_per_point = 20;
  bool include_bunched = false;
  FiberSpec fiber;
  // run controls
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  bool matrix_level = false;

  Grid grid() const { return Grid(nx, ny, pitch); }
  MplcGeometry geometry() const {
    return MplcGeometry(grid(), wavelength, plane_count, plane_spacing);
  }
  MplcGeometry geometry_with_planes(int planes) const {
    return MplcGeometry(grid(), wavelength, planes, plane_spacing);
  }
  int effective_threads() const;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static ExperimentConfig load(const std::filesystem::path& path);
};

// Column of 2d certification spots: photon A on the upper d, photon B on the
// lower d, top to bottom.
ModeSet certification_spots(const ExperimentConfig& config, int d);

// Measurement targets for the certification tasks.
UnitaryMatrix standard_basis_target(int d);               // block_diag(I_d, I_d)
UnitaryMatrix mub_target(int d, bool conjugate_b = true); // block_diag(dft, dft*)

struct DesignTask {
  std::string name;        // identity | dft | haar
  UnitaryMatrix target;
  ModeSet inputs;
  ModeSet outputs;
};

DesignTask make_design_task(const ExperimentConfig& config, const std::string& name);

struct DesignRun {
  MaskStack stack;
  DesignReport report;
  TransferMatrix transfer;
};

// design + global-phase correction + extraction, the full device recipe.
DesignRun design_device(const ExperimentConfig& config, const ModeSet& inputs,
                        const ModeSet& outputs, const UnitaryMatrix& target,
                        int planes_override = 0);

struct CertificationRun {
  CertificationExperiment experiment;
  double efficiency_std = 1.0;
  double efficiency_mub = 1.0;
};

CertificationRun run_certification(const ExperimentConfig& config);

struct PhaseScanRun {
  // 1D scan (d == 2): row k = phi, then P(a,b) row-major over d x d pairs.
  // 2D scan (d == 3): row k = phi1, phi2, then the d x d pair block.
  std::vector<std::vector<double>> rows;
  std::vector<std::string> columns;
  Eigen::VectorXd pair_visibility;  // per (a, b) pair, row-major
  double mean_visibility = 0.0;
};

PhaseScanRun run_phase_scan(const ExperimentConfig& config);

struct HaarBenchRun {
  Eigen::VectorXd statistical_fidelity;  // per unitary
  Eigen::VectorXd efficiency;            // per unitary (1 at matrix level)
  Eigen::VectorXd pooled_normalized;     // pooled coincidences / pooled mean
  PorterThomasResult porter_thomas;
  double mean_fs = 0.0;
  double std_fs = 0.0;
};

HaarBenchRun run_haar_bench(const ExperimentConfig& config, double pt_threshold = 0.1);

struct PlanesSweepPoint {
  int planes = 0;
  double mean_fs = 0.0;
  double std_fs = 0.0;
};

std::vector<PlanesSweepPoint> run_planes_sweep(const ExperimentConfig& config);

struct ModeConvertRun {
  DesignReport report;
  double spot_overlap_a1 = 0.0;  // |<A1 out|forward(A1 in)>|^2, renormalized
  double spot_overlap_a2 = 0.0;
  double lp01_overlap = 0.0;     // renormalized per-mode conversion fidelity
  double lp11_overlap = 0.0;
  Eigen::MatrixXd conditional_table;  // P(a, b) over A spots x LP modes
  double crosstalk_a1 = 0.0;     // P(LP11 | A1)
  double crosstalk_a2 = 0.0;     // P(LP01 | A2)
  ComplexField conditional_field_a1;  // B-side output given a detection at A1
  ComplexField conditional_field_a2;
};

ModeConvertRun run_mode_convert(const ExperimentConfig& config);

struct EfficiencyRun {
  Eigen::VectorXd efficiency;
  double mean = 0.0;
  double stddev = 0.0;
  double max_singular_value = 0.0;
};

EfficiencyRun run_efficiency(const ExperimentConfig& config);

// Deterministically formatted TSV (%.17g): '#'-prefixed comment lines, one
// header row, then the data rows.
void write_table(const std::filesystem::path& path,
                 const std::vector<std::string>& comments,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows);

}  // namespace mplc
