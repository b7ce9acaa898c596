#include "mplc/experiments.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "mplc/parallel.hpp"
#include "mplc/propagation.hpp"

namespace mplc {

using nlohmann::json;

int ExperimentConfig::effective_threads() const {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["schema"] = kRunSchemaVersion;
  j["grid"] = {{"nx", nx}, {"ny", ny}, {"pitch", pitch}};
  j["geometry"] = {{"wavelength", wavelength},
                   {"plane_count", plane_count},
                   {"plane_spacing", plane_spacing}};
  j["spots"] = {{"waist", spot_waist}, {"spacing", spot_spacing}};
  j["designer"] = {{"iterations", designer.iterations},
                   {"angle_fraction", designer.angle_fraction},
                   {"convergence_tolerance", designer.convergence_tolerance},
                   {"capacity_bound", designer.capacity_bound}};
  j["experiment"] = {{"dimension", dimension},
                     {"haar_modes", haar_modes},
                     {"haar_count", haar_count},
                     {"phase_samples", phase_samples},
                     {"scan_resolution", scan_resolution},
                     {"planes_list", planes_list},
                     {"samples_per_point", samples_per_point},
                     {"include_bunched", include_bunched}};
  j["fiber"] = {{"core_radius", fiber.core_radius},
                {"numerical_aperture", fiber.numerical_aperture},
                {"wavelength", fiber.wavelength},
                {"render_scale", fiber.render_scale}};
  j["run"] = {{"seed", seed}, {"threads", threads}, {"matrix_level", matrix_level}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.nx = g.value("nx", c.nx);
    c.ny = g.value("ny", c.ny);
    c.pitch = g.value("pitch", c.pitch);
  }
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    c.wavelength = g.value("wavelength", c.wavelength);
    c.plane_count = g.value("plane_count", c.plane_count);
    c.plane_spacing = g.value("plane_spacing", c.plane_spacing);
  }
  if (j.contains("spots")) {
    const auto& s = j.at("spots");
    c.spot_waist = s.value("waist", c.spot_waist);
    c.spot_spacing = s.value("spacing", c.spot_spacing);
  }
  if (j.contains("designer")) {
    const auto& d = j.at("designer");
    c.designer.iterations = d.value("iterations", c.designer.iterations);
    c.designer.angle_fraction = d.value("angle_fraction", c.designer.angle_fraction);
    c.designer.convergence_tolerance =
        d.value("convergence_tolerance", c.designer.convergence_tolerance);
    c.designer.capacity_bound = d.value("capacity_bound", c.designer.capacity_bound);
  }
  if (j.contains("experiment")) {
    const auto& e = j.at("experiment");
    c.dimension = e.value("dimension", c.dimension);
    c.haar_modes = e.value("haar_modes", c.haar_modes);
    c.haar_count = e.value("haar_count", c.haar_count);
    c.phase_samples = e.value("phase_samples", c.phase_samples);
    c.scan_resolution = e.value("scan_resolution", c.scan_resolution);
    if (e.contains("planes_list")) c.planes_list = e.at("planes_list").get<std::vector<int>>();
    c.samples_per_point = e.value("samples_per_point", c.samples_per_point);
    c.include_bunched = e.value("include_bunched", c.include_bunched);
  }
  if (j.contains("fiber")) {
    const auto& f = j.at("fiber");
    c.fiber.core_radius = f.value("core_radius", c.fiber.core_radius);
    c.fiber.numerical_aperture = f.value("numerical_aperture", c.fiber.numerical_aperture);
    c.fiber.wavelength = f.value("wavelength", c.fiber.wavelength);
    c.fiber.render_scale = f.value("render_scale", c.fiber.render_scale);
  }
  if (j.contains("run")) {
    const auto& r = j.at("run");
    c.seed = r.value("seed", c.seed);
    c.threads = r.value("threads", c.threads);
    c.matrix_level = r.value("matrix_level", c.matrix_level);
  }
  return c;
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("ExperimentConfig::save: cannot open " + path.string());
  out << to_json() << "\n";
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ExperimentConfig::load: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

ModeSet certification_spots(const ExperimentConfig& config, int d) {
  return spot_column(config.grid(), 2 * d, config.spot_waist, config.spot_spacing);
}

UnitaryMatrix standard_basis_target(int d) {
  return identity_unitary(2 * d);
}

UnitaryMatrix mub_target(int d, bool conjugate_b) {
  const UnitaryMatrix blocks[2] = {dft(d, false), dft(d, conjugate_b)};
  return block_diag(blocks);
}

DesignTask make_design_task(const ExperimentConfig& config, const std::string& name) {
  if (name == "identity" || name == "dft") {
    const int d = config.dimension;
    ModeSet spots = certification_spots(config, d);
    UnitaryMatrix target = (name == "identity") ? standard_basis_target(d) : mub_target(d);
    return DesignTask{name, std::move(target), spots, spots};
  }
  if (name == "haar") {
    ModeSet spots = spot_column(config.grid(), config.haar_modes, config.spot_waist,
                                config.spot_spacing);
    return DesignTask{name, haar_random(config.haar_modes, config.seed), spots, spots};
  }
  throw std::invalid_argument("make_design_task: unknown task '" + name + "'");
}

DesignRun design_device(const ExperimentConfig& config, const ModeSet& inputs,
                        const ModeSet& outputs, const UnitaryMatrix& target,
                        int planes_override) {
  const MplcGeometry geo = planes_override > 0 ? config.geometry_with_planes(planes_override)
                                               : config.geometry();
  DesignRun run;
  auto [stack, report] = design(inputs, outputs, target, geo, config.designer);
  run.stack = correct_global_phases(stack, inputs, outputs, target);
  run.report = std::move(report);
  run.transfer = extract_transfer_matrix(run.stack, inputs, outputs);
  return run;
}

namespace {

TwoPhotonState entangled_input(int d) { return pixel_entangled_state(d); }

std::vector<int> block_indices(int d, int offset) {
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) idx[static_cast<std::size_t>(k)] = offset + k;
  return idx;
}

double grid_visibility(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return (*hi + *lo) > 0.0 ? (*hi - *lo) / (*hi + *lo) : 0.0;
}

}  // namespace

CertificationRun run_certification(const ExperimentConfig& config) {
  const int d = config.dimension;
  const TwoPhotonState state = entangled_input(d);
  CertificationRun run;
  if (config.matrix_level) {
    run.experiment = certify_from_transfer(standard_basis_target(d).matrix(),
                                           mub_target(d).matrix(), state, d);
    run.experiment.result.inputs_digest = "matrix-level;exact targets";
    return run;
  }
  const ModeSet spots = certification_spots(config, d);
  DesignRun designs[2];
  const UnitaryMatrix targets[2] = {standard_basis_target(d), mub_target(d)};
  parallel_for(2, std::min(config.effective_threads(), 2), [&](int i) {
    designs[i] = design_device(config, spots, spots, targets[i]);
  });
  run.experiment = certify_from_transfer(designs[0].transfer.entries,
                                         designs[1].transfer.entries, state, d);
  run.experiment.result.inputs_digest = "simulated-mplc;post-selected cross-block tables";
  run.efficiency_std = designs[0].transfer.efficiency;
  run.efficiency_mub = designs[1].transfer.efficiency;
  return run;
}

PhaseScanRun run_phase_scan(const ExperimentConfig& config) {
  const int d = config.dimension;
  if (d < 2) throw std::invalid_argument("run_phase_scan: dimension must be >= 2");

  Eigen::MatrixXcd t_mub;
  if (config.matrix_level) {
    t_mub = mub_target(d).matrix();
  } else {
    const ModeSet spots = certification_spots(config, d);
    t_mub = design_device(config, spots, spots, mub_target(d)).transfer.entries;
  }

  const std::vector<int> a_modes = block_indices(d, 0);
  const std::vector<int> b_modes = block_indices(d, d);
  PhaseScanRun run;

  const auto table_for = [&](const Eigen::VectorXd& phases) {
    const TwoPhotonState state = pixel_entangled_state(d, phases);
    return coincidences_cross_block(evolve(state, t_mub), a_modes, b_modes);
  };

  if (d == 2) {
    const int samples = std::max(config.phase_samples, 8);
    run.columns = {"phi"};
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        run.columns.push_back("P_" + std::to_string(a + 1) + std::to_string(b + 1));
    Eigen::VectorXd phis(samples);
    Eigen::MatrixXd rates(samples, d * d);
    for (int k = 0; k < samples; ++k) {
      const double phi = 2.0 * M_PI * k / (samples - 1);  // inclusive 2 pi span
      phis(k) = phi;
      Eigen::VectorXd state_phases = Eigen::VectorXd::Zero(d);
      state_phases(1) = phi;
      const CoincidenceTable table = table_for(state_phases);
      std::vector<double> row{phi};
      for (int c = 0; c < d * d; ++c) {
        rates(k, c) = table.entries[static_cast<std::size_t>(c)].probability;
        row.push_back(rates(k, c));
      }
      run.rows.push_back(std::move(row));
    }
    run.pair_visibility.resize(d * d);
    for (int c = 0; c < d * d; ++c)
      run.pair_visibility(c) = fringe_visibility(phis, rates.col(c)).visibility;
  } else {
    // two scanned phases on input modes 2 and 3
    const int res = std::max(config.scan_resolution, 8);
    run.columns = {"phi1", "phi2"};
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        run.columns.push_back("P_" + std::to_string(a + 1) + std::to_string(b + 1));
    std::vector<std::vector<double>> per_pair(static_cast<std::size_t>(d * d));
    for (int k1 = 0; k1 < res; ++k1) {
      for (int k2 = 0; k2 < res; ++k2) {
        const double phi1 = 2.0 * M_PI * k1 / res;
        const double phi2 = 2.0 * M_PI * k2 / res;
        Eigen::VectorXd state_phases = Eigen::VectorXd::Zero(d);
        state_phases(1) = phi1;
        state_phases(2) = phi2;
        const CoincidenceTable table = table_for(state_phases);
        std::vector<double> row{phi1, phi2};
        for (int c = 0; c < d * d; ++c) {
          const double p = table.entries[static_cast<std::size_t>(c)].probability;
          per_pair[static_cast<std::size_t>(c)].push_back(p);
          row.push_back(p);
        }
        run.rows.push_back(std::move(row));
      }
    }
    run.pair_visibility.resize(d * d);
    for (int c = 0; c < d * d; ++c)
      run.pair_visibility(c) = grid_visibility(per_pair[static_cast<std::size_t>(c)]);
  }
  run.mean_visibility = run.pair_visibility.mean();
  return run;
}

HaarBenchRun run_haar_bench(const ExperimentConfig& config, double pt_threshold) {
  const int n = config.haar_modes;
  if (n % 2 != 0) throw std::invalid_argument("run_haar_bench: haar_modes must be even");
  const int count = config.haar_count;
  if (count < 1) throw std::invalid_argument("run_haar_bench: haar_count must be >= 1");
  const TwoPhotonState state = entangled_input(n / 2);

  ModeSet spots;
  if (!config.matrix_level)
    spots = spot_column(config.grid(), n, config.spot_waist, config.spot_spacing);

  HaarBenchRun run;
  run.statistical_fidelity.resize(count);
  run.efficiency.resize(count);
  std::vector<std::vector<double>> per_run(static_cast<std::size_t>(count));

  parallel_for(count, config.effective_threads(), [&](int i) {
    const UnitaryMatrix target = haar_random(n, mix_seed(config.seed, static_cast<std::uint64_t>(i)));
    Eigen::MatrixXcd transfer;
    double efficiency = 1.0;
    if (config.matrix_level) {
      transfer = target.matrix();
    } else {
      const DesignRun device = design_device(config, spots, spots, target);
      transfer = device.transfer.entries;
      efficiency = device.transfer.efficiency;
    }
    const CoincidenceTable p_sim =
        coincidences_all_pairs(evolve(state, transfer), config.include_bunched);
    const CoincidenceTable p_th =
        coincidences_all_pairs(evolve(state, target.matrix()), config.include_bunched);
    run.statistical_fidelity(i) = statistical_fidelity(p_sim, p_th);
    run.efficiency(i) = efficiency;
    auto& pooled = per_run[static_cast<std::size_t>(i)];
    pooled.reserve(p_sim.entries.size());
    for (const auto& e : p_sim.entries) pooled.push_back(e.probability);
  });

  std::vector<double> pooled;
  for (const auto& chunk : per_run) pooled.insert(pooled.end(), chunk.begin(), chunk.end());
  Eigen::VectorXd samples = Eigen::Map<Eigen::VectorXd>(pooled.data(),
                                                        static_cast<Eigen::Index>(pooled.size()));
  samples /= samples.mean();
  run.pooled_normalized = samples;
  run.porter_thomas = porter_thomas_test(samples, pt_threshold);

  run.mean_fs = run.statistical_fidelity.mean();
  run.std_fs = count > 1
                   ? std::sqrt((run.statistical_fidelity.array() - run.mean_fs).square().sum() /
                               (count - 1))
                   : 0.0;
  return run;
}

std::vector<PlanesSweepPoint> run_planes_sweep(const ExperimentConfig& config) {
  const int n = config.haar_modes;
  const int samples = config.samples_per_point;
  const TwoPhotonState state = entangled_input(n / 2);
  const ModeSet spots =
      spot_column(config.grid(), n, config.spot_waist, config.spot_spacing);

  std::vector<PlanesSweepPoint> points;
  for (int planes : config.planes_list) {
    Eigen::VectorXd fs(samples);
    parallel_for(samples, config.effective_threads(), [&](int i) {
      const UnitaryMatrix target =
          haar_random(n, mix_seed(config.seed, static_cast<std::uint64_t>(i)));
      const DesignRun device = design_device(config, spots, spots, target, planes);
      const CoincidenceTable p_sim = coincidences_all_pairs(
          evolve(state, device.transfer.entries), config.include_bunched);
      const CoincidenceTable p_th =
          coincidences_all_pairs(evolve(state, target.matrix()), config.include_bunched);
      fs(i) = statistical_fidelity(p_sim, p_th);
    });
    PlanesSweepPoint point;
    point.planes = planes;
    point.mean_fs = fs.mean();
    point.std_fs =
        samples > 1 ? std::sqrt((fs.array() - point.mean_fs).square().sum() / (samples - 1)) : 0.0;
    points.push_back(point);
  }
  return points;
}

ModeConvertRun run_mode_convert(const ExperimentConfig& config) {
  const Grid grid = config.grid();
  const ModeSet inputs = spot_column(grid, 4, config.spot_waist, config.spot_spacing);

  // Output basis: Alice keeps her two spots, Bob's side becomes LP01/LP11
  // rendered around the center of the lower block.
  const double lp_center_y = -config.spot_spacing;
  ModeSet outputs;
  outputs.add(inputs[0], "A1");
  outputs.add(inputs[1], "A2");
  outputs.add(lp_field(config.fiber, 0, 1, LpOrientation::cos, grid, 0.0, lp_center_y), "LP01");
  outputs.add(lp_field(config.fiber, 1, 1, LpOrientation::cos, grid, 0.0, lp_center_y), "LP11");

  ModeConvertRun run;
  const DesignRun device = design_device(config, inputs, outputs, identity_unitary(4));
  run.report = device.report;

  const auto renormalized_overlap = [&](int out_index, int in_index) {
    const ComplexField out = mplc_forward(inputs[in_index], device.stack);
    return std::norm(overlap(outputs[out_index], out)) / out.power();
  };
  run.spot_overlap_a1 = renormalized_overlap(0, 0);
  run.spot_overlap_a2 = renormalized_overlap(1, 1);
  run.lp01_overlap = renormalized_overlap(2, 2);
  run.lp11_overlap = renormalized_overlap(3, 3);

  const TwoPhotonState state = entangled_input(2);
  const TwoPhotonState evolved = evolve(state, device.transfer.entries);
  const CoincidenceTable table = coincidences_cross_block(evolved, {0, 1}, {2, 3});
  run.conditional_table = table.cross_block_matrix(2, 2);
  run.crosstalk_a1 = run.conditional_table(0, 1) /
                     (run.conditional_table(0, 0) + run.conditional_table(0, 1));
  run.crosstalk_a2 = run.conditional_table(1, 0) /
                     (run.conditional_table(1, 0) + run.conditional_table(1, 1));

  // Bob's conditional output field given a click in Alice's spot a:
  // sum_q (T c)_{a q} forward(u_q)
  const Eigen::MatrixXcd tc = device.transfer.entries * state.coeff;
  for (int a = 0; a < 2; ++a) {
    const Eigen::VectorXcd w = tc.row(a).transpose();
    ComplexField conditional = mplc_forward(superpose(inputs, w), device.stack);
    conditional.normalize();
    (a == 0 ? run.conditional_field_a1 : run.conditional_field_a2) = std::move(conditional);
  }
  return run;
}

EfficiencyRun run_efficiency(const ExperimentConfig& config) {
  const int count = config.haar_count;
  const int n = config.haar_modes;
  const ModeSet spots =
      spot_column(config.grid(), n, config.spot_waist, config.spot_spacing);

  EfficiencyRun run;
  run.efficiency.resize(count);
  Eigen::VectorXd max_sv(count);
  parallel_for(count, config.effective_threads(), [&](int i) {
    const UnitaryMatrix target =
        haar_random(n, mix_seed(config.seed, static_cast<std::uint64_t>(i)));
    const DesignRun device = design_device(config, spots, spots, target);
    run.efficiency(i) = device.transfer.efficiency;
    max_sv(i) = device.transfer.max_singular_value;
  });
  run.mean = run.efficiency.mean();
  run.stddev = count > 1
                   ? std::sqrt((run.efficiency.array() - run.mean).square().sum() / (count - 1))
                   : 0.0;
  run.max_singular_value = max_sv.maxCoeff();
  return run;
}

void write_table(const std::filesystem::path& path,
                 const std::vector<std::string>& comments,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_table: cannot open " + path.string());
  for (const auto& c : comments) out << "# " << c << "\n";
  for (std::size_t k = 0; k < columns.size(); ++k)
    out << columns[k] << (k + 1 < columns.size() ? "\t" : "\n");
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[k]);
      out << buf << (k + 1 < row.size() ? "\t" : "\n");
    }
  }
  if (!out) throw std::runtime_error("write_table: write failed for " + path.string());
}

}  // namespace mplc
