#include "mplc/wavefront_matching.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

#include "mplc/propagation.hpp"

namespace mplc {

using nlohmann::json;

std::string DesignReport::to_json() const {
  json j;
  j["fidelity_trace"] = fidelity_trace;
  j["per_mode_fidelity"] =
      std::vector<double>(per_mode_fidelity.data(), per_mode_fidelity.data() + per_mode_fidelity.size());
  j["matrix_statistical_fidelity"] = matrix_statistical_fidelity;
  j["efficiency"] = efficiency;
  j["iterations_run"] = iterations_run;
  j["converged"] = converged;
  return j.dump(2);
}

namespace {

// relative level below which SLM pixels count as unassigned and stay at
// zero phase
constexpr double kUnassignedLevel = 1e-3;

// raised-cosine fraction of the band-limit filter edge
constexpr double kFilterRolloff = 0.2;

double wrap_2pi(double phase) {
  const double two_pi = 2.0 * M_PI;
  double p = std::fmod(phase, two_pi);
  if (p < 0.0) p += two_pi;
  return p;
}

ArrayXXd phase_of(const ArrayXXcd& field) {
  return field.unaryExpr([](Complex v) { return wrap_2pi(std::arg(v)); });
}

struct DesignContext {
  const MplcGeometry& geo;
  std::vector<ComplexField> inputs;
  std::vector<ComplexField> targets;  // effective targets sum_k U_kj outputs_k
  Eigen::VectorXd weights;
  double angle_fraction;

  ComplexField prop(const ComplexField& f, double sign) const {
    return propagate(f, sign * geo.plane_spacing, geo.wavelength);
  }
};

// Adjoint fields just after each mask position, for all planes at once.
std::vector<std::vector<ComplexField>> backward_fields_all(const DesignContext& ctx,
                                                           const MaskStack& stack) {
  const int planes = ctx.geo.plane_count;
  std::vector<std::vector<ComplexField>> result(static_cast<std::size_t>(planes));
  std::vector<ComplexField> current;
  current.reserve(ctx.targets.size());
  for (const auto& t : ctx.targets) current.push_back(ctx.prop(t, -1.0));
  for (int p = planes - 1; p >= 0; --p) {
    result[static_cast<std::size_t>(p)] = current;
    if (p > 0) {
      for (auto& f : current) {
        f = apply_mask(f, -stack.masks[static_cast<std::size_t>(p)]);
        f = ctx.prop(f, -1.0);
      }
    }
  }
  return result;
}

// Forward fields just before each mask position.
std::vector<std::vector<ComplexField>> forward_fields_all(const DesignContext& ctx,
                                                          const MaskStack& stack) {
  const int planes = ctx.geo.plane_count;
  std::vector<std::vector<ComplexField>> result(static_cast<std::size_t>(planes));
  std::vector<ComplexField> current = ctx.inputs;
  for (int p = 0; p < planes; ++p) {
    result[static_cast<std::size_t>(p)] = current;
    if (p < planes - 1) {
      for (auto& f : current) {
        f = apply_mask(f, stack.masks[static_cast<std::size_t>(p)]);
        f = ctx.prop(f, 1.0);
      }
    }
  }
  return result;
}

}  // namespace

ArrayXXd update_mask(const std::vector<ComplexField>& forward_fields,
                     const std::vector<ComplexField>& backward_fields,
                     const Eigen::VectorXd& weights, double angle_fraction) {
  if (forward_fields.empty() || forward_fields.size() != backward_fields.size())
    throw std::invalid_argument("update_mask: field count mismatch");
  if (weights.size() != static_cast<Eigen::Index>(forward_fields.size()))
    throw std::invalid_argument("update_mask: weight count mismatch");
  if (!(angle_fraction > 0.0) || angle_fraction > 1.0)
    throw std::invalid_argument("update_mask: angle_fraction must be in (0, 1]");

  const Grid& grid = forward_fields.front().grid;
  ArrayXXcd sum = ArrayXXcd::Zero(grid.nx, grid.ny);
  for (std::size_t m = 0; m < forward_fields.size(); ++m) {
    if (forward_fields[m].grid != grid || backward_fields[m].grid != grid)
      throw std::invalid_argument("update_mask: grid mismatch");
    sum += weights(static_cast<Eigen::Index>(m)) *
           (forward_fields[m].amplitude.conjugate() * backward_fields[m].amplitude);
  }
  // tapered edge keeps the update band-limited without ring artifacts
  sum = fourier_lowpass(sum, grid, angle_fraction * grid.nyquist(), kFilterRolloff);

  // matched phase where the overlap carries signal; unassigned SLM pixels
  // stay at zero phase
  const double assigned = kUnassignedLevel * sum.abs().maxCoeff();
  return sum.unaryExpr([assigned](Complex v) {
    return std::abs(v) >= assigned ? wrap_2pi(std::arg(v)) : 0.0;
  });
}

std::pair<MaskStack, DesignReport> design(const ModeSet& inputs, const ModeSet& outputs,
                                          const UnitaryMatrix& target,
                                          const MplcGeometry& geometry,
                                          const DesignOptions& options) {
  const int n = inputs.size();
  if (n == 0 || outputs.size() != n)
    throw std::invalid_argument("design: input and output mode counts must match");
  if (target.dim() != n) throw std::invalid_argument("design: target dimension mismatch");
  if (n > options.capacity_bound)
    throw std::invalid_argument("design: mode count exceeds the configured capacity bound");
  if (inputs.grid() != geometry.grid || outputs.grid() != geometry.grid)
    throw std::invalid_argument("design: mode grid does not match geometry");
  if (options.iterations < 1) throw std::invalid_argument("design: need at least one iteration");

  DesignContext ctx{geometry, inputs.fields(), {}, {}, options.angle_fraction};
  ctx.weights = options.mode_weights.size() ? options.mode_weights
                                            : Eigen::VectorXd::Ones(n);
  if (ctx.weights.size() != n) throw std::invalid_argument("design: mode weight count mismatch");
  if ((ctx.weights.array() <= 0.0).any())
    throw std::invalid_argument("design: mode weights must be positive");

  ctx.targets.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd column = target.matrix().col(j);
    ctx.targets.push_back(superpose(outputs, column));
  }

  MaskStack stack(geometry);
  const int planes = geometry.plane_count;
  DesignReport report;

  const auto mean_fidelity = [&](Eigen::VectorXd* per_mode) {
    double acc = 0.0;
    if (per_mode) per_mode->resize(n);
    for (int j = 0; j < n; ++j) {
      const Complex ov = overlap(ctx.targets[static_cast<std::size_t>(j)],
                                 mplc_forward(ctx.inputs[static_cast<std::size_t>(j)], stack));
      const double fid = std::norm(ov);
      acc += fid;
      if (per_mode) (*per_mode)(j) = fid;
    }
    return acc / n;
  };

  double previous = 0.0;
  for (int iter = 0; iter < options.iterations; ++iter) {
    // forward sweep: backward fields frozen, forward fields carried
    auto backs = backward_fields_all(ctx, stack);
    std::vector<ComplexField> carried = ctx.inputs;
    for (int p = 0; p < planes; ++p) {
      stack.masks[static_cast<std::size_t>(p)] =
          update_mask(carried, backs[static_cast<std::size_t>(p)], ctx.weights,
                      ctx.angle_fraction);
      if (p < planes - 1) {
        for (auto& f : carried) {
          f = apply_mask(f, stack.masks[static_cast<std::size_t>(p)]);
          f = ctx.prop(f, 1.0);
        }
      }
    }
    // backward sweep: forward fields frozen, adjoint fields carried
    auto fronts = forward_fields_all(ctx, stack);
    std::vector<ComplexField> adjoint;
    adjoint.reserve(static_cast<std::size_t>(n));
    for (const auto& t : ctx.targets) adjoint.push_back(ctx.prop(t, -1.0));
    for (int p = planes - 1; p >= 0; --p) {
      stack.masks[static_cast<std::size_t>(p)] =
          update_mask(fronts[static_cast<std::size_t>(p)], adjoint, ctx.weights,
                      ctx.angle_fraction);
      if (p > 0) {
        for (auto& f : adjoint) {
          f = apply_mask(f, -stack.masks[static_cast<std::size_t>(p)]);
          f = ctx.prop(f, -1.0);
        }
      }
    }

    const double mean = mean_fidelity(nullptr);
    report.fidelity_trace.push_back(mean);
    report.iterations_run = iter + 1;
    if (iter > 0 && mean - previous < options.convergence_tolerance) {
      report.converged = true;
      break;
    }
    previous = mean;
  }

  mean_fidelity(&report.per_mode_fidelity);
  const TransferMatrix tm = extract_transfer_matrix(stack, inputs, outputs);
  report.efficiency = tm.efficiency;

  // Bhattacharyya overlap between the achieved and target |entry|^2 weights
  const Eigen::ArrayXXd achieved = tm.entries.cwiseAbs2().array();
  const Eigen::ArrayXXd wanted = target.matrix().cwiseAbs2().array();
  const double achieved_sum = achieved.sum();
  if (achieved_sum > 0.0)
    report.matrix_statistical_fidelity =
        ((achieved / achieved_sum) * (wanted / wanted.sum())).sqrt().sum();

  return {std::move(stack), std::move(report)};
}

MaskStack correct_global_phases(const MaskStack& stack, const ModeSet& inputs,
                                const ModeSet& outputs, const UnitaryMatrix& target) {
  const int n = inputs.size();
  if (outputs.size() != n || target.dim() != n)
    throw std::invalid_argument("correct_global_phases: dimension mismatch");
  if (stack.masks.empty()) throw std::invalid_argument("correct_global_phases: empty stack");
  const Grid& grid = stack.geometry.grid;

  // Support of a spot = pixels holding meaningful intensity; supports must be
  // disjoint for the pistons to act on one column each. At 1e-3 of the peak
  // the support radius is 1.86 waists, disjoint for >= 4-waist spacing.
  const double support_level = 1e-3;
  std::vector<Eigen::ArrayXX<bool>> supports;
  supports.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const ArrayXXd intensity = inputs[j].amplitude.abs2();
    supports.push_back(intensity >= support_level * intensity.maxCoeff());
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if ((supports[static_cast<std::size_t>(a)] && supports[static_cast<std::size_t>(b)]).any())
        throw std::invalid_argument(
            "correct_global_phases: input supports overlap; pistons are not independent");

  // The support tail below the threshold is not rotated by a piston, so one
  // pass leaves a fractional residual; iterate until the column phases lock.
  MaskStack corrected = stack;
  for (int round = 0; round < 5; ++round) {
    const TransferMatrix tm = extract_transfer_matrix(corrected, inputs, outputs);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      // phase aligning the achieved column with the target column
      const Complex align = (tm.entries.col(j).adjoint() * target.matrix().col(j))(0, 0);
      if (std::abs(align) == 0.0) continue;
      const double piston = std::arg(align);
      worst = std::max(worst, std::abs(piston));
      ArrayXXd& mask = corrected.masks.front();
      for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
          if (supports[static_cast<std::size_t>(j)](ix, iy))
            mask(ix, iy) = wrap_2pi(mask(ix, iy) + piston);
    }
    if (worst < 1e-9) break;
  }
  return corrected;
}

Eigen::VectorXd band_concentration(const MaskStack& stack, const ModeSet& inputs,
                                   double angle_fraction) {
  if (inputs.empty()) throw std::invalid_argument("band_concentration: empty mode set");
  if (inputs.grid() != stack.geometry.grid)
    throw std::invalid_argument("band_concentration: mode grid does not match stack");
  const Grid& grid = stack.geometry.grid;
  const double f_radius = angle_fraction * grid.nyquist();

  Eigen::VectorXd concentration(stack.geometry.plane_count);
  std::vector<ComplexField> fields = inputs.fields();
  for (int p = 0; p < stack.geometry.plane_count; ++p) {
    double inside = 0.0, total = 0.0;
    for (auto& f : fields) {
      f = apply_mask(f, stack.masks[static_cast<std::size_t>(p)]);
      inside += spectrum_energy_within(f.amplitude, grid, f_radius) * f.power();
      total += f.power();
    }
    concentration(p) = inside / total;
    if (p + 1 < stack.geometry.plane_count)
      for (auto& f : fields)
        f = propagate(f, stack.geometry.plane_spacing, stack.geometry.wavelength);
  }
  return concentration;
}

}  // namespace mplc
