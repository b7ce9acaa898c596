#include "mplc/mplc.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mplc/propagation.hpp"

namespace mplc {

using nlohmann::json;

MplcGeometry::MplcGeometry(const Grid& g, double wl, int planes, double spacing)
    : grid(g), wavelength(wl), plane_count(planes), plane_spacing(spacing) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("MplcGeometry: wavelength must be positive");
  if (plane_count < 1) throw std::invalid_argument("MplcGeometry: need at least one plane");
  if (!(plane_spacing > 0.0))
    throw std::invalid_argument("MplcGeometry: plane spacing must be positive");
}

MaskStack::MaskStack(const MplcGeometry& geo) : geometry(geo) {
  masks.assign(static_cast<std::size_t>(geo.plane_count),
               ArrayXXd::Zero(geo.grid.nx, geo.grid.ny));
}

MaskStack::MaskStack(MplcGeometry geo, std::vector<ArrayXXd> masks_)
    : geometry(std::move(geo)), masks(std::move(masks_)) {
  if (static_cast<int>(masks.size()) != geometry.plane_count)
    throw std::invalid_argument("MaskStack: mask count != plane count");
  for (const auto& m : masks) {
    if (m.rows() != geometry.grid.nx || m.cols() != geometry.grid.ny)
      throw std::invalid_argument("MaskStack: mask shape does not match grid");
    if (!m.isFinite().all()) throw std::invalid_argument("MaskStack: non-finite phase");
  }
}

ComplexField apply_mask(const ComplexField& field, const ArrayXXd& mask) {
  if (mask.rows() != field.grid.nx || mask.cols() != field.grid.ny)
    throw std::invalid_argument("apply_mask: mask shape does not match field");
  ArrayXXcd amp = field.amplitude * mask.unaryExpr([](double p) { return std::polar(1.0, p); });
  return ComplexField(field.grid, std::move(amp));
}

ComplexField mplc_forward(const ComplexField& input, const MaskStack& stack) {
  if (input.grid != stack.geometry.grid)
    throw std::invalid_argument("mplc_forward: field grid does not match stack geometry");
  ComplexField field = input;
  for (const auto& mask : stack.masks) {
    field = apply_mask(field, mask);
    field = propagate(field, stack.geometry.plane_spacing, stack.geometry.wavelength);
  }
  return field;
}

ComplexField mplc_adjoint(const ComplexField& output, const MaskStack& stack) {
  if (output.grid != stack.geometry.grid)
    throw std::invalid_argument("mplc_adjoint: field grid does not match stack geometry");
  ComplexField field = output;
  for (auto it = stack.masks.rbegin(); it != stack.masks.rend(); ++it) {
    field = propagate(field, -stack.geometry.plane_spacing, stack.geometry.wavelength);
    field = apply_mask(field, -*it);
  }
  return field;
}

TransferMatrix extract_transfer_matrix(const MaskStack& stack, const ModeSet& inputs,
                                       const ModeSet& outputs) {
  if (inputs.empty() || outputs.empty())
    throw std::invalid_argument("extract_transfer_matrix: empty mode set");
  if (inputs.grid() != stack.geometry.grid || outputs.grid() != stack.geometry.grid)
    throw std::invalid_argument("extract_transfer_matrix: mode grid does not match stack");

  const int n_in = inputs.size();
  const int n_out = outputs.size();
  TransferMatrix tm;
  tm.entries.resize(n_out, n_in);
  for (int j = 0; j < n_in; ++j) {
    const ComplexField out = mplc_forward(inputs[j], stack);
    for (int i = 0; i < n_out; ++i) tm.entries(i, j) = overlap(outputs[i], out);
  }
  tm.efficiency = tm.entries.squaredNorm() / n_in;
  const Eigen::MatrixXcd gram = tm.entries.adjoint() * tm.entries;
  tm.unitarity_deviation =
      (gram - tm.efficiency * Eigen::MatrixXcd::Identity(n_in, n_in)).norm() / n_in;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tm.entries);
  tm.max_singular_value = svd.singularValues()(0);
  return tm;
}

namespace {

std::string mask_filename(int plane) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "mask_%03d.f32", plane);
  return buf;
}

}  // namespace

void save_mask_stack(const MaskStack& stack, const std::filesystem::path& bundle_dir,
                     const std::string& creation_parameters) {
  namespace fs = std::filesystem;
  fs::create_directories(bundle_dir);

  json meta;
  meta["format"] = "mplc-bundle/1";
  meta["grid"] = {{"nx", stack.geometry.grid.nx},
                  {"ny", stack.geometry.grid.ny},
                  {"pitch", stack.geometry.grid.pitch}};
  meta["wavelength"] = stack.geometry.wavelength;
  meta["plane_count"] = stack.geometry.plane_count;
  meta["plane_spacing"] = stack.geometry.plane_spacing;
  meta["creation_parameters"] =
      creation_parameters.empty() ? json::object() : json::parse(creation_parameters);
  {
    std::ofstream out(bundle_dir / "manifest.json");
    if (!out) throw std::runtime_error("save_mask_stack: cannot write manifest");
    out << meta.dump(2) << "\n";
  }

  for (int p = 0; p < stack.geometry.plane_count; ++p) {
    std::ofstream out(bundle_dir / mask_filename(p), std::ios::binary);
    if (!out) throw std::runtime_error("save_mask_stack: cannot write mask file");
    const ArrayXXd& m = stack.masks[static_cast<std::size_t>(p)];
    std::vector<float> row(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index iy = 0; iy < m.cols(); ++iy) {
      for (Eigen::Index ix = 0; ix < m.rows(); ++ix)
        row[static_cast<std::size_t>(ix)] = static_cast<float>(m(ix, iy));
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("save_mask_stack: mask write failed");
  }
}

MaskStack load_mask_stack(const std::filesystem::path& bundle_dir) {
  std::ifstream meta_in(bundle_dir / "manifest.json");
  if (!meta_in) throw std::runtime_error("load_mask_stack: missing manifest in " +
                                         bundle_dir.string());
  json meta = json::parse(meta_in);
  Grid grid(meta.at("grid").at("nx").get<int>(), meta.at("grid").at("ny").get<int>(),
            meta.at("grid").at("pitch").get<double>());
  MplcGeometry geo(grid, meta.at("wavelength").get<double>(), meta.at("plane_count").get<int>(),
                   meta.at("plane_spacing").get<double>());

  std::vector<ArrayXXd> masks;
  masks.reserve(static_cast<std::size_t>(geo.plane_count));
  for (int p = 0; p < geo.plane_count; ++p) {
    std::ifstream in(bundle_dir / mask_filename(p), std::ios::binary);
    if (!in) throw std::runtime_error("load_mask_stack: missing mask file " + mask_filename(p));
    ArrayXXd m(grid.nx, grid.ny);
    std::vector<float> row(static_cast<std::size_t>(grid.nx));
    for (int iy = 0; iy < grid.ny; ++iy) {
      in.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
      if (!in) throw std::runtime_error("load_mask_stack: truncated mask file");
      for (int ix = 0; ix < grid.nx; ++ix) m(ix, iy) = row[static_cast<std::size_t>(ix)];
    }
    masks.push_back(std::move(m));
  }
  return MaskStack(geo, std::move(masks));
}

}  // namespace mplc
