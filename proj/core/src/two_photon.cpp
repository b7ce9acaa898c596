#include "mplc/two_photon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mplc {

TwoPhotonState::TwoPhotonState(Eigen::MatrixXcd c, PhotonStatistics stats)
    : modes(static_cast<int>(c.rows())), coeff(std::move(c)), statistics(stats) {
  if (coeff.rows() != coeff.cols() || coeff.rows() < 1)
    throw std::invalid_argument("TwoPhotonState: coefficient matrix must be square");
  if (statistics == PhotonStatistics::bosonic)
    coeff = 0.5 * (coeff + coeff.transpose()).eval();
  const double norm = coeff.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("TwoPhotonState: zero state");
  coeff /= norm;
}

TwoPhotonState pixel_entangled_state(int n, const Eigen::VectorXd& phases,
                                     PhotonStatistics stats, const std::vector<int>& pairing) {
  if (n < 1) throw std::invalid_argument("pixel_entangled_state: n must be >= 1");
  if (phases.size() != 0 && phases.size() != n)
    throw std::invalid_argument("pixel_entangled_state: phase count != n");
  std::vector<int> pair = pairing;
  if (pair.empty()) {
    pair.resize(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) pair[static_cast<std::size_t>(m)] = n + m;
  }
  if (static_cast<int>(pair.size()) != n)
    throw std::invalid_argument("pixel_entangled_state: pairing size != n");
  std::vector<int> sorted = pair;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("pixel_entangled_state: pairing must be injective");
  for (int b : pair)
    if (b < n || b >= 2 * n)
      throw std::invalid_argument("pixel_entangled_state: pairing must map into the B block");

  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int m = 0; m < n; ++m) {
    const double phi = phases.size() ? phases(m) : 0.0;
    c(m, pair[static_cast<std::size_t>(m)]) = std::polar(1.0, phi);
  }
  return TwoPhotonState(std::move(c), stats);
}

TwoPhotonState evolve(const TwoPhotonState& state, const Eigen::MatrixXcd& transfer) {
  if (transfer.rows() != state.modes || transfer.cols() != state.modes)
    throw std::invalid_argument("evolve: transfer matrix dimension mismatch");
  TwoPhotonState out;
  out.modes = state.modes;
  out.statistics = state.statistics;
  out.coeff = transfer * state.coeff * transfer.transpose();
  out.survival = out.coeff.squaredNorm();
  return out;
}

double CoincidenceTable::sum() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

Eigen::MatrixXd CoincidenceTable::cross_block_matrix(int rows, int cols) const {
  if (domain != "cross-block")
    throw std::logic_error("cross_block_matrix: table domain is not cross-block");
  if (static_cast<int>(entries.size()) != rows * cols)
    throw std::logic_error("cross_block_matrix: entry count does not match shape");
  Eigen::MatrixXd m(rows, cols);
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b)
      m(a, b) = entries[static_cast<std::size_t>(a * cols + b)].probability;
  return m;
}

namespace {

void normalize_entries(std::vector<CoincidenceEntry>& entries) {
  double total = 0.0;
  for (const auto& e : entries) total += e.probability;
  if (!(total > 0.0)) throw std::invalid_argument("coincidences: empty or zero-weight domain");
  for (auto& e : entries) e.probability /= total;
}

}  // namespace

CoincidenceTable coincidences_all_pairs(const TwoPhotonState& state, bool include_bunched) {
  const auto& c = state.coeff;
  CoincidenceTable table;
  table.domain = "all-pairs";
  table.normalization = "post-selected-unit-sum";
  for (int i = 0; i < state.modes; ++i) {
    for (int j = i; j < state.modes; ++j) {
      if (i == j && !include_bunched) continue;
      double p = 0.0;
      if (i == j) {
        // bosonic |2_i> projection carries the permanent factor of 2
        p = (state.statistics == PhotonStatistics::bosonic ? 2.0 : 1.0) * std::norm(c(i, i));
      } else if (state.statistics == PhotonStatistics::bosonic) {
        p = std::norm(c(i, j) + c(j, i));
      } else {
        p = std::norm(c(i, j)) + std::norm(c(j, i));
      }
      table.entries.push_back({i, j, p});
    }
  }
  normalize_entries(table.entries);
  return table;
}

CoincidenceTable coincidences_cross_block(const TwoPhotonState& state,
                                          const std::vector<int>& a_modes,
                                          const std::vector<int>& b_modes) {
  if (a_modes.empty() || b_modes.empty())
    throw std::invalid_argument("coincidences_cross_block: empty domain");
  const auto& c = state.coeff;
  CoincidenceTable table;
  table.domain = "cross-block";
  table.normalization = "post-selected-unit-sum";
  for (int a : a_modes) {
    for (int b : b_modes) {
      if (a < 0 || a >= state.modes || b < 0 || b >= state.modes)
        throw std::invalid_argument("coincidences_cross_block: mode index out of range");
      double p = 0.0;
      if (state.statistics == PhotonStatistics::bosonic) {
        // symmetrized amplitude; equals 4 |c_ab|^2 and rescales away
        p = std::norm(c(a, b) + c(b, a));
      } else {
        p = std::norm(c(a, b));
      }
      table.entries.push_back({a, b, p});
    }
  }
  normalize_entries(table.entries);
  return table;
}

double statistical_fidelity(const CoincidenceTable& p, const CoincidenceTable& q) {
  if (p.domain != q.domain || p.entries.size() != q.entries.size())
    throw std::invalid_argument("statistical_fidelity: domain mismatch");
  double f = 0.0;
  for (std::size_t k = 0; k < p.entries.size(); ++k) {
    if (p.entries[k].i != q.entries[k].i || p.entries[k].j != q.entries[k].j)
      throw std::invalid_argument("statistical_fidelity: domain mismatch");
    f += std::sqrt(p.entries[k].probability * q.entries[k].probability);
  }
  return f;
}

FringeFit fringe_visibility(const Eigen::VectorXd& phases, const Eigen::VectorXd& rates) {
  if (phases.size() != rates.size())
    throw std::invalid_argument("fringe_visibility: phase/rate size mismatch");
  if (phases.size() < 8) throw std::invalid_argument("fringe_visibility: need >= 8 samples");
  if (phases.maxCoeff() - phases.minCoeff() < 2.0 * M_PI - 1e-9)
    throw std::invalid_argument("fringe_visibility: phases must span at least 2 pi");

  // rate = a0 + a1 cos(phi) + a2 sin(phi)
  Eigen::MatrixXd design(phases.size(), 3);
  for (int k = 0; k < phases.size(); ++k)
    design.row(k) << 1.0, std::cos(phases(k)), std::sin(phases(k));
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rates);
  const double a0 = coef(0);
  const double amp = std::hypot(coef(1), coef(2));
  if (!(a0 > 0.0)) throw std::invalid_argument("fringe_visibility: degenerate fit (A <= 0)");

  FringeFit fit;
  fit.amplitude = a0;
  fit.visibility = std::clamp(amp / a0, 0.0, 1.0);
  fit.phase_offset = std::atan2(-coef(2), coef(1));
  const double hi = a0 * (1.0 + fit.visibility);
  const double lo = a0 * (1.0 - fit.visibility);
  fit.minmax_visibility = (hi + lo) > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
  return fit;
}

PorterThomasResult porter_thomas_test(const Eigen::VectorXd& normalized_samples,
                                      double threshold) {
  if (normalized_samples.size() < 100)
    throw std::invalid_argument("porter_thomas_test: need >= 100 samples");
  if ((normalized_samples.array() < 0.0).any())
    throw std::invalid_argument("porter_thomas_test: samples must be non-negative");

  std::vector<double> sorted(normalized_samples.data(),
                             normalized_samples.data() + normalized_samples.size());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double ks = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double cdf = 1.0 - std::exp(-sorted[k]);
    const double lo = static_cast<double>(k) / n;
    const double hi = static_cast<double>(k + 1) / n;
    ks = std::max({ks, hi - cdf, cdf - lo});
  }
  return {ks, ks < threshold};
}

void save_coincidence_table(const CoincidenceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_coincidence_table: cannot open " + path.string());
  out << "# domain: " << table.domain << "\n";
  out << "# normalization: " << table.normalization << "\n";
  out << "# columns: i\tj\tprobability\n";
  char buf[64];
  for (const auto& e : table.entries) {
    std::snprintf(buf, sizeof(buf), "%d\t%d\t%.17g\n", e.i, e.j, e.probability);
    out << buf;
  }
}

CoincidenceTable load_coincidence_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_coincidence_table: cannot open " + path.string());
  CoincidenceTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto parse_tag = [&](const std::string& tag) -> std::string {
        const std::string prefix = "# " + tag + ": ";
        return line.rfind(prefix, 0) == 0 ? line.substr(prefix.size()) : std::string{};
      };
      if (auto v = parse_tag("domain"); !v.empty()) table.domain = v;
      if (auto v = parse_tag("normalization"); !v.empty()) table.normalization = v;
      continue;
    }
    std::istringstream row(line);
    CoincidenceEntry e;
    if (!(row >> e.i >> e.j >> e.probability))
      throw std::runtime_error("load_coincidence_table: malformed row '" + line + "'");
    table.entries.push_back(e);
  }
  if (table.domain.empty())
    throw std::runtime_error("load_coincidence_table: missing domain header");
  return table;
}

}  // namespace mplc
