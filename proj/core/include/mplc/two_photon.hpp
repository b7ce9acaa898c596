#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace mplc {

enum class PhotonStatistics { bosonic, distinguishable };

// Two-photon amplitude matrix c_pq over M modes: photon 1 in mode p, photon 2
// in mode q. Bosonic states are stored symmetrized (c == c^T). coeff may be
// subnormalized after evolving through a lossy device; survival records
// sum |c|^2 at that point.
struct TwoPhotonState {
  int modes = 0;
  Eigen::MatrixXcd coeff;
  PhotonStatistics statistics = PhotonStatistics::bosonic;
  double survival = 1.0;

  TwoPhotonState() = default;
  // Normalizes and, for bosons, symmetrizes the coefficient matrix.
  TwoPhotonState(Eigen::MatrixXcd c, PhotonStatistics stats);
};

// |psi> = (1/sqrt N) sum_m exp(i phases[m]) |m>_A |pairing[m]>_B over 2N modes,
// photon A on modes [0, N), photon B on [N, 2N). pairing maps the A index to a
// global B mode index and defaults to m -> N + m; it must be injective.
TwoPhotonState pixel_entangled_state(int n, const Eigen::VectorXd& phases = {},
                                     PhotonStatistics stats = PhotonStatistics::bosonic,
                                     const std::vector<int>& pairing = {});

// c' = T c T^T (creation operators transform by T). Unitary T preserves the
// norm; a subunitary T leaves the state subnormalized with survival recorded.
TwoPhotonState evolve(const TwoPhotonState& state, const Eigen::MatrixXcd& transfer);

struct CoincidenceEntry {
  int i = 0;
  int j = 0;
  double probability = 0.0;
};

// Joint detection probabilities normalized over the recorded domain
// (post-selected, mirroring accidental-subtracted coincidence gating).
struct CoincidenceTable {
  std::string domain;         // "all-pairs" or "cross-block"
  std::string normalization;  // "post-selected-unit-sum" or "counts"
  std::vector<CoincidenceEntry> entries;

  double sum() const;
  // d x d matrix P(a, b) for a cross-block table with row/column mode lists
  // of sizes (d, d); entry order is row-major in (a, b).
  Eigen::MatrixXd cross_block_matrix(int rows, int cols) const;
};

// All-pairs domain over unordered mode pairs; bunched (i, i) outcomes are
// excluded by default and included on request.
CoincidenceTable coincidences_all_pairs(const TwoPhotonState& state,
                                        bool include_bunched = false);

// Cross-block domain P(a, b) over a in a_modes (photon A side), b in b_modes.
CoincidenceTable coincidences_cross_block(const TwoPhotonState& state,
                                          const std::vector<int>& a_modes,
                                          const std::vector<int>& b_modes);

// Bhattacharyya coefficient sum_i sqrt(P_i Q_i); domains must match entry by
// entry.
double statistical_fidelity(const CoincidenceTable& p, const CoincidenceTable& q);

struct FringeFit {
  double amplitude = 0.0;   // A in A (1 + V cos(phi + phi0))
  double visibility = 0.0;  // V clamped to [0, 1]
  double phase_offset = 0.0;
  double minmax_visibility = 0.0;  // (max - min) / (max + min) of the fit
};

// Least-squares fit of A (1 + V cos(phi + phi0)) to sampled rates. Requires
// >= 8 samples spanning at least 2 pi; throws on a degenerate fit (A <= 0).
FringeFit fringe_visibility(const Eigen::VectorXd& phases, const Eigen::VectorXd& rates);

struct PorterThomasResult {
  double ks_statistic = 0.0;
  bool pass = false;
};

// Kolmogorov-Smirnov distance of mean-normalized samples against the
// unit-mean exponential law. Requires >= 100 non-negative samples.
PorterThomasResult porter_thomas_test(const Eigen::VectorXd& normalized_samples,
                                      double threshold = 0.1);

// Delimited-text export: '#'-prefixed header lines recording domain and
// normalization, then tab-separated (i, j, probability) rows.
void save_coincidence_table(const CoincidenceTable& table, const std::filesystem::path& path);
CoincidenceTable load_coincidence_table(const std::filesystem::path& path);

}  // namespace mplc
