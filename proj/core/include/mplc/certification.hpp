#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "mplc/mplc.hpp"
#include "mplc/two_photon.hpp"
#include "mplc/unitary.hpp"

namespace mplc {

struct CertificationResult {
  int d = 0;
  double F1 = 0.0;        // standard-basis correlation sum
  double F2_bound = 0.0;  // remainder of the bound beyond F1
  double F_bound = 0.0;   // certified fidelity lower bound, clipped at 0
  int certified_dimension = 1;
  std::string inputs_digest;
  std::optional<double> F_bound_error;  // Poisson-resampled, counts input only

  std::string to_json() const;
};

// Thresholds (m-1)/d for m = 1..d: certified dimension is the largest m with
// F_bound > (m-1)/d.
Eigen::VectorXd certification_thresholds(int d);

// Fidelity lower bound to the maximally entangled state from the
// standard-basis table p(m, n) and the diagonal of the MUB table:
//   F >= S - (1/d) [ sum_{m != n} p(m,n)
//                    + sum' sqrt(p(m,n) p(m',n')) ],
// S = sum_j p_mub(j, j), with sum' over ordered pairs (m,n) != (m',n'),
// m != n, m' != n', n - m == n' - m' (mod d). Tables must be normalized d x d.
CertificationResult certify(const Eigen::MatrixXd& p_std, const Eigen::MatrixXd& p_mub, int d);

// Wrapper over cross-block tables in the twophoton text format.
CertificationResult certify(const CoincidenceTable& p_std, const CoincidenceTable& p_mub, int d);

// Poisson-bootstrap error bar from raw count tables; the point estimate uses
// the normalized counts.
CertificationResult certify_with_counts(const Eigen::MatrixXd& counts_std,
                                        const Eigen::MatrixXd& counts_mub, int d,
                                        int resamples, std::uint64_t seed);

struct CertificationExperiment {
  CertificationResult result;
  CoincidenceTable table_std;
  CoincidenceTable table_mub;
};

// Evolves the state through both exact measurement matrices and certifies.
CertificationExperiment certify_from_transfer(const Eigen::MatrixXcd& t_std,
                                              const Eigen::MatrixXcd& t_mub,
                                              const TwoPhotonState& state, int d);

// Full simulated pipeline: extracts both stack transfer matrices on the given
// 2d-spot mode sets, evolves the state, and certifies. The stacks are expected
// to realize block_diag(I, I) and block_diag(dft(d), dft(d, conj)).
CertificationExperiment run_certification_experiment(int d, const MaskStack& stack_std,
                                                     const MaskStack& stack_mub,
                                                     const TwoPhotonState& state,
                                                     const ModeSet& inputs,
                                                     const ModeSet& outputs);

}  // namespace mplc
