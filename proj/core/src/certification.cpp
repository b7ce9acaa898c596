#include "mplc/certification.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace mplc {

using nlohmann::json;

std::string CertificationResult::to_json() const {
  json j;
  j["d"] = d;
  j["F1"] = F1;
  j["F2_bound"] = F2_bound;
  j["F_bound"] = F_bound;
  j["certified_dimension"] = certified_dimension;
  j["inputs_digest"] = inputs_digest;
  if (F_bound_error) j["F_bound_error"] = *F_bound_error;
  return j.dump(2);
}

Eigen::VectorXd certification_thresholds(int d) {
  if (d < 2) throw std::invalid_argument("certification_thresholds: d must be >= 2");
  Eigen::VectorXd t(d);
  for (int m = 1; m <= d; ++m) t(m - 1) = static_cast<double>(m - 1) / d;
  return t;
}

namespace {

int certified_dimension_for(double f_bound, int d) {
  int m = 1;
  while (m < d && f_bound > static_cast<double>(m) / d) ++m;
  return m;
}

void check_table(const Eigen::MatrixXd& p, int d, const char* name) {
  if (p.rows() != d || p.cols() != d)
    throw std::invalid_argument(std::string("certify: ") + name + " must be d x d");
  if ((p.array() < 0.0).any())
    throw std::invalid_argument(std::string("certify: ") + name + " has negative entries");
  if (std::abs(p.sum() - 1.0) > 1e-6)
    throw std::invalid_argument(std::string("certify: ") + name + " is not normalized");
}

}  // namespace

CertificationResult certify(const Eigen::MatrixXd& p_std, const Eigen::MatrixXd& p_mub, int d) {
  if (d < 2) throw std::invalid_argument("certify: d must be >= 2");
  check_table(p_std, d, "standard-basis table");
  check_table(p_mub, d, "MUB table");

  const double f1 = p_std.diagonal().sum();
  const double s = p_mub.diagonal().sum();

  // off-diagonal population term
  double off_diag = p_std.sum() - f1;

  // Cauchy-Schwarz cross term over ordered pairs of distinct off-diagonal
  // cells in the same difference class (n - m mod d)
  double cross = 0.0;
  for (int delta = 1; delta < d; ++delta) {
    std::vector<double> cls;
    cls.reserve(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m) cls.push_back(p_std(m, (m + delta) % d));
    double root_sum = 0.0, sum = 0.0;
    for (double v : cls) {
      root_sum += std::sqrt(v);
      sum += v;
    }
    cross += root_sum * root_sum - sum;  // ordered distinct pairs
  }

  CertificationResult result;
  result.d = d;
  result.F1 = f1;
  result.F_bound = std::max(0.0, s - (off_diag + cross) / d);
  result.F2_bound = result.F_bound - f1;
  result.certified_dimension = certified_dimension_for(result.F_bound, d);
  result.inputs_digest = "probability-tables;unit-sum-normalized";
  return result;
}

CertificationResult certify(const CoincidenceTable& p_std, const CoincidenceTable& p_mub, int d) {
  if (p_std.domain != "cross-block" || p_mub.domain != "cross-block")
    throw std::invalid_argument("certify: tables must use the cross-block domain");
  CertificationResult result =
      certify(p_std.cross_block_matrix(d, d), p_mub.cross_block_matrix(d, d), d);
  result.inputs_digest = "cross-block tables;" + p_std.normalization;
  return result;
}

CertificationResult certify_with_counts(const Eigen::MatrixXd& counts_std,
                                        const Eigen::MatrixXd& counts_mub, int d, int resamples,
                                        std::uint64_t seed) {
  if ((counts_std.array() < 0.0).any() || (counts_mub.array() < 0.0).any())
    throw std::invalid_argument("certify_with_counts: negative counts");
  if (resamples < 2) throw std::invalid_argument("certify_with_counts: need >= 2 resamples");

  const auto normalized = [](const Eigen::MatrixXd& counts) -> Eigen::MatrixXd {
    const double total = counts.sum();
    if (!(total > 0.0)) throw std::invalid_argument("certify_with_counts: empty count table");
    return counts / total;
  };
  CertificationResult point = certify(normalized(counts_std), normalized(counts_mub), d);

  std::mt19937_64 rng(seed);
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    Eigen::MatrixXd rs_std(d, d), rs_mub(d, d);
    const auto poisson = [&rng](double mean) -> double {
      return mean > 0.0 ? static_cast<double>(std::poisson_distribution<long>(mean)(rng)) : 0.0;
    };
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        rs_std(a, b) = poisson(counts_std(a, b));
        rs_mub(a, b) = poisson(counts_mub(a, b));
      }
    draws.push_back(certify(normalized(rs_std), normalized(rs_mub), d).F_bound);
  }
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= draws.size();
  double var = 0.0;
  for (double v : draws) var += (v - mean) * (v - mean);
  point.F_bound_error = std::sqrt(var / (draws.size() - 1));
  point.inputs_digest = "count tables;poisson-bootstrap";
  return point;
}

CertificationExperiment certify_from_transfer(const Eigen::MatrixXcd& t_std,
                                              const Eigen::MatrixXcd& t_mub,
                                              const TwoPhotonState& state, int d) {
  if (state.modes != 2 * d)
    throw std::invalid_argument("certify_from_transfer: state must live on 2d modes");
  std::vector<int> a_modes(static_cast<std::size_t>(d));
  std::vector<int> b_modes(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    a_modes[static_cast<std::size_t>(k)] = k;
    b_modes[static_cast<std::size_t>(k)] = d + k;
  }

  CertificationExperiment experiment;
  experiment.table_std =
      coincidences_cross_block(evolve(state, t_std), a_modes, b_modes);
  experiment.table_mub =
      coincidences_cross_block(evolve(state, t_mub), a_modes, b_modes);
  experiment.result = certify(experiment.table_std, experiment.table_mub, d);
  return experiment;
}

CertificationExperiment run_certification_experiment(int d, const MaskStack& stack_std,
                                                     const MaskStack& stack_mub,
                                                     const TwoPhotonState& state,
                                                     const ModeSet& inputs,
                                                     const ModeSet& outputs) {
  if (inputs.size() != 2 * d || outputs.size() != 2 * d)
    throw std::invalid_argument("run_certification_experiment: need 2d spots per side");
  const TransferMatrix t_std = extract_transfer_matrix(stack_std, inputs, outputs);
  const TransferMatrix t_mub = extract_transfer_matrix(stack_mub, inputs, outputs);
  CertificationExperiment experiment =
      certify_from_transfer(t_std.entries, t_mub.entries, state, d);
  experiment.result.inputs_digest = "simulated-mplc;post-selected cross-block tables";
  return experiment;
}

}  // namespace mplc
