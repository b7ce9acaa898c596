#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "mplc/experiments.hpp"

using namespace mplc;

namespace {

// compact geometry for fast end-to-end smoke tests
ExperimentConfig smoke_config() {
  ExperimentConfig config;
  config.nx = 96;
  config.ny = 96;
  config.plane_spacing = 30e-3;
  config.plane_count = 3;
  config.spot_waist = 50e-6;
  config.spot_spacing = 200e-6;
  config.designer.iterations = 8;
  config.threads = 2;
  return config;
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("config json round trip") {
  ExperimentConfig config = smoke_config();
  config.seed = 123456789ULL;
  config.planes_list = {2, 3, 5};
  config.matrix_level = true;
  const std::string text = config.to_json();
  const ExperimentConfig parsed = ExperimentConfig::from_json(text);
  CHECK(parsed.to_json() == text);
  CHECK(parsed.seed == config.seed);
  CHECK(parsed.planes_list == config.planes_list);
  CHECK(parsed.matrix_level);

  // missing sections fall back to defaults
  const ExperimentConfig sparse = ExperimentConfig::from_json(R"({"grid":{"nx":128}})");
  CHECK(sparse.nx == 128);
  CHECK(sparse.ny == 256);
  CHECK(sparse.plane_count == 5);
}

TEST_CASE("certification spot layout keeps blocks clean") {
  const ExperimentConfig config;  // defaults: 256^2 grid
  const ModeSet spots = certification_spots(config, 3);
  CHECK(spots.size() == 6);
  CHECK(spots.max_crosstalk() < 1e-3);
}

TEST_CASE("matrix-level certification is exact") {
  ExperimentConfig config = smoke_config();
  config.matrix_level = true;
  for (int d : {2, 3}) {
    config.dimension = d;
    const CertificationRun run = run_certification(config);
    CHECK(std::abs(run.experiment.result.F_bound - 1.0) < 1e-9);
    CHECK(run.experiment.result.certified_dimension == d);
  }
}

TEST_CASE("matrix-level phase scans have unit visibility") {
  ExperimentConfig config = smoke_config();
  config.matrix_level = true;
  config.dimension = 2;
  const PhaseScanRun scan2 = run_phase_scan(config);
  CHECK(scan2.mean_visibility == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(scan2.pair_visibility.minCoeff() > 1.0 - 1e-6);
  CHECK(scan2.rows.size() == static_cast<std::size_t>(config.phase_samples));

  config.dimension = 3;
  const PhaseScanRun scan3 = run_phase_scan(config);
  CHECK(scan3.mean_visibility == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(scan3.rows.size() ==
        static_cast<std::size_t>(config.scan_resolution * config.scan_resolution));
}

TEST_CASE("matrix-level haar bench gives perfect fidelity and Porter-Thomas statistics") {
  ExperimentConfig config = smoke_config();
  config.matrix_level = true;
  config.haar_count = 100;
  const HaarBenchRun run = run_haar_bench(config);
  CHECK(run.statistical_fidelity.minCoeff() > 1.0 - 1e-12);
  CHECK(run.efficiency.minCoeff() == 1.0);
  CHECK(run.porter_thomas.pass);
  CHECK(run.pooled_normalized.size() == 600);
}

TEST_CASE("full smoke pipeline on a reduced geometry") {
  ExperimentConfig config = smoke_config();
  config.dimension = 2;
  const CertificationRun run = run_certification(config);
  // reduced geometry still certifies entanglement
  CHECK(run.experiment.result.F_bound > 0.5);
  CHECK(run.experiment.result.certified_dimension == 2);
  CHECK(run.efficiency_std > 0.2);
  CHECK(run.efficiency_mub > 0.2);
}

TEST_CASE("haar bench smoke run is deterministic across thread counts") {
  ExperimentConfig config = smoke_config();
  config.haar_count = 3;
  config.designer.iterations = 4;
  const HaarBenchRun a = run_haar_bench(config, 1.0);
  config.threads = 1;
  const HaarBenchRun b = run_haar_bench(config, 1.0);
  REQUIRE(a.statistical_fidelity.size() == b.statistical_fidelity.size());
  for (int i = 0; i < a.statistical_fidelity.size(); ++i)
    CHECK(a.statistical_fidelity(i) == b.statistical_fidelity(i));
  CHECK(std::memcmp(a.efficiency.data(), b.efficiency.data(),
                    sizeof(double) * static_cast<std::size_t>(a.efficiency.size())) == 0);
}

TEST_CASE("write_table output is deterministic") {
  namespace fs = std::filesystem;
  const fs::path p1 = fs::temp_directory_path() / "mplc_table_1.tsv";
  const fs::path p2 = fs::temp_directory_path() / "mplc_table_2.tsv";
  const std::vector<std::vector<double>> rows = {{1.0, 0.1234567890123456789},
                                                 {2.0, 6.02214076e23}};
  write_table(p1, {"demo"}, {"a", "b"}, rows);
  write_table(p2, {"demo"}, {"a", "b"}, rows);
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(p1).find("6.02214076") != std::string::npos);
  fs::remove(p1);
  fs::remove(p2);
}

TEST_SUITE_END();
