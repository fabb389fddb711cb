#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "svqe/scan.hpp"

using namespace svqe;
namespace fs = std::filesystem;

namespace {

ScanConfig tiny_config() {
  ScanConfig cfg;
  cfg.model.sites = 2;
  cfg.model.flavors = 3;
  cfg.model.x = 1.0;
  cfg.model.mu = {0.0, 0.0, 0.0};
  cfg.lo = -2.0;
  cfg.hi = 2.0;
  cfg.steps = 5;
  cfg.layers = 1;
  cfg.constrained = true;
  cfg.optimizer.restarts = 2;
  cfg.optimizer.threads = 1;
  return cfg;
}

ScanPointResult labelled(std::size_t index, double nu0, double dn0, double dn2) {
  ScanPointResult p;
  p.index = index;
  p.nu = {nu0, 0.0, -nu0};
  p.ed_delta_n = {dn0, 0.0, dn2};
  VqeRunRecord r;
  r.delta_n = {dn0, 0.0, dn2};
  p.records.push_back(r);
  p.best = 0;
  return p;
}

std::string csv_of(const std::vector<ScanPointResult>& r) {
  std::ostringstream os;
  write_points_csv(os, r);
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("svqe_scan_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(ScanConfig, Validation) {
  ScanConfig cfg = tiny_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.nu1 = 0.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.constrained = false;
  EXPECT_NO_THROW(cfg.validate());
  cfg = tiny_config();
  cfg.tie_nu2 = false;
  cfg.nu2 = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.model.flavors = 2;
  cfg.model.mu = {0.0, 0.0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.steps = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.hi = cfg.lo;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ScanConfig, SweepGridAndSeeds) {
  const ScanConfig cfg = tiny_config();
  EXPECT_EQ(cfg.sweep_value(0), -2.0);
  EXPECT_EQ(cfg.sweep_value(2), 0.0);
  EXPECT_EQ(cfg.sweep_value(4), 2.0);
  const ModelParams p = cfg.point_model(1);
  EXPECT_EQ(p.nu, (std::vector<double>{-1.0, 0.0, 1.0}));
  EXPECT_NE(cfg.point_seed(0), cfg.point_seed(1));
  ScanConfig other = cfg;
  other.steps = 9;
  EXPECT_EQ(cfg.point_seed(3), other.point_seed(3));
}

TEST(DetectTransitions, PlateauHasNone) {
  std::vector<ScanPointResult> r;
  for (std::size_t i = 0; i < 4; ++i) r.push_back(labelled(i, 0.1 * i, 0.0, 0.0));
  EXPECT_TRUE(detect_transitions(r, PhaseSource::kEd).empty());
  EXPECT_TRUE(detect_transitions(r, PhaseSource::kVqe).empty());
}

TEST(DetectTransitions, SingleJump) {
  std::vector<ScanPointResult> r = {labelled(0, -1.0, 0.0, 0.0), labelled(1, -0.5, 1e-9, -1e-9),
                                    labelled(2, 0.0, 1.0, -1.0), labelled(3, 0.5, 1.0, -1.0)};
  const auto t = detect_transitions(r, PhaseSource::kEd);
  ASSERT_EQ(t.size(), 1U);
  EXPECT_EQ(t[0].index_lo, 1U);
  EXPECT_EQ(t[0].index_hi, 2U);
  EXPECT_EQ(t[0].nu0_lo, -0.5);
  EXPECT_EQ(t[0].nu0_hi, 0.0);
  EXPECT_EQ(t[0].dn0_lo, 0);
  EXPECT_EQ(t[0].dn2_lo, 0);
  EXPECT_EQ(t[0].dn0_hi, 1);
  EXPECT_EQ(t[0].dn2_hi, -1);
  std::ostringstream os;
  write_transitions_csv(os, t);
  EXPECT_EQ(os.str(), std::string(kTransitionsCsvHeader) + "\ned,1,2,-0.5,0,0,0,1,-1\n");
}

TEST(DetectTransitions, SkipsFailedPoints) {
  std::vector<ScanPointResult> r = {labelled(0, -1.0, 0.0, 0.0), labelled(1, 0.0, 0.0, 0.0),
                                    labelled(2, 1.0, 1.0, -1.0)};
  r[1].best.reset();
  r[1].failed = true;
  std::vector<std::size_t> skipped;
  const auto t = detect_transitions(r, PhaseSource::kVqe, &skipped);
  EXPECT_EQ(skipped, std::vector<std::size_t>{1});
  ASSERT_EQ(t.size(), 1U);
  EXPECT_EQ(t[0].index_lo, 0U);
  EXPECT_EQ(t[0].index_hi, 2U);
}

TEST(PointsCsv, HeaderOnlyForEmptyResults) {
  EXPECT_EQ(csv_of({}),
            "nu0,nu1,nu2,ed_energy,ed_dN0,ed_dN2,gap,best_energy,best_dN0,best_dN2,best_overlap,"
            "n_outliers,n_runs\n");
}

TEST(PointsCsv, FailedPointsWriteNan) {
  ScanPointResult p = labelled(0, 0.25, 0.0, 0.0);
  p.best.reset();
  p.records[0].outlier = true;
  p.failed = true;
  const std::string csv = csv_of({p});
  EXPECT_NE(csv.find("\n0.25,0,-0.25,0,0,0,0,nan,nan,nan,nan,1,1\n"), std::string::npos) << csv;
}

TEST_F(TempDir, RerunIsByteIdentical) {
  ScanConfig cfg = tiny_config();
  cfg.csv_path = (dir_ / "a.csv").string();
  emit_outputs(run_scan(cfg), cfg);
  const std::string first = slurp(cfg.csv_path);
  cfg.csv_path = (dir_ / "b.csv").string();
  cfg.optimizer.threads = 2;
  emit_outputs(run_scan(cfg), cfg);
  EXPECT_EQ(first, slurp(cfg.csv_path));
  EXPECT_EQ(first.substr(0, first.find('\n')), kPointsCsvHeader);
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 6);
}

TEST_F(TempDir, JsonRoundTripPreservesClassification) {
  ScanConfig cfg = tiny_config();
  cfg.json_path = (dir_ / "scan.json").string();
  const auto results = run_scan(cfg);
  emit_outputs(results, cfg);
  std::ifstream in(cfg.json_path);
  const nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("config"), cfg.to_json());
  ASSERT_EQ(j.at("points").size(), results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    ScanPointResult back = point_from_json(j.at("points")[i]);
    EXPECT_EQ(back.ed_energy, results[i].ed_energy);
    EXPECT_EQ(back.best, results[i].best);
    ASSERT_EQ(back.records.size(), results[i].records.size());
    std::vector<bool> stored;
    for (const auto& r : back.records) stored.push_back(r.outlier);
    classify_outliers(back.records, cfg.optimizer.energy_factor, cfg.optimizer.int_tol);
    for (std::size_t k = 0; k < stored.size(); ++k) {
      EXPECT_EQ(back.records[k].outlier, stored[k]);
      EXPECT_EQ(back.records[k].params, results[i].records[k].params);
    }
  }
}

TEST_F(TempDir, ResumeMatchesUninterruptedRun) {
  ScanConfig cfg = tiny_config();
  cfg.checkpoint_path = (dir_ / "ckpt.jsonl").string();
  const std::string full = csv_of(run_scan(cfg));

  // keep the header and two points, plus a torn final line
  std::istringstream lines(slurp(cfg.checkpoint_path));
  std::string line;
  std::string kept;
  for (int i = 0; i < 3 && std::getline(lines, line); ++i) kept += line + '\n';
  {
    std::ofstream out(cfg.checkpoint_path, std::ios::trunc);
    out << kept << "{\"index\": 4, \"nu\"";
  }
  auto done = load_checkpoint(cfg);
  ASSERT_EQ(done.size(), 2U);
  std::vector<std::size_t> fresh;
  const auto resumed =
      run_scan(cfg, std::move(done), [&](const ScanPointResult& r) { fresh.push_back(r.index); });
  EXPECT_EQ(fresh.size(), 3U);
  EXPECT_EQ(csv_of(resumed), full);
  EXPECT_EQ(load_checkpoint(cfg).size(), 5U);

  ScanConfig other = cfg;
  other.optimizer.seed += 1;
  EXPECT_THROW(load_checkpoint(other), std::runtime_error);
}

TEST_F(TempDir, UnwritableOutputIsAnIoError) {
  ScanConfig cfg = tiny_config();
  cfg.csv_path = (dir_ / "missing" / "out.csv").string();
  EXPECT_THROW(emit_outputs({}, cfg), std::ios_base::failure);
}

TEST(RunPoint, RecordsMatchEdBaseline) {
  const ScanConfig cfg = tiny_config();
  const ScanPointResult r = run_point(cfg, 0);
  ASSERT_FALSE(r.failed) << r.error;
  const SpectrumResult ed = ed_baseline(cfg.point_model(0), cfg.ed_levels);
  EXPECT_EQ(r.ed_energy, ed.energies[0]);
  EXPECT_EQ(r.records.size(), 2U);
  for (const auto& rec : r.records) EXPECT_GE(rec.energy, r.ed_energy - 1e-9);
  for (double d : r.ed_delta_n) EXPECT_NEAR(d, std::round(d), 1e-6);
}
