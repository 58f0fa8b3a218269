#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ambspindle/config.hpp"
#include "ambspindle/report.hpp"

using namespace ambspindle;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtureDir = AMBSPINDLE_FIXTURES;
const fs::path kFixture = kFixtureDir / "case_study.yaml";

ProjectConfig fixture() { return load_config(kFixture); }

const Verdict& verdict(const std::vector<Verdict>& vs, const std::string& name) {
  for (const auto& v : vs)
    if (v.name == name) return v;
  throw std::runtime_error("no verdict " + name);
}

double metric(const std::vector<Metric>& ms, const std::string& name) {
  for (const auto& m : ms)
    if (m.name == name) return m.value;
  throw std::runtime_error("no metric " + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ambspindle_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AMBSPINDLE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Writes a variant of the fixture with an absolute trace path.
fs::path write_variant(const ProjectConfig& c, const std::string& name) {
  ProjectConfig v = c;
  if (v.loads) v.loads->trace_csv = (kFixtureDir / "milling_trace.csv").string();
  const fs::path p = scratch(name) / "config.yaml";
  std::ofstream(p) << serialize_config(v);
  return p;
}

}  // namespace

TEST(Sensor, CaseStudyRequirements) {
  const auto r = sensor_requirements(Speed::from_rpm(110000), 2, 0.4e-3, 0.3e-3, 1.5e-6, 1.0);
  EXPECT_NEAR(r.radial_range, 0.2e-3, 1e-15);
  EXPECT_NEAR(r.axial_range, 0.15e-3, 1e-15);
  EXPECT_NEAR(r.bandwidth, 3666.67, 0.005);
  EXPECT_EQ(r.resolution, 1.5e-6);
  EXPECT_NEAR(sensor_requirements(Speed::from_rpm(110000), 1, 0.4e-3, 0.3e-3, 1.5e-6, 1.0).bandwidth, 1833.33,
              0.005);
  EXPECT_THROW(sensor_requirements(Speed::from_rpm(110000), 0, 0.4e-3, 0.3e-3, 1.5e-6, 1.0), DomainError);
}

TEST(Sensor, CandidateSensorPasses) {
  const auto r = sensor_requirements(Speed::from_rpm(110000), 2, 0.4e-3, 0.3e-3, 1.5e-6, 1.0);
  const auto a = audit_sensor(r, {2.5e-3, 10e3, 1e-6});
  EXPECT_EQ(a.entries.size(), 4u);
  EXPECT_TRUE(a.pass());
  for (const auto& e : a.entries) EXPECT_FALSE(e.basis.empty());
}

TEST(Sensor, SlowOrCoarseSensorFails) {
  const auto r = sensor_requirements(Speed::from_rpm(110000), 2, 0.4e-3, 0.3e-3, 1.5e-6, 1.0);
  EXPECT_FALSE(audit_sensor(r, {2.5e-3, 3e3, 1e-6}).pass());
  EXPECT_FALSE(audit_sensor(r, {2.5e-3, 10e3, 1.5e-6}).pass());
  EXPECT_FALSE(audit_sensor(r, {0.3e-3, 10e3, 1e-6}).pass());
}

TEST(Stiffness, GuidelineBand) {
  EXPECT_TRUE(stiffness_guideline(1.4e5, 1.4e5).pass);
  EXPECT_TRUE(stiffness_guideline(1.4e4, 1.4e5).pass);
  EXPECT_FALSE(stiffness_guideline(1.3e4, 1.4e5).pass);
  EXPECT_FALSE(stiffness_guideline(1.5e5, 1.4e5).pass);
  EXPECT_EQ(touchdown_clearance(0.4e-3), 0.2e-3);
}

TEST(Pipeline, FixtureReproducesGoldenNumbers) {
  const auto r = run_pipeline(fixture(), kFixtureDir);
  EXPECT_TRUE(r.pass());
  const auto m = r.summary();
  EXPECT_NEAR(metric(m, "mach_number"), 0.17, 0.005);
  EXPECT_NEAR(metric(m, "ideal_turbine_speed"), 114320, 100);
  EXPECT_NEAR(metric(m, "turbine_torque"), 2.65, 0.03);
  EXPECT_NEAR(metric(m, "torque_margin_ratio"), 2.30, 0.05);
  EXPECT_NEAR(metric(m, "windage_torque"), 0.18, 1e-6);
  EXPECT_NEAR(metric(m, "max_rotor_diameter"), 51.2, 0.1);
  EXPECT_NEAR(metric(m, "demand_unbalance"), 3.81, 0.01 * 3.81);
  EXPECT_NEAR(metric(m, "demand_static_radial"), 0.43, 0.01 * 0.43);
  EXPECT_NEAR(metric(m, "demand_machining_dynamic_radial"), 0.64, 0.01 * 0.64);
  EXPECT_NEAR(metric(m, "radial_knee_frequency"), 717.9, 0.1);
  EXPECT_NEAR(metric(m, "capacity_at_unbalance"), 5.43, 0.02);
  EXPECT_NEAR(metric(m, "capacity_at_machining_dynamic_radial"), 2.72, 0.02);
  EXPECT_EQ(metric(m, "overall_pass"), 1.0);
  EXPECT_TRUE(r.audit.audit.pass());
}

TEST(Pipeline, NoPressureDropFailsTurbineStage) {
  auto c = fixture();
  c.turbine->spec.inlet_pressure = c.turbine->spec.outlet_pressure;
  const auto s = run_turbine_stage(c);
  const auto& v = verdict(s.verdicts, "torque_margin");
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.detail.find("zero drive torque"), std::string::npos);
}

TEST(Pipeline, OversizedDiscFailsCentrifugalLimit) {
  auto c = fixture();
  c.operating_speed = Speed::from_rpm(250000);
  const auto s = run_rotor_stage(c);
  EXPECT_FALSE(verdict(s.verdicts, "centrifugal_limit").pass);
  EXPECT_NEAR(units::to_mm(s.max_diameter), 22.5, 0.1);
}

TEST(Pipeline, MissingBlockIsInputError) {
  auto c = fixture();
  c.rotor.reset();
  try {
    run_pipeline(c, kFixtureDir);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "rotor");
    EXPECT_EQ(e.kind(), StageError::Kind::Input);
  }
}

TEST(Pipeline, ArtifactsAreByteIdenticalOnRerun) {
  const auto c = fixture();
  const auto a = scratch("artifacts_a"), b = scratch("artifacts_b");
  const auto names = write_report_artifacts(run_pipeline(c, kFixtureDir), c.envelope, a);
  write_report_artifacts(run_pipeline(c, kFixtureDir), c.envelope, b);
  ASSERT_GE(names.size(), 12u);
  for (const auto& n : names) {
    const auto x = slurp(a / n);
    EXPECT_FALSE(x.empty()) << n;
    EXPECT_EQ(x, slurp(b / n)) << n;
  }
  EXPECT_EQ(slurp(a / "summary.csv").substr(0, 17), "metric,value,unit");
  EXPECT_EQ(slurp(a / "turbine_sweep_eta0.18.csv").substr(0, 17), "d_n_mm,torque_Nmm");
}

TEST(Cli, ReportOnFixtureExitsZero) {
  const auto out = scratch("cli_report");
  EXPECT_EQ(run_cli("--config " + kFixture.string() + " --out-dir " + out.string() + " report"), 0);
  EXPECT_TRUE(fs::exists(out / "summary.csv"));
  EXPECT_TRUE(fs::exists(out / "campbell.csv"));
}

TEST(Cli, FailedAuditExitsTwo) {
  auto c = fixture();
  c.turbine->spec.inlet_pressure = c.turbine->spec.outlet_pressure;
  const auto cfg = write_variant(c, "cli_fail");
  EXPECT_EQ(run_cli("--config " + cfg.string() + " turbine"), 2);
  EXPECT_EQ(run_cli("--config " + cfg.string() + " --out-dir " + scratch("cli_fail_out").string() + " report"), 2);
}

TEST(Cli, InputErrorsExitThree) {
  const auto dir = scratch("cli_bad");
  std::ofstream(dir / "bad.yaml") << "turbine: [unclosed\n";
  EXPECT_EQ(run_cli("--config " + (dir / "bad.yaml").string() + " turbine"), 3);
  EXPECT_EQ(run_cli("--config " + (dir / "missing.yaml").string() + " turbine"), 3);
  EXPECT_EQ(run_cli("--config " + kFixture.string()), 3);
  std::ofstream(dir / "nospeed.yaml") << "materials: {}\n";
  EXPECT_EQ(run_cli("--config " + (dir / "nospeed.yaml").string() + " rotor"), 3);
}

TEST(Cli, SubcommandsOnFixture) {
  const auto out = scratch("cli_sub");
  for (const char* cmd : {"turbine", "rotor", "campbell", "amb", "envelope", "audit"})
    EXPECT_EQ(run_cli("--config " + kFixture.string() + " --format csv --out-dir " + out.string() + " " + cmd), 0)
        << cmd;
}

TEST(Audit, EveryBasisTextIsDocumented) {
  std::ifstream in(kFixtureDir / ".." / "docs" / "design.md");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto s = run_pipeline(fixture(), kFixtureDir);
  ASSERT_FALSE(s.audit.audit.entries.empty());
  for (const auto& e : s.audit.audit.entries) EXPECT_NE(ss.str().find(e.basis), std::string::npos) << e.name;
}
