#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ambspindle/config.hpp"
#include "ambspindle/materials.hpp"
#include "ambspindle/units.hpp"

using namespace ambspindle;

namespace {

MaterialSpec aisi410() {
  MaterialSpec m;
  m.name = "AISI410";
  m.density = 7700;
  m.yield_strength = 275e6;
  m.poisson = 0.28;
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool mentions(const ValidationError& e, const std::string& needle) {
  for (const auto& v : e.violations())
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Units, SpeedConversionsAreConsistent) {
  const Speed s = Speed::from_rpm(110000);
  EXPECT_NEAR(s.hz(), 1833.333333333, 1e-9);
  EXPECT_NEAR(s.rad_per_s(), 11519.173063, 1e-6);
  EXPECT_DOUBLE_EQ(Speed::from_rad_per_s(s.rad_per_s()).rpm(), s.rpm());
  EXPECT_DOUBLE_EQ(units::from_Nmm(units::to_Nmm(2.65e-3)), 2.65e-3);
}

TEST(Materials, StainlessSteelIsValid) {
  const MaterialSpec m = aisi410();
  EXPECT_EQ(validate_material(m), m);
}

TEST(Materials, ZeroDensityRejected) {
  MaterialSpec m = aisi410();
  m.density = 0;
  try {
    validate_material(m);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(mentions(e, "density"));
    EXPECT_EQ(e.violations().size(), 1u);
  }
}

TEST(Materials, SubUnityPermeabilityRejected) {
  MaterialSpec m = aisi410();
  m.relative_permeability = 0.5;
  try {
    validate_material(m);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(mentions(e, "relative_permeability"));
  }
}

TEST(Materials, EveryViolationListed) {
  MaterialSpec m = aisi410();
  m.density = -1;
  m.poisson = 0.7;
  m.relative_permeability = 0.5;
  try {
    validate_material(m);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations().size(), 3u);
  }
}

TEST(Config, TurbineOnlyDocumentTakesDryAirDefaults) {
  const auto c = parse_config(R"(
turbine:
  pitch_diameter: 10e-3
  nozzle_diameter: 1.5e-3
  inlet_pressure: 0.2e6
)");
  ASSERT_TRUE(c.turbine);
  EXPECT_DOUBLE_EQ(c.turbine->spec.gas.specific_heat_ratio, 1.4);
  EXPECT_DOUBLE_EQ(c.turbine->spec.gas.gas_constant, 287.05);
  EXPECT_DOUBLE_EQ(c.turbine->spec.source_temperature, 293.15);
  EXPECT_FALSE(c.rotor);
  EXPECT_FALSE(c.operating_speed);
}

TEST(Config, PoissonAboveBoundNamesTheInvariant) {
  try {
    parse_config(R"(
materials:
  bad:
    density: 7700
    yield_strength: 275e6
    poisson: 0.7
)");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(mentions(e, "poisson"));
  }
}

TEST(Config, SyntaxErrorCarriesLine) {
  try {
    parse_config("turbine:\n  pitch_diameter: [1, 2\n  nozzle_diameter: 3\n");
    FAIL();
  } catch (const InputError& e) {
    ASSERT_TRUE(e.line().has_value());
    EXPECT_GE(*e.line(), 2);
  }
}

TEST(Config, MissingFieldIsNamed) {
  try {
    parse_config("turbine:\n  pitch_diameter: 10e-3\n  inlet_pressure: 2e5\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("turbine.nozzle_diameter"), std::string::npos);
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Config, UnknownFieldRejectedWithLine) {
  try {
    parse_config("turbine:\n  pitch_diameter: 10e-3\n  nozzle_diameter: 1e-3\n  inlet_pressure: 2e5\n  nozzel: 4\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("turbine.nozzel"), std::string::npos);
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(Config, BadScalarRejected) {
  EXPECT_THROW(parse_config("operating_speed_rpm: fast\n"), InputError);
}

TEST(Config, NonPositiveOperatingSpeedRejected) {
  EXPECT_THROW(parse_config("operating_speed_rpm: 0\n"), ValidationError);
}

TEST(Config, UnknownMaterialReference) {
  EXPECT_THROW(parse_config(R"(
rotor:
  segments:
    - {length: 0.1, outer_diameter: 0.01, material: unobtainium}
)"),
               InputError);
}

TEST(Config, GaugePressuresConvertedOnce) {
  const std::string doc = "turbine:\n  pitch_diameter: 10e-3\n  nozzle_diameter: 1.5e-3\n  inlet_pressure: 1e5\n";
  const auto c = parse_config(doc, {true});
  EXPECT_DOUBLE_EQ(c.turbine->spec.inlet_pressure, 1e5 + kStandardAtmosphere);
  EXPECT_DOUBLE_EQ(c.turbine->spec.outlet_pressure, kStandardAtmosphere);
}

TEST(Config, FixtureRoundTripsExactly) {
  const auto c = load_config(std::string(AMBSPINDLE_FIXTURES) + "/case_study.yaml");
  const std::string text = serialize_config(c);
  const auto again = parse_config(text);
  EXPECT_EQ(again, c);
  EXPECT_EQ(serialize_config(again), text);
}

TEST(Config, MinimalDocumentRoundTrips) {
  const auto c = parse_config("operating_speed_rpm: 123456.789\n");
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, FixtureDescribesTheCaseStudy) {
  const auto c = load_config(std::string(AMBSPINDLE_FIXTURES) + "/case_study.yaml");
  ASSERT_TRUE(c.operating_speed);
  EXPECT_DOUBLE_EQ(c.operating_speed->rpm(), 110000);
  ASSERT_TRUE(c.rotor && c.radial_amb && c.axial_amb && c.turbine && c.loads && c.optimizer);
  double length = 0;
  for (const auto& s : c.rotor->model.segments) length += s.length;
  EXPECT_NEAR(length, 0.155, 1e-12);
  EXPECT_NEAR(c.rotor->model.mass(), 0.22, 0.05 * 0.22);
}

TEST(Config, SchemaListsEveryTopLevelBlock) {
  const std::string schema = read_file(std::string(AMBSPINDLE_FIXTURES) + "/../docs/config.schema.json");
  for (const char* key : {"operating_speed_rpm", "materials", "limits", "turbine", "rotor", "loads", "radial_amb",
                          "axial_amb", "envelope", "audit", "optimizer"})
    EXPECT_NE(schema.find(std::string("\"") + key + "\""), std::string::npos) << key;
}
