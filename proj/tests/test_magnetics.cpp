#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "ambspindle/config.hpp"
#include "ambspindle/magnetics.hpp"
#include "oracles.hpp"

using namespace ambspindle;

namespace {

ProjectConfig fixture() { return load_config(std::string(AMBSPINDLE_FIXTURES) + "/case_study.yaml"); }

AxialAmbDesign case_axial(double k_ax) {
  AxialAmbDesign d;
  d.nominal_airgap = 0.3e-3;
  d.pole_area = 1.16e-4;
  d.turns = 66;
  d.bias_current = 1.6;
  d.max_current = 2.1;
  d.correction_factor = k_ax;
  d.rotor_weight = 2.17;
  return d;
}

}  // namespace

TEST(RadialFlux, SymmetricAtCentre) {
  const auto d = *fixture().radial_amb;
  const auto b = radial_flux_densities(d, 0, 0);
  EXPECT_DOUBLE_EQ(b.plus, b.minus);
  EXPECT_DOUBLE_EQ(b.plus, bias_flux_density(d, d.airgap));
  EXPECT_EQ(radial_force(d, 0, 0), 0.0);
}

TEST(RadialFlux, NoMagnetNoBias) {
  auto d = *fixture().radial_amb;
  d.magnet.thickness = 0;
  const auto b = radial_flux_densities(d, 0, 0);
  EXPECT_EQ(b.plus, 0.0);
  EXPECT_EQ(b.minus, 0.0);
  const auto g = radial_gains(d);
  EXPECT_EQ(g.displacement_gain, 0.0);
  EXPECT_EQ(g.current_gain, 0.0);
}

TEST(RadialFlux, GapClosureRejected) {
  const auto d = *fixture().radial_amb;
  EXPECT_THROW(radial_flux_densities(d, d.airgap, 0), DomainError);
  EXPECT_THROW(radial_force(d, -1.2 * d.airgap, 0), DomainError);
}

TEST(RadialFlux, FixtureFactorsReproduceReportedDensities) {
  const auto d = *fixture().radial_amb;
  const auto b = radial_flux_densities(d, 0, d.design_current);
  EXPECT_NEAR(b.plus, 0.664, 0.15 * 0.664);
  EXPECT_NEAR(b.minus, 0.205, 0.15 * 0.205);
}

TEST(RadialForce, MaxwellStressCrossCheck) {
  const double f = maxwell_force(0.664, 0.205, 4.7e-3 * 8.4e-3);
  EXPECT_NEAR(f, oracle::maxwell_pair(0.664, 0.205, 4.7e-3 * 8.4e-3), 1e-12);
  EXPECT_NEAR(f, 12.6, 0.1);
  EXPECT_NEAR(f, 13.72, 0.10 * 13.72);
}

TEST(RadialForce, FixtureStaticCapacity) {
  const auto d = *fixture().radial_amb;
  const auto c = radial_static_capacity(d);
  EXPECT_NEAR(c.force, 13.88, 0.01);
  EXPECT_EQ(c.limited_by, CapacityLimit::MaxCurrent);
}

TEST(RadialGains, MatchFiniteDifferencesOnRandomDesigns) {
  std::mt19937_64 rng(2024);
  for (int n = 0; n < 20; ++n) {
    const auto d = oracle::random_radial_design(rng);
    const auto g = radial_gains(d);
    const double hx = 1e-6 * d.airgap, hi = 1e-4;
    const auto [kx, ki] = oracle::central_gains([&](double x, double i) { return radial_force(d, x, i); }, hx, hi);
    EXPECT_NEAR(g.displacement_gain, kx, 1e-3 * std::abs(kx)) << "design " << n;
    EXPECT_NEAR(g.current_gain, ki, 1e-3 * std::abs(ki)) << "design " << n;
  }
}

TEST(RadialGains, LinearModelValidNearCentre) {
  const auto d = *fixture().radial_amb;
  const auto g = radial_gains(d);
  const double x = 2e-6, i = 0.01;
  const double lin = g.displacement_gain * x + g.current_gain * i;
  EXPECT_NEAR(radial_force(d, x, i), lin, 0.01 * std::abs(lin));
}

TEST(RadialGains, LinearModelWithinTwoPercentOverTenPercentBox) {
  const auto d = *fixture().radial_amb;
  const auto g = radial_gains(d);
  for (double fx : {-0.1, -0.05, 0.0, 0.05, 0.1})
    for (double fi : {-0.1, -0.05, 0.0, 0.05, 0.1}) {
      const double x = fx * d.airgap, i = fi * d.max_current;
      const double f = radial_force(d, x, i);
      const double kx = g.displacement_gain * x, ki = g.current_gain * i;
      // Where the two terms oppose, F nearly cancels; scale by the terms instead.
      const double scale = kx * ki < 0.0 ? std::abs(kx) + std::abs(ki) : std::abs(f);
      EXPECT_LT(std::abs(f - kx - ki) / std::max(scale, 1e-12), 0.02) << fx << " " << fi;
    }
}

TEST(RadialGains, OddInCurrentAndLinearInTurns) {
  auto d = *fixture().radial_amb;
  for (double i : {0.1, 1.0, 2.98}) EXPECT_NEAR(radial_force(d, 0, i) + radial_force(d, 0, -i), 0.0, 1e-12);
  const auto a = radial_gains(d);
  d.turns_per_pole *= 2;
  const auto b = radial_gains(d);
  EXPECT_NEAR(b.current_gain, 2 * a.current_gain, 1e-12 * b.current_gain);
  EXPECT_EQ(b.displacement_gain, a.displacement_gain);
}

TEST(RadialGains, FixtureGainsInStiffnessBand) {
  const auto g = radial_gains(*fixture().radial_amb);
  EXPECT_GE(g.displacement_gain, 1.4e4);
  EXPECT_LE(g.displacement_gain, 1.4e5);
  EXPECT_GT(g.current_gain, 0.0);
}

TEST(Axial, ForceSymmetricAndCaseValues) {
  const auto d = case_axial(1.0);
  EXPECT_EQ(axial_force(d, 0, 1.6, 1.6), 0.0);
  const auto hand = oracle::axial_hand(0.3e-3, 1.16e-4, 66, 1.6, 2.1, 1.0);
  EXPECT_NEAR(axial_force(d, 0, 2.1, 1.1), hand.force, 1e-12);
  EXPECT_NEAR(axial_gains(d).current_gain, hand.current_gain, 1e-12);
  EXPECT_NEAR(axial_gains(d).displacement_gain, hand.displacement_gain, 1e-8);
  EXPECT_NEAR(axial_static_capacity(d).force, 5.64, 0.01);
  EXPECT_NEAR(axial_static_capacity(d).force, 5.96, 0.06 * 5.96);
  EXPECT_THROW(axial_force(d, 0.3e-3, 1, 1), DomainError);
}

TEST(Axial, GainsAtUnityFactor) {
  const auto g = axial_gains(case_axial(1.0));
  EXPECT_NEAR(g.current_gain, 11.29, 0.01);
  EXPECT_NEAR(g.displacement_gain, 6.02e4, 0.01e4);
  EXPECT_NEAR(g.current_gain, 11.9, 0.07 * 11.9);
  EXPECT_NEAR(g.displacement_gain, 6.4e4, 0.07 * 6.4e4);
}

TEST(Axial, CalibratedFactorMatchesAllThreeValues) {
  const auto d = case_axial(0.973);
  const auto g = axial_gains(d);
  EXPECT_NEAR(g.current_gain, 11.9, 0.015 * 11.9);
  EXPECT_NEAR(g.displacement_gain, 6.4e4, 0.015 * 6.4e4);
  EXPECT_NEAR(axial_static_capacity(d).force, 5.96, 0.01 * 5.96);
}

TEST(Axial, GainsScaleWithInverseSquareOfFactor) {
  const auto a = axial_gains(case_axial(1.0));
  const auto b = axial_gains(case_axial(1.3));
  EXPECT_NEAR(b.current_gain * 1.69, a.current_gain, 1e-12);
  EXPECT_NEAR(b.displacement_gain * 1.69, a.displacement_gain, 1e-8);
}

TEST(Axial, StiffnessEqualsCurrentGainTimesBiasOverGap) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int n = 0; n < 10; ++n) {
    auto d = case_axial(u(rng));
    d.nominal_airgap *= u(rng);
    d.bias_current *= u(rng);
    d.turns = static_cast<int>(66 * u(rng));
    const auto g = axial_gains(d);
    EXPECT_NEAR(g.displacement_gain, g.current_gain * d.bias_current / d.nominal_airgap, 1e-12 * g.displacement_gain);
  }
}

TEST(Axial, NoBiasNoGain) {
  auto d = case_axial(1.0);
  d.bias_current = 0;
  const auto g = axial_gains(d);
  EXPECT_EQ(g.current_gain, 0.0);
  EXPECT_EQ(g.displacement_gain, 0.0);
}

TEST(Axial, GainsMatchFiniteDifferences) {
  const auto d = case_axial(0.973);
  const auto g = axial_gains(d);
  const double hz = 1e-9, hi = 1e-5;
  const double kz = (axial_force(d, hz, 1.6, 1.6) - axial_force(d, -hz, 1.6, 1.6)) / (2 * hz);
  const double ki = (axial_force(d, 0, 1.6 + hi, 1.6 - hi) - axial_force(d, 0, 1.6 - hi, 1.6 + hi)) / (2 * hi);
  EXPECT_NEAR(g.displacement_gain, kz, 1e-6 * kz);
  EXPECT_NEAR(g.current_gain, ki, 1e-6 * ki);
}

TEST(Axial, WeightBalanceOffset) {
  const auto d = case_axial(1.0);
  const double delta = weight_balance_offset(d);
  EXPECT_NEAR(delta, 0.192, 0.001);
  EXPECT_NEAR(axial_force(d, 0, 1.6 + delta, 1.6 - delta), 2.17, 1e-12);
}

TEST(Inductance, AxialActuator) {
  const double hand = 66.0 * 66.0 * 4e-7 * kPi * 1.16e-4 / (2 * 0.3e-3);
  EXPECT_NEAR(axial_inductance(case_axial(1.0)), hand, 1e-15);
  EXPECT_NEAR(axial_inductance(case_axial(1.0)), 1.06e-3, 0.005e-3);
  EXPECT_THROW(coil_inductance(0, {{{1e-3, 1e-4}}, 1.0}), DomainError);
}

TEST(Envelope, CaseStudyKnee) {
  const auto env = envelope_from_knee(13.88, 717.9);
  EXPECT_NEAR(env.knee_frequency(), 717.9, 1e-9);
  EXPECT_NEAR(env.dynamic_capacity(1833.33), 5.43, 0.02);
  EXPECT_NEAR(env.dynamic_capacity(3666.67), 2.72, 0.02);
  EXPECT_EQ(env.dynamic_capacity(0), 13.88);
  EXPECT_LT(env.capacity(1e12), 1e-6);
}

TEST(Envelope, NonIncreasingAndBranchesMeetAtKnee) {
  const auto env = envelope_from_knee(13.88, 717.9);
  double prev = env.capacity(0);
  for (double f = 10; f < 2e4; f *= 1.07) {
    EXPECT_LE(env.capacity(f), prev);
    prev = env.capacity(f);
  }
  EXPECT_NEAR(env.dynamic_capacity(env.knee_frequency()), 13.88, 1e-12);
  EXPECT_EQ(env.capacity(0.9 * env.knee_frequency()), 13.88);
  EXPECT_LT(env.capacity(1.1 * env.knee_frequency()), 13.88);
  EXPECT_NEAR(env.dynamic_capacity(2 * 1833.33), env.dynamic_capacity(1833.33) / 2, 1e-12);
}

TEST(Envelope, FixtureVoltageGivesKnee) {
  const auto d = *fixture().radial_amb;
  const auto env = capacity_envelope(radial_static_capacity(d).force, radial_gains(d).current_gain,
                                     d.amplifier_voltage, radial_inductance(d));
  EXPECT_NEAR(env.knee_frequency(), 717.9, 0.1);
}

TEST(Envelope, CaseDemandsPass) {
  const auto env = envelope_from_knee(13.88, 717.9);
  const std::vector<DemandPoint> pts{{0, 0.43, "static", Axis::Radial, DemandClass::MachiningStatic},
                                     {1833.33, 3.81, "unbalance", Axis::Radial, DemandClass::Unbalance},
                                     {3666.67, 0.64, "dynamic", Axis::Radial, DemandClass::MachiningDynamic}};
  const auto v = envelope_verdict(env, pts);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.checks.size(), 3u);
  EXPECT_NEAR(v.checks[1].margin, env.capacity(1833.33) - 3.81, 1e-12);
}

TEST(Envelope, EqualDemandFails) {
  const auto env = envelope_from_knee(13.88, 717.9);
  const double cap = env.capacity(3666.67);
  EXPECT_FALSE(envelope_verdict(env, {{3666.67, cap, "edge", Axis::Radial, DemandClass::MachiningDynamic}}).pass);
}

TEST(Envelope, EmptyDemandsPassWithWarning) {
  const auto v = envelope_verdict(envelope_from_knee(1, 1), std::vector<DemandPoint>{});
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.warnings.size(), 1u);
}

TEST(Envelope, UnfactoredDemandsRejected) {
  EXPECT_THROW(envelope_verdict(envelope_from_knee(1, 1), DemandSpectrum{}, Axis::Radial), DomainError);
}

TEST(Checklist, FixtureRadialPointPasses) {
  const auto c = fixture();
  const auto list = radial_constraint_checks(*c.radial_amb, c.limits);
  EXPECT_EQ(list.checks.size(), 4u);
  EXPECT_TRUE(list.pass());
}

TEST(Checklist, ControlReachingBiasFails) {
  const auto d = *fixture().radial_amb;
  const double i = bias_flux_density(d, d.airgap) / control_flux_density(d, 1.0);
  EXPECT_FALSE(radial_constraint_checks(d, i).get("control_below_bias").pass);
  EXPECT_TRUE(radial_constraint_checks(d, 0.99 * i).get("control_below_bias").pass);
}

TEST(Checklist, StiffnessBelowBandFails) {
  const auto c = detail::stiffness_check(1.3e4, ConstraintLimits{});
  EXPECT_FALSE(c.pass);
  EXPECT_EQ(c.note, "below band");
  EXPECT_TRUE(detail::stiffness_check(1.4e4, ConstraintLimits{}).pass);
  EXPECT_TRUE(detail::stiffness_check(1.4e5, ConstraintLimits{}).pass);
}

TEST(Checklist, AxialWithoutWireSkipsCurrentDensity) {
  const auto list = axial_constraint_checks(case_axial(0.973));
  EXPECT_FALSE(list.get("current_density").evaluated);
  EXPECT_TRUE(list.pass());
}
