#pragma once

// Impulse air-turbine sizing: tip Mach number, isentropic nozzle expansion,
// ideal runaway speed, nozzle mass flow, output torque and torque margin.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ambspindle/error.hpp"
#include "ambspindle/materials.hpp"
#include "ambspindle/units.hpp"

namespace ambspindle {

struct TurbineSpec {
  double pitch_diameter = 0.0;           // d_m [m]
  double nozzle_diameter = 0.0;          // d_n [m]
  int nozzle_count = 1;                  // Z
  int bucket_count = 2;                  // Z_b; no equation depends on it
  double inlet_pressure = 0.0;           // absolute [Pa]
  double outlet_pressure = kStandardAtmosphere;  // absolute [Pa]
  double source_temperature = 293.15;    // [K]
  double airflow_loss_coefficient = 0.92;  // phi
  double speed_efficiency = 0.2;         // xi
  double power_efficiency = 0.18;        // eta
  GasSpec gas;

  bool operator==(const TurbineSpec&) const = default;
};

inline std::vector<std::string> turbine_violations(const TurbineSpec& t) {
  std::vector<std::string> out = gas_violations(t.gas);
  if (!(t.pitch_diameter > 0.0)) out.push_back("turbine: pitch_diameter must be > 0");
  if (!(t.nozzle_diameter > 0.0)) out.push_back("turbine: nozzle_diameter must be > 0");
  if (t.nozzle_count < 1) out.push_back("turbine: nozzle_count must be >= 1");
  if (t.bucket_count < 2) out.push_back("turbine: bucket_count must be >= 2");
  if (!(t.outlet_pressure > 0.0)) out.push_back("turbine: outlet_pressure must be > 0");
  if (!(t.inlet_pressure >= t.outlet_pressure)) out.push_back("turbine: inlet_pressure must be >= outlet_pressure");
  if (!(t.source_temperature > 0.0)) out.push_back("turbine: source_temperature must be > 0");
  auto unit_interval = [&](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) out.push_back(std::string("turbine: ") + name + " must be in (0, 1]");
  };
  unit_interval(t.airflow_loss_coefficient, "airflow_loss_coefficient");
  unit_interval(t.speed_efficiency, "speed_efficiency");
  unit_interval(t.power_efficiency, "power_efficiency");
  return out;
}

/// Mach number is considered safely subsonic below this value.
inline constexpr double kTransonicOnsetMach = 0.8;

struct MachCheck {
  double mach = 0.0;
  bool subsonic = true;
};

inline MachCheck mach_number(Speed speed, double pitch_diameter, const GasSpec& gas, double temperature) {
  if (!(temperature > 0.0)) throw DomainError("mach_number: temperature must be > 0");
  const double tip_speed = kPi * speed.rpm() * pitch_diameter / 60.0;
  const double mach = tip_speed / gas.speed_of_sound(temperature);
  return {mach, mach < kTransonicOnsetMach};
}

/// Isentropic nozzle exit velocity [m/s].
inline double nozzle_exit_velocity(double inlet_pressure, double outlet_pressure, double temperature,
                                   const GasSpec& gas) {
  if (outlet_pressure > inlet_pressure) throw DomainError("nozzle_exit_velocity: outlet pressure exceeds inlet");
  if (!(outlet_pressure > 0.0)) throw DomainError("nozzle_exit_velocity: outlet pressure must be > 0");
  const double k = gas.specific_heat_ratio;
  const double expansion = 1.0 - std::pow(outlet_pressure / inlet_pressure, (k - 1.0) / k);
  return std::sqrt(2.0 * k / (k - 1.0) * gas.gas_constant * temperature * expansion);
}

inline Speed ideal_turbine_speed(double exit_velocity, double loss_coefficient, double speed_efficiency,
                                 double pitch_diameter) {
  if (!(pitch_diameter > 0.0)) throw DomainError("ideal_turbine_speed: pitch diameter must be > 0");
  return Speed::from_rpm(60.0 * exit_velocity * loss_coefficient * speed_efficiency / (kPi * pitch_diameter));
}

/// Gas density at the nozzle exit from the isentropic relation [kg/m^3].
inline double nozzle_exit_density(const TurbineSpec& t) {
  return t.inlet_pressure / (t.gas.gas_constant * t.source_temperature) *
         std::pow(t.outlet_pressure / t.inlet_pressure, 1.0 / t.gas.specific_heat_ratio);
}

/// Mass flow through one nozzle [kg/s].
inline double mass_flowrate(const TurbineSpec& t, double exit_velocity) {
  return nozzle_exit_density(t) * exit_velocity * kPi * t.nozzle_diameter * t.nozzle_diameter / 4.0;
}

/// Output torque [N m] from the jet/shaft power balance P_shaft = eta P_jet.
/// xi enters through the ideal speed substituted into the shaft power.
inline double turbine_torque(const TurbineSpec& t, double exit_velocity) {
  const double k = t.gas.specific_heat_ratio;
  return kPi * t.power_efficiency * t.nozzle_count * t.pitch_diameter * t.nozzle_diameter * t.nozzle_diameter *
         t.inlet_pressure * exit_velocity * exit_velocity /
         (16.0 * t.airflow_loss_coefficient * t.speed_efficiency * t.gas.gas_constant * t.source_temperature) *
         std::pow(t.outlet_pressure / t.inlet_pressure, 1.0 / k);
}

/// Windage torque of a rotating cylinder [N m], M = C_f pi rho w^2 r^4 L.
inline double windage_torque(double friction_coefficient, double air_density, double speed_rad_per_s,
                             double radius, double length) {
  if (friction_coefficient < 0.0 || air_density < 0.0 || speed_rad_per_s < 0.0 || radius < 0.0 || length < 0.0)
    throw DomainError("windage_torque: inputs must be non-negative");
  return friction_coefficient * kPi * air_density * speed_rad_per_s * speed_rad_per_s * std::pow(radius, 4) * length;
}

struct TorqueMargin {
  double margin = 0.0;  // [N m]
  double ratio = 0.0;   // drive / load; +inf when the load is zero
  bool infinite_ratio = false;
  bool pass = false;
};

inline TorqueMargin torque_margin(double drive_torque, double machining_torque, double windage) {
  if (drive_torque < 0.0 || machining_torque < 0.0 || windage < 0.0)
    throw DomainError("torque_margin: torques must be non-negative");
  TorqueMargin m;
  const double load = machining_torque + windage;
  m.margin = drive_torque - load;
  if (load > 0.0) {
    m.ratio = drive_torque / load;
  } else {
    m.ratio = std::numeric_limits<double>::infinity();
    m.infinite_ratio = true;
  }
  m.pass = m.margin > 0.0;
  return m;
}

struct TurbineReport {
  double mach = 0.0;
  bool subsonic = true;
  double exit_velocity = 0.0;     // [m/s]
  Speed ideal_speed;
  double exit_density = 0.0;      // [kg/m^3]
  double mass_flow_per_nozzle = 0.0;  // [kg/s]
  double torque = 0.0;            // [N m]
  TorqueMargin margin;
};

/// Full sizing chain at the given operating speed. The exit velocity feeding
/// the torque always comes from the nozzle expansion, never from input.
inline TurbineReport analyze_turbine(const TurbineSpec& t, Speed operating_speed, double machining_torque,
                                     double windage) {
  if (auto v = turbine_violations(t); !v.empty()) throw ValidationError(std::move(v));
  TurbineReport r;
  const auto mc = mach_number(operating_speed, t.pitch_diameter, t.gas, t.source_temperature);
  r.mach = mc.mach;
  r.subsonic = mc.subsonic;
  r.exit_velocity = nozzle_exit_velocity(t.inlet_pressure, t.outlet_pressure, t.source_temperature, t.gas);
  r.ideal_speed =
      ideal_turbine_speed(r.exit_velocity, t.airflow_loss_coefficient, t.speed_efficiency, t.pitch_diameter);
  r.exit_density = nozzle_exit_density(t);
  r.mass_flow_per_nozzle = mass_flowrate(t, r.exit_velocity);
  r.torque = turbine_torque(t, r.exit_velocity);
  r.margin = torque_margin(r.torque, machining_torque, windage);
  return r;
}

struct TorqueSweepPoint {
  double nozzle_diameter = 0.0;  // [m]
  double torque = 0.0;           // [N m]
};

/// Torque versus nozzle diameter at fixed power efficiency.
inline std::vector<TorqueSweepPoint> torque_sweep(TurbineSpec t, double power_efficiency, double d_min,
                                                  double d_max, int steps) {
  t.power_efficiency = power_efficiency;
  const double u = nozzle_exit_velocity(t.inlet_pressure, t.outlet_pressure, t.source_temperature, t.gas);
  std::vector<TorqueSweepPoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    t.nozzle_diameter = d_min + (d_max - d_min) * i / steps;
    out.push_back({t.nozzle_diameter, turbine_torque(t, u)});
  }
  return out;
}

}  // namespace ambspindle
