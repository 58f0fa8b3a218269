#pragma once

// Project configuration: YAML document <-> validated ProjectConfig.
//
// All fields are SI except `operating_speed_rpm`, which is converted to a
// Speed on ingress and back on serialization. Every block is optional; a
// stage that needs a missing block reports it when run. Unknown keys are
// rejected so that typos surface instead of silently taking defaults.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "ambspindle/amb_optimize.hpp"
#include "ambspindle/error.hpp"
#include "ambspindle/loads.hpp"
#include "ambspindle/magnetics.hpp"
#include "ambspindle/materials.hpp"
#include "ambspindle/moga.hpp"
#include "ambspindle/rotor.hpp"
#include "ambspindle/turbine.hpp"
#include "ambspindle/units.hpp"

namespace ambspindle {

struct WindageSurface {
  double radius = 0.0;  // [m]
  double length = 0.0;  // [m]
  bool operator==(const WindageSurface&) const = default;
};

struct TurbineConfig {
  TurbineSpec spec;
  double machining_torque = 0.0;            // [N m]
  double windage_friction_coefficient = 0.0;
  double windage_air_density = 0.0;         // [kg/m^3]; 0 = gas density at outlet pressure
  std::vector<WindageSurface> windage_surfaces;
  std::vector<double> sweep_power_efficiencies{0.18, 0.28, 0.38, 0.48};
  double sweep_nozzle_min = 0.5e-3;  // [m]
  double sweep_nozzle_max = 2.5e-3;  // [m]
  int sweep_steps = 40;

  bool operator==(const TurbineConfig&) const = default;
};

struct RotorConfig {
  RotorModel model;
  double campbell_max_rpm = 0.0;  // 0 = 1.2 x operating speed
  int campbell_points = 61;
  int max_modes = 12;
  double separation_margin = 0.15;

  bool operator==(const RotorConfig&) const = default;
};

struct LoadCase {
  double balance_grade = 1.0;  // [mm/s]
  double rotor_mass = 0.0;     // [kg]; 0 = rotor model mass
  int flutes = 2;
  std::string trace_csv;       // relative to the config file
  SafetyFactors safety;

  bool operator==(const LoadCase&) const = default;
};

struct EnvelopeConfig {
  double max_frequency = 0.0;  // [Hz]; 0 = 1.5 x tooth-passing frequency
  int steps = 400;

  bool operator==(const EnvelopeConfig&) const = default;
};

struct SensorSpec {
  double range = 2.5e-3;        // full measurement range [m]
  double bandwidth = 10e3;      // [Hz]
  double resolution = 1e-6;     // [m]
  bool operator==(const SensorSpec&) const = default;
};

struct AuditConfig {
  SensorSpec sensor;
  double error_budget = 1.5e-6;           // [m]
  double bandwidth_margin = 1.0;
  double controlled_stiffness = 1.4e5;    // [N/m]
  double touchdown_clearance = 0.0;       // backup bearing radial clearance [m]; 0 = half the radial airgap

  bool operator==(const AuditConfig&) const = default;
};

struct OptimizerConfig {
  GASettings settings;
  DesignBounds bounds;
  AmbFixedParameters fixed;

  bool operator==(const OptimizerConfig&) const = default;
};

struct ProjectConfig {
  std::optional<Speed> operating_speed;
  std::map<std::string, MaterialSpec> materials;
  std::optional<TurbineConfig> turbine;
  std::optional<RotorConfig> rotor;
  std::optional<LoadCase> loads;
  std::optional<RadialAmbDesign> radial_amb;
  std::optional<AxialAmbDesign> axial_amb;
  std::optional<OptimizerConfig> optimizer;
  ConstraintLimits limits;
  EnvelopeConfig envelope;
  AuditConfig audit;

  bool operator==(const ProjectConfig&) const = default;
};

namespace config_detail {

class Reader {
 public:
  Reader(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }
  int line() const { return node_.Mark().line + 1; }

  bool has(const std::string& key) const {
    used_.insert(key);
    return node_[key].IsDefined() && !node_[key].IsNull();
  }

  Reader child(const std::string& key) const {
    if (!has(key)) throw InputError("missing required field '" + join(key) + "'", line());
    return Reader(node_[key], join(key));
  }

  template <class T>
  T get(const std::string& key) const {
    const Reader c = child(key);
    return c.as<T>();
  }

  template <class T>
  void opt(const std::string& key, T& out) const {
    if (has(key)) out = Reader(node_[key], join(key)).as<T>();
  }

  template <class T>
  T as() const {
    if (!node_.IsScalar()) throw InputError("field '" + path_ + "' must be a scalar", line());
    try {
      return node_.as<T>();
    } catch (const YAML::Exception&) {
      throw InputError("field '" + path_ + "' has an invalid value '" + node_.Scalar() + "'", line());
    }
  }

  std::vector<Reader> items() const {
    if (!node_.IsSequence()) throw InputError("field '" + path_ + "' must be a list", line());
    std::vector<Reader> out;
    for (std::size_t i = 0; i < node_.size(); ++i) out.emplace_back(node_[i], fmt::format("{}[{}]", path_, i));
    return out;
  }

  void require_map() const {
    if (!node_.IsMap()) throw InputError("field '" + (path_.empty() ? "<document>" : path_) + "' must be a mapping", line());
  }

  /// Rejects keys that no accessor looked at.
  void finish() const {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) throw InputError("unknown field '" + join(key) + "'", kv.first.Mark().line + 1);
    }
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node node_;
  std::string path_;
  mutable std::set<std::string> used_;
};

inline GasSpec read_gas(const Reader& r) {
  r.require_map();
  GasSpec g;
  r.opt("specific_heat_ratio", g.specific_heat_ratio);
  r.opt("gas_constant", g.gas_constant);
  r.finish();
  return g;
}

inline MaterialSpec read_material(const Reader& r, const std::string& name) {
  r.require_map();
  MaterialSpec m;
  m.name = name;
  m.density = r.get<double>("density");
  m.yield_strength = r.get<double>("yield_strength");
  m.poisson = r.get<double>("poisson");
  r.opt("relative_permeability", m.relative_permeability);
  r.opt("linear_flux_limit", m.linear_flux_limit);
  r.opt("youngs_modulus", m.youngs_modulus);
  r.finish();
  return m;
}

inline TurbineConfig read_turbine(const Reader& r) {
  r.require_map();
  TurbineConfig c;
  auto& t = c.spec;
  t.pitch_diameter = r.get<double>("pitch_diameter");
  t.nozzle_diameter = r.get<double>("nozzle_diameter");
  t.inlet_pressure = r.get<double>("inlet_pressure");
  r.opt("nozzle_count", t.nozzle_count);
  r.opt("bucket_count", t.bucket_count);
  r.opt("outlet_pressure", t.outlet_pressure);
  r.opt("source_temperature", t.source_temperature);
  r.opt("airflow_loss_coefficient", t.airflow_loss_coefficient);
  r.opt("speed_efficiency", t.speed_efficiency);
  r.opt("power_efficiency", t.power_efficiency);
  if (r.has("gas")) t.gas = read_gas(r.child("gas"));
  r.opt("machining_torque", c.machining_torque);
  if (r.has("windage")) {
    const Reader w = r.child("windage");
    w.require_map();
    w.opt("friction_coefficient", c.windage_friction_coefficient);
    w.opt("air_density", c.windage_air_density);
    if (w.has("surfaces"))
      for (const auto& s : w.child("surfaces").items()) {
        s.require_map();
        c.windage_surfaces.push_back({s.get<double>("radius"), s.get<double>("length")});
        s.finish();
      }
    w.finish();
  }
  if (r.has("sweep")) {
    const Reader s = r.child("sweep");
    s.require_map();
    if (s.has("power_efficiencies")) {
      c.sweep_power_efficiencies.clear();
      for (const auto& e : s.child("power_efficiencies").items()) c.sweep_power_efficiencies.push_back(e.as<double>());
    }
    s.opt("nozzle_diameter_min", c.sweep_nozzle_min);
    s.opt("nozzle_diameter_max", c.sweep_nozzle_max);
    s.opt("steps", c.sweep_steps);
    s.finish();
  }
  r.finish();
  return c;
}

inline RotorConfig read_rotor(const Reader& r, const std::map<std::string, MaterialSpec>& materials) {
  r.require_map();
  RotorConfig c;
  auto& m = c.model;
  r.opt("axial_origin", m.axial_origin);
  r.opt("max_element_length", m.max_element_length);
  r.opt("shear_coefficient", m.shear_coefficient);
  std::string default_material;
  r.opt("material", default_material);
  for (const auto& s : r.child("segments").items()) {
    s.require_map();
    RotorSegment seg;
    seg.length = s.get<double>("length");
    seg.outer_diameter = s.get<double>("outer_diameter");
    s.opt("inner_diameter", seg.inner_diameter);
    std::string mat = default_material;
    s.opt("material", mat);
    if (mat.empty()) throw InputError("missing required field '" + s.path() + ".material'", s.line());
    const auto it = materials.find(mat);
    if (it == materials.end()) throw InputError("field '" + s.path() + ".material' names unknown material '" + mat + "'", s.line());
    seg.material = it->second;
    s.finish();
    m.segments.push_back(seg);
  }
  if (r.has("point_inertias"))
    for (const auto& p : r.child("point_inertias").items()) {
      p.require_map();
      PointInertia pi;
      pi.position = p.get<double>("position");
      p.opt("mass", pi.mass);
      p.opt("polar", pi.polar);
      p.opt("diametral", pi.diametral);
      p.finish();
      m.point_inertias.push_back(pi);
    }
  if (r.has("bearings"))
    for (const auto& b : r.child("bearings").items()) {
      b.require_map();
      BearingStation bs;
      bs.position = b.get<double>("position");
      b.opt("stiffness", bs.stiffness);
      b.opt("damping", bs.damping);
      b.finish();
      m.bearings.push_back(bs);
    }
  if (r.has("campbell")) {
    const Reader cb = r.child("campbell");
    cb.require_map();
    cb.opt("max_speed_rpm", c.campbell_max_rpm);
    cb.opt("points", c.campbell_points);
    cb.opt("max_modes", c.max_modes);
    cb.finish();
  }
  r.opt("separation_margin", c.separation_margin);
  r.finish();
  return c;
}

inline LoadCase read_loads(const Reader& r) {
  r.require_map();
  LoadCase c;
  r.opt("balance_grade", c.balance_grade);
  r.opt("rotor_mass", c.rotor_mass);
  r.opt("flutes", c.flutes);
  r.opt("trace_csv", c.trace_csv);
  if (r.has("safety_factors")) {
    const Reader s = r.child("safety_factors");
    s.require_map();
    s.opt("unbalance", c.safety.unbalance);
    s.opt("machining_static", c.safety.machining_static);
    s.opt("machining_dynamic", c.safety.machining_dynamic);
    s.finish();
  }
  r.finish();
  return c;
}

inline CorrectionFactors read_factors(const Reader& r) {
  r.require_map();
  CorrectionFactors f;
  r.opt("k_m", f.k_m);
  r.opt("k_c", f.k_c);
  r.opt("k_l", f.k_l);
  r.finish();
  return f;
}

inline PermanentMagnetSpec read_magnet(const Reader& r) {
  r.require_map();
  PermanentMagnetSpec pm;
  pm.remanence = r.get<double>("remanence");
  pm.coercivity = r.get<double>("coercivity");
  pm.thickness = r.get<double>("thickness");
  pm.width = r.get<double>("width");
  pm.length = r.get<double>("length");
  r.finish();
  return pm;
}

inline RadialAmbDesign read_radial(const Reader& r) {
  r.require_map();
  RadialAmbDesign d;
  d.stator_inner_radius = r.get<double>("stator_inner_radius");
  d.stator_radial_thickness = r.get<double>("stator_radial_thickness");
  d.pole_length = r.get<double>("pole_length");
  d.pole_width = r.get<double>("pole_width");
  d.pole_radius = r.get<double>("pole_radius");
  d.magnet = read_magnet(r.child("magnet"));
  d.airgap = r.get<double>("airgap");
  r.opt("pole_area", d.pole_area);
  d.turns_per_pole = r.get<int>("turns_per_pole");
  d.max_current = r.get<double>("max_current");
  d.design_current = d.max_current;
  r.opt("design_current", d.design_current);
  if (r.has("correction_factors")) d.factors = read_factors(r.child("correction_factors"));
  r.opt("amplifier_voltage", d.amplifier_voltage);
  r.opt("wire_cross_section", d.wire_cross_section);
  r.opt("coil_window_area", d.coil_window_area);
  r.opt("fill_factor", d.fill_factor);
  r.finish();
  return d;
}

inline AxialAmbDesign read_axial(const Reader& r) {
  r.require_map();
  AxialAmbDesign d;
  d.nominal_airgap = r.get<double>("nominal_airgap");
  d.pole_area = r.get<double>("pole_area");
  d.turns = r.get<int>("turns");
  d.bias_current = r.get<double>("bias_current");
  d.max_current = r.get<double>("max_current");
  r.opt("correction_factor", d.correction_factor);
  r.opt("amplifier_voltage", d.amplifier_voltage);
  r.opt("rotor_weight", d.rotor_weight);
  r.opt("wire_cross_section", d.wire_cross_section);
  r.finish();
  return d;
}

inline DesignVariables read_variables(const Reader& r) {
  r.require_map();
  DesignVariables v;
  v.s_ir = r.get<double>("s_ir");
  v.s_rt = r.get<double>("s_rt");
  v.p_l = r.get<double>("p_l");
  v.p_w = r.get<double>("p_w");
  v.p_r = r.get<double>("p_r");
  v.pm_t = r.get<double>("pm_t");
  v.pm_w = r.get<double>("pm_w");
  v.pm_l = r.get<double>("pm_l");
  v.i_c = r.get<double>("i_c");
  r.finish();
  return v;
}

inline ConstraintLimits read_limits(const Reader& r) {
  r.require_map();
  ConstraintLimits l;
  r.opt("flux_limit", l.flux_limit);
  r.opt("stiffness_min", l.stiffness_min);
  r.opt("stiffness_max", l.stiffness_max);
  r.opt("current_density_min", l.current_density_min);
  r.opt("current_density_max", l.current_density_max);
  r.opt("current_density_target", l.current_density_target);
  r.finish();
  return l;
}

inline OptimizerConfig read_optimizer(const Reader& r, const ConstraintLimits& limits) {
  r.require_map();
  OptimizerConfig c;
  auto& s = c.settings;
  r.opt("max_generations", s.max_generations);
  r.opt("population", s.population);
  r.opt("max_stall_generations", s.max_stall_generations);
  r.opt("pareto_fraction", s.pareto_fraction);
  r.opt("function_tolerance", s.function_tolerance);
  if (r.has("crowding")) {
    const auto v = r.get<std::string>("crowding");
    if (v == "objective")
      s.crowding = CrowdingSpace::Objective;
    else if (v == "variable")
      s.crowding = CrowdingSpace::Variable;
    else
      throw InputError("field '" + r.path() + ".crowding' must be 'objective' or 'variable'", r.child("crowding").line());
  }
  r.opt("rng_seed", s.rng_seed);
  r.opt("crossover_probability", s.crossover_probability);
  r.opt("crossover_index", s.crossover_index);
  r.opt("mutation_index", s.mutation_index);
  r.opt("mutation_probability", s.mutation_probability);
  r.opt("workers", s.workers);
  const Reader b = r.child("bounds");
  b.require_map();
  c.bounds.lower = read_variables(b.child("lower"));
  c.bounds.upper = read_variables(b.child("upper"));
  b.finish();
  c.fixed.limits = limits;
  if (r.has("fixed")) {
    const Reader f = r.child("fixed");
    f.require_map();
    f.opt("airgap", c.fixed.airgap);
    f.opt("turns_per_pole", c.fixed.turns_per_pole);
    f.opt("remanence", c.fixed.remanence);
    f.opt("coercivity", c.fixed.coercivity);
    if (f.has("correction_factors")) c.fixed.factors = read_factors(f.child("correction_factors"));
    f.opt("fill_factor", c.fixed.fill_factor);
    f.opt("wire_cross_section", c.fixed.wire_cross_section);
    f.finish();
  }
  r.finish();
  return c;
}

inline AuditConfig read_audit(const Reader& r) {
  r.require_map();
  AuditConfig a;
  if (r.has("sensor")) {
    const Reader s = r.child("sensor");
    s.require_map();
    s.opt("range", a.sensor.range);
    s.opt("bandwidth", a.sensor.bandwidth);
    s.opt("resolution", a.sensor.resolution);
    s.finish();
  }
  r.opt("error_budget", a.error_budget);
  r.opt("bandwidth_margin", a.bandwidth_margin);
  r.opt("controlled_stiffness", a.controlled_stiffness);
  r.opt("touchdown_clearance", a.touchdown_clearance);
  r.finish();
  return a;
}

inline std::vector<std::string> config_violations(const ProjectConfig& c) {
  std::vector<std::string> out;
  auto add = [&](std::vector<std::string> v) { out.insert(out.end(), v.begin(), v.end()); };
  if (c.operating_speed && !(c.operating_speed->rpm() > 0.0)) out.push_back("operating_speed_rpm must be > 0");
  for (const auto& [name, m] : c.materials) add(material_violations(m));
  if (c.turbine) {
    add(turbine_violations(c.turbine->spec));
    const auto& t = *c.turbine;
    if (t.machining_torque < 0.0) out.push_back("turbine: machining_torque must be >= 0");
    if (t.windage_friction_coefficient < 0.0) out.push_back("turbine: windage.friction_coefficient must be >= 0");
    if (t.windage_air_density < 0.0) out.push_back("turbine: windage.air_density must be >= 0");
    for (const auto& s : t.windage_surfaces)
      if (!(s.radius > 0.0) || !(s.length > 0.0)) out.push_back("turbine: windage surfaces need radius, length > 0");
    for (double e : t.sweep_power_efficiencies)
      if (!(e > 0.0 && e <= 1.0)) out.push_back("turbine: sweep power efficiencies must be in (0, 1]");
    if (!(t.sweep_nozzle_min > 0.0 && t.sweep_nozzle_min < t.sweep_nozzle_max))
      out.push_back("turbine: sweep needs 0 < nozzle_diameter_min < nozzle_diameter_max");
    if (t.sweep_steps < 1) out.push_back("turbine: sweep steps must be >= 1");
  }
  if (c.rotor) {
    add(rotor_violations(c.rotor->model));
    if (c.rotor->campbell_points < 2) out.push_back("rotor: campbell.points must be >= 2");
    if (c.rotor->max_modes < 1) out.push_back("rotor: campbell.max_modes must be >= 1");
    if (c.rotor->campbell_max_rpm < 0.0) out.push_back("rotor: campbell.max_speed_rpm must be >= 0");
    if (c.rotor->separation_margin < 0.0) out.push_back("rotor: separation_margin must be >= 0");
  }
  if (c.loads) {
    if (c.loads->balance_grade < 0.0) out.push_back("loads: balance_grade must be >= 0");
    if (c.loads->rotor_mass < 0.0) out.push_back("loads: rotor_mass must be >= 0");
    if (c.loads->flutes < 1) out.push_back("loads: flutes must be >= 1");
    add(safety_factor_violations(c.loads->safety));
  }
  if (c.radial_amb) add(radial_violations(*c.radial_amb));
  if (c.axial_amb) add(axial_violations(*c.axial_amb));
  if (c.optimizer) {
    add(ga_violations(c.optimizer->settings));
    add(bounds_violations(c.optimizer->bounds));
    const auto& f = c.optimizer->fixed;
    if (!(f.airgap > 0.0)) out.push_back("optimizer: fixed.airgap must be > 0");
    if (f.turns_per_pole < 1) out.push_back("optimizer: fixed.turns_per_pole must be >= 1");
    if (!(f.remanence > 0.0) || !(f.coercivity > 0.0)) out.push_back("optimizer: fixed magnet grade must be > 0");
    if (!(f.fill_factor > 0.0 && f.fill_factor <= 1.0)) out.push_back("optimizer: fixed.fill_factor must be in (0, 1]");
  }
  const auto& l = c.limits;
  if (!(l.flux_limit > 0.0)) out.push_back("limits: flux_limit must be > 0");
  if (!(l.stiffness_min > 0.0 && l.stiffness_min <= l.stiffness_max)) out.push_back("limits: need 0 < stiffness_min <= stiffness_max");
  if (!(l.current_density_min >= 0.0 && l.current_density_min <= l.current_density_max))
    out.push_back("limits: need 0 <= current_density_min <= current_density_max");
  if (c.envelope.steps < 1 || c.envelope.max_frequency < 0.0) out.push_back("envelope: steps >= 1, max_frequency >= 0");
  const auto& a = c.audit;
  if (!(a.sensor.range > 0.0 && a.sensor.bandwidth > 0.0 && a.sensor.resolution > 0.0))
    out.push_back("audit: sensor range, bandwidth and resolution must be > 0");
  if (!(a.error_budget > 0.0)) out.push_back("audit: error_budget must be > 0");
  if (!(a.bandwidth_margin >= 1.0)) out.push_back("audit: bandwidth_margin must be >= 1");
  if (!(a.controlled_stiffness > 0.0)) out.push_back("audit: controlled_stiffness must be > 0");
  if (a.touchdown_clearance < 0.0) out.push_back("audit: touchdown_clearance must be >= 0");
  return out;
}

}  // namespace config_detail

struct ParseOptions {
  bool gauge_pressures = false;  // turbine pressures given relative to one standard atmosphere
};

/// Parses and validates a YAML document. Throws InputError (syntax, missing
/// or unknown fields, with line numbers) or ValidationError (invariants).
inline ProjectConfig parse_config(const std::string& text, const ParseOptions& opts = {}) {
  using namespace config_detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw InputError("config syntax error: " + e.msg, e.mark.line + 1);
  }
  ProjectConfig c;
  if (root.IsNull()) return c;
  const Reader r(root, "");
  r.require_map();
  if (r.has("operating_speed_rpm")) c.operating_speed = Speed::from_rpm(r.get<double>("operating_speed_rpm"));
  if (r.has("materials")) {
    const Reader m = r.child("materials");
    m.require_map();
    for (const auto& kv : m.node()) {
      const auto name = kv.first.as<std::string>();
      c.materials[name] = read_material(m.child(name), name);
    }
    m.finish();
  }
  if (r.has("limits")) c.limits = read_limits(r.child("limits"));
  if (r.has("turbine")) c.turbine = read_turbine(r.child("turbine"));
  if (r.has("rotor")) c.rotor = read_rotor(r.child("rotor"), c.materials);
  if (r.has("loads")) c.loads = read_loads(r.child("loads"));
  if (r.has("radial_amb")) c.radial_amb = read_radial(r.child("radial_amb"));
  if (r.has("axial_amb")) c.axial_amb = read_axial(r.child("axial_amb"));
  if (r.has("optimizer")) c.optimizer = read_optimizer(r.child("optimizer"), c.limits);
  if (r.has("envelope")) {
    const Reader e = r.child("envelope");
    e.require_map();
    e.opt("max_frequency", c.envelope.max_frequency);
    e.opt("steps", c.envelope.steps);
    e.finish();
  }
  if (r.has("audit")) c.audit = read_audit(r.child("audit"));
  r.finish();
  if (opts.gauge_pressures && c.turbine) {
    // An omitted outlet pressure already defaults to ambient.
    c.turbine->spec.inlet_pressure += kStandardAtmosphere;
    if (root["turbine"]["outlet_pressure"].IsDefined()) c.turbine->spec.outlet_pressure += kStandardAtmosphere;
  }
  if (auto v = config_violations(c); !v.empty()) throw ValidationError(std::move(v));
  return c;
}

inline ProjectConfig load_config(const std::filesystem::path& path, const ParseOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), opts);
}

// ---------------------------------------------------------------------------
// Serialization

namespace config_detail {

// Shortest representation that parses back to the same double.
inline std::string num(double v) { return fmt::format("{}", v); }

class Writer {
 public:
  Writer() { out_ << YAML::BeginMap; }

  Writer& key(const std::string& k) {
    out_ << YAML::Key << k << YAML::Value;
    return *this;
  }
  Writer& kv(const std::string& k, double v) {
    out_ << YAML::Key << k << YAML::Value << num(v);
    return *this;
  }
  Writer& kv(const std::string& k, int v) {
    out_ << YAML::Key << k << YAML::Value << v;
    return *this;
  }
  Writer& kv(const std::string& k, std::uint64_t v) {
    out_ << YAML::Key << k << YAML::Value << v;
    return *this;
  }
  Writer& kv(const std::string& k, const std::string& v) {
    out_ << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
    return *this;
  }
  Writer& begin_map(const std::string& k) {
    out_ << YAML::Key << k << YAML::Value << YAML::BeginMap;
    return *this;
  }
  Writer& begin_map() {
    out_ << YAML::BeginMap;
    return *this;
  }
  Writer& end_map() {
    out_ << YAML::EndMap;
    return *this;
  }
  Writer& begin_seq(const std::string& k) {
    out_ << YAML::Key << k << YAML::Value << YAML::BeginSeq;
    return *this;
  }
  Writer& end_seq() {
    out_ << YAML::EndSeq;
    return *this;
  }
  Writer& item(double v) {
    out_ << num(v);
    return *this;
  }

  std::string str() {
    out_ << YAML::EndMap;
    return std::string(out_.c_str()) + "\n";
  }

 private:
  YAML::Emitter out_;
};

inline void write_factors(Writer& w, const std::string& key, const CorrectionFactors& f) {
  w.begin_map(key).kv("k_m", f.k_m).kv("k_c", f.k_c).kv("k_l", f.k_l).end_map();
}

inline void write_variables(Writer& w, const std::string& key, const DesignVariables& v) {
  w.begin_map(key)
      .kv("s_ir", v.s_ir)
      .kv("s_rt", v.s_rt)
      .kv("p_l", v.p_l)
      .kv("p_w", v.p_w)
      .kv("p_r", v.p_r)
      .kv("pm_t", v.pm_t)
      .kv("pm_w", v.pm_w)
      .kv("pm_l", v.pm_l)
      .kv("i_c", v.i_c)
      .end_map();
}

}  // namespace config_detail

/// Emits a document that parse_config maps back to an equal ProjectConfig.
inline std::string serialize_config(const ProjectConfig& c) {
  using namespace config_detail;
  Writer w;
  if (c.operating_speed) w.kv("operating_speed_rpm", c.operating_speed->rpm());

  // Materials: the declared map plus any referenced by rotor segments.
  std::map<std::string, MaterialSpec> mats = c.materials;
  if (c.rotor)
    for (const auto& s : c.rotor->model.segments) mats.emplace(s.material.name, s.material);
  if (!mats.empty()) {
    w.begin_map("materials");
    for (const auto& [name, m] : mats) {
      w.begin_map(name)
          .kv("density", m.density)
          .kv("yield_strength", m.yield_strength)
          .kv("poisson", m.poisson)
          .kv("relative_permeability", m.relative_permeability)
          .kv("linear_flux_limit", m.linear_flux_limit)
          .kv("youngs_modulus", m.youngs_modulus)
          .end_map();
    }
    w.end_map();
  }

  const auto& l = c.limits;
  w.begin_map("limits")
      .kv("flux_limit", l.flux_limit)
      .kv("stiffness_min", l.stiffness_min)
      .kv("stiffness_max", l.stiffness_max)
      .kv("current_density_min", l.current_density_min)
      .kv("current_density_max", l.current_density_max)
      .kv("current_density_target", l.current_density_target)
      .end_map();

  if (c.turbine) {
    const auto& tc = *c.turbine;
    const auto& t = tc.spec;
    w.begin_map("turbine")
        .kv("pitch_diameter", t.pitch_diameter)
        .kv("nozzle_diameter", t.nozzle_diameter)
        .kv("nozzle_count", t.nozzle_count)
        .kv("bucket_count", t.bucket_count)
        .kv("inlet_pressure", t.inlet_pressure)
        .kv("outlet_pressure", t.outlet_pressure)
        .kv("source_temperature", t.source_temperature)
        .kv("airflow_loss_coefficient", t.airflow_loss_coefficient)
        .kv("speed_efficiency", t.speed_efficiency)
        .kv("power_efficiency", t.power_efficiency);
    w.begin_map("gas").kv("specific_heat_ratio", t.gas.specific_heat_ratio).kv("gas_constant", t.gas.gas_constant).end_map();
    w.kv("machining_torque", tc.machining_torque);
    w.begin_map("windage")
        .kv("friction_coefficient", tc.windage_friction_coefficient)
        .kv("air_density", tc.windage_air_density);
    w.begin_seq("surfaces");
    for (const auto& s : tc.windage_surfaces) w.begin_map().kv("radius", s.radius).kv("length", s.length).end_map();
    w.end_seq().end_map();
    w.begin_map("sweep").begin_seq("power_efficiencies");
    for (double e : tc.sweep_power_efficiencies) w.item(e);
    w.end_seq()
        .kv("nozzle_diameter_min", tc.sweep_nozzle_min)
        .kv("nozzle_diameter_max", tc.sweep_nozzle_max)
        .kv("steps", tc.sweep_steps)
        .end_map();
    w.end_map();
  }

  if (c.rotor) {
    const auto& rc = *c.rotor;
    const auto& m = rc.model;
    w.begin_map("rotor")
        .kv("axial_origin", m.axial_origin)
        .kv("max_element_length", m.max_element_length)
        .kv("shear_coefficient", m.shear_coefficient);
    w.begin_seq("segments");
    for (const auto& s : m.segments)
      w.begin_map()
          .kv("length", s.length)
          .kv("outer_diameter", s.outer_diameter)
          .kv("inner_diameter", s.inner_diameter)
          .kv("material", s.material.name)
          .end_map();
    w.end_seq();
    w.begin_seq("point_inertias");
    for (const auto& p : m.point_inertias)
      w.begin_map()
          .kv("position", p.position)
          .kv("mass", p.mass)
          .kv("polar", p.polar)
          .kv("diametral", p.diametral)
          .end_map();
    w.end_seq();
    w.begin_seq("bearings");
    for (const auto& b : m.bearings)
      w.begin_map().kv("position", b.position).kv("stiffness", b.stiffness).kv("damping", b.damping).end_map();
    w.end_seq();
    w.begin_map("campbell")
        .kv("max_speed_rpm", rc.campbell_max_rpm)
        .kv("points", rc.campbell_points)
        .kv("max_modes", rc.max_modes)
        .end_map();
    w.kv("separation_margin", rc.separation_margin);
    w.end_map();
  }

  if (c.loads) {
    const auto& lc = *c.loads;
    w.begin_map("loads")
        .kv("balance_grade", lc.balance_grade)
        .kv("rotor_mass", lc.rotor_mass)
        .kv("flutes", lc.flutes)
        .kv("trace_csv", lc.trace_csv);
    w.begin_map("safety_factors")
        .kv("unbalance", lc.safety.unbalance)
        .kv("machining_static", lc.safety.machining_static)
        .kv("machining_dynamic", lc.safety.machining_dynamic)
        .end_map();
    w.end_map();
  }

  if (c.radial_amb) {
    const auto& d = *c.radial_amb;
    w.begin_map("radial_amb")
        .kv("stator_inner_radius", d.stator_inner_radius)
        .kv("stator_radial_thickness", d.stator_radial_thickness)
        .kv("pole_length", d.pole_length)
        .kv("pole_width", d.pole_width)
        .kv("pole_radius", d.pole_radius);
    w.begin_map("magnet")
        .kv("remanence", d.magnet.remanence)
        .kv("coercivity", d.magnet.coercivity)
        .kv("thickness", d.magnet.thickness)
        .kv("width", d.magnet.width)
        .kv("length", d.magnet.length)
        .end_map();
    w.kv("airgap", d.airgap)
        .kv("pole_area", d.pole_area)
        .kv("turns_per_pole", d.turns_per_pole)
        .kv("max_current", d.max_current)
        .kv("design_current", d.design_current);
    write_factors(w, "correction_factors", d.factors);
    w.kv("amplifier_voltage", d.amplifier_voltage)
        .kv("wire_cross_section", d.wire_cross_section)
        .kv("coil_window_area", d.coil_window_area)
        .kv("fill_factor", d.fill_factor)
        .end_map();
  }

  if (c.axial_amb) {
    const auto& d = *c.axial_amb;
    w.begin_map("axial_amb")
        .kv("nominal_airgap", d.nominal_airgap)
        .kv("pole_area", d.pole_area)
        .kv("turns", d.turns)
        .kv("bias_current", d.bias_current)
        .kv("max_current", d.max_current)
        .kv("correction_factor", d.correction_factor)
        .kv("amplifier_voltage", d.amplifier_voltage)
        .kv("rotor_weight", d.rotor_weight)
        .kv("wire_cross_section", d.wire_cross_section)
        .end_map();
  }

  if (c.optimizer) {
    const auto& o = *c.optimizer;
    const auto& s = o.settings;
    w.begin_map("optimizer")
        .kv("max_generations", s.max_generations)
        .kv("population", s.population)
        .kv("max_stall_generations", s.max_stall_generations)
        .kv("pareto_fraction", s.pareto_fraction)
        .kv("function_tolerance", s.function_tolerance)
        .kv("crowding", std::string(s.crowding == CrowdingSpace::Objective ? "objective" : "variable"))
        .kv("rng_seed", s.rng_seed)
        .kv("crossover_probability", s.crossover_probability)
        .kv("crossover_index", s.crossover_index)
        .kv("mutation_index", s.mutation_index)
        .kv("mutation_probability", s.mutation_probability)
        .kv("workers", s.workers);
    w.begin_map("bounds");
    write_variables(w, "lower", o.bounds.lower);
    write_variables(w, "upper", o.bounds.upper);
    w.end_map();
    const auto& f = o.fixed;
    w.begin_map("fixed")
        .kv("airgap", f.airgap)
        .kv("turns_per_pole", f.turns_per_pole)
        .kv("remanence", f.remanence)
        .kv("coercivity", f.coercivity);
    write_factors(w, "correction_factors", f.factors);
    w.kv("fill_factor", f.fill_factor).kv("wire_cross_section", f.wire_cross_section).end_map();
    w.end_map();
  }

  w.begin_map("envelope").kv("max_frequency", c.envelope.max_frequency).kv("steps", c.envelope.steps).end_map();
  const auto& a = c.audit;
  w.begin_map("audit");
  w.begin_map("sensor")
      .kv("range", a.sensor.range)
      .kv("bandwidth", a.sensor.bandwidth)
      .kv("resolution", a.sensor.resolution)
      .end_map();
  w.kv("error_budget", a.error_budget)
      .kv("bandwidth_margin", a.bandwidth_margin)
      .kv("controlled_stiffness", a.controlled_stiffness)
      .kv("touchdown_clearance", a.touchdown_clearance)
      .end_map();
  return w.str();
}

}  // namespace ambspindle
