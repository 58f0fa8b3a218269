#pragma once

// Requirement audits and the staged design pipeline:
// turbine -> rotor -> magnetics -> envelope -> audits.
//
// Stages record verdicts rather than throwing on a failed check; exceptions
// are reserved for inputs a stage cannot evaluate at all, and are rethrown as
// StageError carrying the stage name.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ambspindle/campbell.hpp"
#include "ambspindle/config.hpp"
#include "ambspindle/error.hpp"
#include "ambspindle/loads.hpp"
#include "ambspindle/magnetics.hpp"
#include "ambspindle/rotor.hpp"
#include "ambspindle/turbine.hpp"

namespace ambspindle {

// ---------------------------------------------------------------------------
// Audits

struct RequirementEntry {
  std::string name;
  std::string unit;
  std::string comparison;  // how achieved relates to required when passing
  double required = 0.0;
  double achieved = 0.0;
  bool pass = false;
  std::string basis;  // design rule the requirement comes from
};

struct RequirementAudit {
  std::vector<RequirementEntry> entries;
  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
  }
};

struct SensorRequirements {
  double radial_range = 0.0;  // one-sided, +/- [m]
  double axial_range = 0.0;   // one-sided, +/- [m]
  double bandwidth = 0.0;     // [Hz]
  double resolution = 0.0;    // strict upper bound [m]
};

inline constexpr const char* kBasisRadialRange = "sensor covers the full radial clearance (+/- half the airgap)";
inline constexpr const char* kBasisAxialRange = "sensor covers the full axial clearance (+/- half the airgap)";
inline constexpr const char* kBasisBandwidth = "sensor bandwidth covers the tooth-passing frequency with margin";
inline constexpr const char* kBasisResolution = "sensor resolution finer than the machining error budget";
inline constexpr const char* kBasisStiffness = "negative stiffness within one order below the controlled stiffness";
inline constexpr const char* kBasisTouchdown = "touchdown clearance of half the AMB airgap";

inline SensorRequirements sensor_requirements(Speed speed, int flutes, double radial_gap, double axial_gap,
                                              double error_budget, double bandwidth_margin) {
  if (!(speed.hz() > 0.0) || flutes < 1 || !(radial_gap > 0.0) || !(axial_gap > 0.0) || !(error_budget > 0.0))
    throw DomainError("sensor_requirements: inputs must be positive");
  if (!(bandwidth_margin >= 1.0)) throw DomainError("sensor_requirements: bandwidth margin must be >= 1");
  return {radial_gap / 2.0, axial_gap / 2.0, bandwidth_margin * tooth_passing_frequency(speed, flutes), error_budget};
}

/// Candidate sensor against the requirements. The sensor range is its full
/// span and must cover the two-sided motion.
inline RequirementAudit audit_sensor(const SensorRequirements& r, const SensorSpec& s) {
  RequirementAudit a;
  a.entries.push_back({"sensor_radial_range", "m", ">=", 2.0 * r.radial_range, s.range, s.range >= 2.0 * r.radial_range,
                       kBasisRadialRange});
  a.entries.push_back(
      {"sensor_axial_range", "m", ">=", 2.0 * r.axial_range, s.range, s.range >= 2.0 * r.axial_range, kBasisAxialRange});
  a.entries.push_back(
      {"sensor_bandwidth", "Hz", ">=", r.bandwidth, s.bandwidth, s.bandwidth >= r.bandwidth, kBasisBandwidth});
  a.entries.push_back(
      {"sensor_resolution", "m", "<", r.resolution, s.resolution, s.resolution < r.resolution, kBasisResolution});
  return a;
}

struct StiffnessGuideline {
  double lower = 0.0;  // controlled / 10
  double upper = 0.0;  // controlled
  bool pass = false;
};

inline StiffnessGuideline stiffness_guideline(double negative_stiffness, double controlled_stiffness) {
  if (!(negative_stiffness > 0.0) || !(controlled_stiffness > 0.0))
    throw DomainError("stiffness_guideline: stiffnesses must be > 0");
  StiffnessGuideline g{controlled_stiffness / 10.0, controlled_stiffness, false};
  g.pass = negative_stiffness >= g.lower && negative_stiffness <= g.upper;
  return g;
}

inline double touchdown_clearance(double amb_airgap) { return amb_airgap / 2.0; }

// ---------------------------------------------------------------------------
// Pipeline

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Metric {
  std::string name;
  double value = 0.0;
  std::string unit;
};

class StageError : public Error {
 public:
  enum class Kind { Input, Numerical };
  StageError(std::string stage, const std::string& what, Kind kind)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)), kind_(kind) {}
  const std::string& stage() const { return stage_; }
  Kind kind() const { return kind_; }

 private:
  std::string stage_;
  Kind kind_;
};

namespace report_detail {

template <class F>
auto run_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const NumericalError& e) {
    throw StageError(stage, e.what(), StageError::Kind::Numerical);
  } catch (const Error& e) {
    throw StageError(stage, e.what(), StageError::Kind::Input);
  }
}

inline Speed require_speed(const ProjectConfig& c, const std::string& stage) {
  if (!c.operating_speed) throw InputError(stage + " needs 'operating_speed_rpm'");
  return *c.operating_speed;
}

template <class T>
const T& require(const std::optional<T>& block, const std::string& name) {
  if (!block) throw InputError("config has no '" + name + "' block");
  return *block;
}

inline const char* pf(bool pass) { return pass ? "PASS" : "FAIL"; }

}  // namespace report_detail

struct TurbineStage {
  TurbineReport report;
  double windage = 0.0;  // [N m]
  std::vector<std::pair<double, std::vector<TorqueSweepPoint>>> sweeps;  // per power efficiency
  std::vector<Verdict> verdicts;
};

inline double config_windage(const TurbineConfig& t, Speed speed) {
  const double rho = t.windage_air_density > 0.0
                         ? t.windage_air_density
                         : t.spec.outlet_pressure / (t.spec.gas.gas_constant * t.spec.source_temperature);
  double w = 0.0;
  for (const auto& s : t.windage_surfaces)
    w += windage_torque(t.windage_friction_coefficient, rho, speed.rad_per_s(), s.radius, s.length);
  return w;
}

inline TurbineStage run_turbine_stage(const ProjectConfig& c) {
  return report_detail::run_stage("turbine", [&] {
    const auto& t = report_detail::require(c.turbine, "turbine");
    const Speed n = report_detail::require_speed(c, "turbine");
    TurbineStage s;
    s.windage = config_windage(t, n);
    s.report = analyze_turbine(t.spec, n, t.machining_torque, s.windage);
    for (double eta : t.sweep_power_efficiencies)
      s.sweeps.emplace_back(eta, torque_sweep(t.spec, eta, t.sweep_nozzle_min, t.sweep_nozzle_max, t.sweep_steps));
    const auto& r = s.report;
    s.verdicts.push_back({"subsonic_tip_speed", r.subsonic, fmt::format("Ma = {:.4f}", r.mach)});
    s.verdicts.push_back({"ideal_speed_reaches_operating", r.ideal_speed >= n,
                          fmt::format("N = {:.0f} rpm vs operating {:.0f} rpm", r.ideal_speed.rpm(), n.rpm())});
    std::string detail = fmt::format("drive {:.4f} N mm vs load {:.4f} N mm", units::to_Nmm(r.torque),
                                     units::to_Nmm(t.machining_torque + s.windage));
    if (r.torque == 0.0) detail += " (zero drive torque: no pressure drop across the nozzle or zero efficiency)";
    s.verdicts.push_back({"torque_margin", r.margin.pass, detail});
    return s;
  });
}

struct RotorStage {
  double max_diameter = 0.0;  // at operating speed, material of the largest segment [m]
  double largest_diameter = 0.0;
  double mass = 0.0;
  CampbellResult campbell;
  std::vector<CriticalSpeed> criticals;
  std::optional<double> first_bending;  // [Hz]
  SeparationVerdict separation;
  std::vector<Verdict> verdicts;
};

inline std::vector<double> campbell_grid(const RotorConfig& r, Speed operating) {
  const double max_rpm = r.campbell_max_rpm > 0.0 ? r.campbell_max_rpm : 1.2 * operating.rpm();
  return speed_grid(max_rpm, r.campbell_points);
}

inline RotorStage run_rotor_stage(const ProjectConfig& c) {
  return report_detail::run_stage("rotor", [&] {
    const auto& rc = report_detail::require(c.rotor, "rotor");
    const Speed n = report_detail::require_speed(c, "rotor");
    if (auto v = rotor_violations(rc.model); !v.empty()) throw ValidationError(std::move(v));
    RotorStage s;
    s.mass = rc.model.mass();

    // Every segment against its own material limit; headline is the widest.
    bool centrifugal_ok = true;
    std::string worst;
    const RotorSegment* widest = nullptr;
    for (const auto& seg : rc.model.segments) {
      const double dmax = 2.0 * max_rotor_radius(n.rad_per_s(), seg.material);
      if (seg.outer_diameter > dmax) {
        centrifugal_ok = false;
        worst = fmt::format("{:.2f} mm segment exceeds {:.2f} mm limit for '{}'", units::to_mm(seg.outer_diameter),
                            units::to_mm(dmax), seg.material.name);
      }
      if (!widest || seg.outer_diameter > widest->outer_diameter) widest = &seg;
    }
    s.largest_diameter = widest->outer_diameter;
    s.max_diameter = 2.0 * max_rotor_radius(n.rad_per_s(), widest->material);
    s.verdicts.push_back({"centrifugal_limit", centrifugal_ok,
                          centrifugal_ok ? fmt::format("largest {:.2f} mm within {:.2f} mm", units::to_mm(s.largest_diameter),
                                                       units::to_mm(s.max_diameter))
                                         : worst});

    const RotorEigenSolver solver(assemble_rotor(rc.model));
    CampbellOptions opt;
    opt.max_modes = rc.max_modes;
    s.campbell = campbell(solver, campbell_grid(rc, n), opt);
    s.criticals = critical_speeds(solver, s.campbell, rc.max_modes);
    s.separation = separation_margin(s.criticals, n, rc.separation_margin);
    s.first_bending = lowest_bending_frequency(s.campbell);
    s.verdicts.push_back(
        {"bending_critical_separation", s.separation.pass,
         s.separation.pass ? fmt::format("no bending critical below {:.0f} rpm", s.separation.limit_rpm)
                           : fmt::format("bending critical at {:.0f} rpm below {:.0f} rpm",
                                         s.separation.bending_inside.front().rpm, s.separation.limit_rpm)});
    const bool bending_above = !s.first_bending || *s.first_bending > n.hz();
    s.verdicts.push_back({"first_bending_above_rotor_frequency", bending_above,
                          s.first_bending ? fmt::format("{:.1f} Hz vs {:.2f} Hz", *s.first_bending, n.hz())
                                          : std::string("no bending mode within the solved set")});
    return s;
  });
}

struct AmbStage {
  std::optional<RadialAmbDesign> radial;
  LinearizedGains radial_gains_;
  StaticCapacity radial_capacity;
  double radial_inductance_ = 0.0;
  FluxDensities radial_densities;
  ConstraintChecklist radial_checks;

  std::optional<AxialAmbDesign> axial;
  LinearizedGains axial_gains_;
  StaticCapacity axial_capacity;
  double axial_inductance_ = 0.0;
  double weight_offset = 0.0;
  ConstraintChecklist axial_checks;

  std::vector<Verdict> verdicts;
};

inline std::string check_detail(const ConstraintCheck& c) {
  if (!c.evaluated) return "not evaluated: " + c.note;
  std::string s = fmt::format("{:.6g} vs limit {:.6g}", c.value, c.limit);
  if (!c.note.empty()) s += " (" + c.note + ")";
  return s;
}

inline AmbStage run_amb_stage(const ProjectConfig& c) {
  return report_detail::run_stage("magnetics", [&] {
    if (!c.radial_amb && !c.axial_amb) throw InputError("config has neither 'radial_amb' nor 'axial_amb'");
    AmbStage s;
    if (c.radial_amb) {
      const auto& d = *c.radial_amb;
      s.radial = d;
      s.radial_gains_ = radial_gains(d);
      s.radial_capacity = radial_static_capacity(d, d.design_current, c.limits.flux_limit);
      s.radial_inductance_ = radial_inductance(d);
      s.radial_densities = radial_flux_densities(d, 0.0, d.design_current);
      s.radial_checks = radial_constraint_checks(d, d.design_current, c.limits);
      for (const auto& k : s.radial_checks.checks) s.verdicts.push_back({"radial_" + k.name, k.pass, check_detail(k)});
    }
    if (c.axial_amb) {
      const auto& d = *c.axial_amb;
      s.axial = d;
      s.axial_gains_ = axial_gains(d);
      s.axial_capacity = axial_static_capacity(d);
      s.axial_inductance_ = axial_inductance(d);
      if (d.rotor_weight > 0.0) s.weight_offset = weight_balance_offset(d);
      s.axial_checks = axial_constraint_checks(d, c.limits);
      for (const auto& k : s.axial_checks.checks) s.verdicts.push_back({"axial_" + k.name, k.pass, check_detail(k)});
    }
    return s;
  });
}

struct EnvelopeStage {
  DemandSpectrum demands;
  double rotor_mass = 0.0;
  double f_max = 0.0;
  std::optional<CapacityEnvelope> radial;
  std::optional<CapacityEnvelope> axial;
  EnvelopeVerdict radial_verdict;
  EnvelopeVerdict axial_verdict;
  std::vector<Verdict> verdicts;
};

inline ForceTrace load_trace(const LoadCase& l, const std::filesystem::path& base_dir) {
  if (l.trace_csv.empty()) throw InputError("loads block has no 'trace_csv'");
  std::filesystem::path p(l.trace_csv);
  if (p.is_relative()) p = base_dir / p;
  std::ifstream in(p);
  if (!in) throw InputError("cannot open force trace '" + p.string() + "'");
  return read_force_trace(in, l.flutes);
}

inline DemandSpectrum config_demands(const ProjectConfig& c, const std::filesystem::path& base_dir,
                                     double* rotor_mass_out = nullptr) {
  const auto& l = report_detail::require(c.loads, "loads");
  const Speed n = report_detail::require_speed(c, "loads");
  double mass = l.rotor_mass;
  if (mass == 0.0) {
    if (!c.rotor) throw InputError("loads.rotor_mass is 0 and there is no rotor block to take it from");
    mass = c.rotor->model.mass();
  }
  if (rotor_mass_out) *rotor_mass_out = mass;
  return demand_spectrum(load_trace(l, base_dir), n, l.safety, {l.balance_grade, mass, n.rad_per_s()});
}

inline EnvelopeStage run_envelope_stage(const ProjectConfig& c, const AmbStage& amb,
                                        const std::filesystem::path& base_dir) {
  return report_detail::run_stage("envelope", [&] {
    EnvelopeStage s;
    s.demands = config_demands(c, base_dir, &s.rotor_mass);
    const Speed n = *c.operating_speed;
    s.f_max = c.envelope.max_frequency > 0.0 ? c.envelope.max_frequency
                                             : 1.5 * tooth_passing_frequency(n, c.loads->flutes);
    auto add = [&](const EnvelopeVerdict& v, const std::string& axis) {
      for (const auto& k : v.checks)
        s.verdicts.push_back({axis + "_" + k.label, k.pass,
                              fmt::format("{:.4f} N demand vs {:.4f} N capacity at {:.2f} Hz", k.demand, k.capacity,
                                          k.frequency)});
    };
    if (amb.radial) {
      if (!(amb.radial->amplifier_voltage > 0.0)) throw InputError("radial_amb.amplifier_voltage must be > 0");
      s.radial = capacity_envelope(amb.radial_capacity.force, amb.radial_gains_.current_gain,
                                   amb.radial->amplifier_voltage, amb.radial_inductance_);
      s.radial_verdict = envelope_verdict(*s.radial, s.demands, Axis::Radial);
      add(s.radial_verdict, "radial");
    }
    if (amb.axial) {
      if (!(amb.axial->amplifier_voltage > 0.0)) throw InputError("axial_amb.amplifier_voltage must be > 0");
      s.axial = capacity_envelope(amb.axial_capacity.force, amb.axial_gains_.current_gain, amb.axial->amplifier_voltage,
                                  amb.axial_inductance_);
      s.axial_verdict = envelope_verdict(*s.axial, s.demands, Axis::Axial);
      add(s.axial_verdict, "axial");
    }
    return s;
  });
}

struct AuditStage {
  SensorRequirements sensor;
  RequirementAudit audit;
};

inline AuditStage run_audit_stage(const ProjectConfig& c) {
  return report_detail::run_stage("audit", [&] {
    const Speed n = report_detail::require_speed(c, "audit");
    const auto& radial = report_detail::require(c.radial_amb, "radial_amb");
    const auto& axial = report_detail::require(c.axial_amb, "axial_amb");
    const int flutes = c.loads ? c.loads->flutes : 2;
    AuditStage s;
    s.sensor = sensor_requirements(n, flutes, radial.airgap, axial.nominal_airgap, c.audit.error_budget,
                                   c.audit.bandwidth_margin);
    s.audit = audit_sensor(s.sensor, c.audit.sensor);

    const double k = radial_gains(radial).displacement_gain;
    const auto g = stiffness_guideline(k, c.audit.controlled_stiffness);
    s.audit.entries.push_back({"negative_stiffness_lower", "N/m", ">=", g.lower, k, k >= g.lower, kBasisStiffness});
    s.audit.entries.push_back({"negative_stiffness_upper", "N/m", "<=", g.upper, k, k <= g.upper, kBasisStiffness});

    const double required = touchdown_clearance(radial.airgap);
    const double achieved = c.audit.touchdown_clearance > 0.0 ? c.audit.touchdown_clearance : required;
    s.audit.entries.push_back(
        {"touchdown_clearance", "m", "<=", required, achieved, achieved <= required, kBasisTouchdown});
    return s;
  });
}

struct PipelineReport {
  Speed operating_speed;
  TurbineStage turbine;
  RotorStage rotor;
  AmbStage amb;
  EnvelopeStage envelope;
  AuditStage audit;

  std::vector<std::pair<std::string, const std::vector<Verdict>*>> stage_verdicts() const {
    return {{"turbine", &turbine.verdicts}, {"rotor", &rotor.verdicts}, {"magnetics", &amb.verdicts},
            {"envelope", &envelope.verdicts}};
  }

  bool pass() const {
    for (const auto& [name, vs] : stage_verdicts())
      for (const auto& v : *vs)
        if (!v.pass) return false;
    return audit.audit.pass();
  }

  std::vector<Metric> summary() const;
};

inline PipelineReport run_pipeline(const ProjectConfig& c, const std::filesystem::path& base_dir) {
  PipelineReport r;
  r.operating_speed = report_detail::run_stage("pipeline", [&] { return report_detail::require_speed(c, "report"); });
  r.turbine = run_turbine_stage(c);
  r.rotor = run_rotor_stage(c);
  r.amb = run_amb_stage(c);
  r.envelope = run_envelope_stage(c, r.amb, base_dir);
  r.audit = run_audit_stage(c);
  return r;
}

inline std::vector<Metric> PipelineReport::summary() const {
  std::vector<Metric> m;
  const auto& t = turbine.report;
  m.push_back({"operating_speed", operating_speed.rpm(), "rpm"});
  m.push_back({"mach_number", t.mach, "-"});
  m.push_back({"nozzle_exit_velocity", t.exit_velocity, "m/s"});
  m.push_back({"ideal_turbine_speed", t.ideal_speed.rpm(), "rpm"});
  m.push_back({"mass_flow_per_nozzle", t.mass_flow_per_nozzle, "kg/s"});
  m.push_back({"turbine_torque", units::to_Nmm(t.torque), "N mm"});
  m.push_back({"windage_torque", units::to_Nmm(turbine.windage), "N mm"});
  m.push_back({"torque_margin", units::to_Nmm(t.margin.margin), "N mm"});
  m.push_back({"torque_margin_ratio", t.margin.ratio, "-"});
  m.push_back({"max_rotor_diameter", units::to_mm(rotor.max_diameter), "mm"});
  m.push_back({"largest_rotor_diameter", units::to_mm(rotor.largest_diameter), "mm"});
  m.push_back({"rotor_model_mass", rotor.mass, "kg"});
  if (rotor.first_bending) m.push_back({"first_bending_frequency", *rotor.first_bending, "Hz"});
  m.push_back({"bending_criticals_inside_margin", static_cast<double>(rotor.separation.bending_inside.size()), "-"});
  if (amb.radial) {
    m.push_back({"radial_bias_flux_density", bias_flux_density(*amb.radial, amb.radial->airgap), "T"});
    m.push_back({"radial_flux_density_plus", amb.radial_densities.plus, "T"});
    m.push_back({"radial_flux_density_minus", amb.radial_densities.minus, "T"});
    m.push_back({"radial_displacement_gain", amb.radial_gains_.displacement_gain, "N/m"});
    m.push_back({"radial_current_gain", amb.radial_gains_.current_gain, "N/A"});
    m.push_back({"radial_static_capacity", amb.radial_capacity.force, "N"});
    m.push_back({"radial_inductance", amb.radial_inductance_, "H"});
    m.push_back({"radial_current_density", amb.radial_checks.get("current_density").value * 1e-6, "A/mm^2"});
  }
  if (amb.axial) {
    m.push_back({"axial_displacement_gain", amb.axial_gains_.displacement_gain, "N/m"});
    m.push_back({"axial_current_gain", amb.axial_gains_.current_gain, "N/A"});
    m.push_back({"axial_static_capacity", amb.axial_capacity.force, "N"});
    m.push_back({"axial_inductance", amb.axial_inductance_, "H"});
    m.push_back({"axial_weight_offset_current", amb.weight_offset, "A"});
  }
  const auto& d = envelope.demands;
  m.push_back({"demand_static_radial", d.static_radial, "N"});
  m.push_back({"demand_static_axial", d.static_axial, "N"});
  for (const auto& p : d.dynamic_points) {
    m.push_back({"demand_" + p.label, p.magnitude, "N"});
    m.push_back({"demand_" + p.label + "_frequency", p.frequency, "Hz"});
  }
  if (envelope.radial) {
    m.push_back({"radial_knee_frequency", envelope.radial->knee_frequency(), "Hz"});
    m.push_back({"radial_slew_constant", envelope.radial->slew_constant, "N rad/s"});
  }
  if (envelope.axial) {
    m.push_back({"axial_knee_frequency", envelope.axial->knee_frequency(), "Hz"});
    m.push_back({"axial_slew_constant", envelope.axial->slew_constant, "N rad/s"});
  }
  for (const auto& p : d.dynamic_points) {
    const auto& env = p.axis == Axis::Radial ? envelope.radial : envelope.axial;
    if (env) m.push_back({"capacity_at_" + p.label, env->capacity(p.frequency), "N"});
  }
  m.push_back({"sensor_bandwidth_required", audit.sensor.bandwidth, "Hz"});
  m.push_back({"sensor_radial_range_required", units::to_mm(audit.sensor.radial_range), "mm"});
  m.push_back({"sensor_axial_range_required", units::to_mm(audit.sensor.axial_range), "mm"});
  m.push_back({"overall_pass", pass() ? 1.0 : 0.0, "-"});
  return m;
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt_value(double v) { return fmt::format("{:.10g}", v); }

inline void write_summary_csv(std::ostream& out, const std::vector<Metric>& metrics) {
  out << "metric,value,unit\n";
  for (const auto& m : metrics) out << m.name << ',' << fmt_value(m.value) << ',' << m.unit << '\n';
}

inline void write_verdicts_csv(std::ostream& out, const PipelineReport& r) {
  out << "stage,check,pass,detail\n";
  for (const auto& [stage, vs] : r.stage_verdicts())
    for (const auto& v : *vs) out << stage << ',' << v.name << ',' << (v.pass ? 1 : 0) << ",\"" << v.detail << "\"\n";
}

inline void write_audit_csv(std::ostream& out, const RequirementAudit& a) {
  out << "requirement,required,achieved,unit,comparison,pass,basis\n";
  for (const auto& e : a.entries)
    out << e.name << ',' << fmt_value(e.required) << ',' << fmt_value(e.achieved) << ',' << e.unit << ','
        << e.comparison << ',' << (e.pass ? 1 : 0) << ",\"" << e.basis << "\"\n";
}

inline void write_turbine_sweep_csv(std::ostream& out, const std::vector<TorqueSweepPoint>& pts) {
  out << "d_n_mm,torque_Nmm\n";
  for (const auto& p : pts) out << fmt_value(units::to_mm(p.nozzle_diameter)) << ',' << fmt_value(units::to_Nmm(p.torque)) << '\n';
}

inline std::string sweep_file_name(double eta) { return fmt::format("turbine_sweep_eta{:.2f}.csv", eta); }

inline void write_critical_speeds_csv(std::ostream& out, const std::vector<CriticalSpeed>& cs) {
  out << "rpm,mode_index,freq_hz,whirl,class\n";
  for (const auto& c : cs)
    out << fmt::format("{:.10g},{},{:.10g},{},{}\n", c.rpm, c.mode_index, c.mode.frequency, to_string(c.mode.whirl),
                       c.mode.label());
}

inline void write_checklist_csv(std::ostream& out, const AmbStage& s) {
  out << "axis,check,value,limit,pass,evaluated,note\n";
  auto rows = [&](const char* axis, const ConstraintChecklist& cl) {
    for (const auto& k : cl.checks)
      out << axis << ',' << k.name << ',' << fmt_value(k.value) << ',' << fmt_value(k.limit) << ',' << (k.pass ? 1 : 0)
          << ',' << (k.evaluated ? 1 : 0) << ",\"" << k.note << "\"\n";
  };
  if (s.radial) rows("radial", s.radial_checks);
  if (s.axial) rows("axial", s.axial_checks);
}

template <class Fn>
std::string to_string_with(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

/// Writes every CSV artifact of the report into `dir`; returns the file names.
inline std::vector<std::string> write_report_artifacts(const PipelineReport& r, const EnvelopeConfig& env,
                                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("summary.csv", to_string_with([&](std::ostream& o) { write_summary_csv(o, r.summary()); }));
  files.emplace_back("verdicts.csv", to_string_with([&](std::ostream& o) { write_verdicts_csv(o, r); }));
  files.emplace_back("audit.csv", to_string_with([&](std::ostream& o) { write_audit_csv(o, r.audit.audit); }));
  for (const auto& [eta, pts] : r.turbine.sweeps)
    files.emplace_back(sweep_file_name(eta), to_string_with([&](std::ostream& o) { write_turbine_sweep_csv(o, pts); }));
  files.emplace_back("campbell.csv", to_string_with([&](std::ostream& o) { write_campbell_csv(o, r.rotor.campbell); }));
  files.emplace_back("critical_speeds.csv",
                     to_string_with([&](std::ostream& o) { write_critical_speeds_csv(o, r.rotor.criticals); }));
  files.emplace_back("amb_checks.csv", to_string_with([&](std::ostream& o) { write_checklist_csv(o, r.amb); }));
  files.emplace_back("demands.csv", to_string_with([&](std::ostream& o) { write_demand_csv(o, r.envelope.demands); }));
  if (r.envelope.radial)
    files.emplace_back("envelope_radial.csv", to_string_with([&](std::ostream& o) {
                         write_envelope_csv(o, *r.envelope.radial, r.envelope.f_max, env.steps);
                       }));
  if (r.envelope.axial)
    files.emplace_back("envelope_axial.csv", to_string_with([&](std::ostream& o) {
                         write_envelope_csv(o, *r.envelope.axial, r.envelope.f_max, env.steps);
                       }));
  std::vector<std::string> names;
  for (const auto& [name, content] : files) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw InputError("cannot write '" + (dir / name).string() + "'");
    f << content;
    names.push_back(name);
  }
  return names;
}

inline void print_verdicts(std::ostream& out, const std::vector<Verdict>& vs) {
  for (const auto& v : vs) out << fmt::format("  [{}] {:<40} {}\n", report_detail::pf(v.pass), v.name, v.detail);
}

inline void print_audit(std::ostream& out, const RequirementAudit& a) {
  for (const auto& e : a.entries)
    out << fmt::format("  [{}] {:<28} required {} {:.6g} {}, achieved {:.6g} {}  ({})\n", report_detail::pf(e.pass),
                       e.name, e.comparison, e.required, e.unit, e.achieved, e.unit, e.basis);
}

inline void print_report(std::ostream& out, const PipelineReport& r) {
  out << fmt::format("AMB spindle design report at {:.0f} rpm\n\n", r.operating_speed.rpm());
  const char* titles[] = {"Step 1-2  turbine drive", "Step 3    rotor", "Step 4-5  magnetic bearings",
                          "Step 6    capacity envelope"};
  const auto stages = r.stage_verdicts();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    out << titles[i] << '\n';
    print_verdicts(out, *stages[i].second);
    out << '\n';
  }
  out << "Step 7    requirement audit\n";
  print_audit(out, r.audit.audit);
  out << "\nKey figures\n";
  for (const auto& m : r.summary()) out << fmt::format("  {:<44} {:>14.6g} {}\n", m.name, m.value, m.unit);
  out << fmt::format("\nOverall: {}\n", report_detail::pf(r.pass()));
}

}  // namespace ambspindle
