#pragma once

// Magnetic-circuit models of the two actuators:
//
//  * radial: homopolar, permanent-magnet biased, two four-pole stators. Bias
//    flux from the magnet circuit, control flux from the coil MMF of two
//    opposing poles in series; densities superpose with opposite signs in
//    opposing gaps.
//  * axial: current-biased reluctance actuator pair, F ~ (i1/l1)^2 - (i2/l2)^2.
//
// Correction factors k_m, k_c, k_l, k_ax scale the idealized circuits toward
// field-solution results; they default to 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ambspindle/error.hpp"
#include "ambspindle/loads.hpp"
#include "ambspindle/materials.hpp"
#include "ambspindle/units.hpp"

namespace ambspindle {

struct CorrectionFactors {
  double k_m = 1.0;  // bias circuit, finite iron permeability
  double k_c = 1.0;  // control circuit, finite iron permeability
  double k_l = 1.0;  // bias leakage

  bool operator==(const CorrectionFactors&) const = default;
};

struct RadialAmbDesign {
  double stator_inner_radius = 0.0;      // s_ir [m]
  double stator_radial_thickness = 0.0;  // s_rt [m]
  double pole_length = 0.0;              // p_l, axial [m]
  double pole_width = 0.0;               // p_w [m]
  double pole_radius = 0.0;              // p_r, bore radius at the pole face [m]
  PermanentMagnetSpec magnet;
  double airgap = 0.0;                   // l_gr [m]
  double pole_area = 0.0;                // A_gr [m^2]; 0 = p_w * p_l
  int turns_per_pole = 1;                // n_r
  double max_current = 0.0;              // i_max [A]
  double design_current = 0.0;           // i_c [A]
  CorrectionFactors factors;
  double amplifier_voltage = 0.0;        // V_c [V]
  double wire_cross_section = 0.0;       // [m^2]; 0 = sized to fill the coil window
  double coil_window_area = 0.0;         // [m^2]; 0 = derived from the pole slot
  double fill_factor = 0.5;              // copper share of the coil window

  double gap_area() const { return pole_area > 0.0 ? pole_area : pole_width * pole_length; }

  /// Radial coil height times the half-slot between neighbouring poles at
  /// the pole root.
  double coil_thickness() const { return 0.5 * (kPi * pole_radius / 2.0 - pole_width); }
  double window_area() const {
    return coil_window_area > 0.0 ? coil_window_area : coil_thickness() * (stator_inner_radius - pole_radius);
  }
  double wire_area() const {
    return wire_cross_section > 0.0 ? wire_cross_section : fill_factor * window_area() / turns_per_pole;
  }

  bool operator==(const RadialAmbDesign&) const = default;
};

inline std::vector<std::string> radial_violations(const RadialAmbDesign& d) {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) out.push_back(fmt::format("radial_amb: {} must be > 0", name));
  };
  positive(d.stator_inner_radius, "stator_inner_radius");
  positive(d.stator_radial_thickness, "stator_radial_thickness");
  positive(d.pole_length, "pole_length");
  positive(d.pole_width, "pole_width");
  positive(d.pole_radius, "pole_radius");
  positive(d.airgap, "airgap");
  if (d.pole_area < 0.0) out.push_back("radial_amb: pole_area must be >= 0 (0 derives p_w * p_l)");
  if (d.turns_per_pole < 1) out.push_back("radial_amb: turns_per_pole must be >= 1");
  if (d.max_current < 0.0) out.push_back("radial_amb: max_current must be >= 0");
  if (!(d.design_current >= 0.0 && d.design_current <= d.max_current))
    out.push_back("radial_amb: design_current must satisfy 0 <= i_c <= i_max");
  positive(d.factors.k_m, "factors.k_m");
  positive(d.factors.k_c, "factors.k_c");
  positive(d.factors.k_l, "factors.k_l");
  if (d.amplifier_voltage < 0.0) out.push_back("radial_amb: amplifier_voltage must be >= 0");
  if (d.wire_cross_section < 0.0) out.push_back("radial_amb: wire_cross_section must be >= 0");
  if (d.coil_window_area < 0.0) out.push_back("radial_amb: coil_window_area must be >= 0");
  if (!(d.fill_factor > 0.0 && d.fill_factor <= 1.0)) out.push_back("radial_amb: fill_factor must be in (0, 1]");
  for (auto& v : magnet_violations(d.magnet)) out.push_back("radial_amb: " + v);
  return out;
}

/// Bias density in a gap of length g from the magnet circuit.
inline double bias_flux_density(const RadialAmbDesign& d, double gap) {
  const auto& pm = d.magnet;
  const double mmf = kMu0 * pm.coercivity * pm.thickness;
  if (mmf == 0.0) return 0.0;
  const double leakage = d.factors.k_l * mmf * d.gap_area() / (pm.remanence * pm.area());
  return mmf / (2.0 * d.factors.k_m * gap + leakage);
}

/// Control density: coil MMF of two opposing poles in series over their gaps.
inline double control_flux_density(const RadialAmbDesign& d, double current) {
  return kMu0 * d.turns_per_pole * current / (d.factors.k_c * d.airgap);
}

struct FluxDensities {
  double plus = 0.0;   // gap closing with +x [T]
  double minus = 0.0;  // opposing gap [T]
};

inline FluxDensities radial_flux_densities(const RadialAmbDesign& d, double x, double current) {
  if (!(std::abs(x) < d.airgap))
    throw DomainError(fmt::format("radial_amb: displacement {} m closes the {} m airgap", x, d.airgap));
  const double bc = control_flux_density(d, current);
  return {bias_flux_density(d, d.airgap - x) + bc, bias_flux_density(d, d.airgap + x) - bc};
}

inline constexpr int kRadialStators = 2;

/// Net force along the loaded axis from Maxwell stress on the two opposing
/// pole faces of each stator.
inline double radial_force(const RadialAmbDesign& d, double x, double current) {
  const auto b = radial_flux_densities(d, x, current);
  return kRadialStators * d.gap_area() / (2.0 * kMu0) * (b.plus * b.plus - b.minus * b.minus);
}

/// Maxwell-stress force of the stators from given gap densities.
inline double maxwell_force(double b_plus, double b_minus, double pole_area, int stators = kRadialStators) {
  return stators * pole_area / (2.0 * kMu0) * (b_plus * b_plus - b_minus * b_minus);
}

struct LinearizedGains {
  double displacement_gain = 0.0;  // K [N/m], negative-stiffness magnitude
  double current_gain = 0.0;       // K_i [N/A]
};

/// Closed-form linearization at x = 0, i = 0.
inline LinearizedGains radial_gains(const RadialAmbDesign& d) {
  const auto& pm = d.magnet;
  const auto& f = d.factors;
  const double A = d.gap_area();
  const double den = 2.0 * f.k_m * pm.area() * pm.remanence * d.airgap + kMu0 * f.k_l * A * pm.coercivity * pm.thickness;
  LinearizedGains g;
  g.displacement_gain = 8.0 * kMu0 * f.k_m * A * std::pow(pm.area(), 3) * std::pow(pm.remanence, 3) *
                        std::pow(pm.coercivity, 2) * std::pow(pm.thickness, 2) / std::pow(den, 3);
  g.current_gain = 4.0 * kMu0 * A * pm.area() * pm.remanence * pm.coercivity * pm.thickness * d.turns_per_pole /
                   (f.k_c * d.airgap * den);
  return g;
}

// ---------------------------------------------------------------------------
// Inductance

struct GapSegment {
  double length = 0.0;  // [m]
  double area = 0.0;    // [m^2]
};

/// Series reluctance path of the control flux; `correction` scales the total.
struct ReluctancePath {
  std::vector<GapSegment> gaps;
  double correction = 1.0;

  double reluctance() const {
    double r = 0.0;
    for (const auto& g : gaps) {
      if (!(g.area > 0.0) || g.length < 0.0) throw DomainError("reluctance path: gap needs area > 0, length >= 0");
      r += g.length / (kMu0 * g.area);
    }
    return correction * r;
  }
};

inline double coil_inductance(int turns, const ReluctancePath& path) {
  if (turns < 1) throw DomainError("coil_inductance: turns must be >= 1");
  const double r = path.reluctance();
  if (!(r > 0.0)) throw DomainError("coil_inductance: zero reluctance path");
  return static_cast<double>(turns) * turns / r;
}

/// One control axis: two opposing poles in series, 2 n_r turns over two gaps.
inline double radial_inductance(const RadialAmbDesign& d) {
  return coil_inductance(2 * d.turns_per_pole,
                         {{{d.airgap, d.gap_area()}, {d.airgap, d.gap_area()}}, d.factors.k_c});
}

// ---------------------------------------------------------------------------
// Static capacity

enum class CapacityLimit { MaxCurrent, FluxLimit, FieldReversal };

inline const char* to_string(CapacityLimit l) {
  switch (l) {
    case CapacityLimit::MaxCurrent: return "max_current";
    case CapacityLimit::FluxLimit: return "flux_limit";
    case CapacityLimit::FieldReversal: return "field_reversal";
  }
  return "?";
}

struct StaticCapacity {
  double force = 0.0;    // [N]
  double current = 0.0;  // current actually used [A]
  CapacityLimit limited_by = CapacityLimit::MaxCurrent;
};

/// Force at x = 0 and the requested current, clipped by the total gap
/// density limit and by control flux reaching the bias flux.
inline StaticCapacity radial_static_capacity(const RadialAmbDesign& d, double current, double flux_limit = 1.0) {
  if (current < 0.0) throw DomainError("radial static capacity: current must be >= 0");
  StaticCapacity c;
  c.current = current;
  const double bb = bias_flux_density(d, d.airgap);
  const double per_amp = control_flux_density(d, 1.0);
  const double i_flux = std::max(0.0, (flux_limit - bb) / per_amp);
  const double i_rev = bb / per_amp;
  if (i_flux < c.current) {
    c.current = i_flux;
    c.limited_by = CapacityLimit::FluxLimit;
  }
  if (i_rev < c.current) {
    c.current = i_rev;
    c.limited_by = CapacityLimit::FieldReversal;
  }
  c.force = radial_force(d, 0.0, c.current);
  return c;
}

inline StaticCapacity radial_static_capacity(const RadialAmbDesign& d) {
  return radial_static_capacity(d, d.max_current);
}

// ---------------------------------------------------------------------------
// Axial actuator

struct AxialAmbDesign {
  double nominal_airgap = 0.0;      // l_o [m]
  double pole_area = 0.0;           // A_a [m^2]
  int turns = 1;                    // n_a per actuator
  double bias_current = 0.0;        // i_b [A]
  double max_current = 0.0;         // [A]
  double correction_factor = 1.0;   // k_ax
  double amplifier_voltage = 0.0;   // V_c [V]
  double rotor_weight = 0.0;        // [N]
  double wire_cross_section = 0.0;  // [m^2]; 0 = not specified

  bool operator==(const AxialAmbDesign&) const = default;
};

inline std::vector<std::string> axial_violations(const AxialAmbDesign& d) {
  std::vector<std::string> out;
  if (!(d.nominal_airgap > 0.0)) out.push_back("axial_amb: nominal_airgap must be > 0");
  if (!(d.pole_area > 0.0)) out.push_back("axial_amb: pole_area must be > 0");
  if (d.turns < 1) out.push_back("axial_amb: turns must be >= 1");
  if (!(d.bias_current > 0.0 && d.bias_current < d.max_current))
    out.push_back("axial_amb: currents must satisfy 0 < i_b < i_max");
  if (!(d.correction_factor > 0.0)) out.push_back("axial_amb: correction_factor must be > 0");
  if (d.amplifier_voltage < 0.0) out.push_back("axial_amb: amplifier_voltage must be >= 0");
  if (d.rotor_weight < 0.0) out.push_back("axial_amb: rotor_weight must be >= 0");
  if (d.wire_cross_section < 0.0) out.push_back("axial_amb: wire_cross_section must be >= 0");
  return out;
}

inline double axial_force(const AxialAmbDesign& d, double z, double i1, double i2) {
  if (!(std::abs(z) < d.nominal_airgap))
    throw DomainError(fmt::format("axial_amb: displacement {} m closes the {} m airgap", z, d.nominal_airgap));
  if (i1 < 0.0 || i2 < 0.0) throw DomainError("axial_amb: coil currents must be >= 0");
  const double l1 = d.nominal_airgap - z;
  const double l2 = d.nominal_airgap + z;
  const double k = d.correction_factor;
  return kMu0 * d.turns * d.turns * d.pole_area / (4.0 * k * k) * (i1 * i1 / (l1 * l1) - i2 * i2 / (l2 * l2));
}

inline LinearizedGains axial_gains(const AxialAmbDesign& d) {
  const double c = kMu0 * d.turns * d.turns * d.pole_area / (d.correction_factor * d.correction_factor);
  return {c * d.bias_current * d.bias_current / std::pow(d.nominal_airgap, 3),
          c * d.bias_current / (d.nominal_airgap * d.nominal_airgap)};
}

/// Gap density of one actuator carrying `current` across its two gaps.
inline double axial_flux_density(const AxialAmbDesign& d, double current) {
  return kMu0 * d.turns * current / (2.0 * d.correction_factor * d.nominal_airgap);
}

inline double axial_inductance(const AxialAmbDesign& d) {
  return coil_inductance(d.turns, {{{d.nominal_airgap, d.pole_area}, {d.nominal_airgap, d.pole_area}},
                                   d.correction_factor});
}

/// Upper coil at i_max, lower at 2 i_b - i_max (bias +/- the same control).
inline StaticCapacity axial_static_capacity(const AxialAmbDesign& d) {
  StaticCapacity c;
  c.current = d.max_current;
  c.force = axial_force(d, 0.0, d.max_current, std::max(0.0, 2.0 * d.bias_current - d.max_current));
  return c;
}

/// Control offset delta with i1 = i_b + delta, i2 = i_b - delta that carries
/// the rotor weight at z = 0. Exact: the force is linear in delta there.
inline double weight_balance_offset(const AxialAmbDesign& d) {
  const double k = d.correction_factor;
  const double c = kMu0 * d.turns * d.turns * d.pole_area / (4.0 * k * k * d.nominal_airgap * d.nominal_airgap);
  const double delta = d.rotor_weight / (4.0 * c * d.bias_current);
  if (delta > d.bias_current)
    throw DomainError(fmt::format("axial_amb: weight needs {} A offset, above the {} A bias", delta, d.bias_current));
  return delta;
}

// ---------------------------------------------------------------------------
// Capacity envelope

struct CapacityEnvelope {
  double static_capacity = 0.0;  // F_s [N]
  double slew_constant = 0.0;    // C = K_i V_c / L [N rad/s]

  double knee_frequency() const { return slew_constant / (kTwoPi * static_capacity); }

  /// Slew-limited capacity; f = 0 is the static regime.
  double dynamic_capacity(double f) const {
    if (f < 0.0) throw DomainError("dynamic_capacity: frequency must be >= 0");
    if (f == 0.0) return static_capacity;
    return slew_constant / (kTwoPi * f);
  }

  double capacity(double f) const { return std::min(static_capacity, dynamic_capacity(f)); }
};

inline CapacityEnvelope capacity_envelope(double static_capacity, double current_gain, double voltage,
                                          double inductance) {
  if (!(static_capacity > 0.0) || !(current_gain > 0.0) || !(voltage > 0.0) || !(inductance > 0.0))
    throw DomainError("capacity_envelope: F_s, K_i, V_c and L must all be > 0");
  return {static_capacity, current_gain * voltage / inductance};
}

/// Envelope with the slew constant implied by a known knee frequency.
inline CapacityEnvelope envelope_from_knee(double static_capacity, double knee_hz) {
  if (!(static_capacity > 0.0) || !(knee_hz > 0.0)) throw DomainError("envelope_from_knee: inputs must be > 0");
  return {static_capacity, kTwoPi * knee_hz * static_capacity};
}

/// Amplifier voltage that places the knee at `knee_hz`.
inline double voltage_for_knee(double static_capacity, double current_gain, double inductance, double knee_hz) {
  return kTwoPi * knee_hz * static_capacity * inductance / current_gain;
}

struct EnvelopeCheck {
  std::string label;
  double frequency = 0.0;  // [Hz]
  double demand = 0.0;     // [N]
  double capacity = 0.0;   // [N]
  double margin = 0.0;     // capacity - demand [N]
  bool pass = false;
};

struct EnvelopeVerdict {
  std::vector<EnvelopeCheck> checks;
  std::vector<std::string> warnings;
  bool pass = true;
};

/// Each point against the envelope at its frequency (static points at 0 Hz
/// against F_s). Pass requires demand strictly below capacity.
inline EnvelopeVerdict envelope_verdict(const CapacityEnvelope& env, const std::vector<DemandPoint>& points) {
  EnvelopeVerdict v;
  if (points.empty()) v.warnings.push_back("no demand points: verdict passes vacuously");
  for (const auto& p : points) {
    EnvelopeCheck c;
    c.label = p.label;
    c.frequency = p.frequency;
    c.demand = p.magnitude;
    c.capacity = env.capacity(p.frequency);
    c.margin = c.capacity - c.demand;
    c.pass = c.demand < c.capacity;
    v.pass = v.pass && c.pass;
    v.checks.push_back(std::move(c));
  }
  return v;
}

inline EnvelopeVerdict envelope_verdict(const CapacityEnvelope& env, const DemandSpectrum& demands, Axis axis) {
  if (!demands.safety_factors_applied) throw DomainError("envelope_verdict: demands must carry safety factors");
  return envelope_verdict(env, demands.points(axis));
}

inline void write_envelope_csv(std::ostream& out, const CapacityEnvelope& env, double f_max, int steps) {
  out << "freq_hz,capacity_N\n";
  for (int i = 0; i <= steps; ++i) {
    const double f = f_max * i / steps;
    out << fmt::format("{:.10g},{:.10g}\n", f, env.capacity(f));
  }
}

// ---------------------------------------------------------------------------
// Constraint checklist

struct ConstraintLimits {
  double flux_limit = 1.0;                   // [T]
  double stiffness_min = 1.4e4;              // [N/m]
  double stiffness_max = 1.4e5;              // [N/m]
  double current_density_min = 2e6;          // [A/m^2]
  double current_density_max = 5e6;          // [A/m^2]
  double current_density_target = 4e6;       // [A/m^2]

  bool operator==(const ConstraintLimits&) const = default;
};

struct ConstraintCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = true;
  bool evaluated = true;
  std::string note;
};

struct ConstraintChecklist {
  std::vector<ConstraintCheck> checks;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
  const ConstraintCheck& get(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw DomainError("constraint checklist has no entry '" + name + "'");
  }
};

namespace detail {

inline ConstraintCheck stiffness_check(double k, const ConstraintLimits& lim) {
  ConstraintCheck c{"stiffness_band", k, k < lim.stiffness_min ? lim.stiffness_min : lim.stiffness_max, true, true, ""};
  c.pass = k >= lim.stiffness_min && k <= lim.stiffness_max;
  if (k < lim.stiffness_min) c.note = "below band";
  if (k > lim.stiffness_max) c.note = "above band";
  return c;
}

inline ConstraintCheck current_density_check(double j, const ConstraintLimits& lim) {
  ConstraintCheck c{"current_density", j, lim.current_density_max, j <= lim.current_density_max, true, ""};
  if (j < lim.current_density_min)
    c.note = "below the recommended band (informational)";
  else if (j <= lim.current_density_max)
    c.note = "within the recommended band";
  else
    c.note = "above the recommended band";
  return c;
}

}  // namespace detail

/// (a) peak total gap density, (b) control below bias, (c) negative stiffness
/// band, (d) coil current density, evaluated at x = 0 and the given current.
inline ConstraintChecklist radial_constraint_checks(const RadialAmbDesign& d, double current,
                                                    const ConstraintLimits& lim = {}) {
  ConstraintChecklist out;
  const double bb = bias_flux_density(d, d.airgap);
  const double bc = control_flux_density(d, current);
  out.checks.push_back({"flux_density", bb + bc, lim.flux_limit, bb + bc <= lim.flux_limit, true, ""});
  out.checks.push_back({"control_below_bias", bc, bb, bc < bb, true, ""});
  out.checks.push_back(detail::stiffness_check(radial_gains(d).displacement_gain, lim));
  out.checks.push_back(detail::current_density_check(current / d.wire_area(), lim));
  return out;
}

inline ConstraintChecklist radial_constraint_checks(const RadialAmbDesign& d, const ConstraintLimits& lim = {}) {
  return radial_constraint_checks(d, d.design_current, lim);
}

/// Axial operating point: upper coil at i_max, lower at 2 i_b - i_max.
inline ConstraintChecklist axial_constraint_checks(const AxialAmbDesign& d, const ConstraintLimits& lim = {}) {
  ConstraintChecklist out;
  const double b = axial_flux_density(d, d.max_current);
  out.checks.push_back({"flux_density", b, lim.flux_limit, b <= lim.flux_limit, true, ""});
  const double control = d.max_current - d.bias_current;
  out.checks.push_back({"control_below_bias", control, d.bias_current, control < d.bias_current, true, ""});
  out.checks.push_back(detail::stiffness_check(axial_gains(d).displacement_gain, lim));
  if (d.wire_cross_section > 0.0) {
    out.checks.push_back(detail::current_density_check(d.max_current / d.wire_cross_section, lim));
  } else {
    out.checks.push_back({"current_density", 0.0, lim.current_density_max, true, false, "wire cross-section not given"});
  }
  return out;
}

}  // namespace ambspindle
