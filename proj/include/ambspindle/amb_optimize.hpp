#pragma once

// Radial AMB sizing problem: nine geometric/electrical variables, objectives
// (maximize static capacity, minimize solid volume), constraints from the
// magnetics checklist.

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ambspindle/magnetics.hpp"
#include "ambspindle/moga.hpp"

namespace ambspindle {

struct DesignVariables {
  double s_ir = 0.0;  // stator inner radius [m]
  double s_rt = 0.0;  // stator radial thickness [m]
  double p_l = 0.0;   // pole length (axial stack) [m]
  double p_w = 0.0;   // pole width [m]
  double p_r = 0.0;   // pole radius [m]
  double pm_t = 0.0;  // magnet thickness [m]
  double pm_w = 0.0;  // magnet width [m]
  double pm_l = 0.0;  // magnet length [m]
  double i_c = 0.0;   // control current [A]

  static constexpr std::size_t kCount = 9;
  static constexpr std::array<const char*, kCount> kNames{"s_ir_m", "s_rt_m", "p_l_m", "p_w_m", "p_r_m",
                                                          "pm_t_m", "pm_w_m", "pm_l_m", "i_c_A"};

  std::vector<double> to_vector() const { return {s_ir, s_rt, p_l, p_w, p_r, pm_t, pm_w, pm_l, i_c}; }
  static DesignVariables from_vector(const std::vector<double>& v) {
    return {v.at(0), v.at(1), v.at(2), v.at(3), v.at(4), v.at(5), v.at(6), v.at(7), v.at(8)};
  }

  bool operator==(const DesignVariables&) const = default;
};

struct DesignBounds {
  DesignVariables lower;
  DesignVariables upper;

  bool operator==(const DesignBounds&) const = default;
};

inline std::vector<std::string> bounds_violations(const DesignBounds& b) {
  std::vector<std::string> out;
  const auto lo = b.lower.to_vector();
  const auto hi = b.upper.to_vector();
  for (std::size_t k = 0; k < DesignVariables::kCount; ++k) {
    if (!(std::isfinite(lo[k]) && std::isfinite(hi[k]) && lo[k] < hi[k]))
      out.push_back(fmt::format("optimizer bounds: {} needs finite lower < upper", DesignVariables::kNames[k]));
    if (lo[k] < 0.0) out.push_back(fmt::format("optimizer bounds: {} lower bound must be >= 0", DesignVariables::kNames[k]));
  }
  return out;
}

/// Quantities held fixed while the nine variables move.
struct AmbFixedParameters {
  double airgap = 0.4e-3;
  int turns_per_pole = 30;
  double remanence = 1.19;   // [T]
  double coercivity = 8.8e5; // [A/m]
  CorrectionFactors factors;
  double fill_factor = 0.5;
  double wire_cross_section = 0.0;  // 0 = sized to fill the coil window
  ConstraintLimits limits;

  bool operator==(const AmbFixedParameters&) const = default;
};

inline RadialAmbDesign design_from_variables(const DesignVariables& v, const AmbFixedParameters& f) {
  RadialAmbDesign d;
  d.stator_inner_radius = v.s_ir;
  d.stator_radial_thickness = v.s_rt;
  d.pole_length = v.p_l;
  d.pole_width = v.p_w;
  d.pole_radius = v.p_r;
  d.magnet = {f.remanence, f.coercivity, v.pm_t, v.pm_w, v.pm_l};
  d.airgap = f.airgap;
  d.turns_per_pole = f.turns_per_pole;
  d.max_current = v.i_c;
  d.design_current = v.i_c;
  d.factors = f.factors;
  d.wire_cross_section = f.wire_cross_section;
  d.fill_factor = f.fill_factor;
  return d;
}

/// Empty when the variables describe a buildable actuator.
inline std::vector<std::string> geometry_violations(const DesignVariables& v) {
  std::vector<std::string> out;
  if (!(v.s_ir > v.p_r)) out.push_back("pole radius must be below the stator inner radius");
  if (!(4.0 * v.p_w < kTwoPi * v.p_r)) out.push_back("four poles of this width do not fit around the pole radius");
  if (v.s_rt <= 0.0 || v.p_l < 0.0 || v.p_w <= 0.0 || v.pm_t < 0.0 || v.pm_w < 0.0 || v.pm_l < 0.0)
    out.push_back("dimensions must be non-negative (thickness and width positive)");
  return out;
}

struct VolumeBreakdown {
  double rings = 0.0;       // two stator back-iron rings
  double poles = 0.0;       // eight poles
  double magnets = 0.0;     // four magnets
  double connectors = 0.0;  // four flux connectors between the stators
  double coils = 0.0;       // eight coils
  double total() const { return rings + poles + magnets + connectors + coils; }
};

/// Solid volume of one radial AMB (two four-pole stators). Each stator is a
/// ring of inner radius s_ir, thickness s_rt and axial length p_l with four
/// poles p_w x p_l spanning s_ir - p_r inward. Each pole carries a coil of
/// thickness t = (pi p_r / 2 - p_w) / 2 (half the slot at the pole root)
/// over the pole span. Four magnets pm_t x pm_w x pm_l sit between the
/// stators, each with a connector pm_w x pm_l x s_rt.
inline VolumeBreakdown amb_volume_breakdown(const DesignVariables& v) {
  if (auto g = geometry_violations(v); !g.empty()) throw DomainError("amb_volume: " + g.front());
  VolumeBreakdown b;
  const double span = v.s_ir - v.p_r;
  const double t = 0.5 * (kPi * v.p_r / 2.0 - v.p_w);
  b.rings = 2.0 * kPi * ((v.s_ir + v.s_rt) * (v.s_ir + v.s_rt) - v.s_ir * v.s_ir) * v.p_l;
  b.poles = 8.0 * v.p_w * v.p_l * span;
  b.magnets = 4.0 * v.pm_t * v.pm_w * v.pm_l;
  b.connectors = 4.0 * v.pm_w * v.pm_l * v.s_rt;
  b.coils = 8.0 * ((v.p_w + 2.0 * t) * (v.p_l + 2.0 * t) - v.p_w * v.p_l) * span;
  return b;
}

inline double amb_volume(const DesignVariables& v) { return amb_volume_breakdown(v).total(); }

/// Volume no candidate within the bounds can exceed. Poles plus coils equal
/// 8 span (pi p_r / 2)(p_l + 2t), bounded term by term.
inline double volume_upper_bound(const DesignBounds& b) {
  const auto& lo = b.lower;
  const auto& hi = b.upper;
  const double t = std::max(0.0, 0.5 * (kPi * hi.p_r / 2.0 - lo.p_w));
  const double span = std::max(0.0, hi.s_ir - lo.p_r);
  return 2.0 * kPi * ((hi.s_ir + hi.s_rt) * (hi.s_ir + hi.s_rt) - hi.s_ir * hi.s_ir) * hi.p_l +
         8.0 * span * (kPi * hi.p_r / 2.0) * (hi.p_l + 2.0 * t) + 4.0 * hi.pm_t * hi.pm_w * hi.pm_l +
         4.0 * hi.pm_w * hi.pm_l * hi.s_rt;
}

struct ObjectiveVector {
  double static_capacity = 0.0;  // [N]
  double volume = 0.0;           // [m^3]
  bool feasible = false;
  double violation = 0.0;
  std::vector<double> excess;  // per constraint, order of kAmbConstraintNames
};

inline const std::vector<std::string> kAmbConstraintNames{"geometry", "flux_density", "control_below_bias",
                                                          "stiffness_band", "current_density"};
inline constexpr double kGeometryViolation = 1e3;

inline ObjectiveVector evaluate_candidate(const DesignVariables& v, const AmbFixedParameters& f) {
  ObjectiveVector o;
  o.excess.assign(kAmbConstraintNames.size(), 0.0);
  if (!geometry_violations(v).empty()) {
    o.excess[0] = kGeometryViolation;
    o.violation = kGeometryViolation;
    return o;
  }
  const RadialAmbDesign d = design_from_variables(v, f);
  o.volume = amb_volume(v);
  o.static_capacity = radial_static_capacity(d, v.i_c, f.limits.flux_limit).force;

  const auto checks = radial_constraint_checks(d, v.i_c, f.limits);
  const auto& flux = checks.get("flux_density");
  o.excess[1] = std::max(0.0, (flux.value - flux.limit) / flux.limit);
  const auto& rev = checks.get("control_below_bias");
  if (!rev.pass) o.excess[2] = rev.limit > 0.0 ? std::max((rev.value - rev.limit) / rev.limit, 1e-9) : 1.0;
  const auto& stiff = checks.get("stiffness_band");
  if (stiff.value < f.limits.stiffness_min)
    o.excess[3] = (f.limits.stiffness_min - stiff.value) / f.limits.stiffness_min;
  else if (stiff.value > f.limits.stiffness_max)
    o.excess[3] = (stiff.value - f.limits.stiffness_max) / f.limits.stiffness_max;
  const auto& j = checks.get("current_density");
  o.excess[4] = std::max(0.0, (j.value - j.limit) / j.limit);

  for (double e : o.excess) o.violation += e;
  o.feasible = o.violation == 0.0;
  return o;
}

inline MogaProblem make_amb_problem(const DesignBounds& bounds, const AmbFixedParameters& fixed) {
  if (auto v = bounds_violations(bounds); !v.empty()) throw ValidationError(std::move(v));
  MogaProblem p;
  p.lower = bounds.lower.to_vector();
  p.upper = bounds.upper.to_vector();
  p.constraint_names = kAmbConstraintNames;
  p.evaluate = [fixed](const std::vector<double>& x) {
    const ObjectiveVector o = evaluate_candidate(DesignVariables::from_vector(x), fixed);
    return Evaluation{{-o.static_capacity, o.volume}, o.violation, o.excess};
  };
  // Capacity is never negative and no candidate exceeds the volume bound.
  p.reference_point = {0.0, 1.1 * volume_upper_bound(bounds)};
  return p;
}

inline void write_front_csv(std::ostream& out, const std::vector<Individual>& front) {
  out << "capacity_N,volume_m3";
  for (const char* n : DesignVariables::kNames) out << ',' << n;
  out << '\n';
  for (const auto& ind : front) {
    out << fmt::format("{:.10g},{:.10g}", -ind.eval.objectives[0], ind.eval.objectives[1]);
    for (double v : ind.x) out << fmt::format(",{:.10g}", v);
    out << '\n';
  }
}

inline void write_history_csv(std::ostream& out, const MogaResult& r) {
  out << "generation,spread,hypervolume\n";
  for (std::size_t g = 0; g < r.spread_history.size(); ++g)
    out << fmt::format("{},{:.10g},{:.10g}\n", g, r.spread_history[g], r.hypervolume_history[g]);
}

}  // namespace ambspindle
