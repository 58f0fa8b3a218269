#pragma once

// Disturbance loads on the spindle rotor: residual unbalance, machining speed
// relations, and safety-factored static/dynamic demands extracted from a
// sampled milling force trace.

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ambspindle/error.hpp"
#include "ambspindle/harmonics.hpp"
#include "ambspindle/units.hpp"

namespace ambspindle {

struct UnbalanceSpec {
  double balance_grade = 1.0;  // G [mm/s]
  double rotor_mass = 0.0;     // [kg]
  double speed = 0.0;          // [rad/s]
};

/// Permissible residual unbalance force of a rigid rotor, G*m*n/1000 [N].
inline double unbalance_force(const UnbalanceSpec& u) {
  if (u.balance_grade < 0.0 || !(u.rotor_mass > 0.0) || u.speed < 0.0)
    throw DomainError("unbalance: requires G >= 0, m > 0, n >= 0");
  return u.balance_grade * u.rotor_mass * u.speed / 1000.0;
}

/// Peripheral cutting speed [m/min] of a tool of the given diameter [m].
inline double cutting_speed(double tool_diameter, Speed speed) {
  if (!(tool_diameter > 0.0) || !(speed.rpm() > 0.0))
    throw DomainError("cutting_speed: diameter and speed must be positive");
  return kPi * tool_diameter * speed.rpm();
}

inline Speed required_speed(double tool_diameter, double cutting_speed_m_per_min) {
  if (!(tool_diameter > 0.0) || !(cutting_speed_m_per_min > 0.0))
    throw DomainError("required_speed: diameter and cutting speed must be positive");
  return Speed::from_rpm(cutting_speed_m_per_min / (kPi * tool_diameter));
}

/// Smallest tool diameter [m] reaching the given cutting speed at `speed`.
inline double required_tool_diameter(Speed speed, double cutting_speed_m_per_min) {
  if (!(speed.rpm() > 0.0) || !(cutting_speed_m_per_min > 0.0))
    throw DomainError("required_tool_diameter: inputs must be positive");
  return cutting_speed_m_per_min / (kPi * speed.rpm());
}

inline double tooth_passing_frequency(Speed speed, int flutes) {
  if (flutes < 1 || speed.hz() < 0.0) throw DomainError("tooth_passing_frequency: flutes >= 1, speed >= 0");
  return flutes * speed.hz();
}

// ---------------------------------------------------------------------------
// Force traces

struct ForceSample {
  double angle = 0.0;  // [rad], in [0, 2pi)
  double fx = 0.0;
  double fy = 0.0;
  double fz = 0.0;
};

struct ForceTrace {
  std::vector<ForceSample> samples;
  int flutes = 2;
};

inline std::vector<std::string> trace_violations(const ForceTrace& t) {
  std::vector<std::string> out;
  if (t.samples.size() < 8) out.push_back("force trace: at least 8 samples required");
  if (t.flutes < 1) out.push_back("force trace: flutes must be >= 1");
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const double a = t.samples[i].angle;
    if (!(a >= 0.0 && a < kTwoPi)) {
      out.push_back(fmt::format("force trace: angle {} at row {} outside [0, 2pi)", a, i));
      break;
    }
    if (i > 0 && !(a > t.samples[i - 1].angle)) {
      out.push_back(fmt::format("force trace: angles not strictly increasing at row {}", i));
      break;
    }
  }
  return out;
}

inline bool is_uniformly_sampled(const ForceTrace& t, double rel_tol = 1e-9) {
  const std::size_t n = t.samples.size();
  const double step = kTwoPi / static_cast<double>(n);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(t.samples[i].angle - t.samples[i - 1].angle - step) > rel_tol * kTwoPi) return false;
  }
  return true;
}

/// Resamples onto N uniformly spaced angles starting at the first sample's
/// angle, by linear interpolation around the periodic revolution.
inline ForceTrace resample_uniform(const ForceTrace& t) {
  const std::size_t n = t.samples.size();
  ForceTrace out;
  out.flutes = t.flutes;
  out.samples.reserve(n);
  const double start = t.samples.front().angle;
  auto unwrapped = [&](std::size_t i) { return t.samples[i % n].angle + (i >= n ? kTwoPi : 0.0); };
  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = start + kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    while (unwrapped(j + 1) < a) ++j;
    const double a0 = unwrapped(j);
    const double a1 = unwrapped(j + 1);
    const double w = (a - a0) / (a1 - a0);
    const auto& s0 = t.samples[j % n];
    const auto& s1 = t.samples[(j + 1) % n];
    out.samples.push_back({std::fmod(a, kTwoPi), s0.fx + w * (s1.fx - s0.fx), s0.fy + w * (s1.fy - s0.fy),
                           s0.fz + w * (s1.fz - s0.fz)});
  }
  return out;
}

struct TraceSpectra {
  HarmonicSpectrum in_plane;  // of F_x + j F_y
  HarmonicSpectrum axial;     // of F_z
};

inline TraceSpectra trace_spectra(const ForceTrace& trace) {
  if (auto v = trace_violations(trace); !v.empty()) throw ValidationError(std::move(v));
  const ForceTrace uniform = is_uniformly_sampled(trace) ? trace : resample_uniform(trace);
  std::vector<std::complex<double>> z;
  std::vector<double> fz;
  z.reserve(uniform.samples.size());
  fz.reserve(uniform.samples.size());
  for (const auto& s : uniform.samples) {
    z.emplace_back(s.fx, s.fy);
    fz.push_back(s.fz);
  }
  return {HarmonicSpectrum::of(z), HarmonicSpectrum::of_real(fz)};
}

// ---------------------------------------------------------------------------
// Demands

struct SafetyFactors {
  double unbalance = 1.5;
  double machining_static = 2.0;
  double machining_dynamic = 3.0;

  bool operator==(const SafetyFactors&) const = default;
};

inline std::vector<std::string> safety_factor_violations(const SafetyFactors& sf) {
  std::vector<std::string> out;
  if (!(sf.unbalance >= 1.0)) out.push_back("safety_factors.unbalance must be >= 1");
  if (!(sf.machining_static >= 1.0)) out.push_back("safety_factors.machining_static must be >= 1");
  if (!(sf.machining_dynamic >= 1.0)) out.push_back("safety_factors.machining_dynamic must be >= 1");
  return out;
}

enum class Axis { Radial, Axial };
enum class DemandClass { Unbalance, MachiningStatic, MachiningDynamic };

struct DemandPoint {
  double frequency = 0.0;  // [Hz]; 0 marks a static demand
  double magnitude = 0.0;  // [N]
  std::string label;
  Axis axis = Axis::Radial;
  DemandClass kind = DemandClass::MachiningDynamic;
};

struct DemandSpectrum {
  double static_radial = 0.0;  // [N]
  double static_axial = 0.0;   // [N]
  std::vector<DemandPoint> dynamic_points;
  bool safety_factors_applied = false;

  /// Static and dynamic demands acting along one axis, static first at 0 Hz.
  std::vector<DemandPoint> points(Axis axis) const {
    std::vector<DemandPoint> out;
    if (axis == Axis::Radial)
      out.push_back({0.0, static_radial, "machining_static_radial", Axis::Radial, DemandClass::MachiningStatic});
    else
      out.push_back({0.0, static_axial, "machining_static_axial", Axis::Axial, DemandClass::MachiningStatic});
    for (const auto& p : dynamic_points)
      if (p.axis == axis) out.push_back(p);
    return out;
  }
};

/// Unfactored demands: mean in-plane resultant, mean axial force, the
/// tooth-passing harmonic of F_x + j F_y and of F_z, and the synchronous
/// unbalance force.
inline DemandSpectrum raw_demand_spectrum(const ForceTrace& trace, Speed speed, const UnbalanceSpec& unbalance) {
  if (!(speed.hz() > 0.0)) throw DomainError("demand_spectrum: speed must be > 0");
  const std::size_t min_samples = 2 * static_cast<std::size_t>(trace.flutes + 1);
  if (trace.samples.size() < min_samples)
    throw DomainError(fmt::format("demand_spectrum: {} samples alias the {}-flute tooth-passing harmonic (need >= {})",
                                  trace.samples.size(), trace.flutes, min_samples));
  const TraceSpectra sp = trace_spectra(trace);
  const auto k = static_cast<std::size_t>(trace.flutes);
  const double tpf = tooth_passing_frequency(speed, trace.flutes);

  DemandSpectrum d;
  d.static_radial = sp.in_plane.amplitude(0);
  d.static_axial = sp.axial.amplitude(0);
  d.dynamic_points.push_back(
      {speed.hz(), unbalance_force(unbalance), "unbalance", Axis::Radial, DemandClass::Unbalance});
  d.dynamic_points.push_back(
      {tpf, sp.in_plane.amplitude(k), "machining_dynamic_radial", Axis::Radial, DemandClass::MachiningDynamic});
  d.dynamic_points.push_back(
      {tpf, sp.axial.amplitude(k), "machining_dynamic_axial", Axis::Axial, DemandClass::MachiningDynamic});
  return d;
}

/// Multiplies each demand class by its factor once. Refuses a spectrum that
/// already carries factors.
inline DemandSpectrum apply_safety_factors(DemandSpectrum d, const SafetyFactors& sf) {
  if (d.safety_factors_applied) throw DomainError("safety factors already applied to this demand spectrum");
  if (auto v = safety_factor_violations(sf); !v.empty()) throw ValidationError(std::move(v));
  d.static_radial *= sf.machining_static;
  d.static_axial *= sf.machining_static;
  for (auto& p : d.dynamic_points) {
    switch (p.kind) {
      case DemandClass::Unbalance: p.magnitude *= sf.unbalance; break;
      case DemandClass::MachiningStatic: p.magnitude *= sf.machining_static; break;
      case DemandClass::MachiningDynamic: p.magnitude *= sf.machining_dynamic; break;
    }
  }
  d.safety_factors_applied = true;
  return d;
}

inline DemandSpectrum demand_spectrum(const ForceTrace& trace, Speed speed, const SafetyFactors& sf,
                                      const UnbalanceSpec& unbalance) {
  return apply_safety_factors(raw_demand_spectrum(trace, speed, unbalance), sf);
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kForceTraceHeader = "angle_rad,fx_N,fy_N,fz_N";
inline constexpr const char* kDemandHeader = "freq_hz,magnitude_N,label";

inline ForceTrace read_force_trace(std::istream& in, int flutes) {
  ForceTrace t;
  t.flutes = flutes;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kForceTraceHeader)
        throw InputError(std::string("force trace: expected header '") + kForceTraceHeader + "'", lineno);
      header = true;
      continue;
    }
    std::istringstream row(line);
    ForceSample s;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> s.angle >> c1 >> s.fx >> c2 >> s.fy >> c3 >> s.fz) || c1 != ',' || c2 != ',' || c3 != ',')
      throw InputError("force trace: malformed row", lineno);
    t.samples.push_back(s);
  }
  if (!header) throw InputError("force trace: empty file");
  if (auto v = trace_violations(t); !v.empty()) throw ValidationError(std::move(v));
  return t;
}

inline void write_demand_csv(std::ostream& out, const DemandSpectrum& d) {
  out << kDemandHeader << '\n';
  for (Axis axis : {Axis::Radial, Axis::Axial})
    for (const auto& p : d.points(axis)) out << fmt::format("{:.10g},{:.10g},{}\n", p.frequency, p.magnitude, p.label);
}

}  // namespace ambspindle
