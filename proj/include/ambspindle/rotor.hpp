#pragma once

// Segmented rotor model, centrifugal speed limit, and lateral finite-element
// assembly with two-node Timoshenko beam elements.
//
// Lateral DOFs per node, in order: u_x, a, u_y, b, where a = du_x/dz and
// b = du_y/dz are the cross-section slopes in the x-z and y-z planes. With
// spin Omega about +z the equations of motion read
//
//   M q'' + (C + Omega G) q' + K q = 0,   G = -G^T.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ambspindle/error.hpp"
#include "ambspindle/materials.hpp"
#include "ambspindle/units.hpp"

namespace ambspindle {

/// Maximum spin speed [rad/s] before the centrifugal hoop stress of a solid
/// disc of the given radius reaches yield.
inline double max_rotor_speed(double radius, const MaterialSpec& m) {
  if (!(radius > 0.0)) throw DomainError("max_rotor_speed: radius must be > 0");
  return std::sqrt(8.0 * m.yield_strength / ((3.0 + m.poisson) * m.density)) / radius;
}

/// Largest radius [m] that survives the given spin speed [rad/s].
inline double max_rotor_radius(double speed_rad_per_s, const MaterialSpec& m) {
  if (!(speed_rad_per_s > 0.0)) throw DomainError("max_rotor_radius: speed must be > 0");
  return std::sqrt(8.0 * m.yield_strength / ((3.0 + m.poisson) * m.density)) / speed_rad_per_s;
}

struct RotorSegment {
  double length = 0.0;
  double outer_diameter = 0.0;
  double inner_diameter = 0.0;  // 0 for solid
  MaterialSpec material;

  double area() const { return kPi / 4.0 * (sq(outer_diameter) - sq(inner_diameter)); }
  double second_moment() const {
    return kPi / 64.0 * (std::pow(outer_diameter, 4) - std::pow(inner_diameter, 4));
  }
  double mass() const { return material.density * area() * length; }

  bool operator==(const RotorSegment&) const = default;

 private:
  static double sq(double v) { return v * v; }
};

struct PointInertia {
  double position = 0.0;  // axial [m]
  double mass = 0.0;
  double polar = 0.0;      // [kg m^2]
  double diametral = 0.0;  // [kg m^2]

  bool operator==(const PointInertia&) const = default;
};

/// Isotropic radial spring + damper, e.g. a closed-loop AMB.
struct BearingStation {
  double position = 0.0;
  double stiffness = 1.4e5;  // [N/m]
  double damping = 0.0;      // [N s/m]

  bool operator==(const BearingStation&) const = default;
};

struct RotorModel {
  double axial_origin = 0.0;  // z of the first segment's left face
  std::vector<RotorSegment> segments;
  std::vector<PointInertia> point_inertias;
  std::vector<BearingStation> bearings;
  double max_element_length = 5e-3;
  double shear_coefficient = 0.9;

  double length() const {
    double l = 0.0;
    for (const auto& s : segments) l += s.length;
    return l;
  }
  double mass() const {
    double m = 0.0;
    for (const auto& s : segments) m += s.mass();
    for (const auto& p : point_inertias) m += p.mass;
    return m;
  }

  bool operator==(const RotorModel&) const = default;
};

inline std::vector<std::string> rotor_violations(const RotorModel& r) {
  std::vector<std::string> out;
  if (r.segments.empty()) out.push_back("rotor: at least one segment required");
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    const auto& s = r.segments[i];
    if (!(s.length > 0.0)) out.push_back(fmt::format("rotor: segment {} length must be > 0", i));
    if (!(s.inner_diameter >= 0.0 && s.inner_diameter < s.outer_diameter))
      out.push_back(fmt::format("rotor: segment {} requires 0 <= inner < outer diameter", i));
    for (auto& v : material_violations(s.material)) out.push_back(fmt::format("rotor: segment {} {}", i, v));
  }
  const double z0 = r.axial_origin;
  const double z1 = r.axial_origin + r.length();
  const double tol = 1e-12 * std::max(1.0, std::abs(z1));
  for (std::size_t i = 0; i < r.point_inertias.size(); ++i) {
    const auto& p = r.point_inertias[i];
    if (p.position < z0 - tol || p.position > z1 + tol)
      out.push_back(fmt::format("rotor: point inertia {} lies outside the rotor", i));
    if (p.mass < 0.0 || p.polar < 0.0 || p.diametral < 0.0)
      out.push_back(fmt::format("rotor: point inertia {} must be non-negative", i));
  }
  for (std::size_t i = 0; i < r.bearings.size(); ++i) {
    const auto& b = r.bearings[i];
    if (b.position < z0 - tol || b.position > z1 + tol)
      out.push_back(fmt::format("rotor: bearing {} lies outside the rotor", i));
    if (b.stiffness < 0.0 || b.damping < 0.0) out.push_back(fmt::format("rotor: bearing {} must be non-negative", i));
    if (i > 0 && b.position < r.bearings[i - 1].position)
      out.push_back(fmt::format("rotor: bearing stations must be sorted by position (station {})", i));
  }
  if (!(r.max_element_length > 0.0)) out.push_back("rotor: max_element_length must be > 0");
  if (!(r.shear_coefficient > 0.0)) out.push_back("rotor: shear_coefficient must be > 0");
  if (out.empty() && !(r.mass() > 0.0)) out.push_back("rotor: total mass must be > 0");
  return out;
}

struct RotorMatrices {
  std::vector<double> node_positions;
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;          // shaft + bearings
  Eigen::MatrixXd bearing_stiffness;  // bearing share of `stiffness`
  Eigen::MatrixXd gyroscopic;  // per unit spin speed [rad/s]
  Eigen::MatrixXd damping;

  Eigen::Index dofs() const { return mass.rows(); }
  static constexpr int kDofsPerNode = 4;
  static Eigen::Index ux(Eigen::Index node) { return 4 * node; }
  static Eigen::Index a(Eigen::Index node) { return 4 * node + 1; }
  static Eigen::Index uy(Eigen::Index node) { return 4 * node + 2; }
  static Eigen::Index b(Eigen::Index node) { return 4 * node + 3; }
};

namespace detail {

struct ElementMatrices {
  Eigen::Matrix4d stiffness;
  Eigen::Matrix4d translational;
  Eigen::Matrix4d rotary;  // per unit rho*I; gyroscopic coupling uses 2x this
};

// Single-plane Timoshenko element on DOFs (w1, slope1, w2, slope2).
inline ElementMatrices timoshenko_element(double length, double area, double inertia, double density, double young,
                                          double shear_modulus, double shear_coefficient) {
  const double L = length;
  const double phi = 12.0 * young * inertia / (shear_coefficient * shear_modulus * area * L * L);
  const double p2 = phi * phi;
  const double d = (1.0 + phi) * (1.0 + phi);

  ElementMatrices e;
  const double ks = young * inertia / ((1.0 + phi) * L * L * L);
  e.stiffness << 12, 6 * L, -12, 6 * L,                                       //
      6 * L, (4 + phi) * L * L, -6 * L, (2 - phi) * L * L,                    //
      -12, -6 * L, 12, -6 * L,                                                //
      6 * L, (2 - phi) * L * L, -6 * L, (4 + phi) * L * L;
  e.stiffness *= ks;

  const double m1 = 13.0 / 35 + 7.0 * phi / 10 + p2 / 3;
  const double m2 = (11.0 / 210 + 11.0 * phi / 120 + p2 / 24) * L;
  const double m3 = 9.0 / 70 + 3.0 * phi / 10 + p2 / 6;
  const double m4 = -(13.0 / 420 + 3.0 * phi / 40 + p2 / 24) * L;
  const double m5 = (1.0 / 105 + phi / 60 + p2 / 120) * L * L;
  const double m6 = -(1.0 / 140 + phi / 60 + p2 / 120) * L * L;
  e.translational << m1, m2, m3, m4,  //
      m2, m5, -m4, m6,                //
      m3, -m4, m1, -m2,               //
      m4, m6, -m2, m5;
  e.translational *= density * area * L / d;

  const double r1 = 6.0 / 5;
  const double r2 = (1.0 / 10 - phi / 2) * L;
  const double r3 = (2.0 / 15 + phi / 6 + p2 / 3) * L * L;
  const double r4 = (-1.0 / 30 - phi / 6 + p2 / 6) * L * L;
  e.rotary << r1, r2, -r1, r2,  //
      r2, r3, -r2, r4,          //
      -r1, -r2, r1, -r2,        //
      r2, r4, -r2, r3;
  e.rotary *= density * inertia / (L * d);
  return e;
}

}  // namespace detail

/// Node positions: segment boundaries and every station, subdivided so no
/// element exceeds max_element_length.
inline std::vector<double> rotor_mesh(const RotorModel& r) {
  std::vector<double> breaks{r.axial_origin};
  double z = r.axial_origin;
  for (const auto& s : r.segments) breaks.push_back(z += s.length);
  for (const auto& p : r.point_inertias) breaks.push_back(p.position);
  for (const auto& b : r.bearings) breaks.push_back(b.position);
  std::sort(breaks.begin(), breaks.end());
  const double merge_tol = 1e-9 * std::max(r.length(), 1e-3);
  std::vector<double> unique;
  for (double v : breaks)
    if (unique.empty() || v - unique.back() > merge_tol) unique.push_back(v);

  std::vector<double> nodes{unique.front()};
  for (std::size_t i = 1; i < unique.size(); ++i) {
    const double span = unique[i] - unique[i - 1];
    const int n = std::max(1, static_cast<int>(std::ceil(span / r.max_element_length - 1e-9)));
    for (int k = 1; k < n; ++k) nodes.push_back(unique[i - 1] + span * k / n);
    nodes.push_back(unique[i]);
  }
  return nodes;
}

inline Eigen::Index nearest_node(const std::vector<double>& nodes, double z) {
  const auto it = std::min_element(nodes.begin(), nodes.end(),
                                   [z](double l, double r) { return std::abs(l - z) < std::abs(r - z); });
  return static_cast<Eigen::Index>(it - nodes.begin());
}

inline RotorMatrices assemble_rotor(const RotorModel& r) {
  if (auto v = rotor_violations(r); !v.empty()) throw ValidationError(std::move(v));
  for (const auto& s : r.segments)
    if (!(s.material.youngs_modulus > 0.0))
      throw ValidationError({"rotor: material '" + s.material.name + "' needs youngs_modulus for rotordynamics"});

  RotorMatrices out;
  out.node_positions = rotor_mesh(r);
  const auto nodes = static_cast<Eigen::Index>(out.node_positions.size());
  const Eigen::Index n = 4 * nodes;
  out.mass = Eigen::MatrixXd::Zero(n, n);
  out.stiffness = Eigen::MatrixXd::Zero(n, n);
  out.bearing_stiffness = Eigen::MatrixXd::Zero(n, n);
  out.gyroscopic = Eigen::MatrixXd::Zero(n, n);
  out.damping = Eigen::MatrixXd::Zero(n, n);

  // Segment lookup by element midpoint.
  std::vector<double> seg_end;
  double z = r.axial_origin;
  for (const auto& s : r.segments) seg_end.push_back(z += s.length);

  for (Eigen::Index e = 0; e + 1 < nodes; ++e) {
    const double z0 = out.node_positions[static_cast<std::size_t>(e)];
    const double z1 = out.node_positions[static_cast<std::size_t>(e + 1)];
    const double mid = 0.5 * (z0 + z1);
    std::size_t si = static_cast<std::size_t>(std::lower_bound(seg_end.begin(), seg_end.end(), mid) - seg_end.begin());
    si = std::min(si, r.segments.size() - 1);
    const auto& seg = r.segments[si];
    const auto em = detail::timoshenko_element(z1 - z0, seg.area(), seg.second_moment(), seg.material.density,
                                               seg.material.youngs_modulus, seg.material.shear_modulus(),
                                               r.shear_coefficient);
    // Plane x-z uses (u_x, a); plane y-z uses (u_y, b).
    const std::array<Eigen::Index, 4> xz{RotorMatrices::ux(e), RotorMatrices::a(e), RotorMatrices::ux(e + 1),
                                         RotorMatrices::a(e + 1)};
    const std::array<Eigen::Index, 4> yz{RotorMatrices::uy(e), RotorMatrices::b(e), RotorMatrices::uy(e + 1),
                                         RotorMatrices::b(e + 1)};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double k = em.stiffness(i, j);
        const double m = em.translational(i, j) + em.rotary(i, j);
        out.stiffness(xz[i], xz[j]) += k;
        out.stiffness(yz[i], yz[j]) += k;
        out.mass(xz[i], xz[j]) += m;
        out.mass(yz[i], yz[j]) += m;
        out.gyroscopic(xz[i], yz[j]) += 2.0 * em.rotary(i, j);
        out.gyroscopic(yz[i], xz[j]) -= 2.0 * em.rotary(i, j);
      }
    }
  }

  for (const auto& p : r.point_inertias) {
    const Eigen::Index nd = nearest_node(out.node_positions, p.position);
    out.mass(RotorMatrices::ux(nd), RotorMatrices::ux(nd)) += p.mass;
    out.mass(RotorMatrices::uy(nd), RotorMatrices::uy(nd)) += p.mass;
    out.mass(RotorMatrices::a(nd), RotorMatrices::a(nd)) += p.diametral;
    out.mass(RotorMatrices::b(nd), RotorMatrices::b(nd)) += p.diametral;
    out.gyroscopic(RotorMatrices::a(nd), RotorMatrices::b(nd)) += p.polar;
    out.gyroscopic(RotorMatrices::b(nd), RotorMatrices::a(nd)) -= p.polar;
  }
  for (const auto& b : r.bearings) {
    const Eigen::Index nd = nearest_node(out.node_positions, b.position);
    out.bearing_stiffness(RotorMatrices::ux(nd), RotorMatrices::ux(nd)) += b.stiffness;
    out.bearing_stiffness(RotorMatrices::uy(nd), RotorMatrices::uy(nd)) += b.stiffness;
    out.damping(RotorMatrices::ux(nd), RotorMatrices::ux(nd)) += b.damping;
    out.damping(RotorMatrices::uy(nd), RotorMatrices::uy(nd)) += b.damping;
  }
  out.stiffness += out.bearing_stiffness;
  return out;
}

}  // namespace ambspindle
