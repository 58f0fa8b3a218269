#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ambspindle/error.hpp"

namespace ambspindle {

struct MaterialSpec {
  std::string name;
  double density = 0.0;                // [kg/m^3]
  double yield_strength = 0.0;         // [Pa]
  double poisson = 0.3;                // [-]
  double relative_permeability = 1.0;  // linear-region value [-]
  double linear_flux_limit = 1.0;      // B below which the B-H curve is linear [T]
  double youngs_modulus = 0.0;         // [Pa]; 0 = not given (rotordynamics needs it)

  double shear_modulus() const { return youngs_modulus / (2.0 * (1.0 + poisson)); }

  bool operator==(const MaterialSpec&) const = default;
};

inline std::vector<std::string> material_violations(const MaterialSpec& m) {
  std::vector<std::string> out;
  const std::string who = "material '" + m.name + "': ";
  if (!(m.density > 0.0)) out.push_back(who + "density must be > 0");
  if (!(m.yield_strength > 0.0)) out.push_back(who + "yield_strength must be > 0");
  if (!(m.poisson > 0.0 && m.poisson < 0.5)) out.push_back(who + "poisson must satisfy 0 < nu < 0.5");
  if (!(m.relative_permeability >= 1.0)) out.push_back(who + "relative_permeability must be >= 1");
  if (!(m.linear_flux_limit > 0.0)) out.push_back(who + "linear_flux_limit must be > 0");
  if (!(m.youngs_modulus >= 0.0)) out.push_back(who + "youngs_modulus must be >= 0");
  return out;
}

/// Returns the record unchanged when every invariant holds; otherwise throws a
/// ValidationError listing each violated invariant.
inline MaterialSpec validate_material(const MaterialSpec& m) {
  if (auto v = material_violations(m); !v.empty()) throw ValidationError(std::move(v));
  return m;
}

struct PermanentMagnetSpec {
  double remanence = 0.0;   // B_r [T]
  double coercivity = 0.0;  // H_c [A/m]
  double thickness = 0.0;   // l_m, along magnetization [m]
  double width = 0.0;       // [m]
  double length = 0.0;      // [m]

  double area() const { return width * length; }

  bool operator==(const PermanentMagnetSpec&) const = default;
};

inline std::vector<std::string> magnet_violations(const PermanentMagnetSpec& pm) {
  std::vector<std::string> out;
  if (!(pm.remanence > 0.0)) out.push_back("magnet: remanence must be > 0");
  if (!(pm.coercivity > 0.0)) out.push_back("magnet: coercivity must be > 0");
  if (!(pm.thickness > 0.0)) out.push_back("magnet: thickness must be > 0");
  if (!(pm.width > 0.0)) out.push_back("magnet: width must be > 0");
  if (!(pm.length > 0.0)) out.push_back("magnet: length must be > 0");
  return out;
}

/// Ideal gas. Defaults are dry air.
struct GasSpec {
  double specific_heat_ratio = 1.4;  // kappa [-]
  double gas_constant = 287.05;      // R [J/(kg K)]

  double speed_of_sound(double temperature) const {
    return std::sqrt(specific_heat_ratio * gas_constant * temperature);
  }
  double density(double pressure, double temperature) const {
    return pressure / (gas_constant * temperature);
  }

  bool operator==(const GasSpec&) const = default;
};

inline std::vector<std::string> gas_violations(const GasSpec& g) {
  std::vector<std::string> out;
  if (!(g.specific_heat_ratio > 1.0)) out.push_back("gas: specific_heat_ratio must be > 1");
  if (!(g.gas_constant > 0.0)) out.push_back("gas: gas_constant must be > 0");
  return out;
}

}  // namespace ambspindle
