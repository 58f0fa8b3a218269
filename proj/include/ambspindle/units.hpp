#pragma once

// SI conventions. Everything inside the library is SI; rpm, mm and N·mm only
// appear at the CLI/config boundary and are converted there exactly once.

#include <numbers>

namespace ambspindle {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;  // [H/m]
inline constexpr double kStandardAtmosphere = 101325.0;    // [Pa]
inline constexpr double kGravity = 9.80665;                // [m/s^2]

/// Rotational speed. Stored canonically in revolutions per second (Hz).
class Speed {
 public:
  constexpr Speed() = default;

  static constexpr Speed from_hz(double hz) { return Speed(hz); }
  static constexpr Speed from_rpm(double rpm) { return Speed(rpm / 60.0); }
  static constexpr Speed from_rad_per_s(double w) { return Speed(w / kTwoPi); }

  constexpr double hz() const { return hz_; }
  constexpr double rpm() const { return hz_ * 60.0; }
  constexpr double rad_per_s() const { return hz_ * kTwoPi; }

  constexpr auto operator<=>(const Speed&) const = default;

 private:
  constexpr explicit Speed(double hz) : hz_(hz) {}
  double hz_ = 0.0;
};

namespace units {
inline constexpr double mm(double v) { return v * 1e-3; }
inline constexpr double to_mm(double m) { return m * 1e3; }
inline constexpr double to_Nmm(double Nm) { return Nm * 1e3; }
inline constexpr double from_Nmm(double Nmm) { return Nmm * 1e-3; }
inline constexpr double to_A_per_mm2(double A_per_m2) { return A_per_m2 * 1e-6; }
inline constexpr double from_A_per_mm2(double v) { return v * 1e6; }
}  // namespace units

}  // namespace ambspindle
