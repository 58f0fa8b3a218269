// Regenerates the synthetic milling force trace used by the case-study
// fixture and prints the windage friction coefficient that makes the
// fixture's journal surfaces absorb 0.18 N mm at 110,000 rpm.
//
// The trace is a two-flute periodic signal whose means and tooth-passing
// harmonic reproduce the case-study static and dynamic demands.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "ambspindle/loads.hpp"
#include "ambspindle/turbine.hpp"
#include "ambspindle/units.hpp"

using namespace ambspindle;
using namespace ambspindle::units;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "fixtures/milling_trace.csv";
  constexpr int kSamples = 360;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << '\n';
    return 3;
  }
  out << kForceTraceHeader << '\n';
  for (int i = 0; i < kSamples; ++i) {
    const double t = kTwoPi * i / kSamples;
    const double fx = 0.1745 + 0.214 * std::cos(2 * t) + 0.03 * std::cos(4 * t + 0.4);
    const double fy = -0.1230 + 0.09 * std::sin(2 * t) + 0.02 * std::sin(4 * t);
    const double fz = 0.77 + 0.25 * std::cos(2 * t + 0.5) + 0.04 * std::cos(4 * t);
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", t, fx, fy, fz);
  }

  // Two radial bearing journals, r = 8.2 mm, L = 41 mm, air at 0.1 MPa, 293.15 K.
  const double rho = 1e5 / (287.05 * 293.15);
  const double w = Speed::from_rpm(110000).rad_per_s();
  const double unit = 2.0 * windage_torque(1.0, rho, w, 8.2e-3, 41e-3);
  std::cout << fmt::format("wrote {} ({} samples)\nwindage friction_coefficient = {:.10g}\n", path, kSamples,
                           from_Nmm(0.18) / unit);
  return 0;
}
