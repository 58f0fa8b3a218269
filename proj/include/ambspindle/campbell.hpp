#pragma once

// Campbell analysis: natural frequencies versus spin speed, whirl direction,
// mode classification, synchronous critical speeds and separation verdicts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "ambspindle/error.hpp"
#include "ambspindle/parallel.hpp"
#include "ambspindle/rotor.hpp"
#include "ambspindle/units.hpp"

namespace ambspindle {

enum class Whirl { Forward, Backward, Planar };
enum class ModeKind { Cylindrical, Conical, Bending };

inline const char* to_string(Whirl w) {
  switch (w) {
    case Whirl::Forward: return "forward";
    case Whirl::Backward: return "backward";
    case Whirl::Planar: return "planar";
  }
  return "?";
}

struct Mode {
  double frequency = 0.0;  // [Hz]
  Whirl whirl = Whirl::Planar;
  ModeKind kind = ModeKind::Bending;
  int bending_order = 0;  // >= 1 for bending modes

  std::string label() const {
    switch (kind) {
      case ModeKind::Cylindrical: return "cylindrical";
      case ModeKind::Conical: return "conical";
      case ModeKind::Bending: return fmt::format("bending-{}", bending_order);
    }
    return "?";
  }
};

struct CampbellResult {
  std::vector<double> speed_grid_rpm;
  std::vector<std::vector<Mode>> modes;  // per speed, ascending frequency
};

struct CampbellOptions {
  int max_modes = 12;
  int workers = 0;  // 0 = resolve from environment
};

/// Reusable eigen-solver for one assembled rotor. Thread-safe for concurrent
/// solve() calls.
///
/// Reduces M q'' + (C + Omega G) q' + K q = 0 with M = L L^T and
/// L^-1 K L^-T = V Lambda V^T to p'' + (C_m + Omega G_m) p' + Lambda p = 0,
/// then to the first-order system y' = S y with y = [sqrt(Lambda) p; p'].
/// Undamped, S is real skew-symmetric, so i S is Hermitian and frequencies
/// come from a self-adjoint solver.
class RotorEigenSolver {
 public:
  explicit RotorEigenSolver(RotorMatrices m) : mats_(std::move(m)) {
    const Eigen::Index n = mats_.dofs();
    Eigen::LLT<Eigen::MatrixXd> llt(mats_.mass);
    if (llt.info() != Eigen::Success) throw NumericalError("rotor mass matrix is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    // T = L^-T V maps modal to physical coordinates.
    Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd Kh = Linv * mats_.stiffness * Linv.transpose();
    Kh = 0.5 * (Kh + Kh.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kh);
    if (es.info() != Eigen::Success) throw NumericalError("stiffness eigen-decomposition failed");
    sqrt_lambda_ = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    to_physical_ = Linv.transpose() * es.eigenvectors();
    const Eigen::MatrixXd& P = to_physical_;
    gyro_modal_ = P.transpose() * mats_.gyroscopic * P;
    gyro_modal_ = 0.5 * (gyro_modal_ - gyro_modal_.transpose());
    damp_modal_ = P.transpose() * mats_.damping * P;
    damped_ = mats_.damping.cwiseAbs().maxCoeff() > 0.0;
  }

  const RotorMatrices& matrices() const { return mats_; }

  /// Ascending natural frequencies [Hz] without mode shapes, same filtering
  /// and ordering as solve().
  std::vector<double> frequencies(Speed spin, int max_modes) const {
    const Eigen::Index n = mats_.dofs();
    const Eigen::MatrixXd S = state_matrix(spin.rad_per_s());
    std::vector<double> w;
    if (!damped_) {
      const Eigen::MatrixXcd H = std::complex<double>(0.0, 1.0) * S.cast<std::complex<double>>();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success)
        throw NumericalError(fmt::format("eigen-solve failed at {:.6g} rpm", spin.rpm()));
      for (Eigen::Index k = 0; k < n; ++k) w.push_back(-es.eigenvalues()(k));
    } else {
      Eigen::EigenSolver<Eigen::MatrixXd> es(S, false);
      if (es.info() != Eigen::Success)
        throw NumericalError(fmt::format("eigen-solve failed at {:.6g} rpm", spin.rpm()));
      for (Eigen::Index k = 0; k < 2 * n; ++k)
        if (es.eigenvalues()(k).imag() > 0.0) w.push_back(es.eigenvalues()(k).imag());
    }
    std::sort(w.begin(), w.end());
    const double w_max = w.empty() ? 0.0 : w.back();
    std::vector<double> out;
    for (double v : w) {
      if (v < 1e-7 * w_max) continue;
      if (static_cast<int>(out.size()) >= max_modes) break;
      out.push_back(v / kTwoPi);
    }
    return out;
  }

  std::vector<Mode> solve(Speed spin, int max_modes) const {
    const Eigen::Index n = mats_.dofs();
    const double omega = spin.rad_per_s();
    const Eigen::MatrixXd S = state_matrix(omega);

    std::vector<std::pair<double, Eigen::VectorXcd>> raw;  // (omega_d, modal p)
    if (!damped_) {
      const Eigen::MatrixXcd H = std::complex<double>(0.0, 1.0) * S.cast<std::complex<double>>();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
      if (es.info() != Eigen::Success)
        throw NumericalError(fmt::format("eigen-solve failed at {:.6g} rpm", spin.rpm()));
      // H eigenvalue h corresponds to y' = i*(-h) y; the n smallest give w >= 0.
      for (Eigen::Index k = 0; k < n; ++k) {
        const double w = -es.eigenvalues()(k);
        raw.emplace_back(w, es.eigenvectors().col(k));
      }
    } else {
      Eigen::EigenSolver<Eigen::MatrixXd> es(S);
      if (es.info() != Eigen::Success)
        throw NumericalError(fmt::format("eigen-solve failed at {:.6g} rpm", spin.rpm()));
      for (Eigen::Index k = 0; k < 2 * n; ++k) {
        const auto lam = es.eigenvalues()(k);
        if (lam.imag() > 0.0) raw.emplace_back(lam.imag(), es.eigenvectors().col(k));
      }
    }
    double w_max = 0.0;
    for (const auto& r : raw) w_max = std::max(w_max, r.first);
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<Mode> out;
    for (const auto& [w, y] : raw) {
      if (w < 1e-7 * w_max) continue;  // free rigid-body motion
      if (static_cast<int>(out.size()) >= max_modes) break;
      // Second half of the state is p' = i w p.
      const Eigen::VectorXcd p = y.tail(n) / std::complex<double>(0.0, w);
      const Eigen::VectorXcd q = to_physical_.cast<std::complex<double>>() * p;
      out.push_back(describe(w / kTwoPi, q, omega));
    }
    return out;
  }

 private:
  Eigen::MatrixXd state_matrix(double omega) const {
    const Eigen::Index n = mats_.dofs();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    S.topRightCorner(n, n) = sqrt_lambda_.asDiagonal();
    S.bottomLeftCorner(n, n) = -Eigen::MatrixXd(sqrt_lambda_.asDiagonal());
    S.bottomRightCorner(n, n) = -omega * gyro_modal_ - damp_modal_;
    return S;
  }

  Mode describe(double freq_hz, const Eigen::VectorXcd& q, double spin) const {
    Mode m;
    m.frequency = freq_hz;
    const auto nodes = static_cast<Eigen::Index>(mats_.node_positions.size());
    Eigen::VectorXcd X(nodes), Y(nodes);
    for (Eigen::Index i = 0; i < nodes; ++i) {
      X(i) = q(RotorMatrices::ux(i));
      Y(i) = q(RotorMatrices::uy(i));
    }

    Eigen::Index peak = 0;
    double peak_amp = -1.0;
    for (Eigen::Index i = 0; i < nodes; ++i) {
      const double amp = std::norm(X(i)) + std::norm(Y(i));
      if (amp > peak_amp) {
        peak_amp = amp;
        peak = i;
      }
    }
    // x = Re(X e^{iwt}), y = Re(Y e^{iwt}) traces counter-clockwise (the spin
    // sense about +z) when Im(X conj(Y)) > 0.
    const double orbit = std::imag(X(peak) * std::conj(Y(peak)));
    if (spin == 0.0 || std::abs(orbit) < 1e-6 * peak_amp)
      m.whirl = Whirl::Planar;
    else
      m.whirl = orbit > 0.0 ? Whirl::Forward : Whirl::Backward;

    // Rigid when the shaft stores at most half of the modal energy, i.e. the
    // motion is carried by the bearings (or by gyroscopics alone).
    const double kinetic = std::real(q.dot(mats_.mass * q)) * sq(kTwoPi * freq_hz);
    const double shaft = std::real(q.dot((mats_.stiffness - mats_.bearing_stiffness) * q));
    const bool rigid = shaft <= 0.5 * kinetic;

    // Real deflection profile in the dominant plane.
    const Eigen::VectorXcd& D = X.squaredNorm() >= Y.squaredNorm() ? X : Y;
    Eigen::Index big = 0;
    D.cwiseAbs().maxCoeff(&big);
    const std::complex<double> phase = std::conj(D(big)) / std::abs(D(big));
    Eigen::VectorXd w = (D * phase).real();
    w /= w.cwiseAbs().maxCoeff();

    if (rigid) {
      // Cylindrical when the best-fit line keeps one sign along the rotor.
      Eigen::MatrixXd A(nodes, 2);
      for (Eigen::Index i = 0; i < nodes; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = mats_.node_positions[static_cast<std::size_t>(i)] - mats_.node_positions.front();
      }
      const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(w);
      const double left = coef(0);
      const double right = coef(0) + coef(1) * A(nodes - 1, 1);
      m.kind = left * right > 0.0 ? ModeKind::Cylindrical : ModeKind::Conical;
      return m;
    }
    int changes = 0;
    double last = 0.0;
    for (Eigen::Index i = 0; i < nodes; ++i) {
      if (std::abs(w(i)) < 0.05) continue;
      if (last != 0.0 && (w(i) > 0.0) != (last > 0.0)) ++changes;
      last = w(i);
    }
    m.kind = ModeKind::Bending;
    m.bending_order = std::max(1, changes - 1);
    return m;
  }

  static double sq(double v) { return v * v; }

  RotorMatrices mats_;
  Eigen::VectorXd sqrt_lambda_;
  Eigen::MatrixXd to_physical_;
  Eigen::MatrixXd gyro_modal_;
  Eigen::MatrixXd damp_modal_;
  bool damped_ = false;
};

inline CampbellResult campbell(const RotorEigenSolver& solver, const std::vector<double>& speeds_rpm,
                               const CampbellOptions& opt = {}) {
  for (double s : speeds_rpm)
    if (!(s >= 0.0)) throw DomainError("campbell: speeds must be >= 0 rpm");
  CampbellResult r;
  r.speed_grid_rpm = speeds_rpm;
  r.modes.resize(speeds_rpm.size());
  parallel_for(speeds_rpm.size(), resolve_workers(opt.workers), [&](std::size_t i) {
    try {
      r.modes[i] = solver.solve(Speed::from_rpm(speeds_rpm[i]), opt.max_modes);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("campbell: speed index {}: {}", i, e.what()));
    }
  });
  return r;
}

inline CampbellResult campbell(const RotorModel& model, const std::vector<double>& speeds_rpm,
                               const CampbellOptions& opt = {}) {
  const RotorEigenSolver solver(assemble_rotor(model));
  return campbell(solver, speeds_rpm, opt);
}

inline std::vector<double> speed_grid(double max_rpm, int points) {
  if (points < 2 || !(max_rpm > 0.0)) throw DomainError("speed_grid: need >= 2 points and max > 0");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = max_rpm * i / (points - 1);
  return g;
}

struct CriticalSpeed {
  double rpm = 0.0;
  int mode_index = 0;  // position in the ascending list at that speed
  Mode mode;
};

/// Synchronous (1x) crossings of each ascending-order branch, refined by
/// bisection with fresh eigen-solves. Throws RefinementRequired when a branch
/// touches the 1x line inside an interval without changing sign at the ends.
inline std::vector<CriticalSpeed> critical_speeds(const RotorEigenSolver& solver, const CampbellResult& res,
                                                  int max_modes = 12) {
  std::vector<CriticalSpeed> out;
  const auto& g = res.speed_grid_rpm;
  auto gap = [](const std::vector<Mode>& ms, std::size_t k, double rpm) {
    return k < ms.size() ? ms[k].frequency - rpm / 60.0 : std::nan("");
  };
  std::size_t branches = 0;
  for (const auto& ms : res.modes) branches = std::max(branches, ms.size());

  for (std::size_t k = 0; k < branches; ++k) {
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      double a = g[i], b = g[i + 1];
      double ga = gap(res.modes[i], k, a), gb = gap(res.modes[i + 1], k, b);
      if (std::isnan(ga) || std::isnan(gb)) continue;
      if (ga == 0.0) {
        out.push_back({a, static_cast<int>(k), res.modes[i][k]});
        continue;
      }
      if ((ga > 0.0) == (gb > 0.0)) {
        // Near-miss guard: both ends close to the line relative to its rise.
        const double rise = (b - a) / 60.0;
        if (std::abs(ga) < rise && std::abs(gb) < rise) {
          const double mid = 0.5 * (a + b);
          const auto mm = solver.solve(Speed::from_rpm(mid), max_modes);
          const double gm = gap(mm, k, mid);
          if (!std::isnan(gm) && (gm > 0.0) != (ga > 0.0))
            throw RefinementRequired(
                fmt::format("critical_speeds: branch {} crosses the 1x line twice in [{:.6g}, {:.6g}] rpm", k, a, b),
                i);
        }
        continue;
      }
      auto fgap = [&](double rpm) {
        const auto f = solver.frequencies(Speed::from_rpm(rpm), max_modes);
        return k < f.size() ? f[k] - rpm / 60.0 : std::nan("");
      };
      for (int it = 0; it < 60 && (b - a) > 1e-9 * std::max(1.0, b); ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = fgap(mid);
        if (std::isnan(gm)) break;
        if ((gm > 0.0) == (ga > 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      const double rpm = 0.5 * (a + b);
      const auto at = solver.solve(Speed::from_rpm(rpm), max_modes);
      if (k < at.size()) out.push_back({rpm, static_cast<int>(k), at[k]});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.rpm < r.rpm; });
  return out;
}

struct SeparationVerdict {
  double limit_rpm = 0.0;  // operating speed * (1 + margin)
  std::vector<CriticalSpeed> bending_inside;
  bool pass = true;
};

inline SeparationVerdict separation_margin(const std::vector<CriticalSpeed>& criticals, Speed operating,
                                           double margin) {
  if (margin < 0.0) throw DomainError("separation_margin: margin must be >= 0");
  SeparationVerdict v;
  v.limit_rpm = operating.rpm() * (1.0 + margin);
  for (const auto& c : criticals)
    if (c.mode.kind == ModeKind::Bending && c.rpm <= v.limit_rpm) v.bending_inside.push_back(c);
  v.pass = v.bending_inside.empty();
  return v;
}

/// Lowest bending frequency seen anywhere on the grid, if any.
inline std::optional<double> lowest_bending_frequency(const CampbellResult& r) {
  std::optional<double> f;
  for (const auto& ms : r.modes)
    for (const auto& m : ms)
      if (m.kind == ModeKind::Bending) {
        if (!f || m.frequency < *f) f = m.frequency;
        break;
      }
  return f;
}

inline void write_campbell_csv(std::ostream& out, const CampbellResult& r) {
  out << "speed_rpm,mode_index,freq_hz,whirl,class\n";
  for (std::size_t i = 0; i < r.speed_grid_rpm.size(); ++i)
    for (std::size_t k = 0; k < r.modes[i].size(); ++k) {
      const auto& m = r.modes[i][k];
      out << fmt::format("{:.10g},{},{:.10g},{},{}\n", r.speed_grid_rpm[i], k, m.frequency, to_string(m.whirl),
                         m.label());
    }
}

}  // namespace ambspindle
