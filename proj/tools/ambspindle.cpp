// ambspindle: command-line front end for the spindle design pipeline.
//
// Exit codes: 0 all checks pass, 2 a check or audit failed, 3 input error,
// 4 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ambspindle/amb_optimize.hpp"
#include "ambspindle/config.hpp"
#include "ambspindle/report.hpp"

namespace fs = std::filesystem;
using namespace ambspindle;
using namespace ambspindle::units;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAudit = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumerical = 4;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "text";
  bool gauge = false;
};

bool csv(const Options& o) { return o.format == "csv"; }

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw InputError("cannot write '" + (dir / name).string() + "'");
  f << content;
}

int verdict_code(const std::vector<Verdict>& vs) {
  for (const auto& v : vs)
    if (!v.pass) return kExitAudit;
  return kExitPass;
}

int cmd_turbine(const ProjectConfig& c, const Options& o) {
  const auto s = run_turbine_stage(c);
  if (csv(o)) {
    std::cout << "power_efficiency,d_n_mm,torque_Nmm\n";
    for (const auto& [eta, pts] : s.sweeps)
      for (const auto& p : pts) std::cout << fmt::format("{:.10g},{},{}\n", eta, fmt_value(to_mm(p.nozzle_diameter)),
                                                         fmt_value(to_Nmm(p.torque)));
  } else {
    const auto& r = s.report;
    std::cout << fmt::format("Mach number               {:.4f}\n", r.mach)
              << fmt::format("nozzle exit velocity      {:.2f} m/s\n", r.exit_velocity)
              << fmt::format("ideal turbine speed       {:.0f} rpm\n", r.ideal_speed.rpm())
              << fmt::format("exit density              {:.4f} kg/m^3\n", r.exit_density)
              << fmt::format("mass flow per nozzle      {:.4e} kg/s\n", r.mass_flow_per_nozzle)
              << fmt::format("output torque             {:.4f} N mm\n", to_Nmm(r.torque))
              << fmt::format("windage torque            {:.4f} N mm\n", to_Nmm(s.windage))
              << fmt::format("torque margin             {:.4f} N mm\n", to_Nmm(r.margin.margin))
              << (r.margin.infinite_ratio ? std::string("margin ratio              infinite (no load)\n")
                                          : fmt::format("margin ratio              {:.3f}\n", r.margin.ratio));
    print_verdicts(std::cout, s.verdicts);
  }
  if (!o.out_dir.empty())
    for (const auto& [eta, pts] : s.sweeps)
      write_file(o.out_dir, sweep_file_name(eta), to_string_with([&](std::ostream& os) { write_turbine_sweep_csv(os, pts); }));
  return verdict_code(s.verdicts);
}

int cmd_rotor(const ProjectConfig& c, const Options& o, bool campbell_csv) {
  const auto s = run_rotor_stage(c);
  const std::string campbell = to_string_with([&](std::ostream& os) { write_campbell_csv(os, s.campbell); });
  const std::string criticals = to_string_with([&](std::ostream& os) { write_critical_speeds_csv(os, s.criticals); });
  if (csv(o)) {
    std::cout << (campbell_csv ? campbell : criticals);
  } else {
    std::cout << fmt::format("rotor mass                {:.4f} kg\n", s.mass)
              << fmt::format("largest diameter          {:.2f} mm\n", to_mm(s.largest_diameter))
              << fmt::format("max diameter at speed     {:.2f} mm\n", to_mm(s.max_diameter));
    if (s.first_bending) std::cout << fmt::format("first bending frequency   {:.1f} Hz\n", *s.first_bending);
    std::cout << "critical speeds:\n";
    if (s.criticals.empty()) std::cout << "  none in the speed range\n";
    for (const auto& k : s.criticals)
      std::cout << fmt::format("  {:>10.0f} rpm  {:>9.2f} Hz  {} {}\n", k.rpm, k.mode.frequency, to_string(k.mode.whirl),
                               k.mode.label());
    print_verdicts(std::cout, s.verdicts);
  }
  if (!o.out_dir.empty()) {
    write_file(o.out_dir, "campbell.csv", campbell);
    write_file(o.out_dir, "critical_speeds.csv", criticals);
  }
  return verdict_code(s.verdicts);
}

std::optional<CapacityEnvelope> radial_envelope(const AmbStage& s) {
  if (!s.radial || !(s.radial->amplifier_voltage > 0.0)) return std::nullopt;
  return capacity_envelope(s.radial_capacity.force, s.radial_gains_.current_gain, s.radial->amplifier_voltage,
                           s.radial_inductance_);
}

std::optional<CapacityEnvelope> axial_envelope(const AmbStage& s) {
  if (!s.axial || !(s.axial->amplifier_voltage > 0.0)) return std::nullopt;
  return capacity_envelope(s.axial_capacity.force, s.axial_gains_.current_gain, s.axial->amplifier_voltage,
                           s.axial_inductance_);
}

int cmd_amb(const ProjectConfig& c, const Options& o) {
  const auto s = run_amb_stage(c);
  const auto renv = radial_envelope(s);
  const auto aenv = axial_envelope(s);
  if (csv(o)) {
    std::cout << to_string_with([&](std::ostream& os) { write_checklist_csv(os, s); });
  } else {
    if (s.radial) {
      std::cout << "radial bearing\n"
                << fmt::format("  flux density +/-        {:.4f} / {:.4f} T\n", s.radial_densities.plus,
                               s.radial_densities.minus)
                << fmt::format("  displacement gain K_x   {:.6g} N/m\n", s.radial_gains_.displacement_gain)
                << fmt::format("  current gain K_ix       {:.6g} N/A\n", s.radial_gains_.current_gain)
                << fmt::format("  static capacity         {:.4f} N ({})\n", s.radial_capacity.force,
                               to_string(s.radial_capacity.limited_by))
                << fmt::format("  coil inductance         {:.6g} H\n", s.radial_inductance_);
      if (renv) std::cout << fmt::format("  knee frequency          {:.2f} Hz\n", renv->knee_frequency());
    }
    if (s.axial) {
      std::cout << "axial bearing\n"
                << fmt::format("  displacement gain K_a   {:.6g} N/m\n", s.axial_gains_.displacement_gain)
                << fmt::format("  current gain K_ia       {:.6g} N/A\n", s.axial_gains_.current_gain)
                << fmt::format("  static capacity         {:.4f} N\n", s.axial_capacity.force)
                << fmt::format("  coil inductance         {:.6g} H\n", s.axial_inductance_)
                << fmt::format("  weight offset current   {:.6g} A\n", s.weight_offset);
      if (aenv) std::cout << fmt::format("  knee frequency          {:.2f} Hz\n", aenv->knee_frequency());
    }
    std::cout << "constraint checklist\n";
    print_verdicts(std::cout, s.verdicts);
  }
  if (!o.out_dir.empty())
    write_file(o.out_dir, "amb_checks.csv", to_string_with([&](std::ostream& os) { write_checklist_csv(os, s); }));
  return verdict_code(s.verdicts);
}

int cmd_envelope(const ProjectConfig& c, const Options& o, const fs::path& base) {
  const auto amb = run_amb_stage(c);
  const auto s = run_envelope_stage(c, amb, base);
  auto env_csv = [&](const CapacityEnvelope& e) {
    return to_string_with([&](std::ostream& os) { write_envelope_csv(os, e, s.f_max, c.envelope.steps); });
  };
  const std::string demands = to_string_with([&](std::ostream& os) { write_demand_csv(os, s.demands); });
  if (csv(o)) {
    if (s.radial) std::cout << env_csv(*s.radial);
    std::cout << demands;
  } else {
    if (s.radial) std::cout << fmt::format("radial knee {:.2f} Hz, static {:.4f} N\n", s.radial->knee_frequency(), s.radial->static_capacity);
    if (s.axial) std::cout << fmt::format("axial knee {:.2f} Hz, static {:.4f} N\n", s.axial->knee_frequency(), s.axial->static_capacity);
    print_verdicts(std::cout, s.verdicts);
    for (const auto& w : s.radial_verdict.warnings) std::cout << "  warning: " << w << '\n';
    for (const auto& w : s.axial_verdict.warnings) std::cout << "  warning: " << w << '\n';
  }
  if (!o.out_dir.empty()) {
    if (s.radial) write_file(o.out_dir, "envelope_radial.csv", env_csv(*s.radial));
    if (s.axial) write_file(o.out_dir, "envelope_axial.csv", env_csv(*s.axial));
    write_file(o.out_dir, "demands.csv", demands);
  }
  return verdict_code(s.verdicts);
}

int cmd_optimize(const ProjectConfig& c, const Options& o) {
  if (!c.optimizer) throw InputError("config has no 'optimizer' block");
  GASettings settings = c.optimizer->settings;
  if (o.seed) settings.rng_seed = *o.seed;
  const auto problem = make_amb_problem(c.optimizer->bounds, c.optimizer->fixed);
  const auto res = run_moga(settings, problem);
  const std::string front = to_string_with([&](std::ostream& os) { write_front_csv(os, res.front); });
  const std::string history = to_string_with([&](std::ostream& os) { write_history_csv(os, res); });
  if (csv(o)) {
    std::cout << front;
  } else {
    std::cout << fmt::format("seed {}\ngenerations {}\nstop reason: {}\nfront size {}\n", res.seed, res.generations,
                             res.stop_reason, res.front.size());
    if (!res.front.empty())
      std::cout << fmt::format("capacity range {:.4f} .. {:.4f} N\nvolume range {:.4e} .. {:.4e} m^3\n",
                               -res.front.back().eval.objectives[0], -res.front.front().eval.objectives[0],
                               res.front.back().eval.objectives[1], res.front.front().eval.objectives[1]);
  }
  if (!o.out_dir.empty()) {
    write_file(o.out_dir, "pareto_front.csv", front);
    write_file(o.out_dir, "spread_history.csv", history);
    write_file(o.out_dir, "optimize_run.csv",
               fmt::format("key,value\nseed,{}\ngenerations,{}\nstop_reason,{}\n", res.seed, res.generations,
                           res.stop_reason));
  }
  return kExitPass;
}

int cmd_audit(const ProjectConfig& c, const Options& o) {
  const auto s = run_audit_stage(c);
  const std::string table = to_string_with([&](std::ostream& os) { write_audit_csv(os, s.audit); });
  if (csv(o))
    std::cout << table;
  else
    print_audit(std::cout, s.audit);
  if (!o.out_dir.empty()) write_file(o.out_dir, "audit.csv", table);
  return s.audit.pass() ? kExitPass : kExitAudit;
}

int cmd_report(const ProjectConfig& c, const Options& o, const fs::path& base) {
  const auto r = run_pipeline(c, base);
  const fs::path dir = o.out_dir.empty() ? fs::path("ambspindle_report") : fs::path(o.out_dir);
  write_report_artifacts(r, c.envelope, dir);
  if (csv(o))
    write_summary_csv(std::cout, r.summary());
  else
    print_report(std::cout, r);
  return r.pass() ? kExitPass : kExitAudit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design toolkit for AMB micro-milling spindles"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "YAML project configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "optimizer seed override");
  app.add_option("--out-dir", o.out_dir, "directory for CSV artifacts");
  app.add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"text", "csv"}));
  app.add_flag("--gauge", o.gauge, "turbine pressures in the config are gauge, not absolute");

  const char* names[][2] = {{"turbine", "drive sizing and torque sweep"},
                            {"rotor", "centrifugal limit and critical speeds"},
                            {"campbell", "Campbell diagram CSV"},
                            {"amb", "radial and axial bearing gains, capacities, checklist"},
                            {"envelope", "capacity envelope against load demands"},
                            {"optimize", "radial bearing Pareto front"},
                            {"audit", "sensor, stiffness and clearance requirements"},
                            {"report", "full pipeline with CSV artifacts"}};
  for (const auto& n : names) app.add_subcommand(n[0], n[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    const fs::path cfg_path(o.config);
    const ProjectConfig c = load_config(cfg_path, {o.gauge});
    const fs::path base = cfg_path.parent_path();
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "turbine") return cmd_turbine(c, o);
    if (cmd == "rotor") return cmd_rotor(c, o, false);
    if (cmd == "campbell") return cmd_rotor(c, o, true);
    if (cmd == "amb") return cmd_amb(c, o);
    if (cmd == "envelope") return cmd_envelope(c, o, base);
    if (cmd == "optimize") return cmd_optimize(c, o);
    if (cmd == "audit") return cmd_audit(c, o);
    return cmd_report(c, o, base);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == StageError::Kind::Numerical ? kExitNumerical : kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
