#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vdc/config.hpp"
#include "vdc/newton_euler.hpp"
#include "vdc/selfcheck.hpp"
#include "vdc/trace_io.hpp"

namespace {

// The only environment override: directory for generated files.
std::string out_path(const std::string& name) {
  if (name.empty() || name.front() == '/') return name;
  const char* dir = std::getenv("HYDROVDC_OUTDIR");
  if (!dir || !*dir) return name;
  return std::string(dir) + "/" + name;
}

int cmd_verify(const std::string& config_path) {
  vdc::SelfCheckReport rep;
  if (!config_path.empty()) {
    const vdc::LoadedConfig cfg = vdc::load_config(config_path);
    rep = vdc::run_selfcheck(&cfg);
  } else {
    rep = vdc::run_selfcheck();
  }
  for (const vdc::CheckResult& c : rep.checks)
    std::cout << (c.passed() ? "PASS" : "FAIL") << " " << c.name << " (" << c.trials
              << " trials, worst " << vdc::format_number(c.worst) << ", tol "
              << vdc::format_number(c.tolerance) << ")\n";
  std::cout << "verify: " << rep.checks_passed() << "/" << rep.checks.size()
            << " checks passed\n";
  return rep.passed() ? 0 : 1;
}

int cmd_forces(const std::string& config_path, const std::string& state_path) {
  const vdc::LoadedConfig cfg = vdc::load_config(config_path);
  const vdc::StateFile st = vdc::load_state_file(state_path, cfg.model.structures.size());
  vdc::KinematicTrace tr = vdc::forward_kinematics(cfg.model, st.joints);
  vdc::propagate_accelerations(cfg.model, tr, st.accels);
  const vdc::BackwardResult bw = vdc::backward_pass(cfg.model, tr, st.tool_wrench);
  std::cout << "forces:";
  for (size_t j = 0; j < bw.structures.size(); ++j) {
    std::cout << " f_c[" << j << "]=" << vdc::format_number(bw.structures[j].f_c);
    if (bw.structures[j].pris)
      std::cout << " f_ct[" << j << "]=" << vdc::format_number(bw.structures[j].pris->f_ct);
  }
  std::cout << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& csv_name) {
  const vdc::LoadedConfig cfg = vdc::load_config(config_path);
  const vdc::SimulationResult res = vdc::run_scenario(cfg.model, cfg.gains, cfg.scenario);
  const std::string csv = out_path(csv_name);
  vdc::write_csv(res.trace, csv);
  std::cout << "simulate: steps=" << res.trace.rows.size() << " csv=" << csv
            << " max_voltage_V=" << vdc::format_number(res.max_abs_voltage)
            << " pressure_bar=[" << vdc::format_number(res.min_pressure / 1e5) << ","
            << vdc::format_number(res.max_pressure / 1e5) << "]"
            << " max_tool_error_mm=" << vdc::format_number(res.max_tool_error * 1e3)
            << " steady_tool_error_mm="
            << vdc::format_number(res.max_steady_tool_error * 1e3) << "\n";
  return 0;
}

int cmd_plot(const std::string& config_path, const std::string& csv_name,
             const std::string& script_name) {
  const vdc::LoadedConfig cfg = vdc::load_config(config_path);
  const size_t n = cfg.model.structures.size();
  const std::string script = out_path(script_name);
  std::ofstream os(script);
  if (!os) throw vdc::ModelError("cannot open plot script output: " + script);

  os << "# gnuplot script generated by hydrovdc; data: " << csv_name << "\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set grid\n"
     << "set xlabel 'time [s]'\n"
     << "csv = '" << csv_name << "'\n\n";

  os << "set terminal pngcairo size 1000,600\n";
  os << "set output 'forces.png'\nset ylabel 'piston force [N]'\nplot";
  for (size_t j = 0; j < n; ++j)
    os << (j ? "," : "") << " csv using 't_s':'fp" << j << "' with lines, csv using 't_s':'fpr"
       << j << "' with lines dt 2";
  os << "\n\n";

  os << "set output 'pressures.png'\nset ylabel 'chamber pressure [Pa]'\nplot";
  for (size_t j = 0; j < n; ++j)
    os << (j ? "," : "") << " csv using 't_s':'pa" << j << "' with lines, csv using 't_s':'pb"
       << j << "' with lines";
  os << "\n\n";

  os << "set output 'voltages.png'\nset ylabel 'valve voltage [V]'\nset yrange [-11:11]\nplot";
  for (size_t j = 0; j < n; ++j) os << (j ? "," : "") << " csv using 't_s':'u" << j << "' with lines";
  os << "\n\n";

  os << "set output 'path.png'\nset yrange [*:*]\nset xlabel 'x [m]'\nset ylabel 'y [m]'\n"
     << "set size ratio -1\n"
     << "plot csv using 'tool_x':'tool_y' with lines, "
        "csv using 'toold_x':'toold_y' with lines dt 2\n";

  std::cout << "plot: script=" << script << " figures=forces.png,pressures.png,"
            << "voltages.png,path.png\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hydraulic parallel-serial manipulator simulator"};
  app.require_subcommand(1);

  std::string config_path, state_path, csv_name = "trace.csv", script_name = "plots.gp";

  CLI::App* verify = app.add_subcommand("verify", "run oracle-equivalence self checks");
  verify->add_option("config", config_path, "optional model/scenario config file");

  CLI::App* forces = app.add_subcommand("forces", "one-shot inverse dynamics");
  forces->add_option("config", config_path, "model/scenario config file")->required();
  forces->add_option("--state", state_path, "joint state file")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop run to CSV");
  simulate->add_option("config", config_path, "model/scenario config file")->required();
  simulate->add_option("-o,--output", csv_name, "CSV output path");

  CLI::App* plot = app.add_subcommand("plot", "emit a gnuplot script for a trace");
  plot->add_option("config", config_path, "model/scenario config file")->required();
  plot->add_option("-c,--csv", csv_name, "CSV path the script reads");
  plot->add_option("-o,--output", script_name, "script output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints synopsis/usage
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return cmd_verify(config_path);
    if (forces->parsed()) return cmd_forces(config_path, state_path);
    if (simulate->parsed()) return cmd_simulate(config_path, csv_name);
    if (plot->parsed()) return cmd_plot(config_path, csv_name, script_name);
  } catch (const vdc::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const vdc::ValidationError& e) {
    std::cerr << "config validation failed:\n" << e.what() << "\n";
    return 2;
  } catch (const vdc::ModelError& e) {
    std::cerr << "run aborted: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
