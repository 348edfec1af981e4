#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "regge/driver.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;

int run_verify_command(const std::string& config_path, const std::string& report_path) {
  const regge::ExperimentConfig cfg = regge::load_config(config_path);
  const regge::VerifyReport rep = regge::run_verify(cfg, &std::cout);
  const std::string path = report_path.empty() ? cfg.out : report_path;
  if (!path.empty()) {
    std::ofstream os(path);
    if (!os) throw regge::ConfigError("cannot write report '" + path + "'");
    os << rep.to_json() << "\n";
  }
  std::cout << rep.checks.size() - rep.failures() << "/" << rep.checks.size() << " checks passed\n";
  return rep.pass() ? kPass : kCheckFailure;
}

int run_converge_command(const std::string& config_path, const std::string& out_path) {
  const regge::ExperimentConfig cfg = regge::load_config(config_path);
  const std::string path = out_path.empty() ? cfg.out : out_path;
  if (path.empty()) throw regge::ConfigError("no output path: pass --out or set 'out' in the config");
  std::ofstream os(path);
  if (!os) throw regge::ConfigError("cannot write '" + path + "'");
  const auto rows = regge::run_convergence(cfg, &std::cout);
  regge::write_csv(rows, os);
  std::ofstream gp(path + ".gp");
  regge::write_plot_script(path, gp);
  bool ok = true;
  for (const auto& r : rows)
    if (r.skipped) ok = false;
  std::cout << "wrote " << path << " and " << path << ".gp\n";
  return ok ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional curvature and connection of Regge metrics"};
  app.require_subcommand(1);
  std::string config, out, report;
  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  verify->add_option("--config", config, "Experiment config (JSON)")->required();
  verify->add_option("--report", report, "Write the JSON report here (default: config 'out')");
  auto* converge = app.add_subcommand("converge", "Run the convergence study");
  converge->add_option("--config", config, "Experiment config (JSON)")->required();
  converge->add_option("--out", out, "CSV output path (default: config 'out')");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }
  try {
    if (*verify) return run_verify_command(config, report);
    return run_converge_command(config, out);
  } catch (const regge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailure;
  }
}
