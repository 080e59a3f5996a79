// dsqg command-line driver: run, verify, diag.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dsqg/config.hpp"
#include "dsqg/io.hpp"
#include "dsqg/run.hpp"
#include "dsqg/suite.hpp"

namespace fs = std::filesystem;
using namespace dsqg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNaN = 2;
constexpr int kExitMonitor = 3;

std::string checkpoint_name(const fs::path& dir, long index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "checkpoint_%04ld.sqgb", index);
  return (dir / buf).string();
}

DiagnosticsParams monitored_params(const RunConfig& config) {
  DiagnosticsParams params = config.diagnostics;
  if (std::find(params.alphas.begin(), params.alphas.end(), config.holder_alpha) == params.alphas.end())
    params.alphas.push_back(config.holder_alpha);
  if (std::find(params.ps.begin(), params.ps.end(), config.holder_p) == params.ps.end())
    params.ps.push_back(config.holder_p);
  return params;
}

int cmd_run(const std::string& path) {
  const RunConfig config = load_config(path);
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  const GeometryPtr geo = make_geometry(config);
  const Solver solver(make_solver_config(config, geo));
  const DiagnosticsParams params = monitored_params(config);
  const std::uint64_t hash = fnv1a(config.canonical());

  std::ofstream csv(dir / "diagnostics.csv");
  write_diagnostics_header(csv, params, config.solver.seed,
                           "N=" + std::to_string(config.geometry.n) + " initial=" + config.initial.kind +
                               " drift=" + config.drift.kind);
  long outputs = 0;
  const RunObserver observer = [&](const SolverState& s, const DiagnosticsRecord& rec) {
    csv << diagnostics_row(rec, params) << "\n" << std::flush;
    if (config.checkpoint_every > 0 && outputs % config.checkpoint_every == 0)
      write_checkpoint(checkpoint_name(dir, outputs), make_checkpoint(s, hash));
    write_checkpoint((dir / "final.sqgb").string(), make_checkpoint(s, hash));
    ++outputs;
  };

  RunResult result;
  try {
    result = run(solver, make_initial(geo, config.initial), params, observer);
  } catch (const SolverBlowup& e) {
    write_checkpoint((dir / "last_good.sqgb").string(), make_checkpoint(e.last_good(), hash));
    std::cerr << "aborted: " << e.what() << "\n";
    return kExitNaN;
  }

  const HolderMonitor monitor = holder_monitor(result.records, config.holder_alpha, config.holder_p);
  std::cout << "t_end=" << result.snapshots.back().t << " outputs=" << outputs
            << " ledger_residual=" << format_double(result.ledger_residual)
            << " max_overshoot=" << format_double(result.max_overshoot)
            << " rejected_steps=" << result.rejected_steps << " holder_k_fit=" << format_double(monitor.k_fit)
            << "\n";
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (monitor.violated) {
    std::cerr << "warning: Holder monitor violated at output " << monitor.first_violation << "\n";
    return kExitMonitor;
  }
  return result.overshoot_flag ? kExitMonitor : kExitOk;
}

int cmd_verify(const std::string& path, std::vector<std::string> names) {
  const RunConfig config = load_config(path);
  if (names.empty()) names = config.verify.names;
  if (names.empty()) names = check_names();
  const std::string dir = (fs::path(config.output_dir) / "reports").string();
  bool ok = true;
  for (const auto& name : names) {
    try {
      const InequalityReport report = run_named_check(name, config);
      write_report(dir, report);
      std::cout << (report.pass ? "PASS " : "FAIL ") << name << " min_margin=" << format_double(report.min_margin)
                << "\n";
      ok = ok && report.pass;
    } catch (const PreconditionError& e) {
      std::cout << "ERROR " << name << " precondition error: " << e.what() << "\n";
      ok = false;
    }
  }
  return ok ? kExitOk : kExitFailure;
}

int cmd_diag(const std::string& path, const std::string& config_path, const std::string& dump) {
  const Checkpoint cp = read_checkpoint(path);
  RunConfig config;
  if (!config_path.empty()) config = load_config(config_path);
  const DiagnosticsParams params = monitored_params(config);
  SolverState state{cp.t, checkpoint_field(cp)};
  state.step = static_cast<long>(cp.step);
  const int sign = config.solver.rotation_sign;
  if (auto drift = make_drift(state.theta.geometry_ptr(), config.drift)) state.velocity = velocity_from_stream(*drift, sign);
  const DiagnosticsRecord rec = record(state, params, sign);
  write_diagnostics_header(std::cout, params, config.solver.seed, "checkpoint " + path);
  std::cout << diagnostics_row(rec, params) << "\n";
  if (!dump.empty()) write_grid_csv(dump, inverse(state.theta));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical dissipative SQG on a square with the Dirichlet fractional Laplacian"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "integrate and write diagnostics CSV and checkpoints");
  run_cmd->add_option("config", run_config, "INI config file")->required();

  std::string verify_config;
  std::vector<std::string> names;
  auto* verify_cmd = app.add_subcommand("verify", "run numerical checks and write reports");
  verify_cmd->add_option("config", verify_config, "INI config file")->required();
  verify_cmd->add_option("names", names, "checks to run (default: [verify] names, else all)");

  std::string checkpoint, diag_config, dump;
  auto* diag_cmd = app.add_subcommand("diag", "diagnostics row for a checkpoint");
  diag_cmd->add_option("checkpoint", checkpoint, "checkpoint file")->required();
  diag_cmd->add_option("--config", diag_config, "config of the run (diagnostics and drift)");
  diag_cmd->add_option("--dump-grid", dump, "write x,y,value CSV of the field");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run_config);
    if (*verify_cmd) return cmd_verify(verify_config, names);
    if (*diag_cmd) return cmd_diag(checkpoint, diag_config, dump);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
