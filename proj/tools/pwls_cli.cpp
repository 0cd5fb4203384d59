// Command line driver: run a config sweep to CSV, or run the invariant suite
// on it.
//
//   pwls_cli run configs/dipole_4pi.json --output dipole.csv
//   pwls_cli verify configs/dipole_4pi.json

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pwls/pwls.hpp"

namespace {

struct Overrides {
  int quad_order = 0;
  int threads = 0;
  std::string output;
};

pwls::ExperimentConfig load_with(const std::string& path, const Overrides& o) {
  pwls::ExperimentConfig cfg = pwls::load_config(path);
  if (o.quad_order > 0) cfg.quadrature_override = o.quad_order;
  if (o.threads > 0) cfg.threads = o.threads;
  if (!o.output.empty()) cfg.output_path = o.output;
  return cfg;
}

void print_row(const pwls::ResultRow& r) {
  std::printf("%-4s q=%d p=%-3d h=%-8.5g dofs=%-7lld err=%.4e res=%.1e asm=%.2fs solve=%.2fs%s%s\n",
              r.variant.c_str(), r.q, r.p, r.h, r.dofs, r.error, r.residual, r.assembly_seconds, r.solve_seconds,
              r.status == "ok" ? "" : "  ", r.status == "ok" ? "" : r.status.c_str());
}

int cmd_run(const std::string& path, const Overrides& o) {
  const pwls::ExperimentConfig cfg = load_with(path, o);
  const auto rows = pwls::run_experiment(cfg);
  for (const auto& r : rows) print_row(r);
  pwls::emit_csv(rows, cfg.output_path, cfg.metric);
  std::printf("wrote %zu rows to %s\n", rows.size(), cfg.output_path.c_str());
  int failed = 0;
  for (const auto& r : rows) failed += r.failed();
  return failed ? 1 : 0;
}

int cmd_verify(const std::string& path, const Overrides& o) {
  const pwls::ExperimentConfig cfg = load_with(path, o);
  int failed = 0;
  for (const auto& c : pwls::verify_experiment(cfg)) {
    std::printf("%s: %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.empty() ? "" : "  ",
                c.detail.c_str());
    failed += !c.pass;
  }
  std::printf("%d check(s) failed\n", failed);
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plane-wave least-squares Maxwell solver"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--quad-order", o.quad_order, "points per direction for face quadrature")->check(CLI::PositiveNumber);
  app.add_option("--threads", o.threads, "sweep triples run concurrently")->check(CLI::PositiveNumber);
  app.add_option("--output", o.output, "CSV path (overrides the config)");

  std::string config;
  auto* run = app.add_subcommand("run", "run the sweep and write CSV");
  run->add_option("config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  auto* verify = app.add_subcommand("verify", "run the invariant suite for a config");
  verify->add_option("config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  for (auto* sub : {run, verify}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config, o);
    return cmd_verify(config, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
