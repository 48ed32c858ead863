// Command-line front end: single runs and the three experiment presets.
//
// Settings are applied in order: preset defaults, --config file, flags.
// Exit status: 0 success, 2 pinch-off, 1 error.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmcf/experiments.hpp"
#include "pmcf/io.hpp"

using namespace pmcf;

namespace {

struct Settings {
  std::map<std::string, std::string> flags;
  std::string config_file;
  int jobs = 1;

  RunConfig resolve(RunConfig preset) const {
    RunConfig c = config_file.empty() ? preset : load_config(config_file, preset);
    for (const auto& [k, v] : flags) apply_setting(c, k, v);
    c.validate();
    return c;
  }
};

void add_run_options(CLI::App* app, Settings& s, bool with_jobs) {
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const Flag flags[] = {
      {"--surface", "surface", "initial surface: sphere or dumbbell"},
      {"--r0", "r0", "initial sphere radius"},
      {"--alpha", "alpha", "tangential (DeTurck) parameter, > 0"},
      {"--tau", "tau", "time step"},
      {"--T", "T", "final time (T / tau must be an integer)"},
      {"--level", "level", "icosphere refinement level"},
      {"--order", "order", "time discretisation: 1 = euler, 2 = midpoint"},
      {"--k", "k", "polynomial degree 1 or 2"},
      {"--mode", "mode", "lifted or simplified"},
      {"--quad-assembly", "quad_assembly", "assembly quadrature degree (0 = 2k)"},
      {"--quad-error", "quad_error", "error/area quadrature degree"},
      {"--out", "out", "output directory (empty: no files)"},
      {"--snapshot-every", "snapshot_every", "write mesh_%06d.vtk every n steps (0 = never)"},
      {"--solver-tol", "solver_tol", "relative residual of the linear solver"},
  };
  for (const Flag& f : flags) {
    std::string key = f.key;
    app->add_option_function<std::string>(f.name, [&s, key](const std::string& v) { s.flags[key] = v; }, f.help);
  }
  app->add_option("--config", s.config_file, "key=value config file")->check(CLI::ExistingFile);
  if (with_jobs) app->add_option("--jobs", s.jobs, "independent runs executed concurrently")->check(CLI::PositiveNumber);
}

std::string sci(double v) { return format_sci(v); }

int cmd_run(const Settings& s) {
  const RunConfig c = s.resolve({});
  const RunOutcome o = run_with_output(c, c.out);
  const RunResult& r = o.result;
  const DiagnosticsRecord& last = o.records.back();
  std::printf("surface %s  scheme %s  k %d  level %d  alpha %s  tau %s\n", to_string(c.surface),
              to_string(c.scheme), c.k, c.level, sci(c.alpha).c_str(), sci(c.tau).c_str());
  std::printf("t_final    %s\n", sci(last.t).c_str());
  if (c.surface == InitialSurface::Sphere) {
    std::printf("E1         %s\nE2         %s\nE3         %s\n", sci(r.errors.E1).c_str(), sci(r.errors.E2).c_str(),
                sci(r.errors.E3).c_str());
  }
  std::printf("sigma_max  %s\narea       %s\ncpu_s      %s\n", sci(last.sigma_max).c_str(), sci(last.area).c_str(),
              sci(r.cpu_s).c_str());
  if (r.pinched) {
    std::printf("pinch-off  t_pinch %s  (%s)\n", sci(r.t_pinch).c_str(), r.pinch_reason.c_str());
    return 2;
  }
  return 0;
}

int cmd_eoc(const Settings& s, const std::vector<int>& levels) {
  RunConfig preset;
  preset.T = 0.6;
  preset.tau = 1e-3;
  const RunConfig c = s.resolve(preset);
  if (!c.out.empty()) write_config_echo(c.out, c);
  const EocReport rep = run_eoc(c, levels, c.out, s.jobs);
  std::printf("%5s  %-10s  %-10s  %-10s  %-10s  %-10s  %-10s  %-10s\n", "level", "h_max", "E1", "eoc1", "E2", "eoc2",
              "E3", "eoc3");
  int status = 0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const EocRow& r = rep.rows[i];
    auto rate = [&](const std::vector<double>& v) { return i == 0 ? std::string("-") : sci(v[i - 1]); };
    std::printf("%5d  %-10s  %-10s  %-10s  %-10s  %-10s  %-10s  %-10s\n", r.level, sci(r.h_max).c_str(),
                sci(r.errors.E1).c_str(), rate(rep.eoc1).c_str(), sci(r.errors.E2).c_str(), rate(rep.eoc2).c_str(),
                sci(r.errors.E3).c_str(), rate(rep.eoc3).c_str());
    if (r.pinched) status = 2;
  }
  return status;
}

int cmd_alpha_study(const Settings& s, const std::vector<double>& alphas, double t_compare) {
  RunConfig preset;
  preset.surface = InitialSurface::Dumbbell;
  preset.scheme = Scheme::Euler;
  preset.level = 4;
  preset.tau = 1e-4;
  preset.T = 0.1;
  const RunConfig c = s.resolve(preset);
  if (alphas.empty()) {
    std::fprintf(stderr, "warning: empty alpha list, nothing to do\n");
    return 0;
  }
  if (!c.out.empty()) write_config_echo(c.out, c);
  const std::vector<AlphaRun> runs = run_alpha_study(c, alphas, c.out, s.jobs);
  std::printf("t_cmp = %s\n", sci(t_compare).c_str());
  std::printf("%-10s  %-12s  %-12s  %-14s  %-10s\n", "alpha", "sigma(t_cmp)", "final_area", "max_area_incr",
              "t_pinch");
  int status = 0;
  for (const AlphaRun& r : runs) {
    std::printf("%-10s  %-12s  %-12s  %-14s  %-10s\n", sci(r.alpha).c_str(), sci(r.sigma_at(t_compare, c.tau)).c_str(),
                sci(r.records.back().area).c_str(), sci(r.max_area_increase()).c_str(),
                r.pinched ? sci(r.t_pinch).c_str() : "-");
    if (r.pinched) status = 2;
  }
  return status;
}

int cmd_order_compare(const Settings& s, const std::vector<double>& taus) {
  RunConfig preset;
  preset.T = 0.2;
  const RunConfig c = s.resolve(preset);
  if (!c.out.empty()) write_config_echo(c.out, c);
  const std::vector<OrderRow> rows = run_order_comparison(c, taus, c.out, s.jobs);
  std::printf("%-10s  %-12s  %-10s  %-12s  %-10s\n", "tau", "euler_E1", "euler_cpu", "midpoint_E1", "midpt_cpu");
  int status = 0;
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    std::printf("%-10s  %-12s  %-10s  %-12s  %-10s\n", sci(rows[i].tau).c_str(), sci(rows[i].E1).c_str(),
                sci(rows[i].cpu_s).c_str(), sci(rows[i + 1].E1).c_str(), sci(rows[i + 1].cpu_s).c_str());
    if (rows[i].pinched || rows[i + 1].pinched) status = 2;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric mean curvature flow with DeTurck reparametrisation"};
  app.require_subcommand(1);

  Settings run_s, eoc_s, alpha_s, order_s;
  std::vector<int> levels{2, 3, 4};
  std::vector<double> alphas{1.0, 0.1, 0.04};
  std::vector<double> taus{0.05, 0.01, 0.005, 0.001, 0.0005};
  double t_compare = 0.05;

  CLI::App* run_cmd = app.add_subcommand("run", "single flow");
  add_run_options(run_cmd, run_s, false);

  CLI::App* eoc_cmd = app.add_subcommand("eoc", "shrinking-sphere spatial convergence study");
  add_run_options(eoc_cmd, eoc_s, true);
  eoc_cmd->add_option("--levels", levels, "icosphere levels, ascending")->capture_default_str();

  CLI::App* alpha_cmd = app.add_subcommand("alpha-study", "dumbbell mesh quality versus alpha");
  add_run_options(alpha_cmd, alpha_s, true);
  alpha_cmd->add_option("--alphas", alphas, "alpha values")->capture_default_str();
  alpha_cmd->add_option("--t-compare", t_compare, "time at which sigma_max is reported")->capture_default_str();

  CLI::App* order_cmd = app.add_subcommand("order-compare", "euler versus midpoint in time");
  add_run_options(order_cmd, order_s, true);
  order_cmd->add_option("--taus", taus, "time steps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return cmd_run(run_s);
    if (*eoc_cmd) return cmd_eoc(eoc_s, levels);
    if (*alpha_cmd) return cmd_alpha_study(alpha_s, alphas, t_compare);
    if (*order_cmd) return cmd_order_compare(order_s, taus);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
