// dmasense command-line runner: scenario defaults, single bound evaluations,
// bandwidth/leakage sweeps, proposition validation, and gnuplot script
// generation for the sweep CSVs.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dmasense/approximations.hpp"
#include "dmasense/kernels.hpp"
#include "dmasense/sweeps.hpp"

namespace {

using namespace dmasense;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  bool reoptimize = false;
  bool single_path = false;
  int threads = 1;
  int budget = 200;
  std::string kernels = "auto";
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_tuner = true) {
  cmd->add_option("--config", opt.config_path, "scenario config file (default: built-in defaults)");
  cmd->add_option("--out", opt.out_dir, "output directory for CSV files");
  cmd->add_option("--seed", opt.seed, "RNG seed for tuning / validation draws");
  cmd->add_option("--threads", opt.threads, "worker threads for tuner evaluations");
  cmd->add_option("--kernels", opt.kernels, "kernel implementation: auto|scalar|avx2");
  if (with_tuner) {
    cmd->add_flag("--reoptimize", opt.reoptimize, "re-optimize the combiner per evaluation point");
    cmd->add_flag("--single-path", opt.single_path, "drop the scatterers, keep the direct path only");
    cmd->add_option("--budget", opt.budget, "tuner objective-evaluation budget");
  }
}

Scenario load(const CommonOptions& opt, bool apply_single_path) {
  Scenario s = opt.config_path.empty() ? default_scenario() : load_scenario(opt.config_path);
  if (apply_single_path && opt.single_path) {
    s.geometry.sps.clear();
    s.geometry.reflections.clear();
  }
  s.validate();
  return s;
}

SweepSpec make_spec(const CommonOptions& opt, SweepVariable var,
                    std::vector<double> grid) {
  SweepSpec spec;
  spec.variable = var;
  spec.grid = std::move(grid);
  spec.output_dir = opt.out_dir;
  spec.reoptimize = opt.reoptimize;
  spec.single_path = opt.single_path;
  spec.seed = opt.seed;
  spec.budget = opt.budget;
  spec.threads = opt.threads;
  return spec;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) grid.push_back(std::stod(item));
  }
  return grid;
}

int run_peb(const CommonOptions& opt, const std::string& method_name,
            const std::string& objective_name, const std::string& combiner_in,
            const std::string& combiner_out) {
  const Scenario s = load(opt, /*apply_single_path=*/true);
  DmaConfiguration cfg;
  if (!combiner_in.empty()) {
    std::ifstream in(combiner_in);
    if (!in) throw ConfigError("cannot open combiner file '" + combiner_in + "'");
    cfg = load_combiner_csv(in);
  } else if (opt.reoptimize) {
    TunerSettings settings;
    settings.budget = opt.budget;
    settings.seed = opt.seed;
    settings.threads = opt.threads;
    if (method_name == "coordinate-descent") settings.method = TuneMethod::coordinate_descent;
    if (objective_name == "delay-CRB") settings.objective = TuneObjective::delay_crb;
    if (objective_name == "AoA-CRB") settings.objective = TuneObjective::aoa_crb;
    const TuneResult r = optimize_peb(s, settings);
    std::cout << "tuned_objective = " << r.objective << "\n";
    std::cout << "tuner_evaluations = " << r.evaluations << "\n";
    cfg = build_configuration(s, r.f_r_table);
  } else {
    cfg = build_configuration(s, matched_table(s));
  }
  if (!combiner_out.empty()) {
    std::ofstream out(combiner_out);
    if (!out) throw ConfigError("cannot write combiner file '" + combiner_out + "'");
    dump_combiner_csv(cfg, out);
  }
  const BoundReport report = evaluate_bounds(s, cfg);
  std::cout << report.to_text();
  if (!opt.out_dir.empty())
    write_output_file(opt.out_dir, "bound_report.txt", report.to_text());
  return 0;
}

int run_validate(const CommonOptions& opt) {
  const Scenario s = load(opt, /*apply_single_path=*/true);
  ValidateOptions vopts;
  vopts.seed = opt.seed;
  const ValidationReport report = validate_propositions(s, vopts);
  report.write_text(std::cout);
  if (!opt.out_dir.empty()) {
    std::ostringstream csv;
    report.write_csv(csv);
    write_output_file(opt.out_dir, "validation_report.csv", csv.str());
  }
  return report.all_pass() ? 0 : 1;
}

/// Emit a gnuplot script next to a sweep CSV. The numerical pipeline has no
/// plotting dependency; run the scripts with gnuplot if figures are wanted.
void emit_plot_script(const std::string& dir, const std::string& stem,
                      const std::string& csv_name, const std::string& title,
                      const std::string& xlabel,
                      const std::vector<std::pair<int, std::string>>& series,
                      bool logy) {
  std::ostringstream gp;
  gp << "set datafile separator ','\n";
  gp << "set datafile commentschars '#'\n";
  gp << "set key outside\n";
  gp << "set grid\n";
  gp << "set title '" << title << "'\n";
  gp << "set xlabel '" << xlabel << "'\n";
  if (logy) gp << "set logscale y\n";
  gp << "set terminal svg size 900,600\n";
  gp << "set output '" << stem << ".svg'\n";
  gp << "plot";
  for (std::size_t i = 0; i < series.size(); ++i) {
    gp << (i ? ", \\\n     " : " ") << "'" << csv_name << "' using 1:"
       << series[i].first << " with linespoints title '" << series[i].second << "'";
  }
  gp << "\n";
  write_output_file(dir, stem + ".gp", gp.str());
}

int run_plot(const std::string& dir) {
  namespace fs = std::filesystem;
  int emitted = 0;
  if (fs::exists(fs::path(dir) / "bandwidth_sweep.csv")) {
    emit_plot_script(dir, "bandwidth_sweep", "bandwidth_sweep.csv",
                     "delay information and PEB vs bandwidth", "B (Hz)",
                     {{2, "J_tautau exact"}, {3, "J_tautau effective-bandwidth"},
                      {4, "PEB exact (m)"}, {5, "PEB approx (m)"}},
                     true);
    ++emitted;
  }
  if (fs::exists(fs::path(dir) / "leakage_sweep.csv")) {
    emit_plot_script(dir, "leakage_angular", "leakage_sweep.csv",
                     "angular information vs leakage", "leakage fraction",
                     {{3, "J_phiphi exact"}, {4, "J_phiphi aperture approx"},
                      {9, "PEB exact (m)"}},
                     true);
    emit_plot_script(dir, "leakage_crb_inflation", "leakage_sweep.csv",
                     "delay-CRB inflation vs leakage", "leakage fraction",
                     {{7, "delay CRB exact"}, {8, "CRB_0 / A_leak"}}, true);
    ++emitted;
  }
  if (emitted == 0) {
    std::cerr << "no sweep CSVs found in '" << dir << "'\n";
    return 2;
  }
  std::cout << "wrote gnuplot scripts to " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wideband DMA uplink sensing bounds toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string grid_text;
  std::string method_name = "random-search";
  std::string objective_name = "PEB";
  std::string plot_dir = ".";

  CLI::App* defaults = app.add_subcommand("defaults", "print the default scenario config");
  std::string defaults_out;
  defaults->add_option("--out", defaults_out, "write the config to a file instead of stdout");

  CLI::App* peb_cmd = app.add_subcommand("peb", "bounds for one scenario (matched combiner, or tuned with --reoptimize)");
  add_common(peb_cmd, opt);
  peb_cmd->add_option("--method", method_name, "tuner method: random-search|coordinate-descent");
  peb_cmd->add_option("--objective", objective_name, "tuner objective: PEB|delay-CRB|AoA-CRB");
  std::string combiner_in, combiner_out;
  peb_cmd->add_option("--combiner", combiner_in, "evaluate a combiner table imported from CSV");
  peb_cmd->add_option("--dump-combiner", combiner_out, "write the evaluated combiner table to CSV");

  CLI::App* sweep_b = app.add_subcommand("sweep-bandwidth", "sweep the signal bandwidth B = K*delta_f");
  add_common(sweep_b, opt);
  sweep_b->add_option("--grid", grid_text, "comma-separated B values in Hz (default 100..1000 MHz)");
  bool fixed_spacing = false;
  sweep_b->add_flag("--fixed-spacing", fixed_spacing,
                    "keep the subcarrier spacing and vary K instead of the spacing");

  CLI::App* sweep_l = app.add_subcommand("sweep-leakage", "sweep the waveguide leakage fraction");
  add_common(sweep_l, opt);
  sweep_l->add_option("--grid", grid_text, "comma-separated Lambda values (default 0,0.2,...,0.8)");

  CLI::App* validate = app.add_subcommand("validate-props", "run every identity/oracle check and report pass/fail");
  add_common(validate, opt, /*with_tuner=*/false);

  CLI::App* plot = app.add_subcommand("plot", "emit gnuplot scripts for sweep CSVs");
  plot->add_option("--out", plot_dir, "directory holding the sweep CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    kernels::select(opt.kernels);

    if (defaults->parsed()) {
      if (defaults_out.empty()) {
        save_scenario(default_scenario(), std::cout);
      } else {
        std::ofstream out(defaults_out);
        if (!out) throw ConfigError("cannot write '" + defaults_out + "'");
        save_scenario(default_scenario(), out);
      }
      return 0;
    }
    if (peb_cmd->parsed())
      return run_peb(opt, method_name, objective_name, combiner_in, combiner_out);
    if (sweep_b->parsed()) {
      std::vector<double> grid = parse_grid(grid_text);
      if (grid.empty())
        for (int i = 1; i <= 10; ++i) grid.push_back(100e6 * i);
      const Scenario s = load(opt, /*apply_single_path=*/false);
      SweepSpec spec = make_spec(opt, SweepVariable::bandwidth_b, grid);
      spec.fixed_spacing = fixed_spacing;
      const SweepTable t = run_bandwidth_sweep(s, spec);
      t.write_csv(std::cout);
      return t.all_rows_ok() ? 0 : 1;
    }
    if (sweep_l->parsed()) {
      std::vector<double> grid = parse_grid(grid_text);
      if (grid.empty()) grid = {0.0, 0.2, 0.4, 0.6, 0.8};
      const Scenario s = load(opt, /*apply_single_path=*/false);
      const SweepTable t =
          run_leakage_sweep(s, make_spec(opt, SweepVariable::leakage_lambda, grid));
      t.write_csv(std::cout);
      return t.all_rows_ok() ? 0 : 1;
    }
    if (validate->parsed()) return run_validate(opt);
    if (plot->parsed()) return run_plot(plot_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
