// Experiment driver: regret comparison, coverage probability, and the
// MovieLens-derived benchmark, configured through an INI file or the
// built-in desk/paper presets.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "icb/config.hpp"
#include "icb/experiments.hpp"

namespace {

// Space-separated twin of a summary CSV for direct gnuplot consumption.
void write_gnuplot_dat(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) return;
  const std::string dat_path =
      csv_path.substr(0, csv_path.rfind('.')) + ".dat";
  std::ofstream out(dat_path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      out << line << "\n";
      continue;
    }
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    out << line << "\n";
  }
  std::cout << "wrote " << dat_path << "\n";
}

int run(icb::ExperimentKind kind, const std::optional<std::string>& config_path,
        const std::string& preset_name,
        const std::optional<std::uint64_t>& seed,
        const std::optional<int>& workers,
        const std::optional<std::string>& out_dir, bool gnuplot) {
  icb::ExperimentConfig cfg;
  if (config_path) {
    cfg = icb::parse_experiment_config(icb::IniFile::parse_file(*config_path));
    if (cfg.kind != kind) {
      throw icb::ConfigError("config kind does not match the subcommand");
    }
  } else {
    cfg = icb::preset_config(
        kind, preset_name == "paper" ? icb::Preset::paper : icb::Preset::desk);
  }
  if (seed) cfg.master_seed = *seed;
  if (workers) cfg.workers = *workers;
  if (out_dir) cfg.output_dir = *out_dir;
  cfg.validate();

  std::cout << "config_hash=" << icb::config_hash(cfg) << "\n";
  icb::ExperimentResult result = icb::run_experiment(cfg);
  for (const auto& f : result.output_files) std::cout << "wrote " << f << "\n";
  if (gnuplot) {
    for (const auto& f : result.output_files) {
      if (f.find("_summary.csv") != std::string::npos) write_gnuplot_dat(f);
    }
  }
  for (const auto& m : result.messages) std::cout << m << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear contextual bandits under cross-unit interference"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::string preset_name = "desk";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  bool gnuplot = false;

  app.add_option("--config", config_path, "INI config file (overrides preset)");
  app.add_option("--preset", preset_name, "desk or paper scale defaults")
      ->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--seed", seed, "master seed override");
  app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_option("--out", out_dir, "output directory override");
  app.add_flag("--gnuplot", gnuplot,
               "also write summaries as space-separated .dat files");

  auto* regret = app.add_subcommand("regret", "average regret comparison");
  auto* cov_beta =
      app.add_subcommand("coverage-beta", "chi-square region coverage");
  auto* cov_v = app.add_subcommand("coverage-v", "optimal-value CI coverage");
  auto* movielens =
      app.add_subcommand("movielens", "MovieLens-derived benchmark");
  auto* validate =
      app.add_subcommand("validate-config", "parse and echo a config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      if (!config_path) {
        std::cerr << "validate-config requires --config\n";
        return 1;
      }
      icb::ExperimentConfig cfg = icb::parse_experiment_config(
          icb::IniFile::parse_file(*config_path));
      cfg.validate();
      std::cout << icb::canonical_config_text(cfg);
      std::cout << "config_hash=" << icb::config_hash(cfg) << "\n";
      std::cout << "OK\n";
      return 0;
    }
    icb::ExperimentKind kind = icb::ExperimentKind::regret;
    if (regret->parsed()) kind = icb::ExperimentKind::regret;
    else if (cov_beta->parsed()) kind = icb::ExperimentKind::coverage_beta;
    else if (cov_v->parsed()) kind = icb::ExperimentKind::coverage_v;
    else if (movielens->parsed()) kind = icb::ExperimentKind::movielens;
    return run(kind, config_path, preset_name, seed, workers, out_dir,
               gnuplot);
  } catch (const icb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
