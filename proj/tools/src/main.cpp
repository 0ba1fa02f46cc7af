#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "pipeline.hpp"
#include "rfa/errors.hpp"
#include "rfa/parallel.hpp"
#include "rfa/version.hpp"

namespace {

void add_common(CLI::App* cmd, rfa::cli::CommonConfig& cfg) {
  cmd->add_option("--input", cfg.input, "grid input (format A CSV or format B JSON sidecar)");
  cmd->add_option("--format", cfg.format, "input format: A, B or auto (default auto)");
  cmd->add_option("--season", cfg.seasons, "seasons to process (SON DJF MAM JJA; default all)");
  cmd->add_option("--threshold", cfg.threshold_u, "wet-day threshold in mm (default 1)");
  cmd->add_option("--seed", cfg.seed, "master random seed (default 0)");
  cmd->add_option("--threads", cfg.threads, "worker thread cap (default 1)");
  cmd->add_option("--min-fit", cfg.min_fit, "minimum FIT values per site/season (default 30)");
  cmd->add_option("--out", cfg.out_dir, "output directory (default .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regional frequency analysis of daily precipitation: omega-ratio "
               "clustering, extended GPD fitting and return levels"};
  app.set_version_flag("--version", rfa::kVersion);
  app.set_config("--config", "", "key=value config file; sections per subcommand; "
                                 "command-line flags override file values");
  app.require_subcommand(1);

  rfa::cli::ClusterConfig cluster_cfg;
  auto* cluster = app.add_subcommand(
      "cluster", "estimate per-site omega, partition sites by k-medoids, score validity");
  add_common(cluster, cluster_cfg);
  cluster->add_option("--k", cluster_cfg.k, "number of clusters (2..10) or 'scan' (default)");
  cluster->add_option("--max-sweeps", cluster_cfg.max_sweeps, "swap sweep cap (default 100)");

  rfa::cli::FitConfig fit_cfg;
  auto* fit = app.add_subcommand("fit", "fit the chosen regionalization levels");
  add_common(fit, fit_cfg);
  fit->add_option("--partition", fit_cfg.partition_path,
                  "partition.csv from `cluster` (required for semiregional/regional)");
  fit->add_option("--levels", fit_cfg.levels,
                  "levels to fit: local semiregional regional (default all)");

  rfa::cli::ReturnLevelsConfig rl_cfg;
  auto* rl = app.add_subcommand("return-levels", "compute per-site return levels");
  add_common(rl, rl_cfg);
  rl->add_option("--params", rl_cfg.params_path, "params.csv from `fit`")->required();
  rl->add_option("--wet-stats", rl_cfg.wet_stats_path,
                 "wet_stats.csv from `cluster`/`fit` (n_wds source; else --input is re-read)");
  rl->add_option("--periods", rl_cfg.periods, "return periods in years (default 10 50 100)");
  rl->add_flag("--diff-regional-local", rl_cfg.diff_regional_local,
               "emit the regional-vs-local relative difference field and summary");

  rfa::cli::ValidateConfig val_cfg;
  auto* val = app.add_subcommand(
      "validate", "Anderson-Darling holdout tests, AIC model scores, QQ data");
  add_common(val, val_cfg);
  val->add_option("--params", val_cfg.params_path, "params.csv from `fit`")->required();
  val->add_option("--partition", val_cfg.partition_path,
                  "partition.csv (enables silhouette bands)");
  val->add_option("--fraction", val_cfg.fraction, "spatial subsample fraction (default 0.125)");
  val->add_option("--sims", val_cfg.n_sims, "parametric simulations per test (default 999)");
  val->add_option("--qq-sites", val_cfg.qq_sites, "site ids to emit QQ data for");

  rfa::cli::SynthConfig synth_cfg;
  auto* synth = app.add_subcommand("synth", "generate a synthetic grid with known truth");
  synth->add_option("--spec", synth_cfg.spec_path, "synthetic grid spec (JSON)")->required();
  synth->add_option("--format", synth_cfg.format, "output format: A, B or both (default B)");
  synth->add_option("--out", synth_cfg.out_dir, "output directory (default .)");
  auto* seed_opt = synth->add_option("--seed", synth_cfg.seed, "override the spec's seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cluster) return rfa::cli::cmd_cluster(cluster_cfg);
    if (*fit) return rfa::cli::cmd_fit(fit_cfg);
    if (*rl) return rfa::cli::cmd_return_levels(rl_cfg);
    if (*val) return rfa::cli::cmd_validate(val_cfg);
    if (*synth) {
      synth_cfg.seed_given = seed_opt->count() > 0;
      return rfa::cli::cmd_synth(synth_cfg);
    }
  } catch (const rfa::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const rfa::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const rfa::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
