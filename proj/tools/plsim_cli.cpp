#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "plsim/commands.hpp"

namespace {

struct ConfigOptions {
  std::string source;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool assert_mode = false;
};

void add_common(CLI::App* cmd, ConfigOptions& o) {
  cmd->add_option("--config", o.source,
                  "JSON config file, or builtin:NAME (flat_cgpe, "
                  "gaussian_cgpe, ep_default, fault_injection)")
      ->required();
  cmd->add_option("--seed", o.seed, "seed for a random initial condensate");
  cmd->add_option("--out", o.out, "output directory (overrides the config)");
  cmd->add_flag("--assert", o.assert_mode, "nonzero exit on failed soft checks");
}

// Exit status on failure, the config otherwise.
std::variant<int, plsim::RunConfig> resolve(const ConfigOptions& o) {
  std::optional<plsim::RunConfig> c;
  try {
    c = plsim::load_config(o.source, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return plsim::kExitIo;
  }
  if (!c) return plsim::kExitUsage;
  return plsim::apply_overrides(*c, {o.seed, o.out, o.assert_mode});
}

template <class F>
int with_config(const ConfigOptions& o, F&& command) {
  auto c = resolve(o);
  if (const int* status = std::get_if<int>(&c)) return *status;
  return command(std::get<plsim::RunConfig>(c));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plsim: spectral simulation and bound verification for the cGPE and EP models"};
  app.require_subcommand(1);

  ConfigOptions run_opts;
  auto* run = app.add_subcommand("run", "simulate, write diagnostics and run the checks");
  add_common(run, run_opts);

  ConfigOptions check_opts;
  std::string csv;
  auto* check = app.add_subcommand("check", "re-run the checks on a diagnostics CSV");
  add_common(check, check_opts);
  check->add_option("--csv", csv, "diagnostics.csv written by `plsim run`")
      ->required()
      ->check(CLI::ExistingFile);

  ConfigOptions picard_cfg;
  plsim::PicardCommandOptions picard_opts;
  auto* picard = app.add_subcommand("picard", "Duhamel-Picard iteration on [0, delta]");
  add_common(picard, picard_cfg);
  picard->add_option("--delta", picard_opts.delta, "time horizon")->capture_default_str();
  picard->add_option("--nodes", picard_opts.n_nodes, "time nodes in [0, delta]")
      ->capture_default_str();
  picard->add_option("--max-iter", picard_opts.max_iter, "iteration cap")
      ->capture_default_str();
  picard->add_option("--s", picard_opts.s, "Sobolev index of the cGPE metric")
      ->capture_default_str();
  picard->add_flag("--bisect", picard_opts.bisect,
                   "bracket the largest converging delta (cgpe only)");

  bool norms_assert = false;
  plsim::NormsCommandOptions norms_opts;
  std::optional<std::string> norms_out;
  auto* norms = app.add_subcommand("norms", "Sobolev and Bourgain-space norms, ensemble scans");
  norms->add_option("--checkpoint", norms_opts.checkpoints,
                    "checkpoint file(s); several uniformly spaced ones form a space-time field")
      ->check(CLI::ExistingFile);
  norms->add_option("--s", norms_opts.s, "spatial index")->capture_default_str();
  norms->add_option("--b", norms_opts.b, "temporal index")->capture_default_str();
  norms->add_flag("--l4-scan", norms_opts.l4_scan, "windowed L4 ensemble at two resolutions");
  norms->add_flag("--trilinear", norms_opts.trilinear, "trilinear ratio scan at N = 8, 16, 32");
  norms->add_option("--samples", norms_opts.l4_samples, "L4 ensemble size")
      ->capture_default_str();
  norms->add_option("--trilinear-samples", norms_opts.trilinear_samples,
                    "samples per trilinear lattice size")
      ->capture_default_str();
  norms->add_option("--eps", norms_opts.eps, "epsilon of the admissible weights")
      ->capture_default_str();
  norms->add_option("--seed", norms_opts.seed, "ensemble seed")->capture_default_str();
  norms->add_option("--out", norms_out, "output directory");
  norms->add_flag("--assert", norms_assert, "turn soft checks into failures");

  bool selftest_assert = false;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_flag("--assert", selftest_assert, "soft violations fail the suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? plsim::kExitOk : plsim::kExitUsage;
  }

  if (run->parsed())
    return with_config(run_opts, [](const auto& c) { return plsim::run_command(c, std::cout); });
  if (check->parsed())
    return with_config(check_opts,
                       [&](const auto& c) { return plsim::check_command(c, csv, std::cout); });
  if (picard->parsed())
    return with_config(picard_cfg, [&](const auto& c) {
      return plsim::picard_command(c, picard_opts, picard_cfg.assert_mode, std::cout);
    });
  if (norms->parsed()) {
    if (norms_out) norms_opts.out_dir = *norms_out;
    return plsim::norms_command(norms_opts, norms_assert, std::cout);
  }
  if (selftest->parsed()) return plsim::selftest_command(selftest_assert, std::cout);
  return plsim::kExitUsage;
}
