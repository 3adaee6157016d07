// SPDX-License-Identifier: Apache-2.0
//
// semlink run --config <file> --out <dir> [--seed N] [--parallel K]
// semlink validate-config <file> [--canonical]
// semlink profiles [--ds <ns>]
// semlink config-keys

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <thread>

#include "semlink/channel.hpp"
#include "semlink/errors.hpp"
#include "semlink/harness.hpp"

namespace {

int run(const std::string& config_path, const std::string& out_dir,
        const std::optional<std::uint64_t>& seed, unsigned parallel) {
  semlink::ExperimentConfig cfg = semlink::load_config(config_path);
  if (seed) {
    cfg.master_seed = *seed;
    cfg.validate();
  }
  const auto rows = semlink::run_sweep(cfg, parallel);
  semlink::emit_outputs(out_dir, rows, cfg);
  std::printf("%zu rows, config %s -> %s/sweep.csv\n", rows.size(),
              semlink::config_hash(cfg).c_str(), out_dir.c_str());
  return 0;
}

void print_profiles(double ds_ns) {
  if (ds_ns <= 0.0) {
    semlink::write_profile_table(std::cout);
    return;
  }
  std::printf("# model tap delay_ns power_db\n");
  for (auto m : semlink::kAllTdlModels) {
    const auto& p = semlink::tdl_profile(m);
    const auto delays = semlink::scale_delays(p, ds_ns);
    for (std::size_t i = 0; i < p.taps(); ++i) {
      std::printf("%s %zu %.4f %.4f\n", std::string(semlink::to_string(m)).c_str(), i, delays[i],
                  p.powers_db[i]);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semlink: link-level simulator for sparsified semantic features"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run an SNR sweep and write CSV/SVG outputs");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  unsigned parallel = 1;
  run_cmd->add_option("--config", config_path, "experiment config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory")->required();
  run_cmd->add_option("--seed", seed, "override master_seed");
  run_cmd->add_option("--parallel", parallel, "worker threads")
      ->check(CLI::Range(1U, 4096U));

  auto* val_cmd = app.add_subcommand("validate-config", "parse and validate a config file");
  std::string val_path;
  bool canonical = false;
  val_cmd->add_option("config", val_path, "experiment config file")->required();
  val_cmd->add_flag("--canonical", canonical, "print the canonical form");

  auto* prof_cmd = app.add_subcommand("profiles", "dump the TDL power-delay profiles");
  double ds_ns = 0.0;
  prof_cmd->add_option("--ds", ds_ns, "also scale delays to this RMS delay spread (ns)");

  app.add_subcommand("config-keys", "list every config key with its default");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(config_path, out_dir, seed, parallel);
    if (*val_cmd) {
      const auto cfg = semlink::load_config(val_path);
      if (canonical) {
        std::cout << semlink::canonical_config(cfg);
      } else {
        std::printf("ok %s\n", semlink::config_hash(cfg).c_str());
      }
      return 0;
    }
    if (*prof_cmd) {
      print_profiles(ds_ns);
      return 0;
    }
    semlink::write_config_reference(std::cout);
    return 0;
  } catch (const semlink::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
