// hcps: learn a driver abstraction, synthesize a shared-control strategy,
// validate it in co-simulation and refine.

#include <CLI11.hpp>

#include "commands.hpp"

using hcps::cli::RunConfig;

namespace {

void common(CLI::App* app, RunConfig& cfg, bool needs_out) {
  app->add_option("--scenario", cfg.scenario_path, "scenario file (default: built-in braking scenario)")
      ->check(CLI::ExistingFile);
  app->add_option("--driver", cfg.driver_path, "driver parameter file")->check(CLI::ExistingFile);
  auto* out = app->add_option("--out", cfg.out, "output directory (must be new or empty)");
  if (needs_out) out->required();
  app->add_option("--seed", cfg.seed, "run seed")->capture_default_str();
  app->add_option("--variant", cfg.variant, "controllable action set")
      ->check(CLI::IsMember({"full", "no-override", "advisory-only"}))
      ->capture_default_str();
  app->add_option("--state-cap", cfg.state_cap, "arena state cap")->capture_default_str();
}

void oracle(CLI::App* app, RunConfig& cfg) {
  app->add_option("--oracle-walks", cfg.oracle.num_walks, "random walks per equivalence query")
      ->capture_default_str();
  app->add_option("--oracle-len", cfg.oracle.max_walk_len, "maximum walk length")
      ->capture_default_str();
  app->add_option("--oracle-reset-prob", cfg.oracle.reset_prob, "per-step reset probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--max-rounds", cfg.max_rounds, "L* round cap")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-model learning and shared-control synthesis toolchain"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* learn = app.add_subcommand("learn", "learn the driver abstraction HM");
  common(learn, cfg, true);
  oracle(learn, cfg);
  learn->add_option("--max-states", cfg.max_states, "stop closing the table at this many states (0 = off)");

  auto* synth = app.add_subcommand("synth", "build the game arena and synthesize a strategy");
  common(synth, cfg, true);
  synth->add_option("--hm", cfg.hm_path, "learned HM (hm.mealy)")->required();

  auto* validate = app.add_subcommand("validate", "co-simulate a strategy against the full driver");
  common(validate, cfg, true);
  validate->add_option("--hm", cfg.hm_path, "learned HM (hm.mealy)")->required();
  validate->add_option("--strategy", cfg.strategy_path, "strategy.txt");
  validate->add_option("--policy", cfg.policy, "strategy, or the always-Nominal baseline")
      ->check(CLI::IsMember({"strategy", "nominal"}))
      ->capture_default_str();
  validate->add_option("--runs", cfg.runs, "seeded runs")->capture_default_str();

  auto* refine = app.add_subcommand("refine", "run the learn/synthesize/validate/refine loop");
  common(refine, cfg, true);
  oracle(refine, cfg);
  refine->add_option("--max-iter", cfg.max_iterations, "iteration cap")->capture_default_str();
  refine->add_option("--runs", cfg.runs, "seeded runs per iteration")->capture_default_str();
  refine->add_option("--max-states", cfg.max_states, "state budget of the first HM (0 = off)");
  refine->add_option("--expand-variant", cfg.expand_variant, "variant to retry with when unrealizable")
      ->check(CLI::IsMember({"full", "no-override", "advisory-only"}));

  auto* demo = app.add_subcommand("demo", "one full loop with a console trace");
  common(demo, cfg, false);
  oracle(demo, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hcps::cli::kUsage;
  }

  if (*learn) return hcps::cli::cmd_learn(cfg);
  if (*synth) return hcps::cli::cmd_synth(cfg);
  if (*validate) return hcps::cli::cmd_validate(cfg);
  if (*refine) return hcps::cli::cmd_refine(cfg);
  return hcps::cli::cmd_demo(cfg);
}
