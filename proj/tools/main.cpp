#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace flatspace;
using namespace flatspace::cli;

namespace {

constexpr const char* kJobsEnv = "FLATSPACE_JOBS";

unsigned default_jobs() {
  if (const char* env = std::getenv(kJobsEnv); env && *env) {
    try {
      std::size_t used = 0;
      const long v = std::stol(env, &used);
      if (used == std::string(env).size() && v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError(kJobsEnv, std::string("expected a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite metric experiments on compact groups, quotients and Wasserstein towers"};
  app.require_subcommand(1);

  Options opts;
  std::string config, out = ".";
  std::uint64_t seed = 0;
  std::size_t cap = 0;
  unsigned jobs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "random seed (overrides the config)");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--cap", cap, "atom cap per tower level")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", jobs, std::string("worker threads (default: $") + kJobsEnv + " or all cores)")
        ->check(CLI::PositiveNumber);
  };
  auto* distance = app.add_subcommand("distance", "pairwise distances under a chosen space");
  auto* tower = app.add_subcommand("tower", "distortion sweep of the lifting tower");
  auto* markov = app.add_subcommand("markov", "markov type 2 inequality over random chains");
  auto* selftest = app.add_subcommand("selftest", "quick invariant checks");
  for (auto* sub : {distance, tower, markov, selftest}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kSuccess : kConfigError;
  }

  auto* sub = app.get_subcommands().front();
  try {
    if (!config.empty()) opts.config = config;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--cap")) opts.cap = cap;
    opts.out = out;
    opts.jobs = sub->count("--jobs") ? jobs : default_jobs();

    if (sub == distance) return cmd_distance(opts);
    if (sub == tower) return cmd_tower(opts);
    if (sub == markov) return cmd_markov(opts);
    return cmd_selftest(opts);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kCheckFailed;
  }
}
