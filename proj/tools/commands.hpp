#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "flatspace/serialization.hpp"

namespace flatspace::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailed = 1, kConfigError = 2 };

/// Flag values; a set flag overrides the matching config field.
struct Options {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  std::optional<std::size_t> cap;
  unsigned jobs = 1;
};

json load_config(const Options& opts);

int cmd_distance(const Options& opts);
int cmd_tower(const Options& opts);
int cmd_markov(const Options& opts);
int cmd_selftest(const Options& opts);

}  // namespace flatspace::cli
