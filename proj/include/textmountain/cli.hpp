#pragma once

#include "textmountain/detect.hpp"
#include "textmountain/grouping.hpp"
#include "textmountain/loss.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace textmountain {

/// Settings shared by the subcommands.
struct RunConfig {
  GroupConfig group;
  LossWeights weights;
  PolygonMode mode = PolygonMode::Auto;
  int workers = 0;  // 0: TM_WORKERS or hardware concurrency
  std::uint32_t seed = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace textmountain
