#include "textmountain/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace textmountain {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TM_WORKERS")) {
    int value = 0;
    const auto* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value > 0) return value;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

}  // namespace textmountain
