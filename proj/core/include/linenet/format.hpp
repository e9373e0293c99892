#pragma once

#include <cstdio>
#include <string>

namespace linenet {

// Shortest round-trip-safe rendering used by every text artifact.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace linenet
