#pragma once

#include <cstdio>
#include <string>

namespace etcone {

// Shortest %.17g rendering: round-trips every double in machine output.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace etcone
