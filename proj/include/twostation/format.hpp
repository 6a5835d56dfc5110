#pragma once

#include <cstdio>
#include <string>

namespace twostation {

// Round-trip float formatting used by every CSV/JSON surface: 17 significant
// digits reproduce the exact double on parse.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace twostation
