#pragma once

#include <cstdio>
#include <string>

namespace tayopt::io {

// Reals in CSV artifacts use '.' decimal and 17 significant digits so that
// values round-trip exactly through regression fixtures.
inline std::string real17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace tayopt::io
