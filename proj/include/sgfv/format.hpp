#pragma once

#include <string>

namespace sgfv {

/// Shortest round-trip-safe text form used in every output file (17 significant digits).
std::string format_real(double v);

}  // namespace sgfv
