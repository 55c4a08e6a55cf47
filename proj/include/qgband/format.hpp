#pragma once

#include <string>

namespace qgband {

/// Fixed 12-significant-digit rendering used by all CSV/stdout numerics so
/// repeated runs produce byte-identical artifacts.
std::string format_g12(double x);

}  // namespace qgband
