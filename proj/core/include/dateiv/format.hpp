#pragma once

#include <string>

namespace dateiv {

// Locale-independent number rendering (std::to_chars underneath).

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

std::string format_fixed(double v, int precision);

std::string format_scientific(double v, int precision);

}  // namespace dateiv
