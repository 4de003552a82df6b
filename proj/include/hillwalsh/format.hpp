#pragma once

#include <string>

namespace hillwalsh {

/// 12 significant digits, locale independent ("nan"/"inf" for non-finite).
std::string format_number(double value);

/// Shortest decimal that round-trips.
std::string format_shortest(double value);

}  // namespace hillwalsh
