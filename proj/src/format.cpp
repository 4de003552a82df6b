#include "hillwalsh/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace hillwalsh {

namespace {

template <typename... Args>
std::string to_chars_string(double value, Args... args) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, args...);
    return std::string(buf.data(), end);
}

}  // namespace

std::string format_number(double value) {
    return to_chars_string(value, std::chars_format::general, 12);
}

std::string format_shortest(double value) { return to_chars_string(value); }

}  // namespace hillwalsh
