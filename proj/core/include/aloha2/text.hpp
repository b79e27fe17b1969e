#pragma once

#include <string>
#include <string_view>

namespace aloha2 {

// Shortest decimal representation that round-trips to the same double
// (std::to_chars); "inf"/"nan" spelled in lowercase.
std::string format_double(double v);

// Parses a plain decimal ("0.4") or a fraction ("2/3").
// Throws std::invalid_argument on malformed input.
double parse_real(std::string_view text);

}  // namespace aloha2
