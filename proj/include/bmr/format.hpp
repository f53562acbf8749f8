#pragma once

#include <string>

namespace bmr {

// Shortest %.17g rendering; round-trips a double exactly through strtod,
// which keeps chain dumps and re-summarization bit-stable.
std::string format_double(double x);

}  // namespace bmr
