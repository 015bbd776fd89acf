#pragma once

#include <string>

#include <fmt/format.h>

namespace cobalt {

// Round-trippable decimal rendering used in every CSV we write.
inline std::string format_number(double x) { return fmt::format("{:.17g}", x); }

}  // namespace cobalt
