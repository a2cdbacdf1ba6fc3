#pragma once

#include <string>

namespace stigmergy {

// Shortest decimal text that parses back to exactly the same double.
std::string format_real(double value);

}  // namespace stigmergy
