#include "stigmergy/format.hpp"

#include <array>
#include <charconv>

namespace stigmergy {

std::string format_real(double value) {
  std::array<char, 32> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return {buffer.data(), result.ptr};
}

}  // namespace stigmergy
