#include "vtriage/error.hpp"

namespace vtriage {

ParseError::ParseError(const std::string& what, std::size_t byte_offset)
    : ValidationError(what + " (at byte " + std::to_string(byte_offset) + ")"),
      byte_offset_(byte_offset) {}

}  // namespace vtriage
