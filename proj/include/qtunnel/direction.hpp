#pragma once

#include <string>
#include <stdexcept>

namespace qtunnel {

enum class Direction { up, down };

inline const char* to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

inline Direction direction_from_string(const std::string& s) {
    if (s == "up") return Direction::up;
    if (s == "down") return Direction::down;
    throw std::invalid_argument("direction must be 'up' or 'down', got '" + s + "'");
}

}  // namespace qtunnel
