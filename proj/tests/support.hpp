#pragma once
#include <algorithm>

#include "kawasaki/config.hpp"

// Moves the particle at `from` to the empty site `to`, anywhere on the torus.
inline kawasaki::Configuration moved(const kawasaki::Configuration& c, int from, int to) {
    auto s = c.sites();
    *std::find(s.begin(), s.end(), from) = to;
    return kawasaki::Configuration(c.torus(), s);
}
