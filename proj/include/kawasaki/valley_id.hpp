#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "kawasaki/lattice.hpp"

namespace kawasaki {

enum class Family : std::uint8_t { Ground, CornerBand, RectBand, Perimeter, WideRect };
enum class Orientation : std::uint8_t { Standing, Lying };

// Side occupation ranges [k_i, l_i], i = 0 bottom, 1 right, 2 top, 3 left.
struct SideVector {
    std::array<int, 4> k{};
    std::array<int, 4> l{};
    friend bool operator==(const SideVector&, const SideVector&) = default;
    friend auto operator<=>(const SideVector&, const SideVector&) = default;
};

// Identifier of one valley. Unused fields stay zero so that comparison and
// hashing are plain member-wise.
struct ValleyId {
    Family family = Family::Ground;
    Site anchor{};
    int corner = 0;  // CornerBand
    int side = 0;    // CornerBand, RectBand
    Orientation orient = Orientation::Standing;  // RectBand, Perimeter, WideRect
    SideVector sv{};                              // Perimeter, WideRect

    static ValleyId ground(Site x) { return {Family::Ground, x}; }
    static ValleyId corner_band(Site x, int i, int j) { return {Family::CornerBand, x, i, j}; }
    static ValleyId rect_band(Site x, Orientation a, int j) {
        return {Family::RectBand, x, 0, j, a};
    }
    static ValleyId perimeter(Site x, Orientation a, const SideVector& v) {
        return {Family::Perimeter, x, 0, 0, a, v};
    }
    static ValleyId wide_rect(Site x, Orientation a, const SideVector& v) {
        return {Family::WideRect, x, 0, 0, a, v};
    }

    ValleyId at(Site x) const {
        ValleyId v = *this;
        v.anchor = x;
        return v;
    }
    bool is_ground() const { return family == Family::Ground; }

    std::string str() const;

    friend bool operator==(const ValleyId&, const ValleyId&) = default;
    friend auto operator<=>(const ValleyId&, const ValleyId&) = default;
};

const char* family_name(Family f);

struct ValleyIdHash {
    std::size_t operator()(const ValleyId& v) const {
        std::size_t h = static_cast<std::size_t>(v.family);
        auto mix = [&h](long long x) { h = h * 1000003u ^ std::hash<long long>{}(x); };
        mix(v.anchor.x);
        mix(v.anchor.y);
        mix(v.corner);
        mix(v.side);
        mix(static_cast<int>(v.orient));
        for (int i = 0; i < 4; ++i) {
            mix(v.sv.k[i]);
            mix(v.sv.l[i]);
        }
        return h;
    }
};

}  // namespace kawasaki
