#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kawasaki {

struct Offset {
    int dx = 0;
    int dy = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

struct Site {
    int x = 0;
    int y = 0;
    friend bool operator==(const Site&, const Site&) = default;
    friend auto operator<=>(const Site&, const Site&) = default;
};

// Periodic L x L square lattice. Sites are addressed by flat index y*L + x.
class Torus {
public:
    explicit Torus(int L);

    int L() const { return L_; }
    int size() const { return L_ * L_; }

    int wrap(int c) const {
        int r = c % L_;
        return r < 0 ? r + L_ : r;
    }
    int index(int x, int y) const { return wrap(y) * L_ + wrap(x); }
    int index(Site s) const { return index(s.x, s.y); }
    Site site(int idx) const { return {idx % L_, idx / L_}; }

    Site add(Site s, Offset v) const { return {wrap(s.x + v.dx), wrap(s.y + v.dy)}; }
    int add(int idx, int dx, int dy) const {
        return index(idx % L_ + dx, idx / L_ + dy);
    }

    // Neighbours in the order +e1, +e2, -e1, -e2.
    const std::array<int, 4>& neighbors(int idx) const { return nbr_[idx]; }

    // Signed representative of a coordinate difference in (-L/2, L/2].
    int signed_delta(int d) const {
        int r = wrap(d);
        return r > L_ / 2 ? r - L_ : r;
    }

    std::vector<std::pair<int, int>> edges() const;

    friend bool operator==(const Torus& a, const Torus& b) { return a.L_ == b.L_; }

private:
    int L_;
    std::vector<std::array<int, 4>> nbr_;
};

inline constexpr std::array<Offset, 4> kUnit{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

// Element of D4 acting on offsets: optional reflection x -> -x, then `rot`
// quarter turns counterclockwise.
struct Dihedral {
    int rot = 0;
    bool reflect = false;

    Offset apply(Offset v) const;
    Dihedral compose(const Dihedral& inner) const;  // this after inner
    Dihedral inverse() const;
    static std::array<Dihedral, 8> all();
    friend bool operator==(const Dihedral&, const Dihedral&) = default;
};

// s -> d(s) + t, with d acting on coordinates about the origin.
struct Symmetry {
    Offset translation{};
    Dihedral dihedral{};

    Site apply(Site s, const Torus& t) const;
    int apply(int idx, const Torus& t) const;
    Symmetry compose(const Symmetry& inner, const Torus& t) const;  // this after inner
    Symmetry inverse(const Torus& t) const;

    static Symmetry translate(Offset v) { return {v, {}}; }
    // Dihedral element about an anchor site: anchor is fixed.
    static Symmetry about(Site anchor, Dihedral d);
    // Dihedral element mapping the w x h block with lower-left corner `anchor`
    // onto the block of the image shape with the same lower-left corner.
    static Symmetry fixing_block(Site anchor, int w, int h, Dihedral d);
};

}  // namespace kawasaki
