#include "kawasaki/lattice.hpp"

#include <algorithm>

namespace kawasaki {

Torus::Torus(int L) : L_(L) {
    if (L < 2) throw std::invalid_argument("torus side must be at least 2");
    nbr_.resize(static_cast<size_t>(L) * L);
    for (int i = 0; i < L * L; ++i) {
        int x = i % L, y = i / L;
        nbr_[i] = {index(x + 1, y), index(x, y + 1), index(x - 1, y), index(x, y - 1)};
    }
}

std::vector<std::pair<int, int>> Torus::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(2 * size());
    for (int i = 0; i < size(); ++i) {
        out.emplace_back(i, nbr_[i][0]);
        out.emplace_back(i, nbr_[i][1]);
    }
    return out;
}

Offset Dihedral::apply(Offset v) const {
    if (reflect) v.dx = -v.dx;
    for (int k = 0; k < rot; ++k) v = {-v.dy, v.dx};
    return v;
}

// Elements are R^rot F^reflect; F R = R^-1 F.
Dihedral Dihedral::compose(const Dihedral& in) const {
    int r = reflect ? (rot - in.rot) : (rot + in.rot);
    return {((r % 4) + 4) % 4, reflect != in.reflect};
}

Dihedral Dihedral::inverse() const {
    if (reflect) return *this;
    return {(4 - rot) % 4, false};
}

std::array<Dihedral, 8> Dihedral::all() {
    std::array<Dihedral, 8> out{};
    for (int k = 0; k < 8; ++k) out[k] = {k % 4, k >= 4};
    return out;
}

Site Symmetry::apply(Site s, const Torus& t) const {
    Offset v = dihedral.apply({s.x, s.y});
    return t.add(Site{0, 0}, {v.dx + translation.dx, v.dy + translation.dy});
}

int Symmetry::apply(int idx, const Torus& t) const { return t.index(apply(t.site(idx), t)); }

Symmetry Symmetry::compose(const Symmetry& in, const Torus& t) const {
    Offset dt = dihedral.apply(in.translation);
    Offset tr{t.wrap(dt.dx + translation.dx), t.wrap(dt.dy + translation.dy)};
    return {tr, dihedral.compose(in.dihedral)};
}

Symmetry Symmetry::inverse(const Torus& t) const {
    Dihedral di = dihedral.inverse();
    Offset v = di.apply(translation);
    return {{t.wrap(-v.dx), t.wrap(-v.dy)}, di};
}

Symmetry Symmetry::about(Site a, Dihedral d) {
    Offset v = d.apply({a.x, a.y});
    return {{a.x - v.dx, a.y - v.dy}, d};
}

Symmetry Symmetry::fixing_block(Site a, int w, int h, Dihedral d) {
    int mx = 1 << 30, my = 1 << 30;
    for (Offset c : {Offset{0, 0}, Offset{w - 1, 0}, Offset{0, h - 1}, Offset{w - 1, h - 1}}) {
        Offset v = d.apply(c);
        mx = std::min(mx, v.dx);
        my = std::min(my, v.dy);
    }
    Offset va = d.apply({a.x, a.y});
    // image of a + c is d(a) + d(c); shift so the image block starts at a.
    return {{a.x - va.dx - mx, a.y - va.dy - my}, d};
}

}  // namespace kawasaki
