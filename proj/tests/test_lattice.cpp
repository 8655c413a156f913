#include <doctest.h>

#include <random>
#include <set>

#include "kawasaki/lattice.hpp"

using namespace kawasaki;

TEST_CASE("torus addition wraps in both directions") {
    CHECK(Torus(9).add(Site{8, 8}, Offset{1, 1}) == Site{0, 0});
    CHECK(Torus(9).add(Site{3, 4}, Offset{0, 0}) == Site{3, 4});
    CHECK(Torus(12).add(Site{0, 0}, Offset{-1, 0}) == Site{11, 0});
    Torus t(12);
    CHECK(t.site(t.index(5, 7)) == Site{5, 7});
    CHECK(t.index(5, 7) == 7 * 12 + 5);
}

TEST_CASE("edge set has 2L^2 edges and is 4-regular") {
    CHECK(Torus(3).edges().size() == 18);
    CHECK(Torus(9).edges().size() == 162);
    for (int L = 2; L <= 64; ++L) {
        Torus t(L);
        auto e = t.edges();
        CHECK(e.size() == static_cast<size_t>(2 * L * L));
        std::vector<int> deg(t.size(), 0);
        std::set<std::pair<int, int>> seen;
        for (auto [a, b] : e) {
            ++deg[a];
            ++deg[b];
            seen.insert({std::min(a, b), std::max(a, b)});
        }
        if (L > 2) CHECK(seen.size() == e.size());  // L = 2 has parallel edges
        for (int d : deg) CHECK(d == 4);
    }
}

TEST_CASE("neighbour order is +e1, +e2, -e1, -e2") {
    Torus t(7);
    int s = t.index(0, 0);
    auto nb = t.neighbors(s);
    CHECK(nb[0] == t.index(1, 0));
    CHECK(nb[1] == t.index(0, 1));
    CHECK(nb[2] == t.index(6, 0));
    CHECK(nb[3] == t.index(0, 6));
}

TEST_CASE("symmetries: identity, translation, rotation order") {
    Torus t(12);
    Symmetry id{};
    for (int s = 0; s < t.size(); ++s) CHECK(id.apply(s, t) == s);
    CHECK(Symmetry::translate({1, 0}).apply(Site{11, 0}, t) == Site{0, 0});
    Symmetry r = Symmetry::about({0, 0}, Dihedral{1, false});
    for (int s = 0; s < t.size(); ++s) {
        int x = s;
        for (int k = 0; k < 4; ++k) x = r.apply(x, t);
        CHECK(x == s);
    }
}

TEST_CASE("symmetry composition matches sequential application") {
    Torus t(11);
    std::mt19937_64 g(5);
    std::uniform_int_distribution<int> c(0, 10), r(0, 3), f(0, 1);
    for (int k = 0; k < 2000; ++k) {
        Symmetry a{{c(g), c(g)}, {r(g), f(g) == 1}};
        Symmetry b{{c(g), c(g)}, {r(g), f(g) == 1}};
        int s = c(g) * 11 + c(g);
        CHECK(a.compose(b, t).apply(s, t) == a.apply(b.apply(s, t), t));
        CHECK(a.inverse(t).apply(a.apply(s, t), t) == s);
    }
}

TEST_CASE("dihedral group closes and has eight elements") {
    auto all = Dihedral::all();
    for (auto& a : all)
        for (auto& b : all) {
            auto c = a.compose(b);
            CHECK(std::find(all.begin(), all.end(), c) != all.end());
        }
    for (auto& a : all) CHECK(a.compose(a.inverse()) == Dihedral{});
}

TEST_CASE("block-fixing symmetries map a square block onto itself") {
    Torus t(12);
    for (int w : {3, 4, 5})
        for (auto d : Dihedral::all()) {
            Site anchor{3, 2};
            Symmetry s = Symmetry::fixing_block(anchor, w, w, d);
            std::set<int> in, out;
            for (int y = 0; y < w; ++y)
                for (int x = 0; x < w; ++x) {
                    in.insert(t.index(anchor.x + x, anchor.y + y));
                    out.insert(s.apply(t.index(anchor.x + x, anchor.y + y), t));
                }
            CHECK(in == out);
        }
}
