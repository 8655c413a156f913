#include "kawasaki/closed_forms.hpp"

#include <stdexcept>

#include "kawasaki/elementary.hpp"
#include "kawasaki/valleys.hpp"

namespace kawasaki::closed {

namespace {

std::vector<Site> top_band(int n) {
    std::vector<Site> s;
    for (int a = 0; a <= n - 2; ++a) s.push_back({a, n});
    return s;
}

std::vector<Site> right_band(int n) {
    std::vector<Site> s;
    for (int b = 0; b <= n - 2; ++b) s.push_back({n, b});
    return s;
}

}  // namespace

GroundInputs ground_inputs(int n, int L) {
    check_parameters(n, L);
    GroundInputs g;
    g.q = q_corner(n);
    RProbs r = r_probs(n);
    g.r = r.total;
    g.r_minus = r.minus;
    g.A_e1 = p_of_A(n, L, {{n, n - 1}});
    g.A_e2 = p_of_A(n, L, {{n - 1, n}});
    g.A1 = p_of_A(n, L, right_band(n));
    g.A2 = p_of_A(n, L, top_band(n));
    return g;
}

GroundMasses ground_masses(int n, int L) {
    GroundInputs g = ground_inputs(n, L);
    double c = 4 + g.q + g.r;
    double sum = (1 + g.r_minus + g.A1 + g.A2) / (c - g.A_e1 - g.A_e2);
    double diff = (1 + g.r_minus + g.A2 - g.A1) / (c + g.A_e1 - g.A_e2);
    GroundMasses m;
    m.ground = 1.0 / (c - g.A_e1 - g.A_e2);
    m.m1_band = 0.5 * (sum + diff);
    m.m2_band = 0.5 * (sum - diff);
    return m;
}

double z_corner_band_22(int n, int L, double detached_corner_term) {
    GroundInputs g = ground_inputs(n, L);
    GroundMasses m = ground_masses(n, L);
    std::vector<Site> jstar{{-1, n}};
    for (int a = 0; a <= n - 2; ++a) jstar.push_back({a, n + 1});
    double z = 1 + detached_corner_term + (1 + g.r_minus) * (1 - m.m1_band);
    for (Site s : jstar)
        z += (1 - torus_hit(n, L, s, top_band(n))) - torus_hit(n, L, s, {{n - 1, n}}) * m.m1_band -
             torus_hit(n, L, s, {{n, n - 1}}) * m.m2_band;
    return z;
}

double z_rect_band_s0(int n, int L) {
    check_parameters(n, L);
    Torus t(L);
    // Outer boundary of the standing rectangle {0..n-2} x {0..n}.
    std::vector<Site> G, bottom;
    for (int a = 0; a <= n - 2; ++a) {
        G.push_back(t.site(t.index(a, -1)));
        bottom.push_back(G.back());
        G.push_back({a, n + 1});
    }
    for (int b = 0; b <= n; ++b) {
        G.push_back(t.site(t.index(-1, b)));
        G.push_back({n - 1, b});
    }
    std::vector<Site> J2{t.site(t.index(-1, -1)), t.site(t.index(n - 1, -1))};
    for (int a = 0; a <= n - 2; ++a) J2.push_back(t.site(t.index(a, -2)));
    double z = 2.0 / (n + 1);
    for (Site y : J2) z += 1 - torus_hit(n, L, y, bottom, G);
    return z;
}

double z_perimeter(int n, Orientation a, const SideVector& v) {
    auto len = side_lengths(n, 1, a);
    auto M = side_multiplicities(v);
    double z = 0;
    for (int i = 0; i < 4; ++i) {
        int prev = (i + 3) % 4, next = (i + 1) % 4;
        bool minus = v.k[i] >= 2 || (v.k[i] == 1 && v.l[prev] == len[prev]);
        bool plus = v.l[i] <= len[i] - 1 || (v.l[i] == len[i] && v.k[next] == 1);
        if (M[i] > 2) {
            z += (minus + plus) / static_cast<double>(M[i]);
        } else if (M[i] == 2) {
            int lo = 1 - (v.l[prev] == len[prev] ? 1 : 0);
            int hi = len[i] + (v.k[next] <= 1 ? 1 : 0);
            if (minus) z += 1 - m_interval(lo, hi, v.k[i] - 1, v.k[i]);
            if (plus) z += 1 - m_interval(lo, hi, v.k[i], v.k[i]);
        } else {
            throw std::invalid_argument("side vector outside the starred set");
        }
    }
    return z;
}

}  // namespace kawasaki::closed
