#include "kawasaki/elementary.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "kawasaki/errors.hpp"

namespace kawasaki {

std::vector<Site> square_outer_boundary(int n, const Torus& t) {
    std::vector<Site> g;
    for (int a = 0; a < n; ++a) {
        g.push_back(t.site(t.index(a, -1)));
        g.push_back(t.site(t.index(n, a)));
        g.push_back(t.site(t.index(a, n)));
        g.push_back(t.site(t.index(-1, a)));
    }
    return g;
}

namespace {

// Harmonic measure of G for every start site, memoized per (L, G).
struct HarmonicMeasure {
    std::vector<int> col;  // site -> column of G, -1 otherwise
    Eigen::MatrixXd H;     // site x |G|
};

std::mutex g_hm_mutex;
std::map<std::pair<int, std::vector<int>>, std::shared_ptr<const HarmonicMeasure>> g_hm;

std::shared_ptr<const HarmonicMeasure> harmonic_measure(const Torus& t, std::vector<int> G) {
    std::sort(G.begin(), G.end());
    G.erase(std::unique(G.begin(), G.end()), G.end());
    std::lock_guard<std::mutex> lock(g_hm_mutex);
    auto key = std::make_pair(t.L(), G);
    auto it = g_hm.find(key);
    if (it != g_hm.end()) return it->second;
    FiniteChain walk(t.size());
    for (int s = 0; s < t.size(); ++s)
        for (int z : t.neighbors(s)) walk.add_rate(s, z, 1.0);
    std::vector<std::vector<int>> parts;
    auto hm = std::make_shared<HarmonicMeasure>();
    hm->col.assign(t.size(), -1);
    for (int k = 0; k < static_cast<int>(G.size()); ++k) {
        parts.push_back({G[k]});
        hm->col[G[k]] = k;
    }
    hm->H = absorption_matrix(walk, parts);
    g_hm.emplace(key, hm);
    return hm;
}

}  // namespace

double torus_hit(int n, int L, Site start, const std::vector<Site>& targets, const std::vector<Site>& G) {
    Torus t(L);
    std::vector<int> g;
    for (Site s : G.empty() ? square_outer_boundary(n, t) : G) g.push_back(t.index(s));
    if (g.empty()) throw std::invalid_argument("empty absorbing set");
    auto hm = harmonic_measure(t, g);
    int s0 = t.index(start);
    double p = 0;
    std::vector<int> seen;
    for (Site z : targets) {
        int zi = t.index(z);
        if (std::find(seen.begin(), seen.end(), zi) != seen.end()) continue;
        seen.push_back(zi);
        int c = hm->col[zi];
        if (c < 0) throw std::invalid_argument("target outside the absorbing set");
        p += hm->H(s0, c);
    }
    return p;
}

double p_of_A(int n, int L, const std::vector<Site>& A) {
    if (A.empty()) return 0.0;
    Site s1{n - 1, n + 1}, s2{n, n};
    return torus_hit(n, L, s1, A) + torus_hit(n, L, s2, A);
}

namespace {

FiniteChain grid_walk(const std::vector<std::pair<int, int>>& states) {
    FiniteChain c(static_cast<int>(states.size()));
    for (int a = 0; a < c.size(); ++a)
        for (int b = 0; b < c.size(); ++b) {
            int d = std::abs(states[a].first - states[b].first) + std::abs(states[a].second - states[b].second);
            if (d == 1) c.add_rate(a, b, 1.0);
        }
    return c;
}

int find_state(const std::vector<std::pair<int, int>>& s, int a, int b) {
    auto it = std::find(s.begin(), s.end(), std::make_pair(a, b));
    if (it == s.end()) throw std::logic_error("state missing");
    return static_cast<int>(it - s.begin());
}

}  // namespace

FiniteChain corner_chain(int n, std::vector<std::pair<int, int>>* states) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    std::vector<std::pair<int, int>> s{{0, 0}};
    for (int k = 1; k < n; ++k)
        for (int j = 0; j < k; ++j) s.emplace_back(j, k);
    if (states) *states = s;
    return grid_walk(s);
}

FiniteChain hole_particle_chain(int n, bool with_extra, std::vector<std::pair<int, int>>* states) {
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    std::vector<std::pair<int, int>> s;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) s.emplace_back(j, k);
    FiniteChain base = grid_walk(s);
    if (!with_extra) {
        if (states) *states = s;
        return base;
    }
    FiniteChain c(static_cast<int>(s.size()) + 1);
    for (int a = 0; a < base.size(); ++a)
        for (auto& [b, r] : base.out(a)) c.add_rate(a, b, r);
    int d = c.size() - 1, e = find_state(s, 1, 1);
    c.add_rate(e, d, 1.0);
    c.add_rate(d, e, 1.0);
    s.emplace_back(-1, -1);
    if (states) *states = s;
    return c;
}

double q_corner(int n) {
    std::vector<std::pair<int, int>> s;
    FiniteChain c = corner_chain(n, &s);
    std::vector<int> top;
    for (int j = 0; j < n - 1; ++j) top.push_back(find_state(s, j, n - 1));
    auto d = absorption_distribution(c, find_state(s, 0, 1), {top, {find_state(s, 0, 0)}});
    return d[0];
}

RProbs r_probs(int n, bool with_extra) {
    std::vector<std::pair<int, int>> s;
    FiniteChain c = hole_particle_chain(n, with_extra, &s);
    std::vector<int> plus, minus;
    for (int j = 0; j < n; ++j) plus.push_back(find_state(s, j, n - 1));
    for (int j = 1; j < n; ++j) minus.push_back(find_state(s, j, 0));
    std::vector<std::vector<int>> parts{plus, minus, {find_state(s, 0, 0)}};
    Eigen::MatrixXd H = absorption_matrix(c, parts);
    RProbs r;
    int start = find_state(s, 0, 1);
    r.plus = H(start, 0);
    r.minus = H(start, 1);
    r.total = r.plus + r.minus;
    for (int k = 0; k < n; ++k) r.zero.push_back(H(find_state(s, k, 1), 2));
    return r;
}

double m_interval(int m, int M, int a, int b) {
    if (M - m < 2) throw std::invalid_argument("interval too short");
    if (a < m || a + 2 > M || b < m || b + 1 > M) throw std::invalid_argument("interval parameters out of range");
    int W = M - m + 1;
    auto id = [&](int u, int v) { return (u - m) * W + (v - m); };
    FiniteChain c(W * W);
    std::vector<int> target, other;
    for (int u = m; u <= M; ++u)
        for (int v = m; v <= M; ++v) {
            if (std::abs(u - v) == 1) {
                (u == b && v == b + 1 ? target : other).push_back(id(u, v));
                continue;
            }
            for (int d : {-1, 1}) {
                if (u + d >= m && u + d <= M) c.add_rate(id(u, v), id(u + d, v), 1.0);
                if (v + d >= m && v + d <= M) c.add_rate(id(u, v), id(u, v + d), 1.0);
            }
        }
    return absorption_distribution(c, id(a, a + 2), {target, other})[0];
}

}  // namespace kawasaki
