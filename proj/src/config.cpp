#include "kawasaki/config.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "kawasaki/errors.hpp"

namespace kawasaki {

Configuration::Configuration(const Torus& torus, const std::vector<int>& sites)
    : torus_(torus), bits_((static_cast<size_t>(torus.size()) + 63) / 64, 0) {
    for (int s : sites) {
        if (s < 0 || s >= torus.size()) throw std::invalid_argument("site index out of range");
        if (occupied(s)) throw std::invalid_argument("site listed twice");
        set(s, true);
    }
    K_ = static_cast<int>(sites.size());
    energy_ = recompute_energy();
}

int Configuration::n() const {
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(K_))));
    return r * r == K_ ? r : 0;
}

int Configuration::occupied_neighbors(int idx) const {
    int c = 0;
    for (int z : torus_.neighbors(idx)) c += occupied(z);
    return c;
}

int Configuration::recompute_energy() const {
    int bonds = 0;
    for (int i = 0; i < torus_.size(); ++i) {
        if (!occupied(i)) continue;
        bonds += occupied(torus_.neighbors(i)[0]);
        bonds += occupied(torus_.neighbors(i)[1]);
    }
    return -bonds;
}

int Configuration::energy_delta(int a, int b) const {
    const auto& nb = torus_.neighbors(a);
    if (std::find(nb.begin(), nb.end(), b) == nb.end()) throw std::invalid_argument("exchange across a non-edge");
    bool oa = occupied(a), ob = occupied(b);
    if (oa == ob) return 0;
    int x = oa ? a : b, y = oa ? b : a;
    // Particle leaves x (losing its bonds) and lands on y (y sees x as a neighbour).
    return occupied_neighbors(x) - (occupied_neighbors(y) - 1);
}

void Configuration::apply_swap(int a, int b) {
    int d = energy_delta(a, b);
    bool oa = occupied(a), ob = occupied(b);
    if (oa == ob) return;
    energy_ += d;
    set(a, ob);
    set(b, oa);
}

std::vector<int> Configuration::sites() const {
    std::vector<int> out;
    out.reserve(K_);
    for (size_t w = 0; w < bits_.size(); ++w) {
        std::uint64_t v = bits_[w];
        while (v) {
            int b = __builtin_ctzll(v);
            out.push_back(static_cast<int>(w * 64 + b));
            v &= v - 1;
        }
    }
    return out;
}

std::size_t Configuration::hash() const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t w : bits_) {
        h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

void check_parameters(int n, int L) {
    if (n < 4) throw std::invalid_argument("n must be at least 4");
    if (L < 2 * n + 1) throw std::invalid_argument("L must be at least 2n+1");
    if (L > 64) throw std::invalid_argument("L must be at most 64");
}

Configuration square_config(Site x, int n, const Torus& torus) {
    check_parameters(n, torus.L());
    std::vector<int> s;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) s.push_back(torus.index(x.x + i, x.y + j));
    return Configuration(torus, s);
}

double rate(const Configuration& cfg, int a, int b, double beta) {
    if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
    return std::exp(-beta * rate_level(cfg.energy_delta(a, b)));
}

std::vector<Configuration> saddle_path(Site x, Offset dir, int n, const Torus& torus) {
    check_parameters(n, torus.L());
    if (std::abs(dir.dx) + std::abs(dir.dy) != 1) throw std::invalid_argument("direction must be a unit vector");
    Configuration start = square_config(x, n, torus);
    Configuration goal = square_config(torus.add(x, dir), n, torus);
    const int top = ground_energy(n) + 2;

    // Window: both squares grown by one site.
    int x0 = std::min(0, dir.dx) - 1, x1 = n - 1 + std::max(0, dir.dx) + 1;
    int y0 = std::min(0, dir.dy) - 1, y1 = n - 1 + std::max(0, dir.dy) + 1;
    std::vector<char> inside(torus.size(), 0);
    for (int j = y0; j <= y1; ++j)
        for (int i = x0; i <= x1; ++i) inside[torus.index(x.x + i, x.y + j)] = 1;

    // Breadth-first search over the low-energy configurations in the window.
    std::vector<Configuration> states{start};
    std::vector<int> parent{-1};
    std::unordered_map<Configuration, int, ConfigurationHash> seen{{start, 0}};
    int found = -1;
    for (size_t k = 0; k < states.size() && found < 0; ++k) {
        const Configuration cur = states[k];
        for (int s : cur.sites()) {
            for (int t : torus.neighbors(s)) {
                if (cur.occupied(t) || !inside[t]) continue;
                if (cur.energy() + cur.energy_delta(s, t) > top) continue;
                Configuration nxt = cur.swapped(s, t);
                if (seen.count(nxt)) continue;
                seen.emplace(nxt, static_cast<int>(states.size()));
                states.push_back(nxt);
                parent.push_back(static_cast<int>(k));
                if (nxt == goal) found = static_cast<int>(states.size()) - 1;
            }
        }
    }
    if (found < 0) throw ContractViolation("no low-energy path between neighbouring ground states");
    std::vector<Configuration> path;
    for (int k = found; k >= 0; k = parent[k]) path.push_back(states[k]);
    std::reverse(path.begin(), path.end());

    // Audit.
    int peak = path.front().energy();
    std::unordered_map<Configuration, int, ConfigurationHash> distinct;
    for (size_t k = 0; k < path.size(); ++k) {
        if (path[k].energy() != path[k].recompute_energy()) throw ContractViolation("path energy cache stale");
        peak = std::max(peak, path[k].energy());
        if (!distinct.emplace(path[k], 0).second) throw ContractViolation("path revisits a configuration");
        if (k == 0) continue;
        int diff = 0, a = -1, b = -1;
        for (int s = 0; s < torus.size(); ++s)
            if (path[k].occupied(s) != path[k - 1].occupied(s)) {
                ++diff;
                (a < 0 ? a : b) = s;
            }
        bool adjacent = diff == 2 && std::find(torus.neighbors(a).begin(), torus.neighbors(a).end(), b) !=
                                         torus.neighbors(a).end();
        if (!adjacent) throw ContractViolation("path step is not a single exchange");
    }
    if (!(path.front() == start) || !(path.back() == goal)) throw ContractViolation("path endpoints wrong");
    if (peak != top) throw ContractViolation("path peak differs from H_min + 2");
    return path;
}

std::string to_json(const Configuration& cfg) {
    nlohmann::json j;
    j["L"] = cfg.torus().L();
    j["n"] = cfg.n();
    j["occupied"] = cfg.sites();
    return j.dump();
}

Configuration configuration_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Torus t(j.at("L").get<int>());
    Configuration c(t, j.at("occupied").get<std::vector<int>>());
    int n = j.at("n").get<int>();
    if (n != c.n()) throw std::invalid_argument("particle count does not match n");
    return c;
}

}  // namespace kawasaki
