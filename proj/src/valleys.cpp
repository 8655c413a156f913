#include "kawasaki/valleys.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <set>
#include <sstream>

#include "kawasaki/chains.hpp"
#include "kawasaki/errors.hpp"

namespace kawasaki {

const char* family_name(Family f) {
    switch (f) {
        case Family::Ground: return "Ground";
        case Family::CornerBand: return "CornerBand";
        case Family::RectBand: return "RectBand";
        case Family::Perimeter: return "Perimeter";
        case Family::WideRect: return "WideRect";
    }
    return "?";
}

std::string ValleyId::str() const {
    std::ostringstream os;
    os << family_name(family) << "(" << anchor.x << "," << anchor.y;
    const char* o = orient == Orientation::Standing ? "s" : "l";
    switch (family) {
        case Family::Ground: break;
        case Family::CornerBand: os << ";i=" << corner << ",j=" << side; break;
        case Family::RectBand: os << ";" << o << ",j=" << side; break;
        case Family::Perimeter:
        case Family::WideRect:
            os << ";" << o << ";";
            for (int i = 0; i < 4; ++i) os << (i ? "," : "") << sv.k[i] << ":" << sv.l[i];
            break;
    }
    os << ")";
    return os.str();
}

// ---------------------------------------------------------------- geometry

Offset corner_offset(int n, int i) {
    switch (((i % 4) + 4) % 4) {
        case 0: return {0, 0};
        case 1: return {n - 1, 0};
        case 2: return {n - 1, n - 1};
        default: return {0, n - 1};
    }
}

std::array<int, 4> side_lengths(int n, int generation, Orientation a) {
    // Width W and height H of the inner rectangle; sides alternate W, H.
    int W, H;
    if (generation == 1) {
        W = a == Orientation::Standing ? n - 2 : n - 1;
        H = a == Orientation::Standing ? n - 1 : n - 2;
    } else {
        W = a == Orientation::Standing ? n - 3 : n;
        H = a == Orientation::Standing ? n : n - 3;
    }
    return {W, H, W, H};
}

std::array<int, 4> side_multiplicities(const SideVector& v) {
    std::array<int, 4> m{};
    for (int i = 0; i < 4; ++i) m[i] = v.l[i] - v.k[i] + 1 + (v.k[(i + 1) % 4] == 0 ? 1 : 0);
    return m;
}

std::vector<SideVector> side_vectors(int n, int generation, Orientation a, bool starred) {
    auto len = side_lengths(n, generation, a);
    int inner = len[0] * len[1];
    int need = n * n - inner;
    std::vector<SideVector> out;
    SideVector v;
    // Depth-first over sides with a running particle count.
    auto rec = [&](auto&& self, int i, int used) -> void {
        if (i == 4) {
            if (used != need) return;
            for (int j = 0; j < 4; ++j)
                if (v.k[j] == 0 && v.l[(j + 3) % 4] != len[(j + 3) % 4]) return;
            if (starred) {
                auto m = side_multiplicities(v);
                for (int j = 0; j < 4; ++j)
                    if (m[j] < 2) return;
            }
            out.push_back(v);
            return;
        }
        for (int k = 0; k <= len[i]; ++k)
            for (int l = k; l <= len[i]; ++l) {
                int c = l - k + 1;
                if (used + c > need) break;
                v.k[i] = k;
                v.l[i] = l;
                self(self, i + 1, used + c);
            }
    };
    rec(rec, 0, 0);
    return out;
}

std::vector<Offset> decorated_rectangle(int n, int generation, Orientation a, const SideVector& v) {
    auto len = side_lengths(n, generation, a);
    int W = len[0], H = len[1];
    std::vector<Offset> s;
    for (int y = 1; y <= H; ++y)
        for (int x = 1; x <= W; ++x) s.push_back({x, y});
    for (int t = v.k[0]; t <= v.l[0]; ++t) s.push_back({t, 0});
    for (int t = v.k[1]; t <= v.l[1]; ++t) s.push_back({W + 1, t});
    for (int t = v.k[2]; t <= v.l[2]; ++t) s.push_back({W + 1 - t, H + 1});
    for (int t = v.k[3]; t <= v.l[3]; ++t) s.push_back({0, H + 1 - t});
    return s;
}

namespace {

std::vector<Offset> block(int x0, int y0, int w, int h) {
    std::vector<Offset> s;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) s.push_back({x0 + x, y0 + y});
    return s;
}

bool contains(const std::vector<Offset>& s, Offset p) { return std::find(s.begin(), s.end(), p) != s.end(); }

// Sites outside `shape` and outside `exclude` that touch `shape` across side j.
std::vector<Offset> outer_side(const std::vector<Offset>& shape, const std::vector<Offset>& exclude, int j) {
    Offset d = side_normal(j);
    std::vector<Offset> out;
    for (Offset y : shape) {
        Offset z{y.dx + d.dx, y.dy + d.dy};
        if (contains(shape, z) || contains(exclude, z) || contains(out, z)) continue;
        out.push_back(z);
    }
    return out;
}

// Normalized shape key: offsets relative to the lower-left corner of the
// bounding box, sorted, packed into bytes.
std::string shape_key(std::vector<Offset> s, Offset* min_corner) {
    int mx = 1 << 30, my = 1 << 30;
    for (Offset o : s) {
        mx = std::min(mx, o.dx);
        my = std::min(my, o.dy);
    }
    std::vector<int> codes;
    codes.reserve(s.size());
    for (Offset o : s) codes.push_back(((o.dx - mx) << 8) | (o.dy - my));
    std::sort(codes.begin(), codes.end());
    std::string key;
    key.reserve(codes.size() * 2);
    for (int c : codes) {
        key.push_back(static_cast<char>(c >> 8));
        key.push_back(static_cast<char>(c & 0xff));
    }
    if (min_corner) *min_corner = {mx, my};
    return key;
}

// Start of the occupied arc on a circle of size L: the coordinate right after
// the longest run of empty positions (first such run on ties). -1 if none.
int arc_start(const std::vector<char>& used) {
    int L = static_cast<int>(used.size());
    int best_len = 0, best_end = -1;
    for (int s = 0; s < L; ++s) {
        if (used[s] || !used[(s + L - 1) % L]) continue;  // s starts an empty run
        int len = 0;
        while (len < L && !used[(s + len) % L]) ++len;
        if (len > best_len) {
            best_len = len;
            best_end = (s + len) % L;
        }
    }
    if (best_end < 0) {
        bool any_empty = std::find(used.begin(), used.end(), 0) != used.end();
        if (!any_empty) return -1;
        // All positions empty except possibly a run that wraps: start at first used.
        for (int s = 0; s < L; ++s)
            if (used[s]) return s;
        return -1;
    }
    return best_end;
}

std::vector<std::vector<Offset>> corner_band_members(int n, int i, int j) {
    auto Q = block(0, 0, n, n);
    auto Qi = Q;
    Qi.erase(std::find(Qi.begin(), Qi.end(), corner_offset(n, i)));
    std::vector<std::vector<Offset>> out;
    for (Offset z : outer_side(Qi, Q, j)) {
        auto m = Qi;
        m.push_back(z);
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<std::vector<Offset>> rect_band_members(int n, Orientation a, int j) {
    auto T = a == Orientation::Standing ? block(0, 0, n - 1, n + 1) : block(0, 0, n + 1, n - 1);
    std::vector<std::vector<Offset>> out;
    for (Offset z : outer_side(T, {}, j)) {
        auto m = T;
        m.push_back(z);
        out.push_back(std::move(m));
    }
    return out;
}

std::mutex g_tax_mutex;
std::map<std::pair<int, int>, std::unique_ptr<Taxonomy>> g_tax;

}  // namespace

// ---------------------------------------------------------------- taxonomy

Taxonomy::Taxonomy(int n, int L) : n_(n), torus_(L) {
    check_parameters(n, L);
    const Site o{0, 0};
    add_prototype(ValleyId::ground(o), {block(0, 0, n, n)});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) add_prototype(ValleyId::corner_band(o, i, j), corner_band_members(n, i, j));
    for (Orientation a : {Orientation::Standing, Orientation::Lying})
        for (int j = 0; j < 4; ++j) add_prototype(ValleyId::rect_band(o, a, j), rect_band_members(n, a, j));
    for (Orientation a : {Orientation::Standing, Orientation::Lying})
        for (const SideVector& v : side_vectors(n, 1, a, true))
            add_prototype(ValleyId::perimeter(o, a, v), {decorated_rectangle(n, 1, a, v)});
    for (Orientation a : {Orientation::Standing, Orientation::Lying})
        for (const SideVector& v : side_vectors(n, 2, a, true)) {
            auto m = side_multiplicities(v);
            int longer = a == Orientation::Standing ? 1 : 0;
            if (m[longer] < 4 || m[longer + 2] < 4)
                throw ContractViolation("wide rectangle with fewer than four particles on a long side");
            add_prototype(ValleyId::wide_rect(o, a, v), {decorated_rectangle(n, 2, a, v)});
        }
    audit_wells();
}

const Taxonomy& Taxonomy::get(int n, int L) {
    std::lock_guard<std::mutex> lock(g_tax_mutex);
    auto& slot = g_tax[{n, L}];
    if (!slot) slot = std::make_unique<Taxonomy>(n, L);
    return *slot;
}

void Taxonomy::add_prototype(const ValleyId& v, std::vector<std::vector<Offset>> members) {
    if (members.empty()) throw ContractViolation("valley without members: " + v.str());
    int p = static_cast<int>(protos_.size());
    for (const auto& m : members) {
        if (static_cast<int>(m.size()) != n_ * n_)
            throw ContractViolation("member with wrong particle count in " + v.str());
        Offset mn;
        std::string key = shape_key(m, &mn);
        Entry e{p, {-mn.dx, -mn.dy}};
        auto [it, fresh] = shapes_.emplace(key, e);
        if (!fresh) {
            const Entry& old = it->second;
            throw ContractViolation("ambiguous taxonomy: " + v.str() + " and " + protos_[old.proto].str() +
                                    " share a member");
        }
    }
    proto_index_.emplace(v, p);
    protos_.push_back(v);
    members_.push_back(std::move(members));
}

void Taxonomy::audit_wells() const {
    for (int p = 0; p < static_cast<int>(protos_.size()); ++p) {
        const ValleyId& v = protos_[p];
        auto ms = members(v);
        int want = v.is_ground() ? 0 : 1;
        for (const auto& c : ms) {
            if (level_of(c) != want) throw ContractViolation("member at wrong energy level in " + v.str());
            for (int s : c.sites())
                for (int t : torus_.neighbors(s)) {
                    if (c.occupied(t)) continue;
                    int d = c.energy_delta(s, t);
                    if (d < 0) throw ContractViolation("downhill exchange out of well " + v.str());
                    if (d == 0 && std::find(ms.begin(), ms.end(), c.swapped(s, t)) == ms.end())
                        throw ContractViolation("zero-cost exchange leaves well " + v.str());
                }
        }
    }
}

int Taxonomy::prototype_index(const ValleyId& v) const {
    auto it = proto_index_.find(v.at({0, 0}));
    if (it == proto_index_.end()) throw std::invalid_argument("unknown valley " + v.str());
    return it->second;
}

int Taxonomy::index_of(const ValleyId& v) const {
    return prototype_index(v) * torus_.size() + torus_.index(v.anchor);
}

ValleyId Taxonomy::id_at(int index) const {
    if (index < 0 || index >= kappa()) throw std::invalid_argument("valley index out of range");
    return protos_[index / torus_.size()].at(torus_.site(index % torus_.size()));
}

std::vector<ValleyId> Taxonomy::enumerate() const {
    std::vector<ValleyId> out;
    out.reserve(kappa());
    for (int k = 0; k < kappa(); ++k) out.push_back(id_at(k));
    return out;
}

std::vector<Configuration> Taxonomy::members(const ValleyId& v) const {
    int p = prototype_index(v);
    std::vector<Configuration> out;
    for (const auto& m : members_[p]) {
        std::vector<int> s;
        for (Offset o : m) s.push_back(torus_.index(v.anchor.x + o.dx, v.anchor.y + o.dy));
        out.emplace_back(torus_, s);
    }
    return out;
}

std::optional<ValleyId> Taxonomy::lookup(const Configuration& c) const {
    int L = torus_.L();
    if (!(c.torus() == torus_) || c.K() != n_ * n_) return std::nullopt;
    auto sites = c.sites();
    std::vector<char> cols(L, 0), rows(L, 0);
    for (int s : sites) {
        cols[s % L] = 1;
        rows[s / L] = 1;
    }
    int x0 = arc_start(cols), y0 = arc_start(rows);
    if (x0 < 0 || y0 < 0) return std::nullopt;  // wraps around the torus
    std::vector<Offset> rel;
    rel.reserve(sites.size());
    for (int s : sites) rel.push_back({torus_.wrap(s % L - x0), torus_.wrap(s / L - y0)});
    std::string key = shape_key(rel, nullptr);
    auto it = shapes_.find(key);
    if (it == shapes_.end()) return std::nullopt;
    const Entry& e = it->second;
    return protos_[e.proto].at(torus_.add(Site{x0, y0}, e.anchor_from_min));
}

Classification Taxonomy::classify(const Configuration& c) const {
    if (c.K() != n_ * n_) throw std::invalid_argument("classification needs n^2 particles");
    int level = level_of(c);
    if (level < 0) throw ContractViolation("configuration below the ground energy");
    auto v = lookup(c);
    if (v) {
        if ((level == 0) != v->is_ground()) throw ContractViolation("valley level mismatch for " + v->str());
        return *v;
    }
    if (level == 0) throw ContractViolation("minimum-energy configuration is not a square");
    return Other{level};
}

std::map<std::string, int> Taxonomy::family_counts() const {
    std::map<std::string, int> out;
    for (const auto& v : protos_) out[family_name(v.family)] += 1;
    return out;
}

Classification classify(const Configuration& cfg) {
    int n = cfg.n();
    if (n == 0) throw std::invalid_argument("classification needs a square particle count");
    return Taxonomy::get(n, cfg.torus().L()).classify(cfg);
}

// ---------------------------------------------------------------- neighbourhoods

std::vector<NeighborEdge> neighborhood_edges(const Taxonomy& tax, const ValleyId& v) {
    int cost = v.is_ground() ? 2 : 1;
    auto ms = tax.members(v);
    std::vector<NeighborEdge> out;
    for (int m = 0; m < static_cast<int>(ms.size()); ++m) {
        const auto& c = ms[m];
        for (int s : c.sites())
            for (int t : tax.torus().neighbors(s)) {
                if (c.occupied(t) || c.energy_delta(s, t) != cost) continue;
                Configuration xi = c.swapped(s, t);
                if (tax.level_of(xi) != 2) throw ContractViolation("neighbourhood audit failed for " + v.str());
                out.push_back({std::move(xi), m, s, t});
            }
    }
    if (out.empty()) throw ContractViolation("empty neighbourhood for " + v.str());
    return out;
}

std::vector<Configuration> neighborhood(const Taxonomy& tax, const ValleyId& v) {
    std::vector<Configuration> out;
    for (auto& e : neighborhood_edges(tax, v))
        if (std::find(out.begin(), out.end(), e.xi) == out.end()) out.push_back(e.xi);
    return out;
}

// ---------------------------------------------------------------- limit solver

struct LimitSolver::Impl {
    const Taxonomy& tax;
    struct Component {
        std::vector<ValleyId> targets;
        Eigen::MatrixXd H;
    };
    std::unordered_map<Configuration, std::pair<int, int>, ConfigurationHash> where;
    std::vector<Component> comps;
    std::size_t max_comp = 0;

    explicit Impl(const Taxonomy& t) : tax(t) {}

    ValleyId classify_target(const Configuration& c) {
        auto r = tax.classify(c);
        if (auto* v = std::get_if<ValleyId>(&r)) return *v;
        throw TaxonomyClosureError("limit dynamics reach a level-" + std::to_string(std::get<Other>(r).level) +
                                   " configuration outside the taxonomy: " + to_json(c));
    }

    void explore(const Configuration& start) {
        constexpr std::size_t kMaxStates = 4'000'000;
        std::vector<Configuration> states{start};
        std::unordered_map<Configuration, int, ConfigurationHash> local{{start, 0}};
        std::vector<std::vector<int>> edges(1);
        std::vector<std::vector<int>> hits(1);
        std::map<ValleyId, int> col;
        std::vector<ValleyId> targets;
        std::unordered_map<Configuration, int, ConfigurationHash> target_cache;
        for (std::size_t k = 0; k < states.size(); ++k) {
            const Configuration cur = states[k];
            for (int s : cur.sites())
                for (int t : tax.torus().neighbors(s)) {
                    if (cur.occupied(t) || cur.energy_delta(s, t) > 0) continue;
                    Configuration nxt = cur.swapped(s, t);
                    if (tax.level_of(nxt) <= 1) {
                        auto tc = target_cache.find(nxt);
                        int c;
                        if (tc != target_cache.end()) {
                            c = tc->second;
                        } else {
                            ValleyId v = classify_target(nxt);
                            auto [it, fresh] = col.emplace(v, static_cast<int>(targets.size()));
                            if (fresh) targets.push_back(v);
                            c = it->second;
                            target_cache.emplace(nxt, c);
                        }
                        hits[k].push_back(c);
                        continue;
                    }
                    auto [it, fresh] = local.emplace(nxt, static_cast<int>(states.size()));
                    if (fresh) {
                        if (states.size() >= kMaxStates)
                            throw ContractViolation("level-2 component exceeds the exploration limit");
                        states.push_back(std::move(nxt));
                        edges.emplace_back();
                        hits.emplace_back();
                    }
                    edges[k].push_back(it->second);
                }
        }
        int T = static_cast<int>(states.size()), C = static_cast<int>(targets.size());
        // Every state must be able to leave the component downhill.
        std::vector<std::vector<int>> rev(T);
        for (int i = 0; i < T; ++i)
            for (int j : edges[i]) rev[j].push_back(i);
        std::vector<char> ok(T, 0);
        std::deque<int> q;
        for (int i = 0; i < T; ++i)
            if (!hits[i].empty()) {
                ok[i] = 1;
                q.push_back(i);
            }
        while (!q.empty()) {
            int j = q.front();
            q.pop_front();
            for (int i : rev[j])
                if (!ok[i]) {
                    ok[i] = 1;
                    q.push_back(i);
                }
        }
        for (int i = 0; i < T; ++i)
            if (!ok[i]) throw ContractViolation("limit dynamics trapped at level 2: " + to_json(states[i]));

        std::vector<Eigen::Triplet<double>> trip;
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(T, C);
        for (int i = 0; i < T; ++i) {
            trip.emplace_back(i, i, static_cast<double>(edges[i].size() + hits[i].size()));
            for (int j : edges[i]) trip.emplace_back(i, j, -1.0);
            for (int c : hits[i]) B(i, c) += 1.0;
        }
        Eigen::SparseMatrix<double> A(T, T);
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::MatrixXd H = solve_linear(A, B, "limit hitting measure");
        for (int i = 0; i < T; ++i) {
            if (std::abs(H.row(i).sum() - 1.0) > 1e-10) throw ContractViolation("hitting measure not normalized");
            if (H.row(i).minCoeff() < -1e-12) throw ContractViolation("negative hitting probability");
        }
        int id = static_cast<int>(comps.size());
        comps.push_back({std::move(targets), std::move(H)});
        for (int i = 0; i < T; ++i) where.emplace(std::move(states[i]), std::make_pair(id, i));
        max_comp = std::max<std::size_t>(max_comp, T);
    }
};

LimitSolver::LimitSolver(const Taxonomy& tax) : impl_(std::make_unique<Impl>(tax)) {}
LimitSolver::~LimitSolver() = default;

HittingMeasure LimitSolver::measure(const Configuration& xi) {
    int level = impl_->tax.level_of(xi);
    if (level <= 1) return {{impl_->classify_target(xi), 1.0}};
    if (level != 2) throw std::invalid_argument("limit hitting measure needs a start at level 2");
    auto it = impl_->where.find(xi);
    if (it == impl_->where.end()) {
        impl_->explore(xi);
        it = impl_->where.find(xi);
    }
    const auto& comp = impl_->comps[it->second.first];
    HittingMeasure m;
    for (int c = 0; c < static_cast<int>(comp.targets.size()); ++c) {
        double w = comp.H(it->second.second, c);
        if (w > 1e-14) m[comp.targets[c]] += w;
    }
    return m;
}

std::size_t LimitSolver::explored_states() const { return impl_->where.size(); }
std::size_t LimitSolver::max_component() const { return impl_->max_comp; }

HittingMeasure m_measure(const Taxonomy& tax, LimitSolver& solver, const Configuration& xi, const ValleyId& v) {
    auto nb = neighborhood(tax, v);
    if (std::find(nb.begin(), nb.end(), xi) == nb.end())
        throw std::invalid_argument("configuration is not in the neighbourhood of " + v.str());
    return solver.measure(xi);
}

HittingMeasure translate(const HittingMeasure& m, Offset by, const Torus& t) {
    HittingMeasure out;
    for (auto& [v, w] : m) out[v.at(t.add(v.anchor, by))] += w;
    return out;
}

double mass(const HittingMeasure& m, const ValleyId& v) {
    auto it = m.find(v);
    return it == m.end() ? 0.0 : it->second;
}

double total_mass(const HittingMeasure& m) {
    double s = 0;
    for (auto& [v, w] : m) s += w;
    return s;
}

Configuration eta_star(int j, Site w, int n, const Torus& torus) {
    Configuration g = square_config(w, n, torus);
    Offset c = corner_offset(n, 2);
    int w2 = torus.index(w.x + c.dx, w.y + c.dy);
    int to = j == 1 ? torus.add(w2, 0, 1) : torus.add(w2, 1, 0);
    return g.swapped(w2, to);
}

GroundHitting ground_m1_m2(const Taxonomy& tax, LimitSolver& solver) {
    GroundHitting g;
    const Site w{0, 0};
    g.m1 = solver.measure(eta_star(1, w, tax.n(), tax.torus()));
    g.m2 = solver.measure(eta_star(2, w, tax.n(), tax.torus()));
    for (const HittingMeasure* m : {&g.m1, &g.m2}) {
        if (std::abs(total_mass(*m) - 1.0) > 1e-10) throw ContractViolation("ground hitting measure mass");
        for (auto& [v, p] : *m) {
            bool ok = v.anchor == w && (v.family == Family::Ground || v.family == Family::CornerBand);
            if (!ok) throw ContractViolation("ground hitting measure charges " + v.str());
        }
    }
    return g;
}

}  // namespace kawasaki
