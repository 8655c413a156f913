#include "kawasaki/rates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "kawasaki/errors.hpp"

namespace kawasaki {

ValleyRates valley_rates(const Taxonomy& tax, LimitSolver& solver, const ValleyId& v) {
    if (v.is_ground()) throw std::invalid_argument("valley_rates needs a non-ground valley");
    auto edges = neighborhood_edges(tax, v);
    ValleyRates out;
    out.valley = v;
    out.exit_edges = static_cast<int>(edges.size());
    std::vector<Configuration> distinct;
    for (const auto& e : edges) {
        if (std::find(distinct.begin(), distinct.end(), e.xi) == distinct.end()) distinct.push_back(e.xi);
        HittingMeasure m = solver.measure(e.xi);
        if (std::abs(total_mass(m) - 1.0) > 1e-10) throw ContractViolation("hitting measure not normalized");
        for (auto& [u, w] : m)
            if (!(u == v)) out.R[u] += w;
    }
    out.neighborhood_size = static_cast<int>(distinct.size());
    for (auto& [u, w] : out.R) out.Z += w;
    if (!(out.Z > 0)) throw ContractViolation("valley without escape: " + v.str());
    for (auto& [u, w] : out.R) out.Q[u] = w / out.Z;
    return out;
}

namespace {
std::mutex g_rt_mutex;
std::map<std::pair<int, int>, std::unique_ptr<RateTables>> g_rt;
}  // namespace

const RateTables& RateTables::get(int n, int L) {
    const Taxonomy& tax = Taxonomy::get(n, L);
    std::lock_guard<std::mutex> lock(g_rt_mutex);
    auto& slot = g_rt[{n, L}];
    if (!slot) slot = std::make_unique<RateTables>(n, L);
    (void)tax;
    return *slot;
}

RateTables::RateTables(int n, int L) : tax_(Taxonomy::get(n, L)) {
    LimitSolver solver(tax_);
    const auto& ps = tax_.prototypes();
    protos_.resize(ps.size());
    for (size_t p = 0; p < ps.size(); ++p) {
        if (ps[p].is_ground()) {
            protos_[p].valley = ps[p];
            continue;
        }
        protos_[p] = valley_rates(tax_, solver, ps[p]);
    }
}

ValleyRates RateTables::at(const ValleyId& v) const {
    ValleyRates r = protos_[tax_.prototype_index(v)];
    Offset by{v.anchor.x, v.anchor.y};
    r.valley = v;
    r.Q = translate(r.Q, by, tax_.torus());
    r.R = translate(r.R, by, tax_.torus());
    return r;
}

FiniteChain meso_chain(const RateTables& t) {
    const Taxonomy& tax = t.taxonomy();
    const Torus& torus = tax.torus();
    int N = tax.kappa(), A = torus.size();
    FiniteChain c(N);
    for (int p = 0; p < static_cast<int>(tax.prototypes().size()); ++p) {
        if (tax.prototypes()[p].is_ground()) continue;
        const ValleyRates& vr = t.prototype(p);
        for (int a = 0; a < A; ++a) {
            Site x = torus.site(a);
            int i = p * A + a;
            for (auto& [u, w] : vr.R) {
                ValleyId tu = u.at(torus.add(u.anchor, Offset{x.x, x.y}));
                c.add_rate(i, tax.index_of(tu), w);
            }
        }
    }
    return c;
}

namespace {

std::vector<std::vector<int>> ground_parts(const Taxonomy& tax, bool each) {
    int A = tax.torus().size();  // grounds are indices 0..A-1
    std::vector<std::vector<int>> parts;
    if (each) {
        for (int a = 0; a < A; ++a) parts.push_back({a});
    } else {
        parts.push_back({0});
        parts.emplace_back();
        for (int a = 1; a < A; ++a) parts.back().push_back(a);
    }
    return parts;
}

void check_rows(const Eigen::MatrixXd& H, const char* what) {
    for (int i = 0; i < H.rows(); ++i) {
        if (std::abs(H.row(i).sum() - 1.0) > 1e-10) throw ContractViolation(std::string(what) + ": row sum");
        if (H.row(i).minCoeff() < -1e-12) throw ContractViolation(std::string(what) + ": negative entry");
    }
}

}  // namespace

Eigen::VectorXd ground_absorption(const RateTables& t) {
    FiniteChain c = meso_chain(t);
    Eigen::MatrixXd H = absorption_matrix(c, ground_parts(t.taxonomy(), false));
    check_rows(H, "absorption into grounds");
    return H.col(0);
}

double absorption_q(const RateTables& t, const Eigen::VectorXd& h, const ValleyId& v, Site y) {
    const Torus& torus = t.taxonomy().torus();
    Site shifted = torus.add(v.anchor, Offset{-y.x, -y.y});
    return h(t.taxonomy().index_of(v.at(shifted)));
}

Eigen::MatrixXd absorption_q_full(const RateTables& t) {
    FiniteChain c = meso_chain(t);
    Eigen::MatrixXd H = absorption_matrix(c, ground_parts(t.taxonomy(), true));
    check_rows(H, "absorption into grounds");
    return H;
}

GroundKernel ground_kernel(int n, int L) {
    check_parameters(n, L);
    const RateTables& t = RateTables::get(n, L);
    const Taxonomy& tax = t.taxonomy();
    const Torus& torus = tax.torus();
    Eigen::VectorXd h = ground_absorption(t);
    int A = torus.size();

    // Aggregate the ground neighbourhood measures at anchor 0.
    LimitSolver solver(tax);
    HittingMeasure agg;
    for (const auto& e : neighborhood_edges(tax, ValleyId::ground({0, 0}))) {
        HittingMeasure m = solver.measure(e.xi);
        if (std::abs(total_mass(m) - 1.0) > 1e-10) throw ContractViolation("hitting measure not normalized");
        for (auto& [u, w] : m) agg[u] += w;
    }

    GroundKernel g;
    g.n = n;
    g.L = L;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(A);
    for (auto& [u, w] : agg)
        for (int y = 0; y < A; ++y) {
            if (y == 0) continue;
            row(y) += w * absorption_q(t, h, u, torus.site(y));
        }
    for (auto& [u, w] : agg) g.Z += w * (1.0 - absorption_q(t, h, u, Site{0, 0}));
    if (!(g.Z > 0)) throw ContractViolation("ground escape parameter is not positive");
    row /= g.Z;
    if (std::abs(row.sum() - 1.0) > 1e-10) throw ContractViolation("ground kernel row sum");

    g.Q = Eigen::MatrixXd::Zero(A, A);
    for (int x = 0; x < A; ++x) {
        Site sx = torus.site(x);
        for (int y = 0; y < A; ++y) {
            if (x == y) continue;
            Site sy = torus.site(y);
            double v = row(torus.index(sy.x - sx.x, sy.y - sx.y));
            if (!(v > 0)) throw ContractViolation("ground kernel entry is not positive");
            g.Q(x, y) = v;
        }
    }
    g.r = g.Z * g.Q;
    return g;
}

double depth(const RateTables& t, const ValleyId& v) {
    if (v.is_ground()) throw std::invalid_argument("depth is defined for non-ground valleys");
    return static_cast<double>(t.taxonomy().members(v).size()) / t.at(v).Z;
}

}  // namespace kawasaki
