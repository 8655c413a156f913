#include "kawasaki/chains.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "kawasaki/errors.hpp"

namespace kawasaki {

FiniteChain::FiniteChain(int size) : out_(static_cast<size_t>(size)) {
    if (size < 0) throw std::invalid_argument("negative chain size");
}

void FiniteChain::add_rate(int from, int to, double rate) {
    if (from < 0 || to < 0 || from >= size() || to >= size())
        throw std::invalid_argument("rate endpoint out of range");
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("rate must be finite and nonnegative");
    if (from == to || rate == 0.0) return;
    for (auto& [j, r] : out_[from]) {
        if (j == to) {
            r += rate;
            return;
        }
    }
    out_[from].emplace_back(to, rate);
}

double FiniteChain::exit_rate(int i) const {
    double s = 0;
    for (auto& [j, r] : out_[i]) s += r;
    return s;
}

double FiniteChain::rate(int from, int to) const {
    for (auto& [j, r] : out_[from])
        if (j == to) return r;
    return 0.0;
}

void FiniteChain::declare_reversible(std::vector<double> pi, double tol) {
    if (static_cast<int>(pi.size()) != size()) throw std::invalid_argument("weight vector size mismatch");
    for (int i = 0; i < size(); ++i) {
        for (auto& [j, r] : out_[i]) {
            double lhs = pi[i] * r, rhs = pi[j] * rate(j, i);
            if (std::abs(lhs - rhs) > tol * std::max({std::abs(lhs), std::abs(rhs), 1e-300}))
                throw ContractViolation("detailed balance fails between states " + std::to_string(i) +
                                        " and " + std::to_string(j));
        }
    }
    pi_ = std::move(pi);
}

Eigen::MatrixXd solve_linear(const Eigen::SparseMatrix<double>& A, const Eigen::MatrixXd& B,
                             const char* what) {
    Eigen::MatrixXd X;
    if (A.rows() == 0) return Eigen::MatrixXd(0, B.cols());
    if (A.rows() <= kDirectSolveLimit) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(A);
        lu.factorize(A);
        if (lu.info() != Eigen::Success) throw ContractViolation(std::string("singular system: ") + what);
        X = lu.solve(B);
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> it;
        it.setTolerance(1e-13);
        it.setMaxIterations(20000);
        it.compute(A);
        X.resize(A.cols(), B.cols());
        for (int c = 0; c < B.cols(); ++c) X.col(c) = it.solve(B.col(c));
    }
    double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
    double res = (A * X - B).cwiseAbs().maxCoeff();
    if (!(res <= 1e-10 * scale))
        throw ContractViolation(std::string("linear residual ") + std::to_string(res) + " too large: " + what);
    return X;
}

namespace {

// States that can reach `targets` (reverse search).
std::vector<char> can_reach(const FiniteChain& c, const std::vector<char>& target) {
    int N = c.size();
    std::vector<std::vector<int>> rev(N);
    for (int i = 0; i < N; ++i)
        for (auto& [j, r] : c.out(i)) rev[j].push_back(i);
    std::vector<char> seen(target);
    std::deque<int> q;
    for (int i = 0; i < N; ++i)
        if (seen[i]) q.push_back(i);
    while (!q.empty()) {
        int j = q.front();
        q.pop_front();
        for (int i : rev[j])
            if (!seen[i]) {
                seen[i] = 1;
                q.push_back(i);
            }
    }
    return seen;
}

// Forward closure from `start` through non-absorbing states.
std::vector<int> forward_from(const FiniteChain& c, int start, const std::vector<char>& absorbing) {
    std::vector<char> seen(c.size(), 0);
    std::vector<int> order{start};
    seen[start] = 1;
    for (size_t k = 0; k < order.size(); ++k) {
        int i = order[k];
        if (absorbing[i]) continue;
        for (auto& [j, r] : c.out(i))
            if (!seen[j]) {
                seen[j] = 1;
                order.push_back(j);
            }
    }
    return order;
}

std::vector<int> part_of(int N, const std::vector<std::vector<int>>& parts) {
    std::vector<int> part(N, -1);
    for (int p = 0; p < static_cast<int>(parts.size()); ++p)
        for (int s : parts[p]) {
            if (s < 0 || s >= N) throw std::invalid_argument("absorbing state out of range");
            if (part[s] != -1) throw std::invalid_argument("absorbing parts overlap");
            part[s] = p;
        }
    return part;
}

}  // namespace

Eigen::MatrixXd absorption_matrix(const FiniteChain& c, const std::vector<std::vector<int>>& parts) {
    int N = c.size();
    int P = static_cast<int>(parts.size());
    std::vector<int> part = part_of(N, parts);
    std::vector<char> absorbing(N);
    for (int i = 0; i < N; ++i) absorbing[i] = part[i] >= 0;
    std::vector<char> reach = can_reach(c, absorbing);

    // Transient states that can reach absorption; others keep a zero row.
    std::vector<int> idx(N, -1), states;
    for (int i = 0; i < N; ++i)
        if (!absorbing[i] && reach[i]) {
            idx[i] = static_cast<int>(states.size());
            states.push_back(i);
        }
    int T = static_cast<int>(states.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(T, P);
    for (int a = 0; a < T; ++a) {
        int i = states[a];
        double q = 0;
        for (auto& [j, r] : c.out(i)) {
            q += r;
            if (part[j] >= 0)
                B(a, part[j]) += r;
            else if (idx[j] >= 0)
                trip.emplace_back(a, idx[j], -r);
        }
        trip.emplace_back(a, a, q);
    }
    Eigen::SparseMatrix<double> A(T, T);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd X = solve_linear(A, B, "absorption");

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, P);
    for (int i = 0; i < N; ++i) {
        if (absorbing[i])
            H(i, part[i]) = 1.0;
        else if (idx[i] >= 0)
            H.row(i) = X.row(idx[i]);
    }
    return H;
}

Distribution absorption_distribution(const FiniteChain& c, int start,
                                     const std::vector<std::vector<int>>& parts) {
    int N = c.size();
    if (start < 0 || start >= N) throw std::invalid_argument("start state out of range");
    std::vector<int> part = part_of(N, parts);
    std::vector<char> absorbing(N);
    for (int i = 0; i < N; ++i) absorbing[i] = part[i] >= 0;
    if (absorbing[start]) {
        Distribution d(parts.size(), 0.0);
        d[part[start]] = 1.0;
        return d;
    }
    // Restrict to the part of the chain visible from start.
    std::vector<int> comp = forward_from(c, start, absorbing);
    std::vector<int> local(N, -1);
    for (size_t k = 0; k < comp.size(); ++k) local[comp[k]] = static_cast<int>(k);
    FiniteChain sub(static_cast<int>(comp.size()));
    for (size_t k = 0; k < comp.size(); ++k) {
        int i = comp[k];
        if (absorbing[i]) continue;
        for (auto& [j, r] : c.out(i)) sub.add_rate(static_cast<int>(k), local[j], r);
    }
    std::vector<std::vector<int>> sub_parts(parts.size());
    std::vector<char> sub_abs(comp.size(), 0);
    for (size_t k = 0; k < comp.size(); ++k)
        if (absorbing[comp[k]]) {
            sub_parts[part[comp[k]]].push_back(static_cast<int>(k));
            sub_abs[k] = 1;
        }
    std::vector<char> reach = can_reach(sub, sub_abs);
    for (size_t k = 0; k < comp.size(); ++k)
        if (!reach[k]) throw ContractViolation("start can be trapped away from every absorbing part");
    Eigen::MatrixXd H = absorption_matrix(sub, sub_parts);
    Distribution d(parts.size());
    for (size_t p = 0; p < parts.size(); ++p) d[p] = H(0, static_cast<int>(p));
    return d;
}

double expected_hitting_time(const FiniteChain& c, int start, const std::vector<int>& target) {
    int N = c.size();
    if (target.empty()) throw std::invalid_argument("empty target set");
    std::vector<char> tgt(N, 0);
    for (int s : target) tgt.at(s) = 1;
    if (tgt[start]) return 0.0;
    std::vector<int> comp = forward_from(c, start, tgt);
    std::vector<char> in_comp(N, 0);
    for (int i : comp) in_comp[i] = 1;
    std::vector<char> reach = can_reach(c, tgt);
    std::vector<int> idx(N, -1), states;
    for (int i : comp) {
        if (tgt[i]) continue;
        if (!reach[i]) throw ContractViolation("target unreachable from part of the chain");
        idx[i] = static_cast<int>(states.size());
        states.push_back(i);
    }
    int T = static_cast<int>(states.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd B = Eigen::MatrixXd::Ones(T, 1);
    for (int a = 0; a < T; ++a) {
        int i = states[a];
        double q = 0;
        for (auto& [j, r] : c.out(i)) {
            q += r;
            if (idx[j] >= 0) trip.emplace_back(a, idx[j], -r);
        }
        trip.emplace_back(a, a, q);
    }
    Eigen::SparseMatrix<double> A(T, T);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd X = solve_linear(A, B, "mean hitting time");
    return X(idx[start], 0);
}

Distribution stationary(const FiniteChain& c) {
    int N = c.size();
    if (N == 0) throw std::invalid_argument("empty chain");
    std::vector<char> zero(N, 0);
    zero[0] = 1;
    std::vector<char> back = can_reach(c, zero);
    std::vector<int> fwd = forward_from(c, 0, std::vector<char>(N, 0));
    if (static_cast<int>(fwd.size()) != N ||
        std::any_of(back.begin(), back.end(), [](char v) { return !v; }))
        throw ContractViolation("stationary measure requested for a reducible chain");
    if (N == 1) return {1.0};
    // Transposed generator with the last equation replaced by normalization.
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < N; ++i) {
        double q = 0;
        for (auto& [j, r] : c.out(i)) {
            q += r;
            if (j != N - 1) trip.emplace_back(j, i, r);
        }
        if (i != N - 1) trip.emplace_back(i, i, -q);
    }
    for (int i = 0; i < N; ++i) trip.emplace_back(N - 1, i, 1.0);
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, 1);
    B(N - 1, 0) = 1.0;
    Eigen::MatrixXd X = solve_linear(A, B, "stationary");
    return Distribution(X.data(), X.data() + N);
}

double dirichlet_form(const FiniteChain& c, const std::vector<double>& pi, const std::vector<double>& f) {
    double s = 0;
    for (int i = 0; i < c.size(); ++i)
        for (auto& [j, r] : c.out(i)) s += pi[i] * r * (f[j] - f[i]) * (f[j] - f[i]);
    return 0.5 * s;
}

double capacity(const FiniteChain& c, const std::vector<int>& A, const std::vector<int>& B) {
    if (A.empty() || B.empty()) throw std::invalid_argument("capacity needs nonempty sets");
    std::vector<char> inA(c.size(), 0);
    for (int a : A) inA.at(a) = 1;
    for (int b : B)
        if (inA.at(b)) throw std::invalid_argument("capacity sets overlap");
    std::vector<double> pi = c.reversible_weights() ? *c.reversible_weights() : stationary(c);
    Eigen::MatrixXd H = absorption_matrix(c, {A, B});
    std::vector<double> h(c.size());
    for (int i = 0; i < c.size(); ++i) h[i] = H(i, 0);
    return dirichlet_form(c, pi, h);
}

FiniteChain trace_chain(const FiniteChain& c, const std::vector<int>& subset) {
    int N = c.size();
    if (subset.empty()) throw std::invalid_argument("empty trace subset");
    std::vector<std::vector<int>> parts;
    std::vector<int> pos(N, -1);
    for (int k = 0; k < static_cast<int>(subset.size()); ++k) {
        pos.at(subset[k]) = k;
        parts.push_back({subset[k]});
    }
    Eigen::MatrixXd H = absorption_matrix(c, parts);
    FiniteChain t(static_cast<int>(subset.size()));
    for (int k = 0; k < static_cast<int>(subset.size()); ++k) {
        int x = subset[k];
        for (auto& [z, r] : c.out(x)) {
            if (pos[z] >= 0) {
                t.add_rate(k, pos[z], r);
                continue;
            }
            for (int m = 0; m < static_cast<int>(subset.size()); ++m)
                if (m != k && H(z, m) > 0) t.add_rate(k, m, r * H(z, m));
        }
    }
    if (c.reversible_weights()) {
        std::vector<double> pi;
        for (int s : subset) pi.push_back((*c.reversible_weights())[s]);
        t.declare_reversible(pi, 1e-8);
    }
    return t;
}

}  // namespace kawasaki
