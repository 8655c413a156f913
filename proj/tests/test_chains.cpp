#include <doctest.h>

#include <random>

#include "kawasaki/chains.hpp"
#include "kawasaki/elementary.hpp"
#include "kawasaki/errors.hpp"
#include "oracles.hpp"

using namespace kawasaki;

namespace {

FiniteChain line(int N) {
    FiniteChain c(N);
    for (int i = 0; i + 1 < N; ++i) {
        c.add_rate(i, i + 1, 1.0);
        c.add_rate(i + 1, i, 1.0);
    }
    return c;
}

struct Reversible {
    FiniteChain c;
    std::vector<double> pi;
};

// Random conductances on a ring plus chords; pi is a random positive vector.
Reversible random_reversible(int N, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.1, 2.0);
    std::uniform_int_distribution<int> s(0, N - 1);
    std::vector<double> pi(N);
    for (double& p : pi) p = u(g);
    FiniteChain c(N);
    auto link = [&](int a, int b) {
        if (a == b) return;
        double w = u(g);
        c.add_rate(a, b, w / pi[a]);
        c.add_rate(b, a, w / pi[b]);
    };
    for (int i = 0; i < N; ++i) link(i, (i + 1) % N);
    for (int k = 0; k < N; ++k) link(s(g), s(g));
    c.declare_reversible(pi);
    return {c, pi};
}

// Absorption by a dense solve on the embedded chain, independent of the library.
Eigen::MatrixXd dense_absorption(const FiniteChain& c, const std::vector<int>& part, int parts) {
    int N = c.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N), B = Eigen::MatrixXd::Zero(N, parts);
    for (int i = 0; i < N; ++i) {
        if (part[i] >= 0) {
            B(i, part[i]) = 1;
            continue;
        }
        double q = c.exit_rate(i);
        for (auto [j, r] : c.out(i)) A(i, j) -= r / q;
    }
    return A.fullPivLu().solve(B);
}

}  // namespace

TEST_CASE("gambler's ruin absorption") {
    auto d = absorption_distribution(line(3), 1, {{0}, {2}});
    CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-12));
    d = absorption_distribution(line(5), 1, {{0}, {4}});
    CHECK(d[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("corner chain absorption against a dense solve and Monte Carlo") {
    std::vector<std::pair<int, int>> pts;
    oracle::Walk w = oracle::corner(4, pts);
    double exact = oracle::absorb(w)(oracle::find(pts, 0, 1), 0);
    auto mc = oracle::simulate(w, oracle::find(pts, 0, 1), 200000, 7);
    CHECK(std::abs(mc.p[0] - exact) < 4 * mc.se[0]);
    CHECK(exact == doctest::Approx(0.375).epsilon(1e-12));  // frozen

    std::vector<std::pair<int, int>> s;
    FiniteChain c = corner_chain(4, &s);
    std::vector<int> top;
    for (int j = 0; j < 3; ++j) top.push_back(oracle::find(s, j, 3));
    auto d = absorption_distribution(c, oracle::find(s, 0, 1), {top, {oracle::find(s, 0, 0)}});
    CHECK(d[0] == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("expected hitting times") {
    CHECK(expected_hitting_time(line(5), 2, {2, 4}) == 0.0);
    FiniteChain two(2);
    two.add_rate(0, 1, 2.5);
    two.add_rate(1, 0, 0.3);
    CHECK(expected_hitting_time(two, 0, {1}) == doctest::Approx(1 / 2.5).epsilon(1e-12));

    std::vector<std::pair<int, int>> pts;
    oracle::Walk w = oracle::corner(4, pts);
    int start = oracle::find(pts, 0, 1);
    double exact = oracle::absorb_time(w)(start);
    auto mc = oracle::simulate(w, start, 200000, 11);
    CHECK(std::abs(mc.mean_time - exact) < 2.576 * mc.time_se);  // 99% interval

    std::vector<std::pair<int, int>> s;
    FiniteChain c = corner_chain(4, &s);
    std::vector<int> target{oracle::find(s, 0, 0)};
    for (int j = 0; j < 3; ++j) target.push_back(oracle::find(s, j, 3));
    CHECK(expected_hitting_time(c, oracle::find(s, 0, 1), target) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(exact == doctest::Approx(1.0).epsilon(1e-12));  // frozen
}

TEST_CASE("stationary laws") {
    FiniteChain cyc(6);
    for (int i = 0; i < 6; ++i) {
        cyc.add_rate(i, (i + 1) % 6, 1.0);
        cyc.add_rate((i + 1) % 6, i, 1.0);
    }
    for (double p : stationary(cyc)) CHECK(p == doctest::Approx(1.0 / 6).epsilon(1e-12));

    FiniteChain two(2);
    two.add_rate(0, 1, 2.0);
    two.add_rate(1, 0, 3.0);
    auto pi = stationary(two);
    CHECK(pi[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(0.4).epsilon(1e-12));

    // Jump chain of the hole-particle walk: stationary law proportional to degree.
    FiniteChain z = hole_particle_chain(5, false);
    FiniteChain jump(z.size());
    double total = 0;
    for (int i = 0; i < z.size(); ++i) {
        for (auto [j, r] : z.out(i)) jump.add_rate(i, j, r / z.exit_rate(i));
        total += z.exit_rate(i);
    }
    auto p = stationary(jump);
    for (int i = 0; i < z.size(); ++i) CHECK(p[i] == doctest::Approx(z.exit_rate(i) / total).epsilon(1e-10));
}

TEST_CASE("capacity: two states, birth-death series, symmetry") {
    double a = 2.0, b = 0.5;
    FiniteChain two(2);
    two.add_rate(0, 1, a);
    two.add_rate(1, 0, b);
    two.declare_reversible({b / (a + b), a / (a + b)});
    CHECK(capacity(two, {0}, {1}) == doctest::Approx(a * b / (a + b)).epsilon(1e-12));

    int N = 8;
    std::vector<double> up{1.0, 2.0, 0.5, 1.5, 3.0, 0.7, 1.1}, down{0.4, 1.2, 2.0, 0.9, 0.6, 1.3, 2.2};
    std::vector<double> pi(N, 1.0);
    for (int k = 1; k < N; ++k) pi[k] = pi[k - 1] * up[k - 1] / down[k - 1];
    double Zp = 0;
    for (double p : pi) Zp += p;
    for (double& p : pi) p /= Zp;
    FiniteChain bd(N);
    for (int k = 0; k + 1 < N; ++k) {
        bd.add_rate(k, k + 1, up[k]);
        bd.add_rate(k + 1, k, down[k]);
    }
    bd.declare_reversible(pi);
    double resist = 0;
    for (int k = 0; k + 1 < N; ++k) resist += 1.0 / (pi[k] * up[k]);
    CHECK(capacity(bd, {0}, {N - 1}) == doctest::Approx(1.0 / resist).epsilon(1e-10));
    CHECK(capacity(bd, {N - 1}, {0}) == doctest::Approx(capacity(bd, {0}, {N - 1})).epsilon(1e-10));
}

TEST_CASE("capacity is a minimum of the Dirichlet form and grows with B") {
    std::mt19937_64 g(99);
    for (int seed = 0; seed < 100; ++seed) {
        int N = 5 + static_cast<int>(g() % 60);
        Reversible r = random_reversible(N, g);
        std::vector<int> A{0}, B{N / 2};
        double cap = capacity(r.c, A, B);
        CHECK(cap > 0);
        CHECK(capacity(r.c, B, A) == doctest::Approx(cap).epsilon(1e-9));
        std::uniform_real_distribution<double> u(0, 1);
        for (int k = 0; k < 50; ++k) {
            std::vector<double> f(N);
            for (double& x : f) x = u(g);
            f[0] = 1;
            f[N / 2] = 0;
            CHECK(dirichlet_form(r.c, r.pi, f) >= cap * (1 - 1e-10));
        }
        std::vector<int> B2{N / 2, N - 1};
        if (N - 1 != 0) CHECK(capacity(r.c, A, B2) >= cap * (1 - 1e-10));
    }
}

TEST_CASE("absorption agrees with a dense embedded-chain solve on random chains") {
    std::mt19937_64 g(4);
    for (int k = 0; k < 100; ++k) {
        int N = 6 + static_cast<int>(g() % 150);
        Reversible r = random_reversible(N, g);
        std::vector<int> part(N, -1);
        part[0] = 0;
        part[N / 3] = 1;
        part[N - 1] = 2;
        Eigen::MatrixXd H = absorption_matrix(r.c, {{0}, {N / 3}, {N - 1}});
        Eigen::MatrixXd D = dense_absorption(r.c, part, 3);
        CHECK((H - D).cwiseAbs().maxCoeff() < 1e-9);
        for (int i = 0; i < N; ++i) CHECK(H.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
        auto d = absorption_distribution(r.c, N / 2, {{0}, {N / 3}, {N - 1}});
        CHECK(d[0] == doctest::Approx(H(N / 2, 0)).epsilon(1e-12));
    }
}

TEST_CASE("absorption refuses a start that can be trapped") {
    FiniteChain c(4);
    c.add_rate(0, 1, 1.0);
    c.add_rate(1, 0, 1.0);
    c.add_rate(2, 3, 1.0);
    CHECK_THROWS_AS(absorption_distribution(c, 0, {{3}}), ContractViolation);
}

TEST_CASE("trace chain") {
    std::mt19937_64 g(8);
    Reversible r = random_reversible(12, g);
    std::vector<int> all(12);
    for (int i = 0; i < 12; ++i) all[i] = i;
    FiniteChain same = trace_chain(r.c, all);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            if (i != j) CHECK(same.rate(i, j) == doctest::Approx(r.c.rate(i, j)).epsilon(1e-12));

    // Detailed balance survives tracing.
    std::vector<int> sub{0, 3, 5, 7, 11};
    FiniteChain t = trace_chain(r.c, sub);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            if (a != b)
                CHECK(r.pi[sub[a]] * t.rate(a, b) == doctest::Approx(r.pi[sub[b]] * t.rate(b, a)).epsilon(1e-9));

    // Unit-rate triangle watched on two states: rate 1 + 1/2.
    FiniteChain tri(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) tri.add_rate(i, j, 1.0);
    FiniteChain tt = trace_chain(tri, {0, 1});
    CHECK(tt.rate(0, 1) == doctest::Approx(1.5).epsilon(1e-12));
    // Watched process: time spent at 0 before reaching 1.
    std::mt19937_64 h(12);
    std::exponential_distribution<double> e(2.0);
    double sum = 0, sum2 = 0;
    int M = 200000;
    for (int k = 0; k < M; ++k) {
        double clock = 0;
        // At 0: leave at rate 2, half the time straight to 1; from 2, back to 0 or on to 1.
        while (true) {
            clock += e(h);
            if (h() & 1) break;
            if (h() & 1) break;
        }
        sum += clock;
        sum2 += clock * clock;
    }
    double mean = sum / M, se = std::sqrt((sum2 / M - mean * mean) / M);
    CHECK(std::abs(mean - 1.0 / tt.rate(0, 1)) < 4 * se);
}

TEST_CASE("large systems go through the iterative solver") {
    int N = kDirectSolveLimit + 1000;
    // Killed walk on a line: diagonally dominant, so the residual check is meaningful.
    Eigen::SparseMatrix<double> A(N, N);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < N; ++i) {
        t.emplace_back(i, i, 3.0);
        if (i > 0) t.emplace_back(i, i - 1, -1.0);
        if (i + 1 < N) t.emplace_back(i, i + 1, -1.0);
    }
    A.setFromTriplets(t.begin(), t.end());
    Eigen::MatrixXd b = Eigen::MatrixXd::Ones(N, 1);
    Eigen::MatrixXd x = solve_linear(A, b, "test");
    Eigen::VectorXd res = A * x.col(0) - b.col(0);
    CHECK(res.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(x(N / 2, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("declaring wrong reversible weights is a contract violation") {
    FiniteChain two(2);
    two.add_rate(0, 1, 1.0);
    two.add_rate(1, 0, 2.0);
    CHECK_THROWS_AS(two.declare_reversible({0.5, 0.5}), ContractViolation);
}
