#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kawasaki {

// Continuous-time Markov chain on states 0..size-1 with sparse off-diagonal
// rates. Labels are opaque; identity is the index.
class FiniteChain {
public:
    explicit FiniteChain(int size = 0);

    int size() const { return static_cast<int>(out_.size()); }
    void add_rate(int from, int to, double rate);  // accumulates
    const std::vector<std::pair<int, double>>& out(int i) const { return out_[i]; }
    double exit_rate(int i) const;
    double rate(int from, int to) const;

    std::vector<std::string> labels;

    // Attach reversible weights; throws ContractViolation if detailed balance
    // fails entry-wise beyond tol (relative).
    void declare_reversible(std::vector<double> pi, double tol = 1e-10);
    const std::optional<std::vector<double>>& reversible_weights() const { return pi_; }

private:
    std::vector<std::vector<std::pair<int, double>>> out_;
    std::optional<std::vector<double>> pi_;
};

// Probability vector; index meaning is fixed by the producing call.
using Distribution = std::vector<double>;

// Absorption probabilities into each part, from `start`. Absorbing states are
// the union of the parts. Throws ContractViolation if from `start` the chain
// can get trapped away from every part.
Distribution absorption_distribution(const FiniteChain& c, int start,
                                     const std::vector<std::vector<int>>& parts);

// Same, for every state at once: row i is the distribution from state i.
Eigen::MatrixXd absorption_matrix(const FiniteChain& c, const std::vector<std::vector<int>>& parts);

double expected_hitting_time(const FiniteChain& c, int start, const std::vector<int>& target);

Distribution stationary(const FiniteChain& c);

double dirichlet_form(const FiniteChain& c, const std::vector<double>& pi,
                      const std::vector<double>& f);

// Dirichlet energy of the equilibrium potential between A and B.
double capacity(const FiniteChain& c, const std::vector<int>& A, const std::vector<int>& B);

// Chain watched on `subset` (state k of the result is subset[k]).
FiniteChain trace_chain(const FiniteChain& c, const std::vector<int>& subset);

// Sparse solve A X = B: direct factorization up to 5e4 unknowns, Jacobi
// preconditioned BiCGSTAB above. Throws ContractViolation when the residual
// exceeds 1e-10 (relative to the right-hand side scale).
Eigen::MatrixXd solve_linear(const Eigen::SparseMatrix<double>& A, const Eigen::MatrixXd& B,
                             const char* what);

inline constexpr int kDirectSolveLimit = 50000;

}  // namespace kawasaki
