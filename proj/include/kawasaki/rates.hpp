#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "kawasaki/chains.hpp"
#include "kawasaki/valleys.hpp"

namespace kawasaki {

struct ValleyRates {
    ValleyId valley;
    double Z = 0;
    HittingMeasure Q;  // exit law, off the valley itself
    HittingMeasure R;  // Z * Q
    int neighborhood_size = 0;  // distinct configurations
    int exit_edges = 0;         // exchanges from members into the neighbourhood
};

// Z = sum over exits (member, exchange) of 1 - M(xi, v). Each exit is weighted
// by how many member exchanges produce it.
ValleyRates valley_rates(const Taxonomy& tax, LimitSolver& solver, const ValleyId& v);

// Per-anchor tables, built once per (n, L).
class RateTables {
public:
    static const RateTables& get(int n, int L);
    RateTables(int n, int L);

    const Taxonomy& taxonomy() const { return tax_; }
    // Rates for the prototype at anchor (0,0); index by prototype.
    const ValleyRates& prototype(int p) const { return protos_[p]; }
    ValleyRates at(const ValleyId& v) const;  // translated

private:
    const Taxonomy& tax_;
    std::vector<ValleyRates> protos_;
};

// Mesoscopic chain over all kappa valleys; ground rows are zero.
FiniteChain meso_chain(const RateTables& t);

// Column q(., Ground(0)) of the absorption matrix, indexed like the valleys.
Eigen::VectorXd ground_absorption(const RateTables& t);
// q(v, Ground(y)) read off the column above by translation.
double absorption_q(const RateTables& t, const Eigen::VectorXd& h, const ValleyId& v, Site y);
// Full absorption matrix (kappa x L^2) from one solve with every ground as
// its own part. Only for small systems; used to validate the shortcut.
Eigen::MatrixXd absorption_q_full(const RateTables& t);

struct GroundKernel {
    int n = 0, L = 0;
    double Z = 0;
    Eigen::MatrixXd Q;  // L^2 x L^2
    Eigen::MatrixXd r;  // Z * Q
};
GroundKernel ground_kernel(int n, int L);

// Mean exit time of a non-ground valley on the e^beta scale: |members| / Z.
double depth(const RateTables& t, const ValleyId& v);

}  // namespace kawasaki
