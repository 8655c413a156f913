#pragma once

#include <utility>
#include <vector>

#include "kawasaki/chains.hpp"
#include "kawasaki/lattice.hpp"

namespace kawasaki {

// Outer boundary of the n x n square anchored at the origin.
std::vector<Site> square_outer_boundary(int n, const Torus& torus);

// Probability that the rate-1 symmetric walk on the L-torus started at
// `start` first enters G inside `targets`. G defaults to the outer boundary
// of the n x n square at the origin (pass an empty G for that).
double torus_hit(int n, int L, Site start, const std::vector<Site>& targets,
                 const std::vector<Site>& G = {});

// Sum of torus_hit from the two sites w2+2e2 and w2+e1+e2 (w2 the top-right
// corner of the square).
double p_of_A(int n, int L, const std::vector<Site>& A);

// Nearest-neighbour walk on {(j,k): 0<=j<k<=n-1} u {(0,0)}; labels in `states`.
FiniteChain corner_chain(int n, std::vector<std::pair<int, int>>* states = nullptr);
// Nearest-neighbour walk on {0..n-1}^2, optionally with the extra state
// attached to (1,1) (stored last).
FiniteChain hole_particle_chain(int n, bool with_extra, std::vector<std::pair<int, int>>* states = nullptr);

// Probability, from (0,1), to reach the far row before (0,0).
double q_corner(int n);

struct RProbs {
    double plus = 0;
    double minus = 0;
    double total = 0;
    std::vector<double> zero;  // zero[k]: from (k,1), absorbed at (0,0)
};
RProbs r_probs(int n, bool with_extra = false);

// Two independent walkers on {m..M} (reflecting) started at (a, a+2); the
// probability that they first become adjacent at (b, b+1).
double m_interval(int m, int M, int a, int b);

}  // namespace kawasaki
