#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kawasaki/config.hpp"
#include "kawasaki/valley_id.hpp"

namespace kawasaki {

// Side lengths n_i of the inner rectangle of a decorated-rectangle family
// (generation 1: perimeter valleys, generation 2: wide rectangles).
std::array<int, 4> side_lengths(int n, int generation, Orientation a);
// Number of particles attached to each side, a shared corner counted on both.
std::array<int, 4> side_multiplicities(const SideVector& v);
// Side vectors with |R(k,l)| = n^2, optionally restricted to M_i >= 2.
std::vector<SideVector> side_vectors(int n, int generation, Orientation a, bool starred);
// Occupied offsets (relative to the anchor) of a decorated rectangle.
std::vector<Offset> decorated_rectangle(int n, int generation, Orientation a, const SideVector& v);

// Offsets of the corners w_0..w_3 of the n x n square.
Offset corner_offset(int n, int i);
// Outward unit normal of side j (0 bottom, 1 right, 2 top, 3 left).
inline Offset side_normal(int j) {
    constexpr Offset d[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    return d[((j % 4) + 4) % 4];
}

using HittingMeasure = std::map<ValleyId, double>;

// Valley taxonomy for fixed (n, L). Per-anchor data is kept for the anchor
// (0,0) and transported by translation.
class Taxonomy {
public:
    Taxonomy(int n, int L);
    static const Taxonomy& get(int n, int L);  // shared, built once

    int n() const { return n_; }
    const Torus& torus() const { return torus_; }
    int level_of(const Configuration& c) const { return c.energy() - ground_energy(n_); }

    // Anchor-(0,0) representatives, ground first.
    const std::vector<ValleyId>& prototypes() const { return protos_; }
    int prototype_index(const ValleyId& v) const;
    const std::vector<std::vector<Offset>>& member_offsets(int proto) const { return members_[proto]; }

    // All valleys: index = proto * L^2 + flat(anchor), so grounds come first.
    int kappa() const { return static_cast<int>(protos_.size()) * torus_.size(); }
    int index_of(const ValleyId& v) const;
    ValleyId id_at(int index) const;
    std::vector<ValleyId> enumerate() const;

    std::vector<Configuration> members(const ValleyId& v) const;
    std::optional<ValleyId> lookup(const Configuration& c) const;
    Classification classify(const Configuration& c) const;

    std::map<std::string, int> family_counts() const;  // per anchor

private:
    void add_prototype(const ValleyId& v, std::vector<std::vector<Offset>> members);
    void audit_wells() const;

    struct Entry {
        int proto;
        Offset anchor_from_min;  // anchor minus bounding-box corner
    };

    int n_;
    Torus torus_;
    std::vector<ValleyId> protos_;
    std::vector<std::vector<std::vector<Offset>>> members_;
    std::map<ValleyId, int> proto_index_;
    std::unordered_map<std::string, Entry> shapes_;
};

// One exchange leading out of a valley member: `xi` is the result.
struct NeighborEdge {
    Configuration xi;
    int member;
    int from;
    int to;
};

// All exchanges of the lowest leaving cost (2 for ground states, 1 otherwise)
// from members of v, audited to land two levels above the minimum.
std::vector<NeighborEdge> neighborhood_edges(const Taxonomy& tax, const ValleyId& v);
// Distinct configurations of the neighbourhood.
std::vector<Configuration> neighborhood(const Taxonomy& tax, const ValleyId& v);

// Limit (beta -> infinity) law of the first configuration of energy level
// <= 1 reached from a configuration of level >= 2, computed by exploring all
// zero-cost and downhill exchanges. Results are cached per explored component.
class LimitSolver {
public:
    explicit LimitSolver(const Taxonomy& tax);
    ~LimitSolver();
    LimitSolver(const LimitSolver&) = delete;
    LimitSolver& operator=(const LimitSolver&) = delete;

    HittingMeasure measure(const Configuration& xi);
    std::size_t explored_states() const;
    std::size_t max_component() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Hitting measure of a neighbourhood configuration of v; aborts if xi is not
// in the neighbourhood.
HittingMeasure m_measure(const Taxonomy& tax, LimitSolver& solver, const Configuration& xi,
                         const ValleyId& v);

HittingMeasure translate(const HittingMeasure& m, Offset by, const Torus& t);
double mass(const HittingMeasure& m, const ValleyId& v);
double total_mass(const HittingMeasure& m);

// The two level-2 configurations next to the ground square at `w` where the
// top-right corner particle sits above (first) or right of (second) its site.
Configuration eta_star(int j, Site w, int n, const Torus& torus);

struct GroundHitting {
    HittingMeasure m1, m2;
};
GroundHitting ground_m1_m2(const Taxonomy& tax, LimitSolver& solver);

}  // namespace kawasaki
