#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "kawasaki/lattice.hpp"
#include "kawasaki/valley_id.hpp"

namespace kawasaki {

// Particle occupancy of the torus with cached energy -(number of occupied edges).
class Configuration {
public:
    Configuration(const Torus& torus, const std::vector<int>& sites);

    const Torus& torus() const { return torus_; }
    int K() const { return K_; }
    // Side of the ground square when K is a perfect square, 0 otherwise.
    int n() const;

    bool occupied(int idx) const { return (bits_[idx >> 6] >> (idx & 63)) & 1u; }
    int occupied_neighbors(int idx) const;
    int energy() const { return energy_; }
    int recompute_energy() const;

    // Energy change of exchanging the occupations of adjacent sites a and b;
    // throws std::invalid_argument when they are not adjacent.
    int energy_delta(int a, int b) const;
    void apply_swap(int a, int b);
    Configuration swapped(int a, int b) const {
        Configuration c(*this);
        c.apply_swap(a, b);
        return c;
    }

    std::vector<int> sites() const;
    const std::vector<std::uint64_t>& bits() const { return bits_; }
    std::size_t hash() const;

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.torus_.L() == b.torus_.L() && a.bits_ == b.bits_;
    }

private:
    void set(int idx, bool v) {
        if (v)
            bits_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
        else
            bits_[idx >> 6] &= ~(std::uint64_t{1} << (idx & 63));
    }

    Torus torus_;
    std::vector<std::uint64_t> bits_;
    int K_ = 0;
    int energy_ = 0;
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const { return c.hash(); }
};

inline int ground_energy(int n) { return -2 * n * (n - 1); }

// Throws std::invalid_argument unless 4 <= n and L >= 2n+1.
void check_parameters(int n, int L);

Configuration square_config(Site x, int n, const Torus& torus);

// Rate exp(-beta * max(dH, 0)) of the exchange across edge {a, b}.
double rate(const Configuration& cfg, int a, int b, double beta);
inline int rate_level(int delta) { return delta > 0 ? delta : 0; }

struct Other {
    int level = 0;
    friend bool operator==(const Other&, const Other&) = default;
};
using Classification = std::variant<ValleyId, Other>;

// Ground(x), a taxonomy valley, or Other{H - H_min}. Requires K = n^2.
Classification classify(const Configuration& cfg);

// Path from the ground square at x to the one at x + dir through
// configurations of energy at most H_min + 2, audited before return.
std::vector<Configuration> saddle_path(Site x, Offset dir, int n, const Torus& torus);

std::string to_json(const Configuration& cfg);
Configuration configuration_from_json(const std::string& text);

}  // namespace kawasaki
