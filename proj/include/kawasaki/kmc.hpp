#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kawasaki/config.hpp"
#include "kawasaki/valley_id.hpp"

namespace kawasaki {

// xoshiro256** with its state filled by splitmix64 from a 64-bit seed.
// Uniform doubles take the top 53 bits. Changing any of this bumps kRngVersion.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    double uniform();            // [0,1)
    double uniform_open();       // (0,1]
    std::uint64_t below(std::uint64_t n);  // unbiased, [0,n)
private:
    std::array<std::uint64_t, 4> s_;
};
inline constexpr const char* kRngVersion = "xoshiro256starstar+splitmix64/v1";
std::uint64_t splitmix64(std::uint64_t& state);
// Seed of replica r, derived from the master seed.
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t r);

// Rejection-free simulation of the exchange dynamics. Admissible exchanges
// are bucketed by cost level 0..3; an event picks a level by weight and then a
// uniform member of the bucket.
class Kmc {
public:
    Kmc(const Configuration& start, double beta, std::uint64_t seed);

    struct Step {
        double dt;
        int from, to;
    };
    Step step();

    const Configuration& config() const { return cfg_; }
    double time() const { return time_; }
    std::uint64_t events() const { return events_; }
    int level() const { return cfg_.energy() - hmin_; }
    double total_rate() const;
    std::array<int, 4> bucket_sizes() const;

private:
    void refresh_slot(int slot);
    void refresh_around(int site);

    Configuration cfg_;
    double beta_;
    Rng rng_;
    int hmin_;
    double time_ = 0;
    std::uint64_t events_ = 0;
    std::array<double, 4> weight_;
    std::array<std::vector<int>, 4> bucket_;
    std::vector<int> slot_level_;  // -1: not a move
    std::vector<int> slot_pos_;
    std::vector<int> around_;      // scratch
};

struct Event {
    double time;
    int from, to;
    int level;  // after the event
};

struct Trajectory {
    Configuration initial;
    std::vector<Event> events;
    double end_time = 0;
    bool truncated = false;
};

struct StopRule {
    std::uint64_t max_events = 100'000'000;
    double max_time = 0;  // 0: no limit
    std::function<bool(const Configuration&)> predicate;  // stop when true
};

Trajectory simulate(const Configuration& start, double beta, const StopRule& stop, std::uint64_t seed);

// Anchor of a square configuration, or nullopt when the configuration is not
// a ground state.
std::optional<Site> square_anchor(const Configuration& c);

// Visits of the trajectory to a watched set; `label` returns the state of the
// watched process or nullopt outside the set. Consecutive visits with the same
// label are merged, so labels alternate.
struct TraceSegment {
    long long label;
    double real_start;
    double trace_start;
    double duration;  // time spent in the set during this visit
};
std::vector<TraceSegment> trace_on(const Trajectory& t,
                                   const std::function<std::optional<long long>(const Configuration&)>& label);

struct ExcursionRecord {
    Site start, end;
    int displacement;       // flat index of end - start
    double trace_duration;  // time at ground states
    double real_duration;
    int max_level;
    bool entered_delta2;    // level >= 3 at some point
    std::uint64_t events;
};

struct ExcursionReport {
    int n = 0, L = 0;
    double beta = 0;
    std::uint64_t seed = 0;
    std::vector<ExcursionRecord> records;
    std::vector<double> kernel;  // empirical law of the displacement
    double time_total = 0;
    double time_outside_ground = 0;
    double delta2_fraction = 0;
    bool truncated = false;
    std::uint64_t events = 0;
};

// Workers: 0 picks KAWASAKI_WORKERS or the hardware concurrency. Replicas are
// fixed chunks of excursions with their own seeds, so the result does not
// depend on the worker count.
ExcursionReport excursion_stats(int n, int L, double beta, int excursions, std::uint64_t seed,
                                int workers = 0, std::uint64_t event_budget = 100'000'000);

struct ValleyExitRecord {
    int start_member;
    double time;               // real time until the first level <= 1 state outside the valley
    bool attractor_first;      // member 0 visited before the exit
    std::optional<ValleyId> target;  // nullopt: outside the taxonomy
    int target_level;
    bool truncated;
};
std::vector<ValleyExitRecord> valley_exit_runs(int n, int L, double beta, const ValleyId& v, int runs,
                                               std::uint64_t seed, int workers = 0,
                                               std::uint64_t event_budget = 100'000'000);

int resolve_workers(int requested);

// One-sample Kolmogorov-Smirnov distance to the unit exponential after
// dividing by the sample mean.
double ks_exponentiality(const std::vector<double>& samples);
// Same against the exponential law of the given rate (no rescaling).
double ks_exponential(const std::vector<double>& samples, double rate);
// Asymptotic critical value of the one-sample KS distance.
double ks_critical(int n, double alpha);

double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace kawasaki
