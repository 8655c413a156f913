#include "kawasaki/kmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "kawasaki/errors.hpp"
#include "kawasaki/valleys.hpp"

namespace kawasaki {

// ---------------------------------------------------------------- rng

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t r) {
    std::uint64_t x = seed ^ (0xd1b54a32d192ed03ull * (r + 1));
    splitmix64(x);
    return splitmix64(x);
}

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
}

static inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t Rng::next() {
    std::uint64_t r = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return r;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
double Rng::uniform_open() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    std::uint64_t l = static_cast<std::uint64_t>(m);
    if (l < n) {
        std::uint64_t t = (0 - n) % n;
        while (l < t) {
            x = next();
            m = static_cast<__uint128_t>(x) * n;
            l = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

// ---------------------------------------------------------------- engine

Kmc::Kmc(const Configuration& start, double beta, std::uint64_t seed)
    : cfg_(start), beta_(beta), rng_(seed) {
    if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
    int n = start.n();
    if (n == 0) throw std::invalid_argument("particle count must be a square");
    hmin_ = ground_energy(n);
    for (int k = 0; k < 4; ++k) weight_[k] = std::exp(-beta * k);
    int S = cfg_.torus().size() * 4;
    slot_level_.assign(S, -1);
    slot_pos_.assign(S, -1);
    for (int s = 0; s < S; ++s) refresh_slot(s);
}

void Kmc::refresh_slot(int slot) {
    int x = slot >> 2, d = slot & 3;
    int y = cfg_.torus().neighbors(x)[d];
    int want = -1;
    if (cfg_.occupied(x) && !cfg_.occupied(y)) want = rate_level(cfg_.energy_delta(x, y));
    int have = slot_level_[slot];
    if (want == have) return;
    if (have >= 0) {
        auto& b = bucket_[have];
        int p = slot_pos_[slot];
        b[p] = b.back();
        slot_pos_[b[p]] = p;
        b.pop_back();
    }
    if (want >= 0) {
        slot_pos_[slot] = static_cast<int>(bucket_[want].size());
        bucket_[want].push_back(slot);
    }
    slot_level_[slot] = want;
}

void Kmc::refresh_around(int site) {
    // Sites within distance 2: their moves see changed neighbour counts.
    const Torus& t = cfg_.torus();
    for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2 + std::abs(dy); dx <= 2 - std::abs(dy); ++dx) around_.push_back(t.add(site, dx, dy));
}

double Kmc::total_rate() const {
    double r = 0;
    for (int k = 0; k < 4; ++k) r += static_cast<double>(bucket_[k].size()) * weight_[k];
    return r;
}

std::array<int, 4> Kmc::bucket_sizes() const {
    return {static_cast<int>(bucket_[0].size()), static_cast<int>(bucket_[1].size()),
            static_cast<int>(bucket_[2].size()), static_cast<int>(bucket_[3].size())};
}

Kmc::Step Kmc::step() {
    double total = total_rate();
    if (!(total > 0)) throw ContractViolation("no admissible exchange");
    double dt = -std::log(rng_.uniform_open()) / total;
    double u = rng_.uniform() * total;
    int k = 0;
    for (; k < 3; ++k) {
        double w = static_cast<double>(bucket_[k].size()) * weight_[k];
        if (u < w) break;
        u -= w;
    }
    while (bucket_[k].empty()) --k;  // rounding at the top end
    int slot = bucket_[k][rng_.below(bucket_[k].size())];
    int from = slot >> 2;
    int to = cfg_.torus().neighbors(from)[slot & 3];
    cfg_.apply_swap(from, to);
    around_.clear();
    refresh_around(from);
    refresh_around(to);
    std::sort(around_.begin(), around_.end());
    around_.erase(std::unique(around_.begin(), around_.end()), around_.end());
    for (int s : around_)
        for (int d = 0; d < 4; ++d) refresh_slot(s * 4 + d);
    time_ += dt;
    ++events_;
    return {dt, from, to};
}

// ---------------------------------------------------------------- trajectories

Trajectory simulate(const Configuration& start, double beta, const StopRule& stop, std::uint64_t seed) {
    Kmc k(start, beta, seed);
    Trajectory t{start, {}, 0, false};
    while (true) {
        if (stop.predicate && stop.predicate(k.config())) break;
        if (k.events() >= stop.max_events) {
            t.truncated = true;
            break;
        }
        // A time stop cuts the last holding interval.
        Kmc::Step s = k.step();
        if (stop.max_time > 0 && k.time() > stop.max_time) {
            t.end_time = stop.max_time;
            return t;
        }
        t.events.push_back({k.time(), s.from, s.to, k.level()});
    }
    t.end_time = k.time();
    return t;
}

std::optional<Site> square_anchor(const Configuration& c) {
    int n = c.n();
    if (n == 0 || c.energy() != ground_energy(n)) return std::nullopt;
    const Torus& t = c.torus();
    for (int s : c.sites())
        if (!c.occupied(t.add(s, -1, 0)) && !c.occupied(t.add(s, 0, -1))) return t.site(s);
    throw ContractViolation("minimum-energy configuration without a lower-left corner");
}

std::vector<TraceSegment> trace_on(const Trajectory& t,
                                   const std::function<std::optional<long long>(const Configuration&)>& label) {
    std::vector<TraceSegment> out;
    Configuration c = t.initial;
    double clock = 0, trace_clock = 0;
    std::optional<long long> cur = label(c);
    auto visit = [&](double until) {
        if (!cur) return;
        double d = until - clock;
        if (!out.empty() && out.back().label == *cur) {
            out.back().duration += d;
        } else {
            out.push_back({*cur, clock, trace_clock, d});
        }
        trace_clock += d;
    };
    for (const Event& e : t.events) {
        visit(e.time);
        clock = e.time;
        c.apply_swap(e.from, e.to);
        cur = label(c);
    }
    visit(t.end_time);
    return out;
}

// ---------------------------------------------------------------- parallel runs

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("KAWASAKI_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return w;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? static_cast<int>(h) : 1;
}

namespace {

template <class F>
void run_jobs(int jobs, int workers, F&& f) {
    workers = std::max(1, std::min(workers, jobs));
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto body = [&] {
        while (true) {
            int j = next.fetch_add(1);
            if (j >= jobs) return;
            try {
                f(j);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                next.store(jobs);
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);
}

constexpr int kExcursionsPerReplica = 50;

struct ReplicaResult {
    std::vector<ExcursionRecord> records;
    double time_total = 0, time_outside = 0;
    bool truncated = false;
    std::uint64_t events = 0;
};

ReplicaResult run_replica(int n, int L, double beta, int count, std::uint64_t seed, std::uint64_t budget) {
    Torus torus(L);
    Kmc k(square_config({0, 0}, n, torus), beta, seed);
    ReplicaResult r;
    Site at{0, 0};
    while (static_cast<int>(r.records.size()) < count) {
        ExcursionRecord rec{at, at, 0, 0, 0, 0, false, 0};
        std::uint64_t start_events = k.events();
        double start_time = k.time();
        bool done = false;
        while (!done) {
            if (k.events() - start_events >= budget) {
                r.truncated = true;
                break;
            }
            bool in_ground = k.level() == 0;
            Kmc::Step s = k.step();
            if (in_ground)
                rec.trace_duration += s.dt;
            else
                r.time_outside += s.dt;
            int lv = k.level();
            rec.max_level = std::max(rec.max_level, lv);
            if (lv >= 3) rec.entered_delta2 = true;
            if (lv == 0) {
                Site y = *square_anchor(k.config());
                if (!(y == at)) {
                    rec.end = y;
                    done = true;
                }
            }
        }
        rec.real_duration = k.time() - start_time;
        rec.events = k.events() - start_events;
        r.time_total += rec.real_duration;
        if (r.truncated) break;
        rec.displacement = torus.index(rec.end.x - rec.start.x, rec.end.y - rec.start.y);
        at = rec.end;
        r.records.push_back(rec);
    }
    r.events = k.events();
    return r;
}

}  // namespace

ExcursionReport excursion_stats(int n, int L, double beta, int excursions, std::uint64_t seed, int workers,
                                std::uint64_t event_budget) {
    check_parameters(n, L);
    if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
    if (excursions <= 0) throw std::invalid_argument("excursion count must be positive");
    int jobs = (excursions + kExcursionsPerReplica - 1) / kExcursionsPerReplica;
    std::vector<ReplicaResult> parts(jobs);
    run_jobs(jobs, resolve_workers(workers), [&](int j) {
        int count = std::min(kExcursionsPerReplica, excursions - j * kExcursionsPerReplica);
        parts[j] = run_replica(n, L, beta, count, replica_seed(seed, j), event_budget);
    });
    ExcursionReport rep;
    rep.n = n;
    rep.L = L;
    rep.beta = beta;
    rep.seed = seed;
    rep.kernel.assign(L * L, 0.0);
    double outside = 0;
    int delta2 = 0;
    for (auto& p : parts) {
        for (auto& rec : p.records) {
            rep.records.push_back(rec);
            rep.kernel[rec.displacement] += 1;
            delta2 += rec.entered_delta2;
        }
        rep.time_total += p.time_total;
        outside += p.time_outside;
        rep.truncated = rep.truncated || p.truncated;
        rep.events += p.events;
    }
    rep.time_outside_ground = rep.time_total > 0 ? outside / rep.time_total : 0;
    if (!rep.records.empty()) {
        for (double& x : rep.kernel) x /= static_cast<double>(rep.records.size());
        rep.delta2_fraction = static_cast<double>(delta2) / static_cast<double>(rep.records.size());
    }
    return rep;
}

std::vector<ValleyExitRecord> valley_exit_runs(int n, int L, double beta, const ValleyId& v, int runs,
                                               std::uint64_t seed, int workers, std::uint64_t event_budget) {
    const Taxonomy& tax = Taxonomy::get(n, L);
    if (v.is_ground()) throw std::invalid_argument("valley exit runs need a non-ground valley");
    auto members = tax.members(v);
    std::unordered_set<Configuration, ConfigurationHash> inside(members.begin(), members.end());
    std::vector<ValleyExitRecord> out(runs);
    run_jobs(runs, resolve_workers(workers), [&](int j) {
        int m = j % static_cast<int>(members.size());
        Kmc k(members[m], beta, replica_seed(seed, j));
        ValleyExitRecord rec{m, 0, m == 0, std::nullopt, 0, false};
        while (true) {
            if (k.events() >= event_budget) {
                rec.truncated = true;
                break;
            }
            k.step();
            int lv = k.level();
            if (lv > 1) continue;
            if (inside.count(k.config())) {
                if (!rec.attractor_first && k.config() == members[0]) rec.attractor_first = true;
                continue;
            }
            rec.target_level = lv;
            auto c = tax.classify(k.config());
            if (auto* id = std::get_if<ValleyId>(&c)) rec.target = *id;
            break;
        }
        rec.time = k.time();
        out[j] = rec;
    });
    return out;
}

// ---------------------------------------------------------------- statistics

double ks_exponential(const std::vector<double>& samples, double rate) {
    if (samples.size() < 30) throw std::invalid_argument("KS test needs at least 30 samples");
    if (!(rate > 0)) throw std::invalid_argument("rate must be positive");
    std::vector<double> x(samples);
    std::sort(x.begin(), x.end());
    double n = static_cast<double>(x.size()), d = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0) throw std::invalid_argument("negative sample");
        double F = 1 - std::exp(-rate * x[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

double ks_exponentiality(const std::vector<double>& samples) {
    if (samples.size() < 30) throw std::invalid_argument("KS test needs at least 30 samples");
    double mean = 0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    if (!(mean > 0)) return 1.0;
    return ks_exponential(samples, 1.0 / mean);
}

double ks_critical(int n, double alpha) {
    if (n <= 0 || !(alpha > 0 && alpha < 1)) throw std::invalid_argument("bad KS parameters");
    return std::sqrt(-0.5 * std::log(alpha / 2)) / std::sqrt(static_cast<double>(n));
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("distributions on different supports");
    double s = 0;
    for (size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

}  // namespace kawasaki
