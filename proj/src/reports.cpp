#include "kawasaki/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "kawasaki/closed_forms.hpp"
#include "kawasaki/elementary.hpp"
#include "kawasaki/kmc.hpp"
#include "kawasaki/rates.hpp"

namespace kawasaki {

using nlohmann::json;

namespace {

void emit(const json& j, std::string& out, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                emit(it.value(), out, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            // Numeric arrays stay on one line.
            bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat && indent >= 0 ? ", " : ",";
                first = false;
                if (!flat) newline(depth + 1);
                emit(e, out, indent, depth + 1);
            }
            if (!flat && !j.empty()) newline(depth);
            out += ']';
            return;
        }
        case json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

json matrix(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        a.push_back(std::move(row));
    }
    return a;
}

json measure(const HittingMeasure& m, const Taxonomy& tax) {
    json a = json::array();
    for (const auto& [u, w] : m) a.push_back({{"valley", u.str()}, {"index", tax.index_of(u)}, {"weight", w}});
    return a;
}

json nl(int n, int L) { return {{"n", n}, {"L", L}}; }

}  // namespace

std::string dump17(const json& j, int indent) {
    std::string out;
    emit(j, out, indent, 0);
    out += '\n';
    return out;
}

json metadata(const json& parameters, long long seed) {
    json m{{"tool", "kawasaki"}, {"version", kToolVersion}, {"rng", kRngVersion}, {"parameters", parameters}};
    if (seed >= 0) m["seed"] = seed;
    return m;
}

json rates_report(int n, int L) {
    check_parameters(n, L);
    GroundKernel g = ground_kernel(n, L);
    const Taxonomy& tax = Taxonomy::get(n, L);
    return {{"meta", metadata(nl(n, L))}, {"n", n},         {"L", L},
            {"kappa", tax.kappa()},       {"Z", g.Z},       {"Q", matrix(g.Q)},
            {"r", matrix(g.r)}};
}

json meso_report(int n, int L) {
    check_parameters(n, L);
    const RateTables& t = RateTables::get(n, L);
    const Taxonomy& tax = t.taxonomy();
    const Torus& torus = tax.torus();
    Eigen::VectorXd h = ground_absorption(t);
    json protos = json::array();
    for (int p = 0; p < static_cast<int>(tax.prototypes().size()); ++p) {
        const ValleyId& v = tax.prototypes()[p];
        json e{{"valley", v.str()},
               {"family", family_name(v.family)},
               {"index", tax.index_of(v)},
               {"members", tax.member_offsets(p).size()}};
        if (!v.is_ground()) {
            const ValleyRates& vr = t.prototype(p);
            e["Z"] = vr.Z;
            e["depth"] = depth(t, v);
            e["rates"] = measure(vr.R, tax);
            json q = json::array();
            for (int y = 0; y < torus.size(); ++y) q.push_back(absorption_q(t, h, v, torus.site(y)));
            e["q_ground"] = q;
        }
        protos.push_back(std::move(e));
    }
    return {{"meta", metadata(nl(n, L))},
            {"n", n},
            {"L", L},
            {"kappa", tax.kappa()},
            {"anchors", torus.size()},
            {"index_rule", "prototype * L^2 + y * L + x"},
            {"valleys", protos}};
}

json elementary_report(int n, int L) {
    check_parameters(n, L);
    closed::GroundInputs g = closed::ground_inputs(n, L);
    closed::GroundMasses m = closed::ground_masses(n, L);
    RProbs r = r_probs(n);
    return {{"meta", metadata(nl(n, L))},
            {"n", n},
            {"L", L},
            {"q", g.q},
            {"r_plus", r.plus},
            {"r_minus", r.minus},
            {"r", r.total},
            {"r_zero", r.zero},
            {"p", {{"A_e1", g.A_e1}, {"A_e2", g.A_e2}, {"A1", g.A1}, {"A2", g.A2}}},
            {"M_ground", m.ground},
            {"M1_corner_band", m.m1_band},
            {"M2_corner_band", m.m2_band}};
}

json taxonomy_report(int n, int L) {
    check_parameters(n, L);
    const Taxonomy& tax = Taxonomy::get(n, L);
    json protos = json::array();
    for (int p = 0; p < static_cast<int>(tax.prototypes().size()); ++p)
        protos.push_back({{"valley", tax.prototypes()[p].str()},
                          {"family", family_name(tax.prototypes()[p].family)},
                          {"members", tax.member_offsets(p).size()}});
    return {{"meta", metadata(nl(n, L))},
            {"n", n},
            {"L", L},
            {"kappa", tax.kappa()},
            {"per_anchor", tax.family_counts()},
            {"total", [&] {
                 json c;
                 for (auto& [f, k] : tax.family_counts()) c[f] = k * tax.torus().size();
                 return c;
             }()},
            {"prototypes", protos}};
}

TvFloor tv_sampling_floor(const std::vector<double>& p, int N, int reps, std::uint64_t seed) {
    if (N <= 0 || reps <= 0) throw std::invalid_argument("sample size and repetitions must be positive");
    std::vector<double> cdf(p.size());
    double c = 0;
    for (size_t i = 0; i < p.size(); ++i) cdf[i] = c += p[i];
    Rng rng(seed);
    std::vector<double> tvs;
    std::vector<double> e(p.size());
    for (int k = 0; k < reps; ++k) {
        std::fill(e.begin(), e.end(), 0.0);
        for (int s = 0; s < N; ++s) {
            size_t j = std::lower_bound(cdf.begin(), cdf.end(), rng.uniform() * c) - cdf.begin();
            e[std::min(j, p.size() - 1)] += 1.0 / N;
        }
        tvs.push_back(tv_distance(e, p));
    }
    std::sort(tvs.begin(), tvs.end());
    auto at = [&](double f) { return tvs[std::min(tvs.size() - 1, static_cast<size_t>(f * tvs.size()))]; };
    return {at(0.5), at(0.95)};
}

json validate_report(const ValidateOptions& o) {
    check_parameters(o.n, o.L);
    if (o.betas.empty()) throw std::invalid_argument("empty beta list");
    for (double b : o.betas)
        if (!(b > 0)) throw std::invalid_argument("beta must be positive");
    if (o.excursions < 30) throw std::invalid_argument("at least 30 excursions are needed");
    if (o.budget == 0) throw std::invalid_argument("event budget must be positive");

    GroundKernel g = ground_kernel(o.n, o.L);
    std::vector<double> exact(g.Q.row(0).data(), g.Q.row(0).data() + g.Q.cols());
    std::vector<double> betas = o.betas;
    std::sort(betas.begin(), betas.end());

    json runs = json::array();
    std::vector<double> tv, d2, out;
    for (size_t i = 0; i < betas.size(); ++i) {
        double beta = betas[i];
        ExcursionReport rep = excursion_stats(o.n, o.L, beta, o.excursions, replica_seed(o.seed, 1000 + i),
                                              o.workers, o.budget);
        std::vector<double> dur;
        for (const auto& r : rep.records) dur.push_back(r.trace_duration);
        json e{{"beta", beta},
               {"excursions", rep.records.size()},
               {"truncated", rep.truncated},
               {"events", rep.events},
               {"empirical_kernel", rep.kernel},
               {"delta2_fraction", rep.delta2_fraction},
               {"time_outside_ground", rep.time_outside_ground}};
        double N = static_cast<double>(dur.size());
        if (dur.size() >= 30) {
            double mean = 0, var = 0;
            for (double d : dur) mean += d;
            mean /= N;
            for (double d : dur) var += (d - mean) * (d - mean);
            var /= N - 1;
            double scale = g.Z / std::exp(2 * beta);
            double se = std::sqrt(var / N) * scale;
            double tvd = tv_distance(rep.kernel, exact);
            TvFloor fl = tv_sampling_floor(exact, static_cast<int>(dur.size()), 200, replica_seed(o.seed, 2000 + i));
            double p2 = rep.delta2_fraction;
            e["tv"] = tvd;
            e["tv_sampling_floor"] = {{"median", fl.median}, {"q95", fl.q95}};
            e["ks_mean_normalized"] = ks_exponentiality(dur);
            e["ks_exact_rate"] = ks_exponential(dur, scale);
            e["ks_critical_5"] = ks_critical(static_cast<int>(dur.size()), 0.05);
            e["ks_critical_1"] = ks_critical(static_cast<int>(dur.size()), 0.01);
            e["mean_duration"] = mean;
            e["mean_scaled"] = mean * scale;  // -> 1 as beta grows
            e["mean_scaled_ci95"] = {mean * scale - 1.96 * se, mean * scale + 1.96 * se};
            e["delta2_ci95"] = {std::max(0.0, p2 - 1.96 * std::sqrt(p2 * (1 - p2) / N)),
                                std::min(1.0, p2 + 1.96 * std::sqrt(p2 * (1 - p2) / N))};
            tv.push_back(tvd);
        }
        d2.push_back(rep.delta2_fraction);
        out.push_back(rep.time_outside_ground);
        runs.push_back(std::move(e));
    }
    auto decreasing = [](const std::vector<double>& v, size_t want) {
        if (v.size() != want) return false;
        for (size_t i = 1; i < v.size(); ++i)
            if (!(v[i] < v[i - 1])) return false;
        return true;
    };
    json params{{"n", o.n}, {"L", o.L}, {"betas", betas}, {"excursions", o.excursions}, {"event_budget", o.budget}};
    return {{"meta", metadata(params, static_cast<long long>(o.seed))},
            {"Z", g.Z},
            {"exact_kernel", exact},
            {"runs", runs},
            {"trends",
             {{"tv_decreasing", decreasing(tv, betas.size())},
              {"delta2_decreasing", decreasing(d2, betas.size())},
              {"outside_decreasing", decreasing(out, betas.size())}}}};
}

std::string simulate_csv(int n, int L, double beta, int excursions, std::uint64_t seed, std::uint64_t budget) {
    check_parameters(n, L);
    if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
    if (excursions <= 0) throw std::invalid_argument("excursion count must be positive");
    Torus torus(L);
    Site at{0, 0};
    int done = 0;
    StopRule stop;
    stop.max_events = budget;
    stop.predicate = [&](const Configuration& c) {
        if (c.energy() != ground_energy(n)) return false;
        Site y = *square_anchor(c);
        if (!(y == at)) {
            at = y;
            ++done;
        }
        return done >= excursions;
    };
    Trajectory t = simulate(square_config({0, 0}, n, torus), beta, stop, seed);

    std::ostringstream os;
    json params{{"n", n}, {"L", L}, {"beta", beta}, {"excursions", excursions}, {"event_budget", budget}};
    os << "# meta " << metadata(params, static_cast<long long>(seed)).dump() << '\n';
    os << "# truncated " << (t.truncated ? "true" : "false") << " end_time ";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", t.end_time);
    os << buf << '\n';
    os << "event_index,time,x1,y1,x2,y2,level\n";
    for (size_t i = 0; i < t.events.size(); ++i) {
        const Event& e = t.events[i];
        Site a = torus.site(e.from), b = torus.site(e.to);
        std::snprintf(buf, sizeof buf, "%.17g", e.time);
        os << i << ',' << buf << ',' << a.x << ',' << a.y << ',' << b.x << ',' << b.y << ',' << e.level << '\n';
    }
    return os.str();
}

}  // namespace kawasaki
