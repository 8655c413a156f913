#include "kawasaki/kawasaki.h"

#include <algorithm>
#include <exception>
#include <functional>
#include <new>
#include <stdexcept>
#include <string>

#include "kawasaki/config.hpp"
#include "kawasaki/errors.hpp"
#include "kawasaki/kmc.hpp"
#include "kawasaki/rates.hpp"
#include "kawasaki/reports.hpp"

struct kw_text {
    std::string s;
};
struct kw_kernel {
    kawasaki::GroundKernel g;
};
struct kw_report {
    kawasaki::ExcursionReport r;
};

namespace {

thread_local std::string g_error;

template <class F>
kw_status guard(F&& f) {
    g_error.clear();
    try {
        f();
        return KW_OK;
    } catch (const kawasaki::TaxonomyClosureError& e) {
        g_error = e.what();
        return KW_TAXONOMY_CLOSURE;
    } catch (const kawasaki::ContractViolation& e) {
        g_error = e.what();
        return KW_CONTRACT;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return KW_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_error = e.what();
        return KW_INTERNAL;
    } catch (...) {
        g_error = "unknown failure";
        return KW_INTERNAL;
    }
}

kw_status text(kw_text** out, const std::function<std::string()>& make) {
    if (!out) {
        g_error = "null output pointer";
        return KW_INVALID_ARGUMENT;
    }
    *out = nullptr;
    return guard([&] { *out = new kw_text{make()}; });
}

void need(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

extern "C" {

const char* kw_last_error(void) { return g_error.c_str(); }
const char* kw_version(void) { return kawasaki::kToolVersion; }
const char* kw_rng_version(void) { return kawasaki::kRngVersion; }

kw_status kw_check_parameters(int n, int L) {
    return guard([&] { kawasaki::check_parameters(n, L); });
}

const char* kw_text_data(const kw_text* t) { return t ? t->s.c_str() : ""; }
size_t kw_text_size(const kw_text* t) { return t ? t->s.size() : 0; }
void kw_text_free(kw_text* t) { delete t; }

kw_status kw_rates_json(int n, int L, kw_text** out) {
    return text(out, [&] { return kawasaki::dump17(kawasaki::rates_report(n, L)); });
}
kw_status kw_meso_json(int n, int L, kw_text** out) {
    return text(out, [&] { return kawasaki::dump17(kawasaki::meso_report(n, L)); });
}
kw_status kw_elementary_json(int n, int L, kw_text** out) {
    return text(out, [&] { return kawasaki::dump17(kawasaki::elementary_report(n, L)); });
}
kw_status kw_taxonomy_json(int n, int L, kw_text** out) {
    return text(out, [&] { return kawasaki::dump17(kawasaki::taxonomy_report(n, L)); });
}

kw_status kw_validate_json(int n, int L, const double* betas, int nbetas, int excursions, uint64_t seed,
                           int workers, uint64_t event_budget, kw_text** out) {
    return text(out, [&] {
        need(betas && nbetas > 0, "empty beta list");
        kawasaki::ValidateOptions o;
        o.n = n;
        o.L = L;
        o.betas.assign(betas, betas + nbetas);
        o.excursions = excursions;
        o.seed = seed;
        o.workers = workers;
        o.budget = event_budget;
        return kawasaki::dump17(kawasaki::validate_report(o));
    });
}

kw_status kw_simulate_csv(int n, int L, double beta, int excursions, uint64_t seed, uint64_t event_budget,
                          kw_text** out) {
    return text(out, [&] { return kawasaki::simulate_csv(n, L, beta, excursions, seed, event_budget); });
}

kw_status kw_kernel_create(int n, int L, kw_kernel** out) {
    if (!out) return KW_INVALID_ARGUMENT;
    *out = nullptr;
    return guard([&] { *out = new kw_kernel{kawasaki::ground_kernel(n, L)}; });
}
void kw_kernel_free(kw_kernel* k) { delete k; }
int kw_kernel_dim(const kw_kernel* k) { return k ? static_cast<int>(k->g.Q.rows()) : 0; }
double kw_kernel_z(const kw_kernel* k) { return k ? k->g.Z : 0.0; }

kw_status kw_kernel_q(const kw_kernel* k, int x, int y, double* out) {
    return guard([&] {
        need(k && out && x >= 0 && y >= 0 && x < k->g.Q.rows() && y < k->g.Q.cols(), "kernel index out of range");
        *out = k->g.Q(x, y);
    });
}
kw_status kw_kernel_r(const kw_kernel* k, int x, int y, double* out) {
    return guard([&] {
        need(k && out && x >= 0 && y >= 0 && x < k->g.r.rows() && y < k->g.r.cols(), "kernel index out of range");
        *out = k->g.r(x, y);
    });
}

kw_status kw_report_create(int n, int L, double beta, int excursions, uint64_t seed, int workers,
                           uint64_t event_budget, kw_report** out) {
    if (!out) return KW_INVALID_ARGUMENT;
    *out = nullptr;
    return guard([&] {
        need(event_budget > 0, "event budget must be positive");
        *out = new kw_report{kawasaki::excursion_stats(n, L, beta, excursions, seed, workers, event_budget)};
    });
}
void kw_report_free(kw_report* r) { delete r; }
int kw_report_count(const kw_report* r) { return r ? static_cast<int>(r->r.records.size()) : 0; }
int kw_report_truncated(const kw_report* r) { return r ? r->r.truncated : 0; }
double kw_report_delta2_fraction(const kw_report* r) { return r ? r->r.delta2_fraction : 0.0; }
double kw_report_outside_fraction(const kw_report* r) { return r ? r->r.time_outside_ground : 0.0; }

kw_status kw_report_kernel(const kw_report* r, double* out, size_t len) {
    return guard([&] {
        need(r && out && len >= r->r.kernel.size(), "buffer too small");
        std::copy(r->r.kernel.begin(), r->r.kernel.end(), out);
    });
}
kw_status kw_report_durations(const kw_report* r, double* out, size_t len) {
    return guard([&] {
        need(r && out && len >= r->r.records.size(), "buffer too small");
        for (size_t i = 0; i < r->r.records.size(); ++i) out[i] = r->r.records[i].trace_duration;
    });
}

}  // extern "C"
