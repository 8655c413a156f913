// Command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kawasaki/kawasaki.h"

namespace {

struct Args {
    int n = 4;
    int L = 12;
    double beta = 7;
    std::vector<double> betas{5, 6, 7};
    int excursions = 500;
    std::uint64_t seed = 1;
    int workers = 0;
    std::uint64_t budget = 100'000'000;
    std::string out;
    std::string config;
};

int exit_code(kw_status s) {
    switch (s) {
        case KW_OK: return 0;
        case KW_INVALID_ARGUMENT: return 2;
        case KW_CONTRACT:
        case KW_TAXONOMY_CLOSURE: return 3;
        default: return 1;
    }
}

const char* status_name(kw_status s) {
    switch (s) {
        case KW_INVALID_ARGUMENT: return "invalid argument";
        case KW_CONTRACT: return "contract violation";
        case KW_TAXONOMY_CLOSURE: return "taxonomy closure violation";
        default: return "internal error";
    }
}

// Values from the config file fill every option not given on the command line.
void apply_config(CLI::App* sub, Args& a) {
    if (a.config.empty()) return;
    std::ifstream in(a.config);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + a.config);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--config", e.what());
    }
    auto unset = [&](const char* flag) {
        CLI::Option* o = nullptr;
        try {
            o = sub->get_option(flag);
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
        return o->count() == 0;
    };
    try {
        if (j.contains("n") && unset("--n")) a.n = j["n"].get<int>();
        if (j.contains("L") && unset("--L")) a.L = j["L"].get<int>();
        if (j.contains("beta") && unset("--beta")) a.beta = j["beta"].get<double>();
        if (j.contains("beta_list") && unset("--beta-list")) a.betas = j["beta_list"].get<std::vector<double>>();
        if (j.contains("excursions") && unset("--excursions")) a.excursions = j["excursions"].get<int>();
        if (j.contains("seed") && unset("--seed")) a.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("workers") && unset("--workers")) a.workers = j["workers"].get<int>();
        if (j.contains("budget") && unset("--budget")) a.budget = j["budget"].get<std::uint64_t>();
        if (j.contains("out") && unset("--out")) a.out = j["out"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ValidationError("--config", e.what());
    }
}

int emit(kw_status s, kw_text* t, const Args& a, const std::string& what) {
    if (s != KW_OK) {
        std::cerr << "error: " << status_name(s) << ": " << kw_last_error() << "\n";
        return exit_code(s);
    }
    if (a.out.empty()) {
        std::fwrite(kw_text_data(t), 1, kw_text_size(t), stdout);
    } else {
        std::ofstream f(a.out, std::ios::binary);
        f.write(kw_text_data(t), static_cast<std::streamsize>(kw_text_size(t)));
        if (!f) {
            std::cerr << "error: cannot write " << a.out << "\n";
            kw_text_free(t);
            return 1;
        }
        std::cout << what << " written to " << a.out << "\n";
    }
    kw_text_free(t);
    return 0;
}

void add_common(CLI::App* s, Args& a) {
    s->add_option("--n", a.n, "side of the ground square (K = n^2)");
    s->add_option("--L", a.L, "torus side, at least 2n+1");
    s->add_option("--out", a.out, "output file (stdout if omitted)");
    s->add_option("--config", a.config, "JSON file with default values for the flags");
}

void add_sim(CLI::App* s, Args& a) {
    s->add_option("--excursions", a.excursions, "number of ground-to-ground excursions");
    s->add_option("--seed", a.seed, "master seed");
    s->add_option("--budget", a.budget, "event budget per excursion");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kawasaki lattice gas: limit rates and finite-temperature simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kw_version()));
    Args a;

    auto* rates = app.add_subcommand("rates", "ground kernel Z, Q and r as JSON");
    add_common(rates, a);
    auto* meso = app.add_subcommand("meso", "mesoscopic rate table and absorption probabilities");
    add_common(meso, a);
    auto* elem = app.add_subcommand("elementary", "elementary chain probabilities");
    add_common(elem, a);
    auto* tax = app.add_subcommand("taxonomy", "valley counts");
    add_common(tax, a);
    auto* sim = app.add_subcommand("simulate", "event stream of one trajectory as CSV");
    add_common(sim, a);
    add_sim(sim, a);
    sim->add_option("--beta", a.beta, "inverse temperature");
    auto* val = app.add_subcommand("validate", "simulation against the exact kernel");
    add_common(val, a);
    add_sim(val, a);
    val->add_option("--beta-list", a.betas, "inverse temperatures")->delimiter(',');
    val->add_option("--workers", a.workers, "concurrent replicas (default KAWASAKI_WORKERS or all cores)");

    try {
        app.parse(argc, argv);
        CLI::App* sub = app.get_subcommands().front();
        apply_config(sub, a);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    kw_text* t = nullptr;
    if (kw_status s = kw_check_parameters(a.n, a.L); s != KW_OK) {
        std::cerr << "error: " << kw_last_error() << "\n" << app.help();
        return exit_code(s);
    }
    kw_status s = KW_OK;
    const char* what = "";
    if (*rates) {
        s = kw_rates_json(a.n, a.L, &t);
        what = "ground kernel";
    } else if (*meso) {
        s = kw_meso_json(a.n, a.L, &t);
        what = "mesoscopic table";
    } else if (*elem) {
        s = kw_elementary_json(a.n, a.L, &t);
        what = "elementary values";
    } else if (*tax) {
        s = kw_taxonomy_json(a.n, a.L, &t);
        what = "taxonomy";
    } else if (*sim) {
        s = kw_simulate_csv(a.n, a.L, a.beta, a.excursions, a.seed, a.budget, &t);
        what = "trajectory";
    }
    if (!*val) return emit(s, t, a, what);

    s = kw_validate_json(a.n, a.L, a.betas.data(), static_cast<int>(a.betas.size()), a.excursions, a.seed,
                         a.workers, a.budget, &t);
    if (s == KW_OK && !a.out.empty()) {
        auto j = nlohmann::json::parse(kw_text_data(t));
        for (const auto& r : j["runs"])
            std::cout << "beta " << r["beta"] << ": tv " << r.value("tv", -1.0) << ", delta2 "
                      << r["delta2_fraction"] << ", outside " << r["time_outside_ground"] << "\n";
    }
    return emit(s, t, a, "validation report");
}
