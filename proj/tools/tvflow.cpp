#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvflow/tvflow.hpp"

namespace {

namespace fs = std::filesystem;
using namespace tvflow;

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kInputError = 2;
constexpr int kInternalError = 3;

bool is_input_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::SchemaError:
        case ErrorCode::ContinuityViolation:
        case ErrorCode::BoundaryMismatch:
        case ErrorCode::EmptyDomain:
        case ErrorCode::DegreeOverflow:
        case ErrorCode::Precondition:
        case ErrorCode::OutOfDomain: return true;
        default: return false;
    }
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string scenario;
    std::string out = "out";
    std::size_t grid_n = 4096;
    bool svg = false;
    std::string until = "extinction";
    std::vector<double> snapshots;
    double h = 0.0;
    bool emit_sigma = false;
    std::size_t random = 0;
    std::uint64_t seed = 1;
};

PiecewiseProfile load(const RunConfig& cfg) {
    if (cfg.scenario.empty()) throw UsageError("--scenario is required");
    return load_scenario(read_file(cfg.scenario));
}

int cmd_evolve(const RunConfig& cfg) {
    const PiecewiseProfile u0 = load(cfg);
    std::optional<double> until;
    if (cfg.until != "extinction") {
        try {
            until = std::stod(cfg.until);
        } catch (const std::exception&) {
            throw UsageError("--until expects 'extinction' or a time");
        }
        if (!(*until >= 0.0)) throw UsageError("--until must be nonnegative");
    }
    if (cfg.h < 0.0) throw UsageError("--h must be positive");
    std::vector<double> times = cfg.snapshots;
    if (cfg.h > 0.0) {
        // Step bookkeeping: one snapshot per step of size h.
        const Trajectory probe = evolve(u0, until);
        const double horizon = until ? *until : probe.t_ext.value_or(0.0);
        for (std::size_t k = 1; k * cfg.h < horizon && k <= 100000; ++k) times.push_back(static_cast<double>(k) * cfg.h);
    }
    const Trajectory tr = evolve(u0, until, times);
    const fs::path out(cfg.out);
    nlohmann::json summary = summary_json(tr);
    if (cfg.h > 0.0) summary["step_h"] = cfg.h;
    write_file_atomic(out / "snapshots.csv", snapshots_csv(tr, cfg.grid_n));
    write_file_atomic(out / "events.json", events_json(tr.events).dump(2) + "\n");
    write_file_atomic(out / "summary.json", summary.dump(2) + "\n");
    if (cfg.svg) write_file_atomic(out / "snapshots.svg", snapshots_svg(tr));
    std::cout << summary.dump() << "\n";
    return kOk;
}

int cmd_resolve(const RunConfig& cfg) {
    if (!(cfg.h > 0.0)) throw UsageError("--h must be positive");
    const PiecewiseProfile w = load(cfg);
    const ResolventResult r = resolve(w, cfg.h);
    const fs::path out(cfg.out);
    write_file_atomic(out / "resolved.json", to_scenario_json(r.u).dump(2) + "\n");
    if (cfg.emit_sigma) write_file_atomic(out / "sigma.csv", sigma_csv(flux_sigma(r.u, w, cfg.h), cfg.grid_n));
    nlohmann::json report;
    report["h"] = cfg.h;
    report["splits"] = r.splits;
    report["k_ess_in"] = detect_facets(w).k_ess;
    report["k_ess_out"] = detect_facets(r.u).k_ess;
    report["mild_residual"] = mild_residual(r.u, w, cfg.h);
    nlohmann::json steps = nlohmann::json::array();
    for (const FacetStepRecord& s : r.facet_steps)
        steps.push_back({{"facet", s.facet_index}, {"a", s.a}, {"b", s.b}, {"level", s.level}, {"tau", s.tau}});
    report["facet_steps"] = steps;
    std::cout << report.dump() << "\n";
    return kOk;
}

int cmd_validate(const RunConfig& cfg) {
    std::vector<PiecewiseProfile> profiles;
    if (cfg.random > 0) {
        profiles = random_profiles(cfg.random, cfg.seed);
    } else {
        profiles.push_back(load(cfg));
    }
    const ValidationReport rep = validate_profiles(profiles, cfg.seed);
    std::printf("%-28s %-6s %8s %8s %12s %10s\n", "property", "status", "checks", "failed", "worst", "tol");
    for (const PropertyResult& p : rep.properties) {
        const char* status = p.skipped() ? "SKIP" : p.passed() ? "PASS" : "FAIL";
        std::printf("%-28s %-6s %8zu %8zu %12.3e %10.1e\n", p.name.c_str(), status, p.checks, p.failures, p.worst, p.tol);
    }
    return rep.all_passed() ? kOk : kPropertyFailure;
}

int cmd_oracle_compare(const RunConfig& cfg) {
    if (!(cfg.h > 0.0)) throw UsageError("--h must be positive");
    if (cfg.grid_n < 3) throw UsageError("--grid-n must be at least 3");
    const PiecewiseProfile w = load(cfg);
    const GridFunction v = grid_sample(w, cfg.grid_n);
    const GridFunction discrete = discrete_tv_prox(v, cfg.h);
    const GridFunction exact = grid_sample(resolve(w, cfg.h).u, cfg.grid_n);
    nlohmann::json report;
    report["sup_err"] = grid_sup_distance(discrete, exact);
    report["l2_err"] = grid_l2_distance(discrete, exact);
    report["n"] = cfg.grid_n;
    report["dx"] = v.dx;
    report["h"] = cfg.h;
    write_file_atomic(fs::path(cfg.out) / "oracle.json", report.dump(2) + "\n");
    std::cout << report.dump() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact one-dimensional total variation flow with Dirichlet data"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print this help message and exit");
        sub->add_option("--scenario", cfg.scenario, "scenario JSON file");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--grid-n", cfg.grid_n, "samples per profile");
        sub->add_flag("--svg", cfg.svg, "write an SVG plot");
    };
    CLI::App* evolve_cmd = app.add_subcommand("evolve", "event-driven evolution to extinction or a final time");
    common(evolve_cmd);
    evolve_cmd->add_option("--until", cfg.until, "'extinction' or a final time");
    evolve_cmd->add_option("--snapshots", cfg.snapshots, "comma separated snapshot times")->delimiter(',');
    evolve_cmd->add_option("--h", cfg.h, "step size of the stepping bookkeeping");

    CLI::App* resolve_cmd = app.add_subcommand("resolve", "one implicit step (TV proximal map)");
    common(resolve_cmd);
    resolve_cmd->add_option("--h", cfg.h, "step size")->required();
    resolve_cmd->add_flag("--emit-sigma", cfg.emit_sigma, "write the flux field samples");

    CLI::App* validate_cmd = app.add_subcommand("validate", "run the invariant suites");
    common(validate_cmd);
    validate_cmd->add_option("--random", cfg.random, "number of random scenarios");
    validate_cmd->add_option("--seed", cfg.seed, "random seed");

    CLI::App* oracle_cmd = app.add_subcommand("oracle-compare", "compare against the discrete grid solver");
    common(oracle_cmd);
    oracle_cmd->add_option("--h", cfg.h, "step size")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*evolve_cmd) return cmd_evolve(cfg);
        if (*resolve_cmd) return cmd_resolve(cfg);
        if (*validate_cmd) return cmd_validate(cfg);
        if (*oracle_cmd) return cmd_oracle_compare(cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kInputError;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return is_input_error(e.code()) ? kInputError : kInternalError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInputError;
}
