// Command-line front end: rate-vs-distance sweeps, single-point optimization
// reports, and Monte Carlo validation of the analytic channel model.

#include "qkdlm/csv.hpp"
#include "qkdlm/mc_oracle.hpp"
#include "qkdlm/optimizer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#ifndef QKDLM_VERSION
#define QKDLM_VERSION "0.1.0"
#endif

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitUsage = 2;

std::string default_params_path() {
    if (const char* env = std::getenv("QKD_PARAMS")) return env;
#ifdef QKDLM_DEFAULT_PARAMS_PATH
    return QKDLM_DEFAULT_PARAMS_PATH;
#else
    return "data/gys_defaults.json";
#endif
}

json params_to_json(const qkdlm::SystemParams& p) {
    return {{"alpha", p.alpha},   {"eta_bob", p.eta_bob},
            {"y0", p.y0},         {"e0", p.e0},
            {"e_detector", p.e_detector}, {"f_ec", p.f_ec}};
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

json make_manifest(const std::string& params_path, const qkdlm::SystemParams& params,
                   const std::vector<qkdlm::Scheme>& schemes,
                   const qkdlm::OptimizeConfig& cfg, double max_km) {
    json schemes_j = json::array();
    for (auto s : schemes) schemes_j.push_back(qkdlm::to_string(s));
    return {{"timestamp", iso_timestamp()},
            {"tool_version", QKDLM_VERSION},
            {"params_file", params_path},
            {"params", params_to_json(params)},
            {"schemes", schemes_j},
            {"config",
             {{"mu_range", {cfg.mu_min, cfg.mu_max}},
              {"nu_fraction_range", {cfg.nu_frac_min, cfg.nu_frac_max}},
              {"grid_size", cfg.grid_size},
              {"refine_rounds", cfg.refine_rounds},
              {"refine_shrink", cfg.refine_shrink},
              {"step_km", cfg.step_km},
              {"max_km", max_km}}}};
}

std::vector<qkdlm::Scheme> resolve_schemes(const std::string& name) {
    if (name == "all")
        return {qkdlm::kAllSchemes, qkdlm::kAllSchemes + 5};
    const auto s = qkdlm::scheme_from_string(name);
    if (!s)
        throw qkdlm::usage_error(
            "unknown scheme '" + name +
            "' (expected infinite|wv-r12sum|wv-r12lump|one-r12sum|one-r12lump|all)");
    return {*s};
}

int cmd_sweep(const std::string& params_path, const std::string& scheme_name,
              double max_km, double step_km, const std::string& out_path) {
    const auto schemes = resolve_schemes(scheme_name);
    const auto params = qkdlm::load_params(params_path);
    qkdlm::OptimizeConfig cfg;
    cfg.step_km = step_km;

    std::vector<qkdlm::CsvRow> rows;
    for (auto scheme : schemes)
        for (const auto& p : qkdlm::sweep(scheme, params, cfg, max_km))
            rows.push_back(qkdlm::csv_row_from_point(p));
    const std::string csv = qkdlm::emit_csv(rows);

    const json manifest = make_manifest(params_path, params, schemes, cfg, max_km);
    if (out_path.empty()) {
        std::cout << csv;
        std::cerr << manifest.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw qkdlm::usage_error("cannot open output file: " + out_path);
        out << csv;
        std::ofstream mout(out_path + ".manifest.json");
        mout << manifest.dump(2) << "\n";
    }
    return kExitOk;
}

json bounds_to_json(const qkdlm::BoundSet& b) {
    json j;
    auto put = [&j](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put("y1_lower", b.y1_lower);
    put("q1_lower", b.q1_lower);
    put("y1_upper", b.y1_upper);
    put("y2_lower", b.y2_lower);
    put("q2_lower", b.q2_lower);
    put("e1_upper", b.e1_upper);
    put("e2_upper", b.e2_upper);
    put("y12_lower", b.y12_lower);
    put("q12_lower", b.q12_lower);
    put("eps_upper", b.eps_upper);
    put("y0_upper", b.y0_upper);
    put("y0_lower", b.y0_lower);
    put("y2_inf", b.y2_inf);
    j["clamped"] = b.clamped.to_string();
    return j;
}

int cmd_optimize(const std::string& params_path, const std::string& scheme_name,
                 double km, const std::string& format) {
    const auto schemes = resolve_schemes(scheme_name);
    if (schemes.size() != 1)
        throw qkdlm::usage_error("optimize needs a single scheme, not 'all'");
    const auto scheme = schemes.front();
    const auto params = qkdlm::load_params(params_path);
    qkdlm::OptimizeConfig cfg;

    const auto point = qkdlm::optimize_at_distance(km, scheme, params, cfg);

    std::optional<qkdlm::BoundSet> bounds;
    if (scheme != qkdlm::Scheme::Infinite) {
        const qkdlm::PulseSettings pulses{point.mu_opt, *point.nu_opt};
        const auto cp = qkdlm::channel_point(km, params, pulses);
        qkdlm::MeasuredStats stats{cp.q_mu, cp.e_mu, cp.q_nu, cp.e_nu, {}};
        if (scheme == qkdlm::Scheme::WvR12Sum || scheme == qkdlm::Scheme::WvR12Lump)
            stats.y0_known = params.y0;
        bounds = qkdlm::compute_bounds(scheme, stats, pulses, params,
                                       qkdlm::yield_i(params, cp.eta, 2));
    }

    if (format == "json") {
        json j{{"scheme", qkdlm::to_string(scheme)},
               {"distance_km", km},
               {"mu_opt", point.mu_opt},
               {"rate", point.rate},
               {"raw_rate", point.raw_rate},
               {"tool_version", QKDLM_VERSION},
               {"params", params_to_json(params)}};
        if (point.nu_opt) j["nu_opt"] = *point.nu_opt;
        if (bounds) j["bounds"] = bounds_to_json(*bounds);
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }

    std::printf("scheme        %s\n", qkdlm::to_string(scheme).c_str());
    std::printf("distance_km   %g\n", km);
    std::printf("mu_opt        %.9e\n", point.mu_opt);
    if (point.nu_opt) std::printf("nu_opt        %.9e\n", *point.nu_opt);
    std::printf("rate          %.9e\n", point.rate);
    std::printf("raw_rate      %.9e\n", point.raw_rate);
    if (bounds) {
        const auto& b = *bounds;
        auto line = [](const char* name, const std::optional<double>& v) {
            if (v) std::printf("%-13s %.9e\n", name, *v);
        };
        line("Y1_lower", b.y1_lower);
        line("Q1_lower", b.q1_lower);
        line("Y1_upper", b.y1_upper);
        line("Y2_lower", b.y2_lower);
        line("Q2_lower", b.q2_lower);
        line("e1_upper", b.e1_upper);
        line("e2_upper", b.e2_upper);
        line("Y12_lower", b.y12_lower);
        line("Q12_lower", b.q12_lower);
        line("eps_upper", b.eps_upper);
        line("Y0_upper", b.y0_upper);
        line("Y0_lower", b.y0_lower);
        line("Y2_inf", b.y2_inf);
        std::printf("clamped       %s\n", b.clamped.to_string().c_str());
    }
    return kExitOk;
}

int cmd_mc_validate(const std::string& params_path, double km, double mu, double nu,
                    std::int64_t pulses, std::uint64_t seed) {
    if (pulses <= 0) throw qkdlm::usage_error("pulses must be > 0");
    const auto params = qkdlm::load_params(params_path);

    qkdlm::McConfig config{static_cast<std::uint64_t>(pulses), seed, {mu, nu}, km};
    const auto mc = qkdlm::simulate(config, params);

    bool all_ok = true;
    std::printf("mc-validate  distance=%g km  pulses=%lld  seed=%llu\n", km,
                static_cast<long long>(pulses),
                static_cast<unsigned long long>(seed));
    std::printf("%-10s %-14s %-14s %-12s %-8s\n", "quantity", "analytic",
                "empirical", "std_error", "z");

    auto report = [&all_ok](const char* name, double analytic, double empirical,
                            double se) {
        const double z = se > 0.0 ? (empirical - analytic) / se : 0.0;
        const bool ok = std::abs(z) < 4.0;
        all_ok = all_ok && ok;
        std::printf("%-10s %-14.6e %-14.6e %-12.3e %+-8.3f%s\n", name, analytic,
                    empirical, se, z, ok ? "" : "  FAIL");
    };

    for (double intensity : {mu, nu}) {
        const auto* s = mc.find(intensity);
        const auto analytic = qkdlm::overall_gain_qber(params, intensity, mc.eta);
        const std::string tag = intensity == mu ? "mu" : "nu";
        report(("Q_" + tag).c_str(), analytic.gain, s->q_hat(), s->q_se());
        report(("E_" + tag).c_str(), analytic.qber, s->e_hat(), s->e_se());
    }
    const auto* s_mu = mc.find(mu);
    for (unsigned n : {1u, 2u}) {
        const double analytic = qkdlm::yield_i(params, mc.eta, n);
        const std::string name = "Y_" + std::to_string(n);
        report(name.c_str(), analytic, s_mu->yield_hat(n), s_mu->yield_se(n));
    }

    std::printf("result: %s\n", all_ok ? "PASS" : "FAIL");
    return all_ok ? kExitOk : kExitValidationFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure key rate lower bounds for the two-way LM05 protocol "
                 "under weak+vacuum and one-decoy-state schemes"};
    app.set_version_flag("--version", QKDLM_VERSION);
    app.require_subcommand(1);

    std::string params_path = default_params_path();

    auto* sweep = app.add_subcommand("sweep", "Rate-vs-distance curves as CSV");
    std::string sweep_scheme = "all";
    double max_km = 80.0, step_km = 1.0;
    std::string out_path;
    sweep->add_option("--scheme", sweep_scheme, "Scheme name or 'all'");
    sweep->add_option("--params", params_path, "Parameter JSON file");
    sweep->add_option("--max-km", max_km, "Maximum distance, km")
        ->check(CLI::NonNegativeNumber);
    sweep->add_option("--step-km", step_km, "Distance step, km")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--out", out_path, "Output CSV path (default stdout)");

    auto* optimize = app.add_subcommand("optimize", "Optimal intensities at one distance");
    std::string opt_scheme = "wv-r12sum", format = "text";
    double km = 0.0;
    optimize->add_option("--scheme", opt_scheme, "Scheme name");
    optimize->add_option("--km", km, "Distance, km")
        ->required()
        ->check(CLI::NonNegativeNumber);
    optimize->add_option("--params", params_path, "Parameter JSON file");
    optimize->add_option("--format", format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* mc = app.add_subcommand("mc-validate",
                                  "Monte Carlo check of the analytic gain/QBER model");
    double mc_km = 10.0, mc_mu = 0.5, mc_nu = 0.1;
    std::int64_t pulses = 10000000;
    std::uint64_t seed = 42;
    mc->add_option("--km", mc_km, "Distance, km")->check(CLI::NonNegativeNumber);
    mc->add_option("--mu", mc_mu, "Signal intensity")->check(CLI::PositiveNumber);
    mc->add_option("--nu", mc_nu, "Decoy intensity")->check(CLI::PositiveNumber);
    mc->add_option("--pulses", pulses, "Pulses per intensity");
    mc->add_option("--seed", seed, "RNG seed");
    mc->add_option("--params", params_path, "Parameter JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sweep->parsed())
            return cmd_sweep(params_path, sweep_scheme, max_km, step_km, out_path);
        if (optimize->parsed())
            return cmd_optimize(params_path, opt_scheme, km, format);
        if (mc->parsed())
            return cmd_mc_validate(params_path, mc_km, mc_mu, mc_nu, pulses, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
