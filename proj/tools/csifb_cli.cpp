// SPDX-License-Identifier: Apache-2.0
//
// Batch CLI: config-driven MSE and sum-rate sweeps, exponent fitting from a
// fresh MSE sweep, config validation and a built-in numerical self-test.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "csifb/ecsq.hpp"
#include "csifb/estimation.hpp"
#include "csifb/harness.hpp"
#include "csifb/oracles.hpp"
#include "csifb/rate_distortion.hpp"

namespace {

using namespace csifb;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string strategies;
};

void add_common(CLI::App* sub, CommonOpts& opts, bool needs_config) {
    auto* c = sub->add_option("--config", opts.config_path, "path to JSON config");
    if (needs_config) {
        c->required();
    }
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", opts.seed, "seed override");
    sub->add_option("--threads", opts.threads, "worker threads (0 = auto)");
    sub->add_option("--strategies", opts.strategies,
                    "comma-separated strategy override (rd,ecsq,af,perfect)");
}

SystemConfig load_with_overrides(const CommonOpts& opts) {
    SystemConfig cfg = load_config(opts.config_path);
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    if (!opts.strategies.empty()) {
        cfg.strategies.clear();
        std::stringstream ss(opts.strategies);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) {
                cfg.strategies.push_back(parse_strategy(tok));
            }
        }
    }
    return cfg;
}

void persist(const SweepResult& result, const std::string& out_dir,
             const std::string& csv_name) {
    std::filesystem::create_directories(out_dir);
    write_csv(result, out_dir + "/" + csv_name);
    write_metadata(result, out_dir + "/meta.json");
}

int run_mse(const CommonOpts& opts) {
    const SystemConfig cfg = load_with_overrides(opts);
    const SweepResult result = run_mse_sweep(cfg, opts.threads);
    persist(result, opts.out_dir, "mse.csv");
    std::printf("mse-sweep: %zu rows, %zu snr points -> %s/mse.csv (%.1fs)\n",
                result.rows.size(), cfg.snr_db_grid.size(), opts.out_dir.c_str(),
                result.metadata["wall_time_s"].get<double>());
    return 0;
}

int run_sumrate(const CommonOpts& opts) {
    const SystemConfig cfg = load_with_overrides(opts);
    const SweepResult result = run_sumrate_sweep(cfg, opts.threads);
    persist(result, opts.out_dir, "sumrate.csv");
    std::printf(
        "sumrate-sweep: %zu rows, %zu beta_tr points, %ld discarded -> "
        "%s/sumrate.csv (%.1fs)\n",
        result.rows.size(), cfg.pilots_per_subcarrier.size(),
        result.metadata["discarded_trials"].get<long>(), opts.out_dir.c_str(),
        result.metadata["wall_time_s"].get<double>());
    return 0;
}

int run_exponent(const CommonOpts& opts) {
    const SystemConfig cfg = load_with_overrides(opts);
    const SweepResult sweep = run_mse_sweep(cfg, opts.threads);

    // Group the sweep rows by (strategy, metric) and fit each curve.
    SweepResult fits;
    fits.metadata = sweep.metadata;
    fits.metadata["sweep"] = "exponent";
    std::vector<std::pair<std::string, std::string>> seen;
    for (const auto& row : sweep.rows) {
        const auto key = std::make_pair(row.strategy, row.metric);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            continue;
        }
        seen.push_back(key);
        std::vector<std::pair<double, double>> curve;
        for (const auto& r : sweep.rows) {
            if (r.strategy == row.strategy && r.metric == row.metric) {
                curve.emplace_back(r.x_value, r.value);
            }
        }
        const ExponentFit fit = fit_exponent(curve);
        SweepRow out;
        out.strategy = row.strategy;
        out.x_name = "window_decades";
        out.x_value = 1.0;
        out.metric = "alpha_" + row.metric;
        out.value = fit.alpha;
        out.stderr_value = fit.stderr_alpha;
        out.n_trials = fit.points;
        fits.rows.push_back(out);
        std::printf("  %s/%s: alpha = %.4f +- %.4f (%d points)\n",
                    row.strategy.c_str(), row.metric.c_str(), fit.alpha,
                    fit.stderr_alpha, fit.points);
    }
    persist(fits, opts.out_dir, "exponent.csv");
    std::printf("exponent: %zu fits -> %s/exponent.csv\n", fits.rows.size(),
                opts.out_dir.c_str());
    return 0;
}

int run_validate(const CommonOpts& opts) {
    const SystemConfig cfg = load_config(opts.config_path);
    validate_config(cfg);
    std::printf("config OK (hash %s)\n", config_hash(cfg).c_str());
    return 0;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](const char* name, double got, double want, double tol) {
        const bool ok = std::abs(got - want) <=
                        tol * std::max({1.0, std::abs(got), std::abs(want)});
        std::printf("  [%s] %-38s got %.12g want %.12g\n", ok ? "ok" : "FAIL",
                    name, got, want);
        if (!ok) {
            ++failures;
        }
    };

    const int m = 8, n = 6, l = 5, n_p = 3, t_p = 4;
    RngStream geo_rng(7, StreamTag::geometry, 0, 0);
    const auto geo = sample_geometry(l, 1.0 / (15e3 * n), geo_rng);
    const auto cov = covariance_from_geometry(geo, m, n);

    RngStream mat_rng(7, StreamTag::training_matrix, 0);
    TrainingMatrix x = build_training_matrix(pilot_pattern(n, n_p), t_p, m, n,
                                             100.0, mat_rng);

    const auto pm = posterior_stats(cov, x);
    check("mmse error, dense vs reduced", pm.d_mmse, dense_mmse_error(cov, x),
          1e-8);

    RngStream sp_rng(7, StreamTag::spreading, 0);
    const auto psi = build_spreading_matrix(training_covariance(cov, x), 8, m,
                                            100.0, sp_rng);
    check("af error, dense vs reduced", af_error(cov, x, psi),
          dense_af_error(cov, x, psi), 1e-8);

    const double total = arma::accu(pm.eigvals);
    for (double frac : {0.9, 0.5, 0.1, 0.01}) {
        const double excess = frac * total;
        const auto wf = waterlevel_from_distortion(pm.eigvals, excess);
        check("water level, closed form vs bisection", wf.gamma,
              bisect_waterlevel(pm.eigvals, excess), 1e-10);
    }

    for (double frac : {0.9, 0.5, 0.05}) {
        const double d = pm.d_mmse + frac * total;
        const double r = remote_rate(pm, d);
        check("rate-distortion round trip", remote_distortion(pm, r), d, 1e-10);
    }

    if (failures == 0) {
        std::printf("selftest: all checks passed\n");
        return 0;
    }
    std::printf("selftest: %d check(s) FAILED\n", failures);
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSI feedback strategy simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* mse = app.add_subcommand("mse-sweep", "CSIT MSE vs SNR");
    add_common(mse, opts, true);
    auto* sumrate = app.add_subcommand("sumrate-sweep",
                                       "downlink sum-rate vs training dimension");
    add_common(sumrate, opts, true);
    auto* exponent =
        app.add_subcommand("exponent", "fit MSE decay exponents from a sweep");
    add_common(exponent, opts, true);
    auto* validate = app.add_subcommand("validate-config", "check a config file");
    add_common(validate, opts, true);
    app.add_subcommand("selftest", "numerical cross-checks against dense oracles");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("mse-sweep")) return run_mse(opts);
        if (app.got_subcommand("sumrate-sweep")) return run_sumrate(opts);
        if (app.got_subcommand("exponent")) return run_exponent(opts);
        if (app.got_subcommand("validate-config")) return run_validate(opts);
        if (app.got_subcommand("selftest")) return run_selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
