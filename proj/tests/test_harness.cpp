// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "csifb/harness.hpp"

using namespace csifb;
using nlohmann::json;

namespace {

json full_config_json() {
    return json{{"M", 8},
                {"N", 6},
                {"K", 3},
                {"L", 6},
                {"N_p", 3},
                {"T_p", 3},
                {"T", 70},
                {"snr_db_grid", {10.0, 20.0}},
                {"kappa", 1.0},
                {"zeta", 1.0},
                {"d_over_lambda", 0.5},
                {"delta_f", 15e3},
                {"seed", 5},
                {"trials", {{"matrices", 2}, {"covariances", 1}, {"channels", 10}}},
                {"strategies", {"rd", "ecsq", "af"}},
                {"pilot_weighting", "overhead"}};
}

SystemConfig small_config() {
    return config_from_json(full_config_json());
}

} // namespace

TEST_CASE("config round-trips through JSON") {
    const auto cfg = small_config();
    CHECK(cfg.num_antennas == 8);
    CHECK(cfg.pilots_per_subcarrier == std::vector<int>{3});
    CHECK(cfg.zeta.has_value());
    CHECK(!cfg.beta_fb.has_value());
    CHECK(cfg.trials.channels == 10);

    const auto cfg2 = config_from_json(config_to_json(cfg));
    CHECK(config_hash(cfg) == config_hash(cfg2));
}

TEST_CASE("unknown config keys are a hard error") {
    auto j = full_config_json();
    j["snr_grid"] = {10.0};
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);

    auto j2 = full_config_json();
    j2["trials"]["channnels"] = 5;
    CHECK_THROWS_AS(config_from_json(j2), std::invalid_argument);
}

TEST_CASE("T_p accepts a scalar or a list") {
    auto j = full_config_json();
    j["T_p"] = {2, 4, 6};
    const auto cfg = config_from_json(j);
    CHECK(cfg.pilots_per_subcarrier == std::vector<int>{2, 4, 6});
}

TEST_CASE("validate_config names violated invariants") {
    auto cfg = small_config();
    cfg.num_users = 20; // K > M
    try {
        validate_config(cfg);
        FAIL("expected validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("K") != std::string::npos);
    }

    auto both = small_config();
    both.beta_fb = 5; // zeta also set
    CHECK_THROWS_AS(validate_config(both), std::invalid_argument);

    auto neither = small_config();
    neither.zeta.reset();
    CHECK_THROWS_AS(validate_config(neither), std::invalid_argument);

    auto bad_np = small_config();
    bad_np.num_pilot_subcarriers = 7; // > N
    CHECK_THROWS_AS(validate_config(bad_np), std::invalid_argument);
}

TEST_CASE("beta_fb derivation rounds up") {
    auto cfg = small_config();
    cfg.zeta = 0.25;
    CHECK(cfg.beta_fb_for(9) == 3); // ceil(2.25)
    cfg.zeta.reset();
    cfg.beta_fb = 7;
    CHECK(cfg.beta_fb_for(9) == 7);
}

TEST_CASE("fit_exponent recovers synthetic power laws") {
    std::vector<std::pair<double, double>> half, flat;
    for (double db = 20.0; db <= 60.0; db += 5.0) {
        const double snr = std::pow(10.0, db / 10.0);
        half.emplace_back(db, 3.7 * std::pow(snr, -0.5));
        flat.emplace_back(db, 0.42);
    }
    CHECK(fit_exponent(half).alpha == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit_exponent(flat).alpha == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(fit_exponent(half).points == 3); // top decade of a 5 dB grid

    std::vector<std::pair<double, double>> two{{50.0, 1.0}, {60.0, 0.1}};
    CHECK_THROWS_AS(fit_exponent(two), std::invalid_argument);
}

TEST_CASE("mse sweep row structure and trial accounting") {
    const auto cfg = small_config();
    const auto result = run_mse_sweep(cfg, 1);
    // rd: 1 row per snr; ecsq and af: 2 rows each per snr.
    CHECK(result.rows.size() == 2 * 5);
    const long analytic_n =
        static_cast<long>(cfg.trials.covariances) * cfg.trials.matrices * cfg.num_users;
    for (const auto& row : result.rows) {
        CHECK(row.x_name == "snr_db");
        if (row.metric == "mse_analytic") {
            CHECK(row.n_trials == analytic_n);
        } else {
            CHECK(row.metric == "mse_simulated");
            CHECK(row.n_trials == analytic_n * cfg.trials.channels);
        }
        CHECK(row.value > 0.0);
        CHECK(std::isfinite(row.stderr_value));
    }
    CHECK(result.metadata["discarded_trials"].get<long>() == 0);
    CHECK(result.metadata["config_hash"] == config_hash(cfg));
}

TEST_CASE("mse sweep is byte-identical across thread counts and reruns") {
    const auto cfg = small_config();
    const std::string serial = csv_string(run_mse_sweep(cfg, 1));
    const std::string parallel = csv_string(run_mse_sweep(cfg, 4));
    const std::string again = csv_string(run_mse_sweep(cfg, 2));
    CHECK(serial == parallel);
    CHECK(serial == again);
    CHECK(serial.rfind("strategy,x_name,x_value,metric,value,stderr,n_trials\n",
                       0) == 0);
}

TEST_CASE("simulated strategies track their analytic values in the sweep") {
    auto cfg = small_config();
    cfg.trials.channels = 400;
    const auto result = run_mse_sweep(cfg, 0);
    for (const auto& row : result.rows) {
        if (row.metric != "mse_simulated") {
            continue;
        }
        for (const auto& ref : result.rows) {
            if (ref.strategy == row.strategy && ref.x_value == row.x_value &&
                ref.metric == "mse_analytic") {
                CHECK(row.value == doctest::Approx(ref.value).epsilon(0.15));
            }
        }
    }
}

TEST_CASE("sumrate sweep structure and determinism") {
    auto cfg = small_config();
    cfg.pilots_per_subcarrier = {2, 4};
    cfg.snr_db_grid = {15.0};
    cfg.strategies = {Strategy::rd, Strategy::af, Strategy::perfect};
    cfg.trials.channels = 15;

    const auto result = run_sumrate_sweep(cfg, 1);
    CHECK(result.rows.size() == 2 * 3);
    for (const auto& row : result.rows) {
        CHECK(row.x_name == "beta_tr");
        CHECK((row.x_value == 6.0 || row.x_value == 12.0));
        CHECK(row.value > 0.0);
        CHECK(row.n_trials <= static_cast<long>(cfg.trials.matrices) *
                                  cfg.trials.covariances * cfg.trials.channels);
    }
    CHECK(csv_string(result) == csv_string(run_sumrate_sweep(cfg, 3)));

    // Multi-point SNR grids are rejected for sum-rate sweeps.
    cfg.snr_db_grid = {10.0, 20.0};
    CHECK_THROWS_AS(run_sumrate_sweep(cfg, 1), std::invalid_argument);
}

TEST_CASE("sumrate trial accounting includes discards") {
    auto cfg = small_config();
    cfg.pilots_per_subcarrier = {2};
    cfg.snr_db_grid = {15.0};
    cfg.strategies = {Strategy::perfect};
    const auto result = run_sumrate_sweep(cfg, 1);
    const long configured = static_cast<long>(cfg.trials.matrices) *
                            cfg.trials.covariances * cfg.trials.channels;
    long reported = 0;
    for (const auto& row : result.rows) {
        reported += row.n_trials;
    }
    reported += result.metadata["discarded_trials"].get<long>();
    CHECK(reported == configured);
}
