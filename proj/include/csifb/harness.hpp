// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: configuration ingestion, MSE and sum-rate sweeps,
// exponent fitting and CSV/JSON persistence.

#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csifb/types.hpp"

namespace csifb {

inline constexpr const char* kVersionString = "csifb 0.1.0";

enum class PilotWeighting { overhead, none };

struct TrialCounts {
    int matrices = 10;
    int covariances = 1;
    int channels = 100;
};

struct SystemConfig {
    int num_antennas = 32;       // M
    int num_subcarriers = 24;    // N
    int num_users = 6;           // K
    int num_paths = 30;          // L
    int num_pilot_subcarriers = 4; // N_p
    std::vector<int> pilots_per_subcarrier{10}; // T_p (grid for sum-rate sweeps)
    int frame_len = 70;          // T
    std::vector<double> snr_db_grid;
    double kappa = 1.0;
    std::optional<double> zeta;   // exactly one of zeta / beta_fb
    std::optional<int> beta_fb;
    double d_over_lambda = 0.5;
    double delta_f = 15e3;
    std::optional<double> tau_max; // default 1/(delta_f * N)
    std::uint64_t seed = 0;
    TrialCounts trials;
    std::vector<Strategy> strategies{Strategy::rd, Strategy::ecsq, Strategy::af};
    PilotWeighting pilot_weighting = PilotWeighting::overhead;

    double tau_max_value() const {
        return tau_max ? *tau_max : 1.0 / (delta_f * num_subcarriers);
    }
    int beta_fb_for(int beta_tr) const;
};

// JSON keys follow the config field names (M, N, K, L, N_p, T_p, T,
// snr_db_grid, kappa, zeta, beta_fb, d_over_lambda, delta_f, tau_max, seed,
// trials, strategies, pilot_weighting). Unknown keys are a hard error.
SystemConfig config_from_json(const nlohmann::json& j);
SystemConfig load_config(const std::string& path);
nlohmann::json config_to_json(const SystemConfig& cfg);

// Throws std::invalid_argument listing every violated field.
void validate_config(const SystemConfig& cfg);

struct SweepRow {
    std::string strategy;
    std::string x_name;
    double x_value = 0.0;
    std::string metric;
    double value = 0.0;
    double stderr_value = 0.0;
    long n_trials = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    nlohmann::json metadata;
};

// Average CSIT MSE vs SNR per strategy. rd reports the analytic bound;
// ecsq and af report both analytic and simulated MSE.
SweepResult run_mse_sweep(const SystemConfig& cfg, int threads = 0);

// Sum-rate vs training dimension at fixed SNR, with
// beta_fb = ceil(zeta * beta_tr) per grid point.
SweepResult run_sumrate_sweep(const SystemConfig& cfg, int threads = 0);

struct ExponentFit {
    double alpha = 0.0;
    double stderr_alpha = 0.0;
    int points = 0;
};

// OLS slope of -log2(mse) vs log2(snr) over the highest `window_decades`
// decades of the grid. Needs at least 3 points in the window.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& snr_db_mse,
                         double window_decades = 1.0);

std::string csv_string(const SweepResult& result);
void write_csv(const SweepResult& result, const std::string& path);
void write_metadata(const SweepResult& result, const std::string& path);

std::string config_hash(const SystemConfig& cfg);

} // namespace csifb
