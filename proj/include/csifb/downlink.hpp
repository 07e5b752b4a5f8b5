// SPDX-License-Identifier: Apache-2.0
//
// Multi-user zero-forcing precoding from estimated CSIT and Monte Carlo
// evaluation of the ergodic downlink sum-rate.

#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "csifb/channel_model.hpp"
#include "csifb/estimation.hpp"
#include "csifb/training.hpp"
#include "csifb/types.hpp"

namespace csifb {

// Thrown when an estimated per-subcarrier channel matrix is rank deficient;
// the harness discards and counts the trial.
struct SingularPrecoderError : std::runtime_error {
    explicit SingularPrecoderError(int subcarrier)
        : std::runtime_error("singular ZF precoder at subcarrier " +
                             std::to_string(subcarrier)),
          subcarrier_index(subcarrier) {}
    int subcarrier_index;
};

// Column-normalized pseudo-inverse of the K x M estimate matrix (row k is
// hhat_k[n]^H). Returns M x K with unit-norm columns.
arma::cx_mat zf_precoders(const arma::cx_mat& estimates, int subcarrier = 0);

// g_{k,k'} = sqrt(P) * h_k[n]^H v_{k'}[n]; rows of `true_rows` are h_k[n]^H.
arma::cx_mat effective_gains(const arma::cx_mat& true_rows,
                             const arma::cx_mat& precoders,
                             double power_per_ue);

// Everything needed to evaluate one (config, beta_tr, snr) sum-rate point.
// Shared immutably across concurrent trials.
struct SumrateContext {
    std::vector<Covariance> user_covs; // K entries
    TrainingMatrix training;           // at the operating snr_dl
    int beta_fb = 0;
    double kappa = 1.0;
    int num_antennas = 0;
    int num_subcarriers = 0;
    int num_users = 0;
    int frame_len = 0;            // T
    int pilots_per_subcarrier = 0; // T_p
    bool charge_training_overhead = true;
    std::uint64_t seed = 0;
    std::uint64_t stream_salt = 0; // disambiguates (covariance, matrix) blocks
};

struct SumrateStats {
    double mean = 0.0;
    double stderr_mean = 0.0;
    double sum = 0.0;   // raw accumulators, for cross-task reduction
    double sumsq = 0.0;
    long used_trials = 0;
    long discarded_trials = 0;
};

// Monte Carlo average of the per-UE ergodic rate, summed over UEs and
// weighted per subcarrier ((T - T_p)/T on pilot subcarriers when overhead
// accounting is enabled). Trials run serially here; the harness parallelizes
// across contexts/trial blocks.
SumrateStats ergodic_sumrate(const SumrateContext& ctx, Strategy strategy,
                             double snr_dl, int trials);

} // namespace csifb
