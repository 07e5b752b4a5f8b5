// SPDX-License-Identifier: Apache-2.0

#include "csifb/downlink.hpp"

#include <cmath>

#include "csifb/analog_feedback.hpp"
#include "csifb/ecsq.hpp"
#include "csifb/rate_distortion.hpp"

namespace csifb {

arma::cx_mat zf_precoders(const arma::cx_mat& estimates, int subcarrier) {
    const arma::uword num_users = estimates.n_rows;
    if (num_users > estimates.n_cols) {
        throw std::invalid_argument("zf_precoders: need K <= M");
    }
    if (arma::rank(estimates) < num_users) {
        throw SingularPrecoderError(subcarrier);
    }
    arma::cx_mat v = arma::pinv(estimates); // M x K
    for (arma::uword k = 0; k < num_users; ++k) {
        const double nrm = arma::norm(v.col(k));
        if (nrm <= 0.0) {
            throw SingularPrecoderError(subcarrier);
        }
        v.col(k) /= nrm;
    }
    return v;
}

arma::cx_mat effective_gains(const arma::cx_mat& true_rows,
                             const arma::cx_mat& precoders,
                             double power_per_ue) {
    return std::sqrt(power_per_ue) * (true_rows * precoders);
}

namespace {

// Per-strategy immutable state prepared once per (context, snr) point.
struct StrategyState {
    PosteriorModel pm;
    arma::vec rd_residual;   // min(gamma, lambda^u) per eigendirection
    BitAllocation ecsq_alloc;
    SpreadingMatrix psi;
    arma::cx_mat af_filt;
};

double sumrate_one_trial(const SumrateContext& ctx, Strategy strategy,
                         double snr_dl,
                         const std::vector<StrategyState>& states, long trial) {
    const int num_users = ctx.num_users;
    const int num_antennas = ctx.num_antennas;
    const int num_subcarriers = ctx.num_subcarriers;
    const double power = snr_dl / static_cast<double>(num_users);

    arma::cx_mat h_true(static_cast<arma::uword>(num_users),
                        static_cast<arma::uword>(num_antennas * num_subcarriers));
    arma::cx_mat h_est(arma::size(h_true));

    for (int k = 0; k < num_users; ++k) {
        const auto ku = static_cast<std::uint64_t>(k);
        const auto tu = static_cast<std::uint64_t>(trial);
        RngStream ch_rng(ctx.seed, StreamTag::channel, ctx.stream_salt, ku, tu);
        const arma::cx_vec h = sample_channel(ctx.user_covs[static_cast<std::size_t>(k)], ch_rng);
        h_true.row(static_cast<arma::uword>(k)) = h.st();

        arma::cx_vec hhat;
        switch (strategy) {
            case Strategy::perfect:
                hhat = h;
                break;
            case Strategy::rd: {
                const auto& st = states[static_cast<std::size_t>(k)];
                RngStream noise(ctx.seed, StreamTag::training_noise, ctx.stream_salt, ku, tu);
                const arma::cx_rowvec y = observe(h, ctx.training, noise);
                hhat = mmse_estimate(st.pm, y);
                RngStream err(ctx.seed, StreamTag::quant_error, ctx.stream_salt, ku, tu);
                arma::cx_vec e(st.rd_residual.n_elem);
                for (arma::uword i = 0; i < e.n_elem; ++i) {
                    e(i) = err.cgaussian() * std::sqrt(st.rd_residual(i));
                }
                hhat += st.pm.eigvecs * e;
                break;
            }
            case Strategy::ecsq: {
                const auto& st = states[static_cast<std::size_t>(k)];
                RngStream noise(ctx.seed, StreamTag::training_noise, ctx.stream_salt, ku, tu);
                const arma::cx_rowvec y = observe(h, ctx.training, noise);
                const arma::cx_vec u = mmse_estimate(st.pm, y);
                const arma::cx_vec w = st.pm.eigvecs.t() * u;
                RngStream dither(ctx.seed, StreamTag::dither, ctx.stream_salt, ku, tu);
                const arma::cx_vec what = ecsq_encode_decode(w, st.ecsq_alloc, dither);
                hhat = st.pm.eigvecs * what;
                break;
            }
            case Strategy::af: {
                const auto& st = states[static_cast<std::size_t>(k)];
                RngStream noise(ctx.seed, StreamTag::training_noise, ctx.stream_salt, ku, tu);
                const arma::cx_rowvec y = observe(h, ctx.training, noise);
                RngStream fb_noise(ctx.seed, StreamTag::feedback_noise, ctx.stream_salt, ku, tu);
                const arma::cx_rowvec y_af = af_transmit(y, st.psi, fb_noise);
                hhat = st.af_filt * y_af.t();
                break;
            }
        }
        h_est.row(static_cast<arma::uword>(k)) = hhat.st();
    }

    const double pilot_weight =
        ctx.charge_training_overhead
            ? static_cast<double>(ctx.frame_len - ctx.pilots_per_subcarrier) /
                  static_cast<double>(ctx.frame_len)
            : 1.0;

    double rate = 0.0;
    for (int n = 1; n <= num_subcarriers; ++n) {
        const arma::uword c0 = static_cast<arma::uword>((n - 1) * num_antennas);
        const arma::uword c1 = c0 + static_cast<arma::uword>(num_antennas) - 1;
        // Rows of these blocks are h_k[n]^T; the ZF/gain formulas want h^H.
        const arma::cx_mat ht = arma::conj(h_true.cols(c0, c1));
        const arma::cx_mat he = arma::conj(h_est.cols(c0, c1));
        const arma::cx_mat v = zf_precoders(he, n); // may throw
        const arma::cx_mat g = effective_gains(ht, v, power);

        const bool is_pilot =
            std::find(ctx.training.pattern.begin(), ctx.training.pattern.end(),
                      n) != ctx.training.pattern.end();
        const double w_n = is_pilot ? pilot_weight : 1.0;

        for (int k = 0; k < num_users; ++k) {
            const auto ka = static_cast<arma::uword>(k);
            const double sig = std::norm(g(ka, ka));
            double intf = 0.0;
            for (arma::uword kk = 0; kk < g.n_cols; ++kk) {
                if (kk != ka) {
                    intf += std::norm(g(ka, kk));
                }
            }
            rate += w_n * std::log2(1.0 + sig / (1.0 + intf));
        }
    }
    return rate / static_cast<double>(num_subcarriers);
}

} // namespace

SumrateStats ergodic_sumrate(const SumrateContext& ctx, Strategy strategy,
                             double snr_dl, int trials) {
    if (trials < 1) {
        throw std::invalid_argument("ergodic_sumrate: trials must be >= 1");
    }

    // Shared per-UE state; trials only draw channels and noise.
    std::vector<StrategyState> states;
    if (strategy != Strategy::perfect) {
        const double c_ul = feedback_capacity(snr_dl, ctx.kappa, ctx.num_antennas);
        states.resize(static_cast<std::size_t>(ctx.num_users));
        for (int k = 0; k < ctx.num_users; ++k) {
            auto& st = states[static_cast<std::size_t>(k)];
            const auto& cov = ctx.user_covs[static_cast<std::size_t>(k)];
            if (strategy == Strategy::af) {
                RngStream sp_rng(ctx.seed, StreamTag::spreading, ctx.stream_salt,
                                 static_cast<std::uint64_t>(k));
                st.psi = build_spreading_matrix(training_covariance(cov, ctx.training),
                                                ctx.beta_fb, ctx.num_antennas,
                                                ctx.kappa * snr_dl, sp_rng);
                st.af_filt = af_filter(cov, ctx.training, st.psi);
            } else {
                st.pm = posterior_stats(cov, ctx.training);
                const double budget = static_cast<double>(ctx.beta_fb) * c_ul;
                if (strategy == Strategy::rd) {
                    const double d_rd = remote_distortion(st.pm, budget);
                    const auto wf = waterlevel_from_distortion(
                        st.pm.eigvals, d_rd - st.pm.d_mmse);
                    st.rd_residual.set_size(st.pm.eigvals.n_elem);
                    for (arma::uword i = 0; i < st.rd_residual.n_elem; ++i) {
                        st.rd_residual(i) = std::min(wf.gamma, st.pm.eigvals(i));
                    }
                } else {
                    st.ecsq_alloc = budget_to_error(st.pm, ctx.beta_fb, c_ul);
                }
            }
        }
    }

    double sum = 0.0;
    double sumsq = 0.0;
    long used = 0;
    long discarded = 0;
    for (long t = 0; t < trials; ++t) {
        try {
            const double r = sumrate_one_trial(ctx, strategy, snr_dl, states, t);
            sum += r;
            sumsq += r * r;
            ++used;
        } catch (const SingularPrecoderError&) {
            ++discarded;
        }
    }

    SumrateStats stats;
    stats.sum = sum;
    stats.sumsq = sumsq;
    stats.used_trials = used;
    stats.discarded_trials = discarded;
    if (used > 0) {
        stats.mean = sum / static_cast<double>(used);
        if (used > 1) {
            const double var =
                std::max(0.0, (sumsq - sum * sum / static_cast<double>(used)) /
                                  static_cast<double>(used - 1));
            stats.stderr_mean = std::sqrt(var / static_cast<double>(used));
        }
    }
    return stats;
}

} // namespace csifb
