// SPDX-License-Identifier: Apache-2.0

#include "csifb/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "csifb/analog_feedback.hpp"
#include "csifb/channel_model.hpp"
#include "csifb/downlink.hpp"
#include "csifb/ecsq.hpp"
#include "csifb/estimation.hpp"
#include "csifb/parallel.hpp"
#include "csifb/rate_distortion.hpp"
#include "csifb/training.hpp"

namespace csifb {

using nlohmann::json;

int SystemConfig::beta_fb_for(int beta_tr) const {
    if (beta_fb) {
        return *beta_fb;
    }
    return static_cast<int>(std::ceil(*zeta * static_cast<double>(beta_tr)));
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

void check_known_keys(const json& j,
                      const std::vector<std::string>& known,
                      const std::string& scope) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw std::invalid_argument("unknown config key '" + scope +
                                        it.key() + "'");
        }
    }
}

} // namespace

SystemConfig config_from_json(const json& j) {
    check_known_keys(j,
                     {"M", "N", "K", "L", "N_p", "T_p", "T", "snr_db_grid",
                      "kappa", "zeta", "beta_fb", "d_over_lambda", "delta_f",
                      "tau_max", "seed", "trials", "strategies",
                      "pilot_weighting"},
                     "");

    SystemConfig cfg;
    if (j.contains("M")) cfg.num_antennas = j.at("M").get<int>();
    if (j.contains("N")) cfg.num_subcarriers = j.at("N").get<int>();
    if (j.contains("K")) cfg.num_users = j.at("K").get<int>();
    if (j.contains("L")) cfg.num_paths = j.at("L").get<int>();
    if (j.contains("N_p")) cfg.num_pilot_subcarriers = j.at("N_p").get<int>();
    if (j.contains("T_p")) {
        const auto& tp = j.at("T_p");
        cfg.pilots_per_subcarrier.clear();
        if (tp.is_array()) {
            for (const auto& v : tp) {
                cfg.pilots_per_subcarrier.push_back(v.get<int>());
            }
        } else {
            cfg.pilots_per_subcarrier.push_back(tp.get<int>());
        }
    }
    if (j.contains("T")) cfg.frame_len = j.at("T").get<int>();
    if (j.contains("snr_db_grid")) {
        cfg.snr_db_grid = j.at("snr_db_grid").get<std::vector<double>>();
    }
    if (j.contains("kappa")) cfg.kappa = j.at("kappa").get<double>();
    if (j.contains("zeta")) cfg.zeta = j.at("zeta").get<double>();
    if (j.contains("beta_fb")) cfg.beta_fb = j.at("beta_fb").get<int>();
    if (j.contains("d_over_lambda")) cfg.d_over_lambda = j.at("d_over_lambda").get<double>();
    if (j.contains("delta_f")) cfg.delta_f = j.at("delta_f").get<double>();
    if (j.contains("tau_max")) cfg.tau_max = j.at("tau_max").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) {
        const auto& t = j.at("trials");
        check_known_keys(t, {"matrices", "covariances", "channels"}, "trials.");
        if (t.contains("matrices")) cfg.trials.matrices = t.at("matrices").get<int>();
        if (t.contains("covariances")) cfg.trials.covariances = t.at("covariances").get<int>();
        if (t.contains("channels")) cfg.trials.channels = t.at("channels").get<int>();
    }
    if (j.contains("strategies")) {
        cfg.strategies.clear();
        for (const auto& s : j.at("strategies")) {
            cfg.strategies.push_back(parse_strategy(s.get<std::string>()));
        }
    }
    if (j.contains("pilot_weighting")) {
        const auto w = j.at("pilot_weighting").get<std::string>();
        if (w == "overhead") {
            cfg.pilot_weighting = PilotWeighting::overhead;
        } else if (w == "none") {
            cfg.pilot_weighting = PilotWeighting::none;
        } else {
            throw std::invalid_argument("pilot_weighting must be 'overhead' or 'none'");
        }
    }
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file: " + path);
    }
    json j;
    in >> j;
    return config_from_json(j);
}

json config_to_json(const SystemConfig& cfg) {
    json j;
    j["M"] = cfg.num_antennas;
    j["N"] = cfg.num_subcarriers;
    j["K"] = cfg.num_users;
    j["L"] = cfg.num_paths;
    j["N_p"] = cfg.num_pilot_subcarriers;
    j["T_p"] = cfg.pilots_per_subcarrier;
    j["T"] = cfg.frame_len;
    j["snr_db_grid"] = cfg.snr_db_grid;
    j["kappa"] = cfg.kappa;
    if (cfg.zeta) j["zeta"] = *cfg.zeta;
    if (cfg.beta_fb) j["beta_fb"] = *cfg.beta_fb;
    j["d_over_lambda"] = cfg.d_over_lambda;
    j["delta_f"] = cfg.delta_f;
    j["tau_max"] = cfg.tau_max_value();
    j["seed"] = cfg.seed;
    j["trials"] = {{"matrices", cfg.trials.matrices},
                   {"covariances", cfg.trials.covariances},
                   {"channels", cfg.trials.channels}};
    std::vector<std::string> strat;
    for (auto s : cfg.strategies) strat.push_back(to_string(s));
    j["strategies"] = strat;
    j["pilot_weighting"] =
        cfg.pilot_weighting == PilotWeighting::overhead ? "overhead" : "none";
    return j;
}

void validate_config(const SystemConfig& cfg) {
    std::vector<std::string> bad;
    if (cfg.num_antennas < 1) bad.push_back("M must be >= 1");
    if (cfg.num_subcarriers < 1) bad.push_back("N must be >= 1");
    if (cfg.num_users < 1) bad.push_back("K must be >= 1");
    if (cfg.num_users > cfg.num_antennas) bad.push_back("K must be <= M");
    if (cfg.num_paths < 1) bad.push_back("L must be >= 1");
    if (cfg.num_pilot_subcarriers < 1 ||
        cfg.num_pilot_subcarriers > cfg.num_subcarriers) {
        bad.push_back("N_p must satisfy 1 <= N_p <= N");
    }
    if (cfg.pilots_per_subcarrier.empty()) bad.push_back("T_p must be given");
    for (int tp : cfg.pilots_per_subcarrier) {
        if (tp < 1 || tp > cfg.frame_len) {
            bad.push_back("every T_p must satisfy 1 <= T_p <= T");
            break;
        }
    }
    if (cfg.snr_db_grid.empty()) bad.push_back("snr_db_grid must be nonempty");
    if (cfg.kappa <= 0.0) bad.push_back("kappa must be positive");
    if (cfg.zeta.has_value() == cfg.beta_fb.has_value()) {
        bad.push_back("exactly one of zeta / beta_fb must be present");
    }
    if (cfg.zeta && *cfg.zeta <= 0.0) bad.push_back("zeta must be positive");
    if (cfg.beta_fb && *cfg.beta_fb < 1) bad.push_back("beta_fb must be >= 1");
    if (cfg.d_over_lambda <= 0.0) bad.push_back("d_over_lambda must be positive");
    if (cfg.delta_f <= 0.0) bad.push_back("delta_f must be positive");
    if (cfg.tau_max && *cfg.tau_max <= 0.0) bad.push_back("tau_max must be positive");
    if (cfg.trials.matrices < 1) bad.push_back("trials.matrices must be >= 1");
    if (cfg.trials.covariances < 1) bad.push_back("trials.covariances must be >= 1");
    if (cfg.trials.channels < 1) bad.push_back("trials.channels must be >= 1");
    if (cfg.strategies.empty()) bad.push_back("strategies must be nonempty");

    if (!bad.empty()) {
        std::string msg = "invalid config:";
        for (const auto& b : bad) {
            msg += "\n  - " + b;
        }
        throw std::invalid_argument(msg);
    }
}

std::string config_hash(const SystemConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a 64
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

struct Acc {
    double sum = 0.0;
    double sumsq = 0.0;
    long n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++n;
    }
    void merge(const Acc& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
    double stderr_mean() const {
        if (n < 2) return 0.0;
        const double var = std::max(
            0.0, (sumsq - sum * sum / static_cast<double>(n)) /
                     static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

SweepRow make_row(const std::string& strategy, const std::string& x_name,
                  double x_value, const std::string& metric, const Acc& acc) {
    SweepRow row;
    row.strategy = strategy;
    row.x_name = x_name;
    row.x_value = x_value;
    row.metric = metric;
    row.value = acc.mean();
    row.stderr_value = acc.stderr_mean();
    row.n_trials = acc.n;
    return row;
}

bool has_strategy(const SystemConfig& cfg, Strategy s) {
    return std::find(cfg.strategies.begin(), cfg.strategies.end(), s) !=
           cfg.strategies.end();
}

std::vector<std::vector<Covariance>> make_covariances(const SystemConfig& cfg) {
    std::vector<std::vector<Covariance>> covs(
        static_cast<std::size_t>(cfg.trials.covariances));
    for (int c = 0; c < cfg.trials.covariances; ++c) {
        auto& set = covs[static_cast<std::size_t>(c)];
        set.reserve(static_cast<std::size_t>(cfg.num_users));
        for (int k = 0; k < cfg.num_users; ++k) {
            RngStream rng(cfg.seed, StreamTag::geometry,
                          static_cast<std::uint64_t>(c),
                          static_cast<std::uint64_t>(k));
            const auto geo =
                sample_geometry(cfg.num_paths, cfg.tau_max_value(), rng,
                                cfg.d_over_lambda, cfg.delta_f);
            set.push_back(covariance_from_geometry(geo, cfg.num_antennas,
                                                   cfg.num_subcarriers));
        }
    }
    return covs;
}

json base_metadata(const SystemConfig& cfg, double wall_seconds,
                   long discarded) {
    json meta;
    meta["config"] = config_to_json(cfg);
    meta["config_hash"] = config_hash(cfg);
    meta["seed"] = cfg.seed;
    meta["version"] = kVersionString;
    meta["wall_time_s"] = wall_seconds;
    meta["discarded_trials"] = discarded;
    return meta;
}

} // namespace

SweepResult run_mse_sweep(const SystemConfig& cfg, int threads) {
    validate_config(cfg);
    if (cfg.pilots_per_subcarrier.size() != 1) {
        throw std::invalid_argument("run_mse_sweep: T_p must be a single value");
    }
    const auto t0 = std::chrono::steady_clock::now();

    const int pilots = cfg.pilots_per_subcarrier.front();
    const auto pattern =
        pilot_pattern(cfg.num_subcarriers, cfg.num_pilot_subcarriers);
    const int beta_tr = pilots * cfg.num_pilot_subcarriers;
    const int beta_fb = cfg.beta_fb_for(beta_tr);

    const bool want_rd = has_strategy(cfg, Strategy::rd);
    const bool want_ecsq = has_strategy(cfg, Strategy::ecsq);
    const bool want_af = has_strategy(cfg, Strategy::af);

    const auto covs = make_covariances(cfg);
    std::vector<TrainingMatrix> bases;
    bases.reserve(static_cast<std::size_t>(cfg.trials.matrices));
    for (int m = 0; m < cfg.trials.matrices; ++m) {
        RngStream rng(cfg.seed, StreamTag::training_matrix,
                      static_cast<std::uint64_t>(m));
        bases.push_back(build_training_matrix(pattern, pilots,
                                              cfg.num_antennas,
                                              cfg.num_subcarriers, 1.0, rng));
    }

    struct TaskOut {
        Acc rd_an, ecsq_an, ecsq_sim, af_an, af_sim;
    };
    const long num_snr = static_cast<long>(cfg.snr_db_grid.size());
    const long per_snr =
        static_cast<long>(cfg.trials.covariances) * cfg.trials.matrices;
    const long num_tasks = num_snr * per_snr;
    std::vector<TaskOut> outs(static_cast<std::size_t>(num_tasks));

    parallel_for(num_tasks, threads, [&](long task) {
        const long s = task / per_snr;
        const long c = (task % per_snr) / cfg.trials.matrices;
        const long m = (task % per_snr) % cfg.trials.matrices;
        auto& out = outs[static_cast<std::size_t>(task)];

        const double snr = std::pow(10.0, cfg.snr_db_grid[static_cast<std::size_t>(s)] / 10.0);
        TrainingMatrix x = bases[static_cast<std::size_t>(m)];
        x.snr_dl = snr;
        const std::uint64_t salt =
            static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(cfg.trials.matrices) +
            static_cast<std::uint64_t>(m);
        const double c_ul = feedback_capacity(snr, cfg.kappa, cfg.num_antennas);

        for (int k = 0; k < cfg.num_users; ++k) {
            const auto& cov = covs[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
            const auto ku = static_cast<std::uint64_t>(k);

            PosteriorModel pm;
            BitAllocation alloc;
            if (want_rd || want_ecsq) {
                pm = posterior_stats(cov, x);
                if (want_rd) {
                    out.rd_an.add(rd_error_bound(pm, beta_fb, c_ul));
                }
                if (want_ecsq) {
                    alloc = budget_to_error(pm, beta_fb, c_ul);
                    out.ecsq_an.add(alloc.target_distortion);
                }
            }
            SpreadingMatrix psi;
            arma::cx_mat filt;
            if (want_af) {
                RngStream sp(cfg.seed, StreamTag::spreading, salt, ku,
                             static_cast<std::uint64_t>(s));
                psi = build_spreading_matrix(training_covariance(cov, x),
                                             beta_fb, cfg.num_antennas,
                                             cfg.kappa * snr, sp);
                out.af_an.add(af_error(cov, x, psi));
                filt = af_filter(cov, x, psi);
            }

            if (!want_ecsq && !want_af) {
                continue;
            }
            for (int t = 0; t < cfg.trials.channels; ++t) {
                const auto tu = static_cast<std::uint64_t>(t);
                RngStream ch(cfg.seed, StreamTag::channel, salt, ku, tu);
                const arma::cx_vec h = sample_channel(cov, ch);
                RngStream nz(cfg.seed, StreamTag::training_noise, salt, ku, tu);
                const arma::cx_rowvec y = observe(h, x, nz);

                if (want_ecsq) {
                    const arma::cx_vec u = mmse_estimate(pm, y);
                    const arma::cx_vec w = pm.eigvecs.t() * u;
                    RngStream dt(cfg.seed, StreamTag::dither, salt, ku, tu);
                    const arma::cx_vec what = ecsq_encode_decode(w, alloc, dt);
                    const double err =
                        std::pow(arma::norm(h - pm.eigvecs * what), 2);
                    out.ecsq_sim.add(err);
                }
                if (want_af) {
                    RngStream fz(cfg.seed, StreamTag::feedback_noise, salt, ku, tu);
                    const arma::cx_rowvec y_af = af_transmit(y, psi, fz);
                    const double err = std::pow(arma::norm(h - filt * y_af.t()), 2);
                    out.af_sim.add(err);
                }
            }
        }
    });

    SweepResult result;
    for (long s = 0; s < num_snr; ++s) {
        TaskOut agg;
        for (long i = 0; i < per_snr; ++i) {
            const auto& out = outs[static_cast<std::size_t>(s * per_snr + i)];
            agg.rd_an.merge(out.rd_an);
            agg.ecsq_an.merge(out.ecsq_an);
            agg.ecsq_sim.merge(out.ecsq_sim);
            agg.af_an.merge(out.af_an);
            agg.af_sim.merge(out.af_sim);
        }
        const double snr_db = cfg.snr_db_grid[static_cast<std::size_t>(s)];
        if (want_rd) {
            result.rows.push_back(make_row("rd", "snr_db", snr_db, "mse_analytic", agg.rd_an));
        }
        if (want_ecsq) {
            result.rows.push_back(make_row("ecsq", "snr_db", snr_db, "mse_analytic", agg.ecsq_an));
            result.rows.push_back(make_row("ecsq", "snr_db", snr_db, "mse_simulated", agg.ecsq_sim));
        }
        if (want_af) {
            result.rows.push_back(make_row("af", "snr_db", snr_db, "mse_analytic", agg.af_an));
            result.rows.push_back(make_row("af", "snr_db", snr_db, "mse_simulated", agg.af_sim));
        }
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.metadata = base_metadata(cfg, wall, 0);
    result.metadata["sweep"] = "mse";
    result.metadata["beta_tr"] = beta_tr;
    result.metadata["beta_fb"] = beta_fb;
    return result;
}

SweepResult run_sumrate_sweep(const SystemConfig& cfg, int threads) {
    validate_config(cfg);
    if (cfg.snr_db_grid.size() != 1) {
        throw std::invalid_argument(
            "run_sumrate_sweep: snr_db_grid must hold exactly one value");
    }
    const auto t0 = std::chrono::steady_clock::now();

    const double snr = std::pow(10.0, cfg.snr_db_grid.front() / 10.0);
    const auto pattern =
        pilot_pattern(cfg.num_subcarriers, cfg.num_pilot_subcarriers);
    const auto covs = make_covariances(cfg);

    const long num_points = static_cast<long>(cfg.pilots_per_subcarrier.size());
    const long per_point =
        static_cast<long>(cfg.trials.covariances) * cfg.trials.matrices;
    const long num_tasks = num_points * per_point;
    const long num_strats = static_cast<long>(cfg.strategies.size());

    std::vector<SumrateStats> outs(
        static_cast<std::size_t>(num_tasks * num_strats));

    parallel_for(num_tasks, threads, [&](long task) {
        const long p = task / per_point;
        const long c = (task % per_point) / cfg.trials.matrices;
        const long m = (task % per_point) % cfg.trials.matrices;

        const int pilots = cfg.pilots_per_subcarrier[static_cast<std::size_t>(p)];
        const int beta_tr = pilots * cfg.num_pilot_subcarriers;

        RngStream mat_rng(cfg.seed, StreamTag::training_matrix,
                          static_cast<std::uint64_t>(m),
                          static_cast<std::uint64_t>(p));
        TrainingMatrix x =
            build_training_matrix(pattern, pilots, cfg.num_antennas,
                                  cfg.num_subcarriers, snr, mat_rng);

        SumrateContext ctx;
        ctx.user_covs = covs[static_cast<std::size_t>(c)];
        ctx.training = std::move(x);
        ctx.beta_fb = cfg.beta_fb_for(beta_tr);
        ctx.kappa = cfg.kappa;
        ctx.num_antennas = cfg.num_antennas;
        ctx.num_subcarriers = cfg.num_subcarriers;
        ctx.num_users = cfg.num_users;
        ctx.frame_len = cfg.frame_len;
        ctx.pilots_per_subcarrier = pilots;
        ctx.charge_training_overhead =
            cfg.pilot_weighting == PilotWeighting::overhead;
        ctx.seed = cfg.seed;
        ctx.stream_salt = static_cast<std::uint64_t>(task);

        for (long si = 0; si < num_strats; ++si) {
            outs[static_cast<std::size_t>(task * num_strats + si)] =
                ergodic_sumrate(ctx, cfg.strategies[static_cast<std::size_t>(si)],
                                snr, cfg.trials.channels);
        }
    });

    SweepResult result;
    long discarded_total = 0;
    for (long p = 0; p < num_points; ++p) {
        const int beta_tr =
            cfg.pilots_per_subcarrier[static_cast<std::size_t>(p)] *
            cfg.num_pilot_subcarriers;
        for (long si = 0; si < num_strats; ++si) {
            Acc acc;
            long discarded = 0;
            for (long i = 0; i < per_point; ++i) {
                const auto& st = outs[static_cast<std::size_t>(
                    (p * per_point + i) * num_strats + si)];
                acc.sum += st.sum;
                acc.sumsq += st.sumsq;
                acc.n += st.used_trials;
                discarded += st.discarded_trials;
            }
            discarded_total += discarded;
            result.rows.push_back(
                make_row(to_string(cfg.strategies[static_cast<std::size_t>(si)]),
                         "beta_tr", beta_tr, "sumrate", acc));
        }
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.metadata = base_metadata(cfg, wall, discarded_total);
    result.metadata["sweep"] = "sumrate";
    result.metadata["snr_db"] = cfg.snr_db_grid.front();
    return result;
}

// ---------------------------------------------------------------------------
// Exponent fitting and persistence

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& snr_db_mse,
                         double window_decades) {
    double max_db = -1e300;
    for (const auto& [db, mse] : snr_db_mse) {
        max_db = std::max(max_db, db);
    }
    std::vector<std::pair<double, double>> pts; // (log2 snr, -log2 mse)
    for (const auto& [db, mse] : snr_db_mse) {
        if (db >= max_db - 10.0 * window_decades - 1e-9) {
            pts.emplace_back(db / 10.0 * std::log2(10.0), -std::log2(mse));
        }
    }
    const int n = static_cast<int>(pts.size());
    if (n < 3) {
        throw std::invalid_argument("fit_exponent: need at least 3 points in window");
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = sxx - sx * sx / n;
    const double slope = (sxy - sx * sy / n) / denom;
    const double intercept = (sy - slope * sx) / n;

    double ssr = 0.0;
    for (const auto& [x, y] : pts) {
        const double e = y - (intercept + slope * x);
        ssr += e * e;
    }
    ExponentFit fit;
    fit.alpha = slope;
    fit.stderr_alpha = n > 2 ? std::sqrt(ssr / (n - 2) / denom) : 0.0;
    fit.points = n;
    return fit;
}

std::string csv_string(const SweepResult& result) {
    std::ostringstream os;
    os << "strategy,x_name,x_value,metric,value,stderr,n_trials\n";
    char buf[64];
    for (const auto& row : result.rows) {
        os << row.strategy << ',' << row.x_name << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", row.x_value);
        os << buf << ',' << row.metric << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", row.value);
        os << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", row.stderr_value);
        os << buf << ',' << row.n_trials << '\n';
    }
    return os.str();
}

void write_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << csv_string(result);
}

void write_metadata(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << result.metadata.dump(2) << '\n';
}

} // namespace csifb
