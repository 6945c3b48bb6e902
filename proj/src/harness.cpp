#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "tsbf/channel.hpp"
#include "tsbf/harness.hpp"
#include "tsbf/inner.hpp"
#include "tsbf/metrics.hpp"
#include "tsbf/rng.hpp"

namespace tsbf {

namespace {

constexpr int kMaxResampleAttempts = 1000;

struct Combo {
    std::size_t method;  // index into cfg.methods
    InnerType inner;
    std::size_t pt;      // index into the power grid
};

struct TrialSample {
    double sum_rate = 0;
    double signal = 0;
    double leakage = 0;
};

struct TrialOutcome {
    std::vector<TrialSample> per_combo;
    int resamples = 0;
};

struct MeanSe {
    double mean = 0;
    double se = 0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
    MeanSe out;
    const auto n = static_cast<double>(xs.size());
    if (xs.empty()) return out;
    double sum = 0;
    for (double x : xs) sum += x;
    out.mean = sum / n;
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / (n - 1)) / std::sqrt(n);
    }
    return out;
}

/// Runs `task(i)` for i in [0, n) on `threads` workers. Each index is
/// processed exactly once; the first exception is rethrown.
template <typename Task>
void parallel_for(int n, int threads, Task&& task) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, std::max(n, 1));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// One covariance configuration evaluated over a power grid. Outer
/// beamformers are designed once from the statistics and reused by every
/// trial; channels are shared across methods and power points.
std::vector<ResultRow> run_grid(const ExperimentConfig& cfg, const std::string& experiment,
                                double delta_rad_override, const std::vector<double>& pt_grid) {
    cfg.validate();
    const Scenario<double> scenario = build_scenario(cfg, delta_rad_override, pt_grid.front());
    const Index groups = scenario.group_count();
    const OuterOptions opts = cfg.outer_options();

    std::vector<std::vector<CMatrix<double>>> outers(cfg.methods.size());
    std::vector<double> mean_iters(cfg.methods.size(), 0.0);
    // BD can lack a null space of dimension M_g; such a method is reported
    // with NaN statistics instead of aborting the whole grid.
    std::vector<bool> infeasible(cfg.methods.size(), false);
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        try {
            for (Index g = 0; g < groups; ++g) {
                auto ob = design_outer(scenario, g, cfg.methods[mi], opts);
                mean_iters[mi] += static_cast<double>(ob.iterations) / static_cast<double>(groups);
                outers[mi].push_back(std::move(ob.v));
            }
        } catch (const InfeasibleBD&) {
            infeasible[mi] = true;
            outers[mi].clear();
        }
    }

    std::vector<CMatrix<double>> sqrt_r;
    for (const auto& g : scenario.groups) sqrt_r.push_back(hermitian_sqrt(g.covariance));

    std::vector<Combo> combos;
    for (std::size_t pi = 0; pi < pt_grid.size(); ++pi) {
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            for (InnerType inner : cfg.inners) combos.push_back({mi, inner, pi});
        }
    }

    const double total_users = static_cast<double>(scenario.total_users());
    std::vector<double> pt_linear;
    for (double db : pt_grid) pt_linear.push_back(std::pow(10.0, db / 10.0));

    std::vector<TrialOutcome> outcomes(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int trial) {
        TrialOutcome& out = outcomes[trial];
        for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
            std::vector<GroupChannel<double>> channels;
            for (Index g = 0; g < groups; ++g) {
                Rng rng = substream(cfg.seed, std::uint64_t(trial), std::uint64_t(g),
                                    std::uint64_t(attempt));
                channels.push_back(sample_group_channels<double>(sqrt_r[g],
                                                                 scenario.groups[g].users, rng));
            }
            try {
                out.per_combo.assign(combos.size(), {});
                for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                    if (infeasible[mi]) continue;
                    std::vector<CMatrix<double>> heff;
                    for (Index g = 0; g < groups; ++g) {
                        heff.push_back(channels[g].matrix * outers[mi][g]);
                    }
                    std::vector<CMatrix<double>> zf;
                    for (std::size_t c = 0; c < combos.size(); ++c) {
                        const Combo& combo = combos[c];
                        if (combo.method != mi) continue;
                        const double pt = pt_linear[combo.pt];
                        std::vector<CMatrix<double>> inner;
                        if (combo.inner == InnerType::ZF) {
                            if (zf.empty()) {
                                for (Index g = 0; g < groups; ++g) {
                                    zf.push_back(zf_inner_effective(heff[g]).w);
                                }
                            }
                            inner = zf;
                        } else {
                            const double alpha = total_users / pt;
                            for (Index g = 0; g < groups; ++g) {
                                inner.push_back(rzf_inner_effective(heff[g], alpha).w);
                            }
                        }
                        const auto lg = link_gains<double>(channels, outers[mi], inner);
                        const double p = pt / total_users;
                        const auto m = evaluate_trial(lg, scenario.noise_power, p,
                                                      combo.inner == InnerType::RZF);
                        out.per_combo[c] = {m.sum_rate, m.signal_power, m.leakage_power};
                    }
                }
                return;
            } catch (const SingularChannel&) {
                ++out.resamples;
            }
        }
        throw SingularChannel("trial " + std::to_string(trial) +
                              ": effective channel singular after repeated resampling");
    });

    long resampled = 0;
    for (const auto& o : outcomes) resampled += o.resamples;

    const double delta_rad =
        delta_rad_override > 0 ? delta_rad_override : cfg.groups.front().delta_deg * (std::numbers::pi / 180.0);
    std::vector<ResultRow> rows;
    for (std::size_t c = 0; c < combos.size(); ++c) {
        std::vector<double> rate, signal, leakage;
        rate.reserve(cfg.trials);
        signal.reserve(cfg.trials);
        leakage.reserve(cfg.trials);
        for (const auto& o : outcomes) {
            rate.push_back(o.per_combo[c].sum_rate);
            signal.push_back(o.per_combo[c].signal);
            leakage.push_back(o.per_combo[c].leakage);
        }
        const auto r = mean_and_se(rate);
        const auto s = mean_and_se(signal);
        const auto l = mean_and_se(leakage);
        ResultRow row;
        if (infeasible[combos[c].method]) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.experiment = experiment;
            row.method = cfg.methods[combos[c].method];
            row.inner = combos[c].inner;
            row.pt_db = pt_grid[combos[c].pt];
            row.delta_rad = delta_rad;
            row.trials = 0;
            row.mean_sum_rate = row.se_sum_rate = row.mean_signal = row.mean_leakage = nan;
            row.se_signal = row.se_leakage = row.mean_iters = nan;
            row.resampled_trials = resampled;
            row.infeasible = true;
            rows.push_back(row);
            continue;
        }
        row.experiment = experiment;
        row.method = cfg.methods[combos[c].method];
        row.inner = combos[c].inner;
        row.pt_db = pt_grid[combos[c].pt];
        row.delta_rad = delta_rad;
        row.trials = cfg.trials;
        row.mean_sum_rate = r.mean;
        row.se_sum_rate = r.se;
        row.mean_signal = s.mean;
        row.se_signal = s.se;
        row.mean_leakage = l.mean;
        row.se_leakage = l.se;
        row.mean_iters = mean_iters[combos[c].method];
        row.resampled_trials = resampled;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::vector<ResultRow> run_sumrate_vs_power(const ExperimentConfig& cfg) {
    return run_grid(cfg, "sumrate", 0.0, cfg.pt_db_grid);
}

std::vector<ResultRow> run_power_breakdown(const ExperimentConfig& cfg) {
    return run_grid(cfg, "power", 0.0, cfg.pt_db_grid);
}

std::vector<ResultRow> run_as_sweep(const ExperimentConfig& cfg) {
    if (cfg.as_grid_deg.empty()) throw ConfigError("as-sweep requires a non-empty as_grid_deg");
    std::vector<ResultRow> rows;
    for (double delta_deg : cfg.as_grid_deg) {
        auto part = run_grid(cfg, "as-sweep", delta_deg * (std::numbers::pi / 180.0), {cfg.as_pt_db});
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

std::vector<ConvergenceTrace> run_convergence_trace(const ExperimentConfig& cfg) {
    cfg.validate();
    const Scenario<double> scenario = build_scenario(cfg, 0.0, cfg.pt_db_grid.front());
    TqpOptions opts;
    opts.eps = cfg.eps;
    opts.max_iter = cfg.max_iter;
    std::vector<ConvergenceTrace> traces;
    for (Index g = 0; g < scenario.group_count(); ++g) {
        auto ob = solve_tqp(build_signal_matrix(scenario, g), build_leakage_matrix(scenario, g),
                            scenario.groups[g].outer_dim, opts);
        traces.push_back({g, ob.rho_trace, ob.iterations});
    }
    return traces;
}

}  // namespace tsbf
