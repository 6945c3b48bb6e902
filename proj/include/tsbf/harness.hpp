#ifndef TSBF_HARNESS_HPP
#define TSBF_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsbf/outer.hpp"

namespace tsbf {

enum class InnerType { ZF, RZF };

std::string_view inner_name(InnerType t);

struct GroupConfig {
    double theta_deg = 0;
    double delta_deg = 0;
    Index users = 5;
    Index outer_dim = 10;
};

/// Experiment description as read from the JSON config. Angles are in
/// degrees; powers in dB relative to the noise power.
struct ExperimentConfig {
    Index antennas = 128;
    double spacing = 0.5;
    double noise_power = 1.0;
    std::vector<GroupConfig> groups;
    std::vector<double> pt_db_grid{0, 5, 10, 15, 20};
    std::vector<double> as_grid_deg;
    double as_pt_db = 15;
    int trials = 2000;
    std::uint64_t seed = 1;
    std::vector<OuterMethod> methods{OuterMethod::TQP, OuterMethod::WEIGHTED_DIFF, OuterMethod::BD};
    std::vector<InnerType> inners{InnerType::ZF};
    double weight = 1.0;
    double eps = 1e-4;
    int max_iter = 1000;
    double energy_threshold = 0.95;
    std::string output;
    int threads = 1;  // 0: hardware concurrency

    void validate() const;
    OuterOptions outer_options() const;
};

/// Parses and validates a config document. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// The four-sector, M = 128 setup with delta = pi/13 and 2000 trials.
ExperimentConfig reference_config();

/// Builds the scenario for one angle-spread value (radians; <= 0 keeps the
/// per-group values) at total power `pt_db`.
Scenario<double> build_scenario(const ExperimentConfig& cfg, double delta_rad_override,
                                double pt_db);

struct ResultRow {
    std::string experiment;
    OuterMethod method = OuterMethod::TQP;
    InnerType inner = InnerType::ZF;
    double pt_db = 0;
    double delta_rad = 0;
    int trials = 0;
    double mean_sum_rate = 0;
    double se_sum_rate = 0;
    double mean_signal = 0;
    double mean_leakage = 0;
    double mean_iters = 0;
    // not part of the CSV
    double se_signal = 0;
    double se_leakage = 0;
    long resampled_trials = 0;
    bool infeasible = false;  // outer design impossible (BD null space too small)
};

struct ConvergenceTrace {
    Index group = 0;
    std::vector<double> rho;
    Index iterations = 0;
};

std::vector<ResultRow> run_sumrate_vs_power(const ExperimentConfig& cfg);
std::vector<ResultRow> run_as_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_power_breakdown(const ExperimentConfig& cfg);
std::vector<ConvergenceTrace> run_convergence_trace(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader =
    "experiment,method,inner,pt_db,delta_rad,trials,mean_sum_rate,se_sum_rate,mean_signal,"
    "mean_leakage,mean_iters";

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_json(std::ostream& os, const std::vector<ResultRow>& rows);
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceTrace>& traces);
void write_convergence_json(std::ostream& os, const std::vector<ConvergenceTrace>& traces);

/// %.10g formatting used for every float in the outputs.
std::string format_number(double x);

}  // namespace tsbf

#endif  // TSBF_HARNESS_HPP
