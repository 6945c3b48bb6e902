// Command-line driver for the outer-beamformer Monte-Carlo experiments.
//
//   tsbf_sim --config cfg.json --experiment sumrate --out results.csv
//
// Exit codes: 0 success, 2 configuration error, 3 TQP did not converge,
// 1 anything else.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tsbf/harness.hpp"

namespace {

std::vector<tsbf::OuterMethod> parse_method_list(const std::string& list) {
    std::vector<tsbf::OuterMethod> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto m = tsbf::parse_method(item);
        if (!m) throw tsbf::ConfigError("unknown method '" + item + "'");
        out.push_back(*m);
    }
    if (out.empty()) throw tsbf::ConfigError("--methods must name at least one method");
    return out;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tsbf::ConfigError("cannot open output file '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Statistics-only outer beamformer design for two-stage massive MIMO"};
    std::string config_path;
    std::string experiment = "sumrate";
    std::string out_path;
    std::string json_path;
    std::string methods;
    std::uint64_t seed = 0;
    int trials = 0;
    int threads = -1;

    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--experiment", experiment, "sumrate | as-sweep | convergence | power")
        ->check(CLI::IsMember({"sumrate", "as-sweep", "convergence", "power"}));
    app.add_option("--out", out_path, "CSV output path ('-' for stdout; defaults to config 'output')");
    auto* seed_opt = app.add_option("--seed", seed, "override the master seed");
    app.add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
    app.add_option("--methods", methods, "comma list of TQP,P3_SVD,WEIGHTED_DIFF,BD");
    app.add_option("--threads", threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--json", json_path, "also write results as JSON to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        tsbf::ExperimentConfig cfg = tsbf::load_config(config_path);
        if (*seed_opt) cfg.seed = seed;
        if (trials > 0) cfg.trials = trials;
        if (!methods.empty()) cfg.methods = parse_method_list(methods);
        if (threads >= 0) cfg.threads = threads;
        if (out_path.empty()) out_path = cfg.output;
        cfg.validate();

        std::ostringstream csv;
        std::ostringstream json;
        if (experiment == "convergence") {
            const auto traces = tsbf::run_convergence_trace(cfg);
            tsbf::write_convergence_csv(csv, traces);
            tsbf::write_convergence_json(json, traces);
        } else {
            std::vector<tsbf::ResultRow> rows;
            if (experiment == "sumrate") rows = tsbf::run_sumrate_vs_power(cfg);
            else if (experiment == "power") rows = tsbf::run_power_breakdown(cfg);
            else rows = tsbf::run_as_sweep(cfg);
            tsbf::write_csv(csv, rows);
            tsbf::write_json(json, rows);
            for (const auto& r : rows) {
                if (r.infeasible && r.inner == cfg.inners.front() && r.pt_db == rows.front().pt_db) {
                    std::cerr << "note: " << tsbf::method_name(r.method)
                              << " infeasible at delta_rad " << tsbf::format_number(r.delta_rad)
                              << "; rows reported as nan\n";
                }
            }
            if (!rows.empty() && rows.front().resampled_trials > 0) {
                std::cerr << "note: " << rows.front().resampled_trials
                          << " singular channel draws were resampled\n";
            }
        }
        emit(out_path, csv.str());
        if (!json_path.empty()) emit(json_path, json.str());
    } catch (const tsbf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const tsbf::ConvergenceFailure& e) {
        std::cerr << "convergence failure: " << e.what() << " after "
                  << e.partial_trace().size() << " iterations\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
