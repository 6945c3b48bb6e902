#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "tsbf/harness.hpp"

namespace tsbf {

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.experiment << ',' << method_name(r.method) << ',' << inner_name(r.inner) << ','
           << format_number(r.pt_db) << ',' << format_number(r.delta_rad) << ',' << r.trials << ','
           << format_number(r.mean_sum_rate) << ',' << format_number(r.se_sum_rate) << ','
           << format_number(r.mean_signal) << ',' << format_number(r.mean_leakage) << ','
           << format_number(r.mean_iters) << '\n';
    }
}

void write_json(std::ostream& os, const std::vector<ResultRow>& rows) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        out.push_back({{"experiment", r.experiment},
                       {"method", method_name(r.method)},
                       {"inner", inner_name(r.inner)},
                       {"pt_db", r.pt_db},
                       {"delta_rad", r.delta_rad},
                       {"trials", r.trials},
                       {"mean_sum_rate", r.mean_sum_rate},
                       {"se_sum_rate", r.se_sum_rate},
                       {"mean_signal", r.mean_signal},
                       {"se_signal", r.se_signal},
                       {"mean_leakage", r.mean_leakage},
                       {"se_leakage", r.se_leakage},
                       {"mean_iters", r.mean_iters},
                       {"resampled_trials", r.resampled_trials},
                       {"infeasible", r.infeasible}});
    }
    os << out.dump(2) << '\n';
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceTrace>& traces) {
    os << "experiment,group,iteration,rho\n";
    for (const auto& t : traces) {
        for (std::size_t n = 0; n < t.rho.size(); ++n) {
            os << "convergence," << t.group << ',' << (n + 1) << ',' << format_number(t.rho[n])
               << '\n';
        }
    }
}

void write_convergence_json(std::ostream& os, const std::vector<ConvergenceTrace>& traces) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& t : traces) {
        out.push_back({{"group", t.group}, {"iterations", t.iterations}, {"rho", t.rho}});
    }
    os << out.dump(2) << '\n';
}

}  // namespace tsbf
