#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tsbf/channel.hpp"
#include "tsbf/harness.hpp"

namespace tsbf {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

template <typename T>
T get_field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) {
            throw ConfigError("unknown config field '" + it.key() + "' in " + where);
        }
    }
}

InnerType parse_inner(const std::string& s) {
    if (s == "ZF") return InnerType::ZF;
    if (s == "RZF") return InnerType::RZF;
    throw ConfigError("unknown inner beamformer '" + s + "'");
}

}  // namespace

std::string_view inner_name(InnerType t) { return t == InnerType::ZF ? "ZF" : "RZF"; }

void ExperimentConfig::validate() const {
    if (antennas < 1) throw ConfigError("M must be >= 1");
    if (!(spacing > 0)) throw ConfigError("D must be positive");
    if (!(noise_power > 0)) throw ConfigError("sigma2 must be positive");
    if (groups.empty()) throw ConfigError("at least one group is required");
    for (const auto& g : groups) {
        if (!(std::abs(g.theta_deg) < 90)) throw ConfigError("group theta_deg must be in (-90, 90)");
        if (!(g.delta_deg > 0 && g.delta_deg < 90)) throw ConfigError("group delta_deg must be in (0, 90)");
        if (g.users < 1) throw ConfigError("group K_g must be >= 1");
        if (g.outer_dim < g.users || g.outer_dim > antennas) {
            throw ConfigError("group M_g must satisfy K_g <= M_g <= M");
        }
    }
    if (pt_db_grid.empty()) throw ConfigError("pt_db_grid must be non-empty");
    for (double a : as_grid_deg) {
        if (!(a > 0 && a < 90)) throw ConfigError("as_grid_deg entries must be in (0, 90)");
    }
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (methods.empty()) throw ConfigError("methods must be non-empty");
    if (inners.empty()) throw ConfigError("inner must be non-empty");
    if (!(weight > 0)) throw ConfigError("w must be positive");
    if (!(eps > 0)) throw ConfigError("eps must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (!(energy_threshold > 0 && energy_threshold <= 1)) {
        throw ConfigError("energy_threshold must be in (0, 1]");
    }
    if (threads < 0) throw ConfigError("threads must be >= 0");
}

OuterOptions ExperimentConfig::outer_options() const {
    OuterOptions o;
    o.tqp.eps = eps;
    o.tqp.max_iter = max_iter;
    o.weight = weight;
    o.energy_threshold = energy_threshold;
    return o;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"M", "D", "sigma2", "G", "groups", "delta_deg", "pt_db_grid", "as_grid_deg",
                    "as_pt_db", "trials", "seed", "methods", "inner", "w", "eps", "max_iter",
                    "energy_threshold", "output", "threads"},
                   "config");

    ExperimentConfig cfg;
    if (j.contains("M")) cfg.antennas = get_field<Index>(j, "M");
    if (j.contains("D")) cfg.spacing = get_field<double>(j, "D");
    if (j.contains("sigma2")) cfg.noise_power = get_field<double>(j, "sigma2");
    const double default_delta =
        j.contains("delta_deg") ? get_field<double>(j, "delta_deg") : 180.0 / 13.0;

    if (!j.contains("groups") || !j["groups"].is_array()) {
        throw ConfigError("config field 'groups' must be an array");
    }
    for (const auto& gj : j["groups"]) {
        if (!gj.is_object()) throw ConfigError("each group must be an object");
        reject_unknown(gj, {"theta_deg", "delta_deg", "K_g", "M_g"}, "group");
        GroupConfig g;
        g.theta_deg = get_field<double>(gj, "theta_deg");
        g.delta_deg = gj.contains("delta_deg") ? get_field<double>(gj, "delta_deg") : default_delta;
        if (gj.contains("K_g")) g.users = get_field<Index>(gj, "K_g");
        g.outer_dim = gj.contains("M_g") ? get_field<Index>(gj, "M_g") : 2 * g.users;
        cfg.groups.push_back(g);
    }
    if (j.contains("G") && get_field<std::size_t>(j, "G") != cfg.groups.size()) {
        throw ConfigError("G does not match the number of groups");
    }

    if (j.contains("pt_db_grid")) cfg.pt_db_grid = get_field<std::vector<double>>(j, "pt_db_grid");
    if (j.contains("as_grid_deg")) cfg.as_grid_deg = get_field<std::vector<double>>(j, "as_grid_deg");
    if (j.contains("as_pt_db")) cfg.as_pt_db = get_field<double>(j, "as_pt_db");
    if (j.contains("trials")) cfg.trials = get_field<int>(j, "trials");
    if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed");
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& name : get_field<std::vector<std::string>>(j, "methods")) {
            auto m = parse_method(name);
            if (!m) throw ConfigError("unknown method '" + name + "'");
            cfg.methods.push_back(*m);
        }
    }
    if (j.contains("inner")) {
        cfg.inners.clear();
        if (j["inner"].is_string()) {
            cfg.inners.push_back(parse_inner(j["inner"].get<std::string>()));
        } else {
            for (const auto& name : get_field<std::vector<std::string>>(j, "inner")) {
                cfg.inners.push_back(parse_inner(name));
            }
        }
    }
    if (j.contains("w")) cfg.weight = get_field<double>(j, "w");
    if (j.contains("eps")) cfg.eps = get_field<double>(j, "eps");
    if (j.contains("max_iter")) cfg.max_iter = get_field<int>(j, "max_iter");
    if (j.contains("energy_threshold")) cfg.energy_threshold = get_field<double>(j, "energy_threshold");
    if (j.contains("output")) cfg.output = get_field<std::string>(j, "output");
    if (j.contains("threads")) cfg.threads = get_field<int>(j, "threads");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

ExperimentConfig reference_config() {
    ExperimentConfig cfg;
    for (double theta : {-45.0, -15.0, 15.0, 45.0}) {
        cfg.groups.push_back({theta, 180.0 / 13.0, 5, 10});
    }
    return cfg;
}

Scenario<double> build_scenario(const ExperimentConfig& cfg, double delta_rad_override,
                                double pt_db) {
    Scenario<double> s;
    s.noise_power = cfg.noise_power;
    s.total_power = std::pow(10.0, pt_db / 10.0);
    for (const auto& g : cfg.groups) {
        OneRingParams<double> p;
        p.antennas = cfg.antennas;
        p.theta = g.theta_deg * kDegToRad;
        p.delta = delta_rad_override > 0 ? delta_rad_override : g.delta_deg * kDegToRad;
        p.spacing = cfg.spacing;
        GroupSpec<double> grp;
        grp.covariance = one_ring_covariance(p);
        grp.users = g.users;
        grp.outer_dim = g.outer_dim;
        grp.streams = g.users;
        s.groups.push_back(std::move(grp));
    }
    s.validate();
    return s;
}

}  // namespace tsbf
