#include "battmdp/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace battmdp {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) {
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
        }
    }
}

std::array<double, 24> hourly_array(const json& j, const std::string& what) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 24) throw std::invalid_argument("config: " + what + " needs 24 values");
    std::array<double, 24> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return a;
}

PricingPolicy parse_pricing(const json& j) {
    reject_unknown_keys(j, {"kind", "tou", "realtime_prices", "energy_limit", "peak"}, "pricing");
    const PricingKind kind = pricing_kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
        case PricingKind::TouA: {
            double off = 0.05, peak = 0.20, shoulder = 0.10;
            if (j.contains("tou")) {
                const auto& t = j["tou"];
                reject_unknown_keys(t, {"offpeak_price", "peak_price", "shoulder_price"},
                                    "pricing.tou");
                off = t.value("offpeak_price", off);
                peak = t.value("peak_price", peak);
                shoulder = t.value("shoulder_price", shoulder);
            }
            return PricingPolicy::tou_a(off, peak, shoulder);
        }
        case PricingKind::RealtimeB: {
            if (j.contains("realtime_prices")) {
                return PricingPolicy::realtime_b(hourly_array(j["realtime_prices"],
                                                              "realtime_prices"));
            }
            return PricingPolicy::realtime_b_default();
        }
        case PricingKind::EnergyLimitC: {
            double limit = 200.0, low = 0.05, high = 0.12;
            if (j.contains("energy_limit")) {
                const auto& t = j["energy_limit"];
                reject_unknown_keys(t, {"limit_kwh", "low_price", "high_price"},
                                    "pricing.energy_limit");
                limit = t.value("limit_kwh", limit);
                low = t.value("low_price", low);
                high = t.value("high_price", high);
            }
            return PricingPolicy::energy_limit_c(limit, low, high);
        }
        case PricingKind::PeakD: {
            double energy = 0.05, peak = 7.0;
            if (j.contains("peak")) {
                const auto& t = j["peak"];
                reject_unknown_keys(t, {"energy_price", "peak_price_per_kw"}, "pricing.peak");
                energy = t.value("energy_price", energy);
                peak = t.value("peak_price_per_kw", peak);
            }
            return PricingPolicy::peak_d(energy, peak);
        }
    }
    throw std::logic_error("bad pricing kind");
}

}  // namespace

PeakThresholds RunConfig::thresholds() const {
    if (peak_boundaries) {
        PeakThresholds t{*peak_boundaries};
        t.validate();
        return t;
    }
    return PeakThresholds::uniform(peak_threshold_count);
}

lp::SolverOptions RunConfig::solver_options() const {
    lp::SolverOptions opt;
    opt.iteration_limit = iteration_limit;
    opt.node_limit = node_limit;
    return opt;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }

    reject_unknown_keys(j,
                        {"paths", "battery", "pricing", "case_id", "quantiles",
                         "peak_thresholds", "relaxation_id", "seed", "solver", "ideal",
                         "synthetic", "report"},
                        "the top level");
    RunConfig cfg;

    if (j.contains("paths")) {
        const auto& p = j["paths"];
        reject_unknown_keys(p, {"train_csv", "test_csv", "out_dir"}, "paths");
        cfg.train_csv = p.value("train_csv", "");
        cfg.test_csv = p.value("test_csv", "");
        cfg.out_dir = p.value("out_dir", cfg.out_dir);
    }

    if (j.contains("battery")) {
        const auto& b = j["battery"];
        reject_unknown_keys(b, {"capacity_kwh", "efficiency", "initial_soc"}, "battery");
        cfg.battery.capacity_kwh = b.value("capacity_kwh", cfg.battery.capacity_kwh);
        cfg.battery.efficiency = b.value("efficiency", cfg.battery.efficiency);
        cfg.battery.initial_soc = b.value("initial_soc", cfg.battery.initial_soc);
        cfg.battery.validate();
    }

    if (j.contains("pricing")) cfg.pricing = parse_pricing(j["pricing"]);
    cfg.pricing.validate();

    cfg.case_id = j.value("case_id", cfg.case_id);
    CostCase::from_id(cfg.case_id);  // validates

    if (j.contains("quantiles")) {
        const auto& q = j["quantiles"];
        reject_unknown_keys(q, {"n_waves", "betas"}, "quantiles");
        cfg.n_waves = q.value("n_waves", cfg.n_waves);
        if (q.contains("betas")) cfg.betas = q["betas"].get<std::vector<double>>();
        if (cfg.n_waves < 0) throw std::invalid_argument("config: n_waves must be >= 0");
        for (double b : cfg.betas) {
            if (!(b > 0 && b < 1)) throw std::invalid_argument("config: betas must lie in (0,1)");
        }
    }

    if (j.contains("peak_thresholds")) {
        const auto& t = j["peak_thresholds"];
        reject_unknown_keys(t, {"count", "boundaries", "use_peak_formulation"},
                            "peak_thresholds");
        cfg.peak_threshold_count = t.value("count", cfg.peak_threshold_count);
        if (cfg.peak_threshold_count < 1) {
            throw std::invalid_argument("config: peak threshold count must be >= 1");
        }
        if (t.contains("boundaries")) {
            cfg.peak_boundaries = t["boundaries"].get<std::vector<double>>();
        }
        if (t.contains("use_peak_formulation")) {
            cfg.use_peak_formulation = t["use_peak_formulation"].get<bool>();
        }
    }
    cfg.thresholds();  // validates

    cfg.relaxation_id = j.value("relaxation_id", cfg.relaxation_id);
    if (cfg.relaxation_id < 1 || cfg.relaxation_id > 6) {
        throw std::invalid_argument("config: relaxation_id must be 1..6");
    }
    cfg.seed = j.value("seed", cfg.seed);

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        reject_unknown_keys(s, {"iteration_limit", "node_limit"}, "solver");
        cfg.iteration_limit = s.value("iteration_limit", cfg.iteration_limit);
        cfg.node_limit = s.value("node_limit", cfg.node_limit);
    }

    if (j.contains("ideal")) {
        const auto& s = j["ideal"];
        reject_unknown_keys(s, {"horizon_hours", "export_mps"}, "ideal");
        cfg.ideal_horizon_hours = s.value("horizon_hours", cfg.ideal_horizon_hours);
        cfg.export_mps = s.value("export_mps", cfg.export_mps);
    }

    if (j.contains("synthetic")) {
        const auto& s = j["synthetic"];
        reject_unknown_keys(s,
                            {"base_kwh", "daily_amplitude_kwh", "seasonal_amplitude_kwh",
                             "noise_std_kwh", "seed", "n_days"},
                            "synthetic");
        cfg.synthetic.base_kwh = s.value("base_kwh", cfg.synthetic.base_kwh);
        cfg.synthetic.daily_amplitude_kwh =
            s.value("daily_amplitude_kwh", cfg.synthetic.daily_amplitude_kwh);
        cfg.synthetic.seasonal_amplitude_kwh =
            s.value("seasonal_amplitude_kwh", cfg.synthetic.seasonal_amplitude_kwh);
        cfg.synthetic.noise_std_kwh = s.value("noise_std_kwh", cfg.synthetic.noise_std_kwh);
        cfg.synthetic.seed = s.value("seed", cfg.synthetic.seed);
        cfg.synthetic.n_days = s.value("n_days", cfg.synthetic.n_days);
    }

    if (j.contains("report")) {
        const auto& r = j["report"];
        reject_unknown_keys(r, {"sweep_threshold_counts"}, "report");
        if (r.contains("sweep_threshold_counts")) {
            cfg.sweep_threshold_counts = r["sweep_threshold_counts"].get<std::vector<int>>();
        }
    }

    return cfg;
}

}  // namespace battmdp
