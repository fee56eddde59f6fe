#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "doa/harness.hpp"
#include "doa/scan_grid.hpp"
#include "json.hpp"

namespace doa {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects keys it never asked for.
class Fields {
public:
    Fields(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw ConfigError(path_, "expected an object");
        }
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_number()) {
            throw ConfigError(at(key), "expected a number");
        }
        return v->get<double>();
    }

    int integer(const std::string& key, int fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_number_integer()) {
            throw ConfigError(at(key), "expected an integer");
        }
        return v->get<int>();
    }

    std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_number_unsigned()) {
            throw ConfigError(at(key), "expected a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_boolean()) {
            throw ConfigError(at(key), "expected true or false");
        }
        return v->get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_string()) {
            throw ConfigError(at(key), "expected a string");
        }
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json* v = find(key);
        if (!v) {
            return {};
        }
        if (!v->is_array()) {
            throw ConfigError(at(key), "expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t k = 0; k < v->size(); ++k) {
            if (!(*v)[k].is_number()) {
                throw ConfigError(at(key) + "[" + std::to_string(k) + "]", "expected a number");
            }
            out.push_back((*v)[k].get<double>());
        }
        return out;
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(at(it.key()), "unknown key");
            }
        }
    }

private:
    const json&           node_;
    std::string           path_;
    std::set<std::string> seen_;
};

Loading parse_loading(Fields& f, const std::string& key, Loading fallback) {
    const json* v = f.find(key);
    if (!v) {
        return fallback;
    }
    if (v->is_number()) {
        const double gamma = v->get<double>();
        if (!(gamma >= 0.0)) {
            throw ConfigError(f.at(key), "loading must be non-negative");
        }
        return Loading::fixed(gamma);
    }
    if (v->is_string()) {
        const auto s = v->get<std::string>();
        if (s == "auto") {
            return Loading::automatic();
        }
        if (s == "none") {
            return Loading::none();
        }
    }
    throw ConfigError(f.at(key), "expected \"auto\", \"none\" or a non-negative number");
}

MethodConfig parse_method(const json& node, const std::string& path) {
    Fields       f(node, path);
    MethodConfig m;
    const std::string variant = f.text("variant", "");
    if (variant.empty()) {
        throw ConfigError(f.at("variant"), "required");
    }
    if (variant == "jio") {
        m.jio.variant = JioVariant::Jio;
    } else if (variant == "jio_fba") {
        m.jio.variant = JioVariant::JioFba;
    } else if (variant == "jio_rls") {
        m.jio.variant = JioVariant::JioRls;
    } else if (variant == "jio_rls_fba") {
        m.jio.variant = JioVariant::JioRlsFba;
    } else if (variant == "capon") {
        m.kind = MethodKind::Capon;
    } else if (variant == "capon_fba") {
        m.kind = MethodKind::CaponFba;
    } else if (variant == "music") {
        m.kind = MethodKind::Music;
    } else {
        throw ConfigError(f.at("variant"), "unknown variant '" + variant + "'");
    }
    m.id = f.text("id", variant);

    const double forgetting = f.number("forgetting", 0.998);
    m.forgetting            = forgetting;
    m.jio.forgetting        = forgetting;
    m.loading               = parse_loading(f, "loading", Loading::automatic());
    m.jio.loading           = m.loading;
    m.jio.reduced_loading   = parse_loading(f, "reduced_loading", m.loading);
    m.jio.rank              = f.integer("rank", 4);
    const std::vector<double> range = f.numbers("rank_range");
    if (!range.empty()) {
        if (range.size() != 2 || range[0] != std::floor(range[0]) || range[1] != std::floor(range[1])) {
            throw ConfigError(f.at("rank_range"), "expected [r_min, r_max]");
        }
        m.jio.adaptive_rank = RankRange{static_cast<int>(range[0]), static_cast<int>(range[1])};
    }
    if (const json* w = f.find("rank_weight")) {
        if (!w->is_number()) {
            throw ConfigError(f.at("rank_weight"), "expected a number");
        }
        m.jio.rank_weight = w->get<double>();
    }
    m.jio.delta           = f.number("delta", 1e-3);
    m.jio.delta_bar       = f.number("delta_bar", 1e-3);
    m.jio.initial_full    = f.number("initial_full", 0.0);
    m.jio.initial_reduced = f.number("initial_reduced", 0.0);
    const std::string reduced = f.text("reduced", "recursive");
    if (reduced == "recursive") {
        m.jio.reduced = ReducedCovariance::Recursive;
    } else if (reduced == "projected") {
        m.jio.reduced = ReducedCovariance::Projected;
    } else {
        throw ConfigError(f.at("reduced"), "expected \"recursive\" or \"projected\"");
    }
    m.jio.persist_across_angles = f.boolean("persist_across_angles", false);

    if (const json* q = f.find("assumed_sources")) {
        if (!q->is_number_integer()) {
            throw ConfigError(f.at("assumed_sources"), "expected an integer");
        }
        m.assumed_sources = q->get<int>();
    }
    const std::string search = f.text("search", "grid");
    if (search == "grid") {
        m.search = SearchMode::Grid;
    } else if (search == "rooted") {
        m.search = SearchMode::Rooted;
    } else {
        throw ConfigError(f.at("search"), "expected \"grid\" or \"rooted\"");
    }
    m.coarse_step = f.number("coarse_step", 1.0);
    f.finish();
    return m;
}

} // namespace

void ExperimentConfig::validate() const {
    try {
        geometry.validate();
    } catch (const std::exception& e) {
        throw ConfigError("geometry", e.what());
    }
    try {
        scenario.validate(geometry);
    } catch (const std::exception& e) {
        throw ConfigError("scenario", e.what());
    }
    if (trials < 1) {
        throw ConfigError("trials", "must be at least 1");
    }
    try {
        ScanGrid grid(grid_step);
    } catch (const std::exception& e) {
        throw ConfigError("grid_step", e.what());
    }
    if (values.empty()) {
        throw ConfigError("sweep.values", "at least one value is required");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        const std::string where = "sweep.values[" + std::to_string(k) + "]";
        if (!std::isfinite(values[k])) {
            throw ConfigError(where, "must be finite");
        }
        if (axis == SweepAxis::AssumedSources &&
            (values[k] != std::floor(values[k]) || values[k] < 1 || values[k] >= geometry.num_sensors)) {
            throw ConfigError(where, "assumed source count must be an integer in [1, M - 1]");
        }
    }
    if (methods.empty()) {
        throw ConfigError("methods", "at least one method is required");
    }
    std::set<std::string> ids;
    for (std::size_t k = 0; k < methods.size(); ++k) {
        const MethodConfig& m     = methods[k];
        const std::string   where = "methods[" + std::to_string(k) + "]";
        if (!ids.insert(m.id).second) {
            throw ConfigError(where + ".id", "duplicate method id '" + m.id + "'");
        }
        if (m.kind == MethodKind::Jio) {
            try {
                m.jio.validate(geometry.num_sensors);
            } catch (const std::exception& e) {
                throw ConfigError(where, e.what());
            }
            if (m.search == SearchMode::Rooted) {
                try {
                    ScanGrid coarse(m.coarse_step);
                } catch (const std::exception& e) {
                    throw ConfigError(where + ".coarse_step", e.what());
                }
                if (m.coarse_step < grid_step) {
                    throw ConfigError(where + ".coarse_step", "must not be finer than grid_step");
                }
            }
        } else {
            if (!(m.forgetting > 0.0 && m.forgetting <= 1.0)) {
                throw ConfigError(where + ".forgetting", "must lie in (0, 1]");
            }
            if (m.search == SearchMode::Rooted) {
                throw ConfigError(where + ".search", "rooted search applies to the JIO family only");
            }
        }
        if (m.assumed_sources && (*m.assumed_sources < 1 || *m.assumed_sources >= geometry.num_sensors)) {
            throw ConfigError(where + ".assumed_sources", "must lie in [1, M - 1]");
        }
    }
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    Fields           top(root, "");
    cfg.name      = top.text("name", cfg.name);
    cfg.trials    = top.integer("trials", cfg.trials);
    cfg.base_seed = top.unsigned64("seed", cfg.base_seed);
    cfg.grid_step = top.number("grid_step", cfg.grid_step);
    const std::string rmse = top.text("rmse", "all");
    if (rmse != "all" && rmse != "resolved") {
        throw ConfigError("rmse", "expected \"all\" or \"resolved\"");
    }
    cfg.rmse_resolved_only = rmse == "resolved";

    if (const json* g = top.find("geometry")) {
        Fields f(*g, "geometry");
        cfg.geometry.num_sensors   = f.integer("sensors", cfg.geometry.num_sensors);
        cfg.geometry.spacing_ratio = f.number("spacing_ratio", cfg.geometry.spacing_ratio);
        f.finish();
    }

    if (const json* s = top.find("scenario")) {
        Fields f(*s, "scenario");
        cfg.scenario.num_snapshots = f.integer("snapshots", cfg.scenario.num_snapshots);
        cfg.scenario.source_power  = f.number("source_power", cfg.scenario.source_power);
        cfg.scenario.correlation   = f.number("correlation", cfg.scenario.correlation);
        const std::string mod      = f.text("modulation", "bpsk");
        if (mod == "bpsk") {
            cfg.scenario.modulation = Modulation::Bpsk;
        } else if (mod == "gaussian") {
            cfg.scenario.modulation = Modulation::Gaussian;
        } else {
            throw ConfigError("scenario.modulation", "expected \"bpsk\" or \"gaussian\"");
        }
        cfg.off_grid = f.boolean("off_grid", false);

        std::vector<double> doas       = f.numbers("doas");
        const int           count      = f.integer("num_sources", 2);
        const double        separation = f.number("separation", 3.0);
        const json*         first      = f.find("first_doa");
        if (doas.empty()) {
            if (count < 1) {
                throw ConfigError("scenario.num_sources", "must be positive");
            }
            if (!(separation > 0.0)) {
                throw ConfigError("scenario.separation", "must be positive");
            }
            double start = 90.0 - 0.5 * separation * (count - 1);
            if (first) {
                if (!first->is_number()) {
                    throw ConfigError("scenario.first_doa", "expected a number");
                }
                start = first->get<double>();
            } else {
                start = std::round(start / cfg.grid_step) * cfg.grid_step;
            }
            for (int k = 0; k < count; ++k) {
                doas.push_back(start + separation * k);
            }
        }
        cfg.scenario.doas = doas;
        f.finish();
    } else {
        cfg.scenario.doas = {88.5, 91.5};
    }

    if (const json* w = top.find("sweep")) {
        Fields f(*w, "sweep");
        const std::string axis = f.text("axis", "snr_db");
        if (axis == "snr_db") {
            cfg.axis = SweepAxis::SnrDb;
        } else if (axis == "q_w") {
            cfg.axis = SweepAxis::AssumedSources;
        } else {
            throw ConfigError("sweep.axis", "expected \"snr_db\" or \"q_w\"");
        }
        cfg.values = f.numbers("values");
        cfg.snr_db = f.number("snr_db", cfg.snr_db);
        f.finish();
    } else {
        throw ConfigError("sweep", "required");
    }

    const json* methods = top.find("methods");
    if (!methods || !methods->is_array()) {
        throw ConfigError("methods", "required array");
    }
    for (std::size_t k = 0; k < methods->size(); ++k) {
        cfg.methods.push_back(parse_method((*methods)[k], "methods[" + std::to_string(k) + "]"));
    }
    top.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

} // namespace doa
