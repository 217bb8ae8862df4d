#include "issfa/bench/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace issfa::bench {

std::size_t SimConfig::dimension() const {
    std::size_t v = 1;
    for (std::size_t n : grid) {
        v *= n;
    }
    return v;
}

void SimConfig::validate() const {
    if (grid.empty() || grid.size() > 3) {
        throw std::invalid_argument("sim.grid: expected 1 to 3 axes");
    }
    for (std::size_t n : grid) {
        if (n == 0) {
            throw std::invalid_argument("sim.grid: axis sizes must be at least 1");
        }
    }
    if (observations == 0) {
        throw std::invalid_argument("sim.observations: must be at least 1");
    }
    if (features == 0) {
        throw std::invalid_argument("sim.features: must be at least 1");
    }
    if (!(activation_prob > 0.0 && activation_prob <= 1.0)) {
        throw std::invalid_argument("sim.activation_prob: must lie in (0, 1]");
    }
    if (!(theta1 > 0.0)) {
        throw std::invalid_argument("sim.theta1: must be positive");
    }
    if (!(theta2 > 0.0)) {
        throw std::invalid_argument("sim.theta2: must be positive");
    }
    if (!(weight_mean_min <= weight_mean_max)) {
        throw std::invalid_argument("sim.weight_mean_min: exceeds weight_mean_max");
    }
    if (!(weight_var_min >= 0.0 && weight_var_min <= weight_var_max)) {
        throw std::invalid_argument("sim.weight_var_min: must satisfy 0 <= weight_var_min <= weight_var_max");
    }
    if (!(noise_variance >= 0.0)) {
        throw std::invalid_argument("sim.noise_variance: must be nonnegative");
    }
}

void RunConfig::validate() const {
    if (thin == 0) {
        throw std::invalid_argument("sampler.thin: must be at least 1");
    }
    if (residual_refresh == 0) {
        throw std::invalid_argument("sampler.residual_refresh: must be at least 1");
    }
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
        throw std::invalid_argument("sampler.burn_in_fraction: must lie in [0, 1)");
    }
    if (init.clusters == 0) {
        throw std::invalid_argument("sampler.init_clusters: must be at least 1");
    }
}

std::vector<std::size_t> parse_grid(const std::string& text) {
    std::vector<std::size_t> grid;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('x', start), text.size());
        std::size_t value = 0;
        const char* first = text.data() + start;
        const char* last = text.data() + end;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || first == last) {
            throw std::invalid_argument("malformed grid '" + text + "' (expected e.g. 32x32)");
        }
        grid.push_back(value);
        start = end + 1;
    }
    return grid;
}

std::string format_grid(const std::vector<std::size_t>& grid) {
    std::string out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out += (i ? "x" : "") + std::to_string(grid[i]);
    }
    return out;
}

namespace {

struct Entry {
    std::string section;
    std::string key;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

double to_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
        throw std::invalid_argument("trailing characters");
    }
    return v;
}

std::uint64_t to_unsigned(const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("not a nonnegative integer");
    }
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
    }
    throw std::invalid_argument("not a boolean");
}

std::string from_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Entry real(const char* section, const char* key, double& field) {
    return {section, key, [&field](const std::string& s) { field = to_double(s); },
            [&field] { return from_double(field); }};
}

template <typename Int>
Entry integer(const char* section, const char* key, Int& field) {
    return {section, key, [&field](const std::string& s) { field = static_cast<Int>(to_unsigned(s)); },
            [&field] { return std::to_string(field); }};
}

Entry boolean(const char* section, const char* key, bool& field) {
    return {section, key, [&field](const std::string& s) { field = to_bool(s); },
            [&field] { return std::string(field ? "true" : "false"); }};
}

std::vector<Entry> registry(ExperimentConfig& c) {
    SimConfig& s = c.sim;
    sampler::Hyperparams& p = c.prior;
    RunConfig& r = c.run;
    return {
        {"sim", "grid", [&s](const std::string& v) { s.grid = parse_grid(v); }, [&s] { return format_grid(s.grid); }},
        integer("sim", "observations", s.observations),
        integer("sim", "holdout", s.holdout),
        integer("sim", "features", s.features),
        real("sim", "activation_prob", s.activation_prob),
        real("sim", "theta1", s.theta1),
        real("sim", "theta2", s.theta2),
        real("sim", "weight_mean_min", s.weight_mean_min),
        real("sim", "weight_mean_max", s.weight_mean_max),
        real("sim", "weight_var_min", s.weight_var_min),
        real("sim", "weight_var_max", s.weight_var_max),
        real("sim", "noise_variance", s.noise_variance),
        integer("sim", "seed", s.seed),

        real("prior", "noise_shape", p.noise_shape),
        real("prior", "noise_scale", p.noise_scale),
        real("prior", "alpha_shape", p.alpha_shape),
        real("prior", "alpha_rate", p.alpha_rate),
        real("prior", "beta_shape", p.beta_shape),
        real("prior", "beta_rate", p.beta_rate),
        real("prior", "beta_step", p.beta_step),
        real("prior", "nu_shape", p.nu_shape),
        real("prior", "nu_rate", p.nu_rate),
        real("prior", "tau_mean", p.tau_mean),
        real("prior", "tau_precision", p.tau_precision),
        real("prior", "xi1_mean", p.xi_mean[0]),
        real("prior", "xi2_mean", p.xi_mean[1]),
        real("prior", "xi1_precision", p.xi_precision[0]),
        real("prior", "xi2_precision", p.xi_precision[1]),
        {"prior", "max_new_features", [&p](const std::string& v) { p.max_new_features = static_cast<int>(to_unsigned(v)); },
         [&p] { return std::to_string(p.max_new_features); }},
        boolean("prior", "theta_mh", p.theta_mh),

        integer("sampler", "sweeps", r.sweeps),
        integer("sampler", "thin", r.thin),
        integer("sampler", "seed", r.seed),
        integer("sampler", "residual_refresh", r.residual_refresh),
        {"sampler", "init", [&r](const std::string& v) { r.init.method = sampler::parse_init_method(v); },
         [&r] { return sampler::to_string(r.init.method); }},
        integer("sampler", "init_clusters", r.init.clusters),
        integer("sampler", "init_iterations", r.init.kmeans_iterations),
        real("sampler", "init_corr_threshold", r.init.corr_threshold),
        integer("sampler", "heldout_sweeps", r.heldout_sweeps),
        real("sampler", "burn_in_fraction", r.burn_in_fraction),
        integer("sampler", "checkpoint_every", r.checkpoint_every),
        integer("sampler", "svd_rank", r.svd_rank),
        boolean("sampler", "record_wall_time", r.record_wall_time),
        boolean("sampler", "write_samples", r.write_samples),
        boolean("sampler", "write_pgm", r.write_pgm),
    };
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
    }

    ExperimentConfig config;
    std::vector<Entry> entries = registry(config);
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw std::invalid_argument("config: key '" + section + "' must be inside a section");
        }
        bool known_section = false;
        for (const Entry& e : entries) {
            known_section = known_section || e.section == section;
        }
        if (!known_section) {
            throw std::invalid_argument("config: unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            const std::string name = section + "." + key;
            auto it = std::find_if(entries.begin(), entries.end(),
                                   [&](const Entry& e) { return e.section == section && e.key == key; });
            if (it == entries.end()) {
                throw std::invalid_argument("config: unknown key " + name);
            }
            try {
                it->set(value.data());
            } catch (const std::exception& e) {
                throw std::invalid_argument("config: bad value '" + value.data() + "' for " + name + ": " + e.what());
            }
        }
    }
    config.sim.validate();
    config.prior.validate(2);
    config.run.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

std::string format_config(const ExperimentConfig& config) {
    ExperimentConfig copy = config;
    std::ostringstream out;
    std::string section;
    for (const Entry& e : registry(copy)) {
        if (e.section != section) {
            out << (section.empty() ? "" : "\n") << '[' << e.section << "]\n";
            section = e.section;
        }
        out << e.key << " = " << e.get() << '\n';
    }
    return out.str();
}

}  // namespace issfa::bench
