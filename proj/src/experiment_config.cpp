#include "ireg/experiment_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ireg/action.hpp"
#include "ireg/error.hpp"
#include "ireg/io.hpp"

namespace ireg {

namespace {

using Setter = std::function<void(ExperimentConfig &, const std::string &key, const std::string &value)>;

[[noreturn]] void bad_value(const std::string &key, const std::string &value, const char *expected) {
    throw ConfigError(key + ": expected " + expected + ", got '" + value + "'");
}

double parse_double(const std::string &key, const std::string &s) {
    if (s == "inf") {
        return INFINITY;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        bad_value(key, s, "a finite number");
    }
    return v;
}

std::uint64_t parse_u64(const std::string &key, const std::string &s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        bad_value(key, s, "a non-negative integer");
    }
    return v;
}

bool parse_bool(const std::string &key, const std::string &s) {
    if (s == "true" || s == "1") {
        return true;
    }
    if (s == "false" || s == "0") {
        return false;
    }
    bad_value(key, s, "true or false");
}

PhantomKind parse_kind(const std::string &key, const std::string &s) {
    try {
        return parse_phantom_kind(s);
    } catch (const ConfigError &) {
        bad_value(key, s, "a phantom kind");
    }
}

// "section.key" -> setter
const std::map<std::string, Setter> &setters() {
    static const std::map<std::string, Setter> table = {
        {"phantom.template", [](auto &c, auto &k, auto &v) { c.template_kind = parse_kind(k, v); }},
        {"phantom.target", [](auto &c, auto &k, auto &v) { c.target_kind = parse_kind(k, v); }},
        {"input.template", [](auto &c, auto &, auto &v) { c.template_path = v; }},
        {"input.target", [](auto &c, auto &, auto &v) { c.target_path = v; }},
        {"input.data", [](auto &c, auto &, auto &v) { c.data_path = v; }},
        {"grid.n", [](auto &c, auto &k, auto &v) { c.n = parse_u64(k, v); }},
        {"grid.half_extent", [](auto &c, auto &k, auto &v) { c.half_extent = parse_double(k, v); }},
        {"geometry.n_angles", [](auto &c, auto &k, auto &v) { c.n_angles = parse_u64(k, v); }},
        {"geometry.n_detectors", [](auto &c, auto &k, auto &v) { c.n_detectors = parse_u64(k, v); }},
        {"noise.snr_db", [](auto &c, auto &k, auto &v) { c.snr_db = parse_double(k, v); }},
        {"noise.seed", [](auto &c, auto &k, auto &v) { c.noise_seed = parse_u64(k, v); }},
        {"registration.gamma", [](auto &c, auto &k, auto &v) { c.registration.gamma = parse_double(k, v); }},
        {"registration.sigma", [](auto &c, auto &k, auto &v) { c.registration.sigma = parse_double(k, v); }},
        {"registration.alpha", [](auto &c, auto &k, auto &v) { c.registration.alpha = parse_double(k, v); }},
        {"registration.n_steps", [](auto &c, auto &k, auto &v) { c.registration.n_steps = parse_u64(k, v); }},
        {"registration.max_iters", [](auto &c, auto &k, auto &v) { c.registration.max_iters = parse_u64(k, v); }},
        {"registration.grad_tol", [](auto &c, auto &k, auto &v) { c.registration.grad_tol = parse_double(k, v); }},
        {"registration.action",
         [](auto &c, auto &k, auto &v) {
             try {
                 c.registration.action = parse_group_action(v);
             } catch (const ConfigError &) {
                 bad_value(k, v, "geometric or mass-preserving");
             }
         }},
        {"registration.backtracking",
         [](auto &c, auto &k, auto &v) { c.registration.backtracking = parse_bool(k, v); }},
        {"baselines.fbp_freq_scaling", [](auto &c, auto &k, auto &v) { c.fbp_freq_scaling = parse_double(k, v); }},
        {"baselines.tv_mu", [](auto &c, auto &k, auto &v) { c.tv_mu = parse_double(k, v); }},
        {"baselines.tv_iters", [](auto &c, auto &k, auto &v) { c.tv_iters = parse_u64(k, v); }},
        {"output.dir", [](auto &c, auto &, auto &v) { c.output_dir = v; }},
    };
    return table;
}

void validate(const ExperimentConfig &c) {
    if (c.n < 4) {
        throw ConfigError("grid.n must be at least 4");
    }
    if (!(c.half_extent > 0.0)) {
        throw ConfigError("grid.half_extent must be > 0");
    }
    if (c.n_angles < 1) {
        throw ConfigError("geometry.n_angles must be at least 1");
    }
    if (c.n_detectors < 3) {
        throw ConfigError("geometry.n_detectors must be at least 3");
    }
    if (std::isnan(c.snr_db)) {
        throw ConfigError("noise.snr_db must be a number or inf");
    }
    if (!(c.fbp_freq_scaling > 0.0 && c.fbp_freq_scaling <= 1.0)) {
        throw ConfigError("baselines.fbp_freq_scaling must lie in (0, 1]");
    }
    if (!(c.tv_mu > 0.0)) {
        throw ConfigError("baselines.tv_mu must be > 0");
    }
    if (c.tv_iters < 1) {
        throw ConfigError("baselines.tv_iters must be at least 1");
    }
    if (c.output_dir.empty()) {
        throw ConfigError("output.dir must not be empty");
    }
    c.registration.validate();
}

} // namespace

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream out;
    auto line = [&](const char *key, const std::string &value) { out << key << '=' << value << '\n'; };
    auto num = [](double v) { return io::format_double(v); };
    line("phantom.template", to_string(template_kind));
    line("phantom.target", to_string(target_kind));
    line("input.template", template_path.string());
    line("input.target", target_path.string());
    line("input.data", data_path.string());
    line("grid.n", std::to_string(n));
    line("grid.half_extent", num(half_extent));
    line("geometry.n_angles", std::to_string(n_angles));
    line("geometry.n_detectors", std::to_string(n_detectors));
    line("noise.snr_db", num(snr_db));
    line("noise.seed", std::to_string(noise_seed));
    line("registration.gamma", num(registration.gamma));
    line("registration.sigma", num(registration.sigma));
    line("registration.alpha", num(registration.alpha));
    line("registration.n_steps", std::to_string(registration.n_steps));
    line("registration.max_iters", std::to_string(registration.max_iters));
    line("registration.grad_tol", num(registration.grad_tol));
    line("registration.action", to_string(registration.action));
    line("registration.backtracking", registration.backtracking ? "true" : "false");
    line("baselines.fbp_freq_scaling", num(fbp_freq_scaling));
    line("baselines.tv_mu", num(tv_mu));
    line("baselines.tv_iters", std::to_string(tv_iters));
    line("output.dir", output_dir.string());
    return out.str();
}

ExperimentConfig parse_experiment_config(const std::string &text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error &e) {
        throw ConfigError("malformed config (line " + std::to_string(e.line()) + "): " + e.message());
    }
    ExperimentConfig cfg;
    const auto &table = setters();
    for (const auto &[section, entries] : tree) {
        if (entries.empty() && !entries.data().empty()) {
            throw ConfigError("'" + section + "' must be inside a [section]");
        }
        for (const auto &[name, node] : entries) {
            const std::string key = section + "." + name;
            const auto it = table.find(key);
            if (it == table.end()) {
                throw ConfigError("unknown config key '" + key + "'");
            }
            it->second(cfg, key, node.get_value<std::string>());
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

std::uint64_t fnv1a64(const std::string &bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace ireg
