#include "spulse/config.hpp"

#include "spulse/errors.hpp"
#include "spulse/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace spulse {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
        throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
    return static_cast<long long>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

FitWindow to_window(const std::string& key, const std::string& text) {
    const auto parts = split_list(text);
    if (parts.size() != 2) throw ConfigError("config key '" + key + "': expected 'lo, hi'");
    const FitWindow w{to_double(key, parts[0]), to_double(key, parts[1])};
    if (!(w.first > 0.0) || !(w.second > w.first))
        throw ConfigError("config key '" + key + "': need 0 < lo < hi");
    return w;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"solver.n", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             const long long n = to_integer(k, v);
             if (n < 2) throw ConfigError("config key '" + k + "': must be a power of two >= 2");
             c.solver.n = static_cast<std::size_t>(n);
         }},
        {"solver.L", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.length = to_double(k, v); }},
        {"solver.dt", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.dt = to_double(k, v); }},
        {"solver.T", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.t_final = to_double(k, v); }},
        {"solver.integrator", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "ifrk4") c.solver.integrator = Integrator::ifrk4;
             else if (v == "etdrk4") c.solver.integrator = Integrator::etdrk4;
             else throw ConfigError("config key '" + k + "': expected ifrk4 or etdrk4, got '" + v + "'");
         }},
        {"solver.dealias", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "pad2x") c.solver.dealias = Dealias::pad2x;
             else if (v == "two_thirds") c.solver.dealias = Dealias::two_thirds;
             else throw ConfigError("config key '" + k + "': expected pad2x or two_thirds, got '" + v + "'");
         }},
        {"solver.h1_check", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.h1_check = to_bool(k, v); }},
        {"solver.wrap_threshold", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.wrap_threshold = to_double(k, v); }},
        {"initial.kind", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "gaussian_derivative") c.initial.kind = InitialKind::gaussian_derivative;
             else if (v == "file") c.initial.kind = InitialKind::file;
             else throw ConfigError("config key '" + k + "': expected gaussian_derivative or file, got '" + v + "'");
         }},
        {"initial.epsilon", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.initial.epsilon = to_double(k, v); }},
        {"initial.width", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.initial.width = to_double(k, v); }},
        {"initial.path", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.initial.path = v; }},
        {"norms.s", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.solver.sobolev_s = to_double(k, v); }},
        {"decomposition.delta", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.delta = to_double(k, v); }},
        {"decomposition.monitors", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.decay_monitors = to_bool(k, v); }},
        {"probe.delta_p", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.probe.delta_p = to_double(k, v); }},
        {"probe.alpha", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.probe.alpha = to_double(k, v); }},
        {"probe.velocities", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.probe.velocities.clear();
             for (const auto& item : split_list(v)) c.probe.velocities.push_back(to_double(k, item));
         }},
        {"probe.cadence_ratio", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.probe.cadence_ratio = to_double(k, v); }},
        {"probe.pairing", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "positive") c.probe.pairing = Pairing::positive;
             else if (v == "full") c.probe.pairing = Pairing::full;
             else throw ConfigError("config key '" + k + "': expected positive or full, got '" + v + "'");
         }},
        {"probe.phase_reference", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "linear") c.phase_reference = PhaseReference::linear;
             else if (v == "none") c.phase_reference = PhaseReference::none;
             else throw ConfigError("config key '" + k + "': expected linear or none, got '" + v + "'");
         }},
        {"fit.linf_window", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.fits.linf = to_window(k, v); }},
        {"fit.xs_window", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.fits.xs = to_window(k, v); }},
        {"fit.ode_window", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.fits.ode = to_window(k, v); }},
        {"fit.ode_velocities", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.fits.ode_velocities.clear();
             for (const auto& item : split_list(v)) c.fits.ode_velocities.push_back(to_double(k, item));
         }},
        {"fit.profile_window", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.fits.profile = to_window(k, v); }},
        {"appendix.rho", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.appendix.rho = to_double(k, v); }},
        {"appendix.N_min", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.appendix.N_min = to_double(k, v); }},
        {"appendix.N_max", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.appendix.N_max = to_double(k, v); }},
        {"appendix.quad_points", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.appendix.quad_points = static_cast<int>(to_integer(k, v));
         }},
        {"output.dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output.dir = v; }},
        {"output.formats", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.output.formats = split_list(v);
             for (const auto& f : c.output.formats)
                 if (f != "csv" && f != "json") throw ConfigError("config key '" + k + "': unknown format '" + f + "'");
         }},
        {"output.snapshots", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.output.snapshots = to_bool(k, v); }},
    };
    return table;
}

} // namespace

void ExperimentConfig::validate() const {
    try {
        solver.validate();
        probe.validate(solver.sobolev_s);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (!(initial.epsilon >= 0.0)) throw ConfigError("initial.epsilon must be >= 0");
    if (!(initial.width > 0.0)) throw ConfigError("initial.width must be positive");
    if (initial.kind == InitialKind::file && initial.path.empty())
        throw ConfigError("initial.path is required when initial.kind = file");
    if (!(delta > 0.0)) throw ConfigError("decomposition.delta must be positive");
    if (!(appendix.rho > 0.0 && appendix.rho < 0.5)) throw ConfigError("appendix.rho must lie in (0, 1/2)");
    if (!(appendix.N_min >= 1.0) || appendix.N_max < appendix.N_min)
        throw ConfigError("appendix: need 1 <= N_min <= N_max");
    for (double v : fits.ode_velocities) {
        bool probed = false;
        for (double w : probe.velocities) probed = probed || std::abs(v - w) <= 1e-12 * std::abs(w);
        if (!probed) throw ConfigError("fit.ode_velocities: " + std::to_string(v) + " is not in probe.velocities");
    }
    if (appendix.quad_points < 16) throw ConfigError("appendix.quad_points must be >= 16");
}

bool ExperimentConfig::wants(const std::string& format) const {
    for (const auto& f : output.formats)
        if (f == format) return true;
    return false;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    const auto& table = setters();
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"solver", "initial", "norms", "decomposition", "probe", "fit", "appendix", "output"};
            bool ok = false;
            for (const char* k : known) ok = ok || section == k;
            if (!ok) throw ConfigError(where + "unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value, got '" + line + "'");
        if (section.empty()) throw ConfigError(where + "key outside any section");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "'");
        try {
            it->second(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    cfg.solver.cadence_h = std::log2(cfg.probe.cadence_ratio);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

std::string canonical_config(const ExperimentConfig& c) {
    std::ostringstream o;
    const auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
        return s;
    };
    const auto window = [](const FitWindow& w) { return num(w.first) + ", " + num(w.second); };
    o << "[solver]\n"
      << "n = " << c.solver.n << "\n"
      << "L = " << num(c.solver.length) << "\n"
      << "dt = " << num(c.solver.dt) << "\n"
      << "T = " << num(c.solver.t_final) << "\n"
      << "integrator = " << (c.solver.integrator == Integrator::ifrk4 ? "ifrk4" : "etdrk4") << "\n"
      << "dealias = " << (c.solver.dealias == Dealias::pad2x ? "pad2x" : "two_thirds") << "\n"
      << "h1_check = " << (c.solver.h1_check ? "true" : "false") << "\n"
      << "wrap_threshold = " << num(c.solver.wrap_threshold) << "\n"
      << "[initial]\n"
      << "kind = " << (c.initial.kind == InitialKind::gaussian_derivative ? "gaussian_derivative" : "file") << "\n"
      << "epsilon = " << num(c.initial.epsilon) << "\n"
      << "width = " << num(c.initial.width) << "\n";
    if (c.initial.kind == InitialKind::file) o << "path = " << c.initial.path << "\n";
    o << "[norms]\n"
      << "s = " << num(c.solver.sobolev_s) << "\n"
      << "[decomposition]\n"
      << "delta = " << num(c.delta) << "\n"
      << "monitors = " << (c.decay_monitors ? "true" : "false") << "\n"
      << "[probe]\n"
      << "delta_p = " << num(c.probe.delta_p) << "\n"
      << "alpha = " << num(c.probe.alpha) << "\n"
      << "velocities = " << list(c.probe.velocities) << "\n"
      << "cadence_ratio = " << num(c.probe.cadence_ratio) << "\n"
      << "pairing = " << (c.probe.pairing == Pairing::positive ? "positive" : "full") << "\n"
      << "phase_reference = " << (c.phase_reference == PhaseReference::linear ? "linear" : "none") << "\n"
      << "[fit]\n"
      << "linf_window = " << window(c.fits.linf) << "\n"
      << "xs_window = " << window(c.fits.xs) << "\n"
      << "ode_window = " << window(c.fits.ode) << "\n"
      << "profile_window = " << window(c.fits.profile) << "\n"
      << "ode_velocities = " << list(c.fits.ode_velocities) << "\n"
      << "[appendix]\n"
      << "rho = " << num(c.appendix.rho) << "\n"
      << "N_min = " << num(c.appendix.N_min) << "\n"
      << "N_max = " << num(c.appendix.N_max) << "\n"
      << "quad_points = " << c.appendix.quad_points << "\n";
    // Output location is excluded: moving a run does not change what it computes.
    return o.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = canonical_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Field initial_data(const ExperimentConfig& cfg) {
    const Grid g = cfg.solver.grid();
    if (cfg.initial.kind == InitialKind::file) {
        const StoredField f = read_field(cfg.initial.path);
        if (f.values.size() != g.n())
            throw ConfigError("initial.path holds " + std::to_string(f.values.size()) + " samples, solver.n is " +
                              std::to_string(g.n()));
        CVec v(g.n());
        for (std::size_t j = 0; j < g.n(); ++j) v[j] = f.values[j];
        Field u(g, std::move(v), Kind::real);
        require_zero_mean(u, cfg.solver.mean_tol, "initial data");
        return u;
    }
    const double eps = cfg.initial.epsilon;
    const double w = cfg.initial.width;
    return Field::sample(g, [eps, w](double x) {
        const double y = x / w;
        return -2.0 * eps * y / w * std::exp(-y * y);
    }, Kind::real);
}

} // namespace spulse
