#include "nyv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nyv/errors.hpp"
#include "nyv/io.hpp"

namespace nyv {

namespace {

struct KeySpec {
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("invalid numeric value for key '" + key + "': " + v);
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw config_error("invalid integer value for key '" + key + "': " + v);
    }
}

const std::map<std::string, KeySpec>& schema() {
    static const std::map<std::string, KeySpec> s = [] {
        std::map<std::string, KeySpec> m;
        auto str = [&m](const std::string& key, std::string ExperimentConfig::*field) {
            m[key] = {[field](const ExperimentConfig& c) { return c.*field; },
                      [field](ExperimentConfig& c, const std::string& v) { c.*field = v; }};
        };
        auto f64 = [&m](const std::string& key, double ExperimentConfig::*field) {
            m[key] = {[field](const ExperimentConfig& c) { return format_double(c.*field); },
                      [key, field](ExperimentConfig& c, const std::string& v) {
                          c.*field = to_double(key, v);
                      }};
        };
        auto u64 = [&m](const std::string& key, std::uint64_t ExperimentConfig::*field) {
            m[key] = {[field](const ExperimentConfig& c) { return std::to_string(c.*field); },
                      [key, field](ExperimentConfig& c, const std::string& v) {
                          c.*field = to_u64(key, v);
                      }};
        };

        str("command", &ExperimentConfig::command);
        u64("grid_n", &ExperimentConfig::grid_n);
        f64("grid_period", &ExperimentConfig::grid_period);
        u64("value_m", &ExperimentConfig::value_m);
        f64("value_xmax", &ExperimentConfig::value_xmax);
        f64("alpha", &ExperimentConfig::alpha);
        f64("hurst", &ExperimentConfig::hurst);
        f64("nu", &ExperimentConfig::nu);
        str("omega_kind", &ExperimentConfig::omega_kind);
        str("xi_kind", &ExperimentConfig::xi_kind);
        f64("xi_scale", &ExperimentConfig::xi_scale);
        str("g_kind", &ExperimentConfig::g_kind);
        f64("g_scale", &ExperimentConfig::g_scale);
        str("b_kind", &ExperimentConfig::b_kind);
        f64("b_scale", &ExperimentConfig::b_scale);
        f64("beta", &ExperimentConfig::beta);
        f64("vartheta", &ExperimentConfig::vartheta);
        f64("gamma", &ExperimentConfig::gamma);
        f64("kappa", &ExperimentConfig::kappa);
        f64("sigma", &ExperimentConfig::sigma);
        str("weight_kind", &ExperimentConfig::weight_kind);
        f64("weight_lambda", &ExperimentConfig::weight_lambda);
        f64("horizon_t", &ExperimentConfig::horizon_t);
        u64("out_times", &ExperimentConfig::out_times);
        u64("fine_per_out", &ExperimentConfig::fine_per_out);
        u64("path_refine", &ExperimentConfig::path_refine);
        u64("seed", &ExperimentConfig::seed);
        u64("samples", &ExperimentConfig::samples);
        f64("picard_tol", &ExperimentConfig::picard_tol);
        u64("picard_kmax", &ExperimentConfig::picard_kmax);
        f64("safety", &ExperimentConfig::safety);
        u64("tau_min_exp", &ExperimentConfig::tau_min_exp);
        f64("sewing_tol", &ExperimentConfig::sewing_tol);
        u64("sewing_nmax", &ExperimentConfig::sewing_nmax);
        f64("reg_kappa_eval", &ExperimentConfig::reg_kappa_eval);
        u64("tail_j", &ExperimentConfig::tail_j);
        f64("tail_s", &ExperimentConfig::tail_s);
        f64("tail_t", &ExperimentConfig::tail_t);
        u64("tail_nsamples", &ExperimentConfig::tail_nsamples);
        u64("tail_npath", &ExperimentConfig::tail_npath);
        str("mollifier_widths_dx", &ExperimentConfig::mollifier_widths_dx);
        return m;
    }();
    return s;
}

bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_choice(const std::string& key, const std::string& v,
                  std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (v == a) return;
    std::ostringstream msg;
    msg << "invalid value '" << v << "' for key '" << key << "' (allowed:";
    for (const char* a : allowed) msg << " " << a;
    msg << ")";
    throw config_error(msg.str());
}

}  // namespace

void ExperimentConfig::validate() const {
    check_choice("command", command,
                 {"simulate", "regularity", "tails", "convergence", "stability", "verify-ops"});
    if (grid_n < 8 || !is_pow2(grid_n)) throw config_error("grid_n must be a power of two >= 8");
    if (value_m < 64 || !is_pow2(value_m)) throw config_error("value_m must be a power of two >= 64");
    if (!(grid_period > 0.0)) throw config_error("grid_period must be positive");
    if (!(value_xmax > 0.0)) throw config_error("value_xmax must be positive");
    if (!(alpha > 0.0) || alpha > 2.0) throw config_error("alpha must lie in (0, 2]");
    if (!(hurst > 0.0 && hurst < 1.0)) throw config_error("hurst must lie in (0, 1)");
    if (!(nu >= 0.0 && nu <= 1.0)) throw config_error("nu must lie in [0, 1]");
    check_choice("omega_kind", omega_kind, {"lfsm", "zero"});
    check_choice("xi_kind", xi_kind, {"white", "smooth", "one"});
    check_choice("g_kind", g_kind, {"sin", "weierstrass", "smooth_step", "one", "zero"});
    check_choice("b_kind", b_kind, {"none", "sin", "smooth_step", "one"});
    check_choice("weight_kind", weight_kind, {"constant", "polynomial"});
    if (!(horizon_t > 0.0)) throw config_error("horizon_t must be positive");
    if (out_times == 0) throw config_error("out_times must be positive");
    if (fine_per_out == 0) throw config_error("fine_per_out must be positive");
    if (path_refine < 4) throw config_error("path_refine must be >= 4");
    if (command == "simulate" || command == "stability" || command == "convergence") {
        // cross-field constraints of the solver, with readable messages
        const double rho = 0.5 * (beta + vartheta);
        if (!(vartheta < beta))
            throw config_error("exponents: need vartheta < beta (got vartheta = " +
                               format_double(vartheta) + ", beta = " + format_double(beta) + ")");
        if (!(beta < alpha - vartheta))
            throw config_error("exponents: need beta < alpha - vartheta");
        if (!(gamma > 0.5)) throw config_error("exponents: need gamma > 1/2");
        if (command != "convergence" && !(1.0 - gamma < sigma && sigma < gamma - rho))
            throw config_error("exponents: need 1 - gamma < sigma < gamma - rho (rho = " +
                               format_double(rho) + ")");
        if (command == "convergence" && !(sigma < gamma - rho))
            throw config_error("exponents: need sigma < gamma - rho (rho = " +
                               format_double(rho) + ")");
    }
    if (command == "tails" && tail_nsamples < 2000)
        throw config_error("tail_nsamples must be >= 2000");
    if (!(tail_s >= 0.0 && tail_s < tail_t)) throw config_error("need 0 <= tail_s < tail_t");
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream os;
    for (const auto& [key, spec] : schema()) os << key << " = " << spec.get(*this) << "\n";
    return os.str();
}

std::uint64_t ExperimentConfig::config_hash() const {
    const std::string text = canonical_text();
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

void ExperimentConfig::apply_override(const std::string& key, const std::string& value) {
    const auto& s = schema();
    auto it = s.find(key);
    if (it == s.end()) throw config_error("unknown config key '" + key + "'");
    it->second.set(*this, value);
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        cfg.apply_override(key, value);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw io_error("cannot open config file " + file.string());
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_text(buf.str());
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(csv);
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        out.push_back(to_double("list", item));
    }
    return out;
}

}  // namespace nyv
