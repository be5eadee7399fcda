#include "osa/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace osa {

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
    throw Error(ErrorCode::ConfigError, msg);
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        else if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool parse_number(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(tok.c_str(), &end);
    return errno == 0 && end == tok.c_str() + tok.size();
}

} // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                config_fail(origin + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty())
                config_fail(origin + ":" + std::to_string(lineno) + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            config_fail(origin + ":" + std::to_string(lineno) + ": expected key = value, got '" +
                        body + "'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty())
            config_fail(origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (section.empty())
            config_fail(origin + ":" + std::to_string(lineno) + ": key '" + key +
                        "' outside any [section]");
        if (!cfg.sections_[section].emplace(key, value).second)
            config_fail(origin + ":" + std::to_string(lineno) + ": duplicate key '" + section +
                        "." + key + "'");
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_fail("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::vector<std::string> ConfigFile::keys(const std::string& section) const {
    std::vector<std::string> out;
    const auto s = sections_.find(section);
    if (s != sections_.end())
        for (const auto& [k, v] : s->second) out.push_back(k);
    return out;
}

const std::string& ConfigFile::raw(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) fail(section, key, "section missing");
    const auto k = s->second.find(key);
    if (k == s->second.end()) fail(section, key, "key missing");
    return k->second;
}

void ConfigFile::fail(const std::string& section, const std::string& key,
                      const std::string& why) const {
    config_fail(origin_ + ": [" + section + "] " + key + ": " + why);
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    double v;
    if (!parse_number(raw(section, key), v)) fail(section, key, "not a number");
    return v;
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key) const {
    const std::string& tok = raw(section, key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (errno != 0 || end != tok.c_str() + tok.size() || tok.front() == '-')
        fail(section, key, "not an unsigned integer");
    return v;
}

long long ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const std::string& tok = raw(section, key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (errno != 0 || end != tok.c_str() + tok.size()) fail(section, key, "not an integer");
    return v;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key) const {
    const std::string& tok = raw(section, key);
    if (tok == "true") return true;
    if (tok == "false") return false;
    fail(section, key, "not a boolean (true/false)");
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    const std::string& tok = raw(section, key);
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return tok.substr(1, tok.size() - 2);
    return tok;
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key) const {
    std::string tok = raw(section, key);
    if (tok.size() >= 2 && tok.front() == '[' && tok.back() == ']')
        tok = tok.substr(1, tok.size() - 2);
    std::vector<double> out;
    std::istringstream in(tok);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        double v;
        if (!parse_number(item, v)) fail(section, key, "element '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) fail(section, key, "empty list");
    return out;
}

std::vector<double> parse_snr_spec(const std::string& spec) {
    const std::string s = trim(spec);
    const std::size_t dots = s.find("..");
    if (dots != std::string::npos) {
        const std::size_t step_at = s.find("step", dots);
        if (step_at == std::string::npos)
            config_fail("--snr range '" + s + "' needs 'a..b step s'");
        double lo, hi, step;
        if (!parse_number(trim(s.substr(0, dots)), lo) ||
            !parse_number(trim(s.substr(dots + 2, step_at - dots - 2)), hi) ||
            !parse_number(trim(s.substr(step_at + 4)), step))
            config_fail("--snr range '" + s + "' is malformed");
        if (!(step > 0.0) || hi < lo) config_fail("--snr range '" + s + "' needs lo <= hi, step > 0");
        std::vector<double> out;
        // i-based stepping avoids accumulating rounding in lo + step + ...
        for (int i = 0;; ++i) {
            const double v = lo + step * i;
            if (v > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
            out.push_back(v);
        }
        return out;
    }
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        double v;
        if (!parse_number(item, v)) config_fail("--snr element '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) config_fail("--snr list is empty");
    return out;
}

std::vector<double> ExperimentConfig::snr_list() const {
    if (!sweep.snr_db.empty()) return sweep.snr_db;
    return {0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0};
}

DiscreteSystem ExperimentConfig::system_for_a(double a) const {
    if (!has_continuous)
        config_fail("[sweep] a-values require the continuous [system] form (a, b, c, tau)");
    ContinuousSystem cs = continuous;
    cs.a = a;
    return discretize(cs);
}

ExperimentConfig default_experiment() { return ExperimentConfig{}; }

ExperimentConfig load_experiment(const ConfigFile& file) {
    ExperimentConfig cfg;

    const bool cont = file.has("system", "a") || file.has("system", "b") ||
                      file.has("system", "tau");
    const bool disc = file.has("system", "q") || file.has("system", "w");
    if (cont && disc)
        config_fail("[system]: give either the continuous form (a, b, c, tau) or the "
                    "discrete form (q, w, c), not both");

    if (disc) {
        cfg.has_continuous = false;
        cfg.system.q = file.get_double("system", "q");
        cfg.system.w = file.get_double("system", "w");
        cfg.system.c = file.has("system", "c") ? file.get_double("system", "c") : 1.0;
    } else {
        if (file.has("system", "a")) cfg.continuous.a = file.get_double("system", "a");
        if (file.has("system", "b")) cfg.continuous.b = file.get_double("system", "b");
        if (file.has("system", "c")) cfg.continuous.c = file.get_double("system", "c");
        if (file.has("system", "tau")) cfg.continuous.tau = file.get_double("system", "tau");
        cfg.system = discretize(cfg.continuous);
    }

    if (file.has("system", "sigma") && file.has("system", "snr_db"))
        config_fail("[system]: sigma and snr_db are mutually exclusive");
    if (file.has("system", "sigma")) {
        cfg.system = with_sigma(cfg.system, file.get_double("system", "sigma"));
        cfg.sigma_given = true;
    } else if (file.has("system", "snr_db")) {
        cfg.system = with_snr_db(cfg.system, file.get_double("system", "snr_db"));
        cfg.sigma_given = true;
    }
    cfg.continuous.sigma = cfg.system.sigma;
    cfg.system.validate();

    if (file.has("run", "runs")) cfg.run.num_runs = file.get_u64("run", "runs");
    if (file.has("run", "bits")) cfg.run.num_bits = file.get_u64("run", "bits");
    if (file.has("run", "seed")) cfg.run.seed = file.get_u64("run", "seed");
    if (file.has("run", "x0")) cfg.run.x0 = file.get_double("run", "x0");
    if (file.has("run", "xhat0")) cfg.run.xhat0 = file.get_double("run", "xhat0");
    if (file.has("run", "threads"))
        cfg.run.num_threads = static_cast<unsigned>(file.get_u64("run", "threads"));
    cfg.run.validate();

    if (file.has("grid", "n")) {
        const long long n = file.get_int("grid", "n");
        if (n < 3 || n > 100'000'000) config_fail("[grid] n: out of range");
        cfg.grid.n = static_cast<int>(n);
    }
    if (file.has("grid", "tol")) cfg.grid.tol = file.get_double("grid", "tol");
    if (file.has("grid", "max_iter")) cfg.grid.max_iter = file.get_u64("grid", "max_iter");
    if (!(cfg.grid.tol > 0.0)) config_fail("[grid] tol: must be > 0");

    if (file.has("sweep", "snr")) {
        // Accept either an array of values or a range string.
        try {
            cfg.sweep.snr_db = file.get_double_list("sweep", "snr");
        } catch (const Error&) {
            cfg.sweep.snr_db = parse_snr_spec(file.get_string("sweep", "snr"));
        }
    }
    if (file.has("sweep", "a")) cfg.sweep.a_values = file.get_double_list("sweep", "a");

    return cfg;
}

} // namespace osa
