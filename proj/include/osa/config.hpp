#pragma once

#include "osa/chain.hpp"
#include "osa/errors.hpp"
#include "osa/system.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace osa {

// Minimal TOML subset: [section] headers, key = value lines, # comments.
// Values: numbers, quoted strings, booleans, flat arrays of numbers.
// Typed access converts lazily and reports errors as "section.key".
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;
    std::vector<std::string> keys(const std::string& section) const;

    double get_double(const std::string& section, const std::string& key) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key) const;
    long long get_int(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

  private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;

    const std::string& raw(const std::string& section, const std::string& key) const;
    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& why) const;
};

struct GridConfig {
    int n = 4001;
    double tol = 1e-5;
    std::uint64_t max_iter = 20'000'000;
};

struct SweepConfig {
    std::vector<double> snr_db;  // empty = default ladder 0..14 step 2
    std::vector<double> a_values; // empty = single system from [system]
};

// Fully resolved experiment manifest: [system], [run], [grid], [sweep]
// sections plus CLI flag overrides.
struct ExperimentConfig {
    DiscreteSystem system{std::exp(-1.0), 1.0 - std::exp(-1.0), 1.0, 1.0};
    bool has_continuous = true; // a-sweeps need the continuous form
    ContinuousSystem continuous{-1.0, 1.0, 1.0, 1.0, 1.0};
    bool sigma_given = false;  // [system] pinned sigma or snr_db
    RunConfig run;
    GridConfig grid;
    SweepConfig sweep;

    // SNR ladder to use: explicit list or the default 0..14 step 2.
    std::vector<double> snr_list() const;
    // System for a given continuous pole, for a-sweeps.
    DiscreteSystem system_for_a(double a) const;
};

ExperimentConfig load_experiment(const ConfigFile& file);
ExperimentConfig default_experiment();

// "a..b step s", "v1,v2,v3", or a single value.
std::vector<double> parse_snr_spec(const std::string& spec);

} // namespace osa
