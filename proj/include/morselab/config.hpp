#pragma once

// Run configuration: a file of key=value lines, overridable key by key.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace morselab {

struct RunConfig {
    std::string surface = "catenoid";  // catenoid | plane
    int n = 4;
    double r0 = 1.0;
    double s_max = 80.0;
    long N = 80000;  // cells per side of the neck (catenoid) or on [0, s_max] (plane)
    std::vector<double> S_sweep{20.0, 40.0, 80.0};
    int l_max_cap = 12;
    double spectral_floor = 1e-10;  // lower clamp of ε_spec
    double identity_tol = 1e4;      // C in the bound sup residual <= C h²
    double rank_threshold = 1e-8;
    std::string output_dir = "out";
    std::string cache_dir;  // empty: no cache
    long seed = 42;
    int identity_samples = 100;

    /// Keys in serialization order.
    static const std::vector<std::string>& keys();

    /// Assigns one key; InputError on an unknown key or a malformed value.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

    /// InputError naming the first violated constraint.
    void validate() const;

    /// key=value lines in `keys()` order; parse(to_text()) reproduces the config.
    std::string to_text() const;
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);
};

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace morselab
