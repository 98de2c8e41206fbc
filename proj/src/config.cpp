#include "morselab/config.hpp"

#include "morselab/errors.hpp"
#include "morselab/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace morselab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
        throw InputError("invalid number for " + key + ": '" + v + "'");
    return x;
}

long to_long(const std::string& key, const std::string& v) {
    char* end = nullptr;
    errno = 0;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE) throw InputError("invalid integer for " + key + ": '" + v + "'");
    return x;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
    return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k{"surface",        "n",
                                            "r0",             "s_max",
                                            "N",              "S_sweep",
                                            "l_max_cap",      "spectral_floor",
                                            "identity_tol",   "rank_threshold",
                                            "output_dir",     "cache_dir",
                                            "seed",           "identity_samples"};
    return k;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "surface") surface = v;
    else if (key == "n") n = static_cast<int>(to_long(key, v));
    else if (key == "r0") r0 = to_double(key, v);
    else if (key == "s_max") s_max = to_double(key, v);
    else if (key == "N") N = to_long(key, v);
    else if (key == "S_sweep") {
        S_sweep.clear();
        std::istringstream is(v);
        for (std::string item; std::getline(is, item, ',');) S_sweep.push_back(to_double(key, trim(item)));
    } else if (key == "l_max_cap") l_max_cap = static_cast<int>(to_long(key, v));
    else if (key == "spectral_floor") spectral_floor = to_double(key, v);
    else if (key == "identity_tol") identity_tol = to_double(key, v);
    else if (key == "rank_threshold") rank_threshold = to_double(key, v);
    else if (key == "output_dir") output_dir = v;
    else if (key == "cache_dir") cache_dir = v;
    else if (key == "seed") seed = to_long(key, v);
    else if (key == "identity_samples") identity_samples = static_cast<int>(to_long(key, v));
    else throw InputError("unknown configuration key '" + key + "'");
}

std::string RunConfig::get(const std::string& key) const {
    if (key == "surface") return surface;
    if (key == "n") return std::to_string(n);
    if (key == "r0") return format_double(r0);
    if (key == "s_max") return format_double(s_max);
    if (key == "N") return std::to_string(N);
    if (key == "S_sweep") return join(S_sweep);
    if (key == "l_max_cap") return std::to_string(l_max_cap);
    if (key == "spectral_floor") return format_double(spectral_floor);
    if (key == "identity_tol") return format_double(identity_tol);
    if (key == "rank_threshold") return format_double(rank_threshold);
    if (key == "output_dir") return output_dir;
    if (key == "cache_dir") return cache_dir;
    if (key == "seed") return std::to_string(seed);
    if (key == "identity_samples") return std::to_string(identity_samples);
    throw InputError("unknown configuration key '" + key + "'");
}

void RunConfig::validate() const {
    if (surface != "catenoid" && surface != "plane") throw InputError("surface must be catenoid or plane");
    if (n < 3 || n > 7) throw InputError("n must lie in [3, 7]");
    if (!(r0 > 0)) throw InputError("r0 must be positive");
    if (!(s_max > 0)) throw InputError("s_max must be positive");
    if (N < 2) throw InputError("N must be at least 2");
    if (S_sweep.empty()) throw InputError("S_sweep must not be empty");
    for (std::size_t i = 0; i < S_sweep.size(); ++i) {
        if (!(S_sweep[i] > 0)) throw InputError("S_sweep entries must be positive");
        if (i && !(S_sweep[i] > S_sweep[i - 1])) throw InputError("S_sweep must be strictly increasing");
    }
    if (S_sweep.back() > s_max) throw InputError("S_sweep exceeds s_max");
    if (l_max_cap < 1) throw InputError("l_max_cap must be positive");
    if (!(spectral_floor > 0)) throw InputError("spectral_floor must be positive");
    if (!(identity_tol > 0)) throw InputError("identity_tol must be positive");
    if (!(rank_threshold > 0)) throw InputError("rank_threshold must be positive");
    if (output_dir.empty()) throw InputError("output_dir must not be empty");
    if (seed < 0) throw InputError("seed must be nonnegative");
    if (identity_samples < 1) throw InputError("identity_samples must be positive");
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& k : keys()) out += k + "=" + get(k) + "\n";
    return out;
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig c;
    std::istringstream is(text);
    int lineno = 0;
    for (std::string line; std::getline(is, line);) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw InputError("line " + std::to_string(lineno) + ": expected key=value");
        c.set(trim(t.substr(0, eq)), t.substr(eq + 1));
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

bool operator==(const RunConfig& a, const RunConfig& b) { return a.to_text() == b.to_text(); }

}  // namespace morselab
