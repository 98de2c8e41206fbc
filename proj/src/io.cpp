#include "morselab/io.hpp"

#include "morselab/errors.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace morselab {

namespace fs = std::filesystem;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename to " + path.string() + ": " + ec.message());
    }
}

namespace {

void dump(const nlohmann::json& j, std::ostringstream& os, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
                if (!first) os << ",\n";
                first = false;
                os << pad << nlohmann::json(it.key()).dump() << ": ";
                dump(it.value(), os, depth + 1);
            }
            os << "\n" << close << "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                dump(j[i], os, depth + 1);
            }
            os << "\n" << close << "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double x = j.get<double>();
            os << (std::isfinite(x) ? format_double(x) : "null");
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
    std::ostringstream os;
    dump(j, os, 0);
    os << "\n";
    return os.str();
}

std::string profile_csv(const ProfileGrid& grid) {
    std::string out = "s,r,z,rp,zp\n";
    out.reserve(static_cast<std::size_t>(grid.size()) * 110);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        out += format_double(grid.s(k));
        for (double v : {grid.r(k), grid.z(k), grid.rp(k), grid.zp(k)}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string profile_metadata(const ProfileGrid& grid) {
    std::ostringstream os;
    os << "n=" << grid.n << "\n"
       << "r0=" << format_double(grid.r0) << "\n"
       << "h=" << format_double(grid.h) << "\n"
       << "s_max=" << format_double(grid.s_max) << "\n"
       << "kind=" << to_string(grid.kind) << "\n"
       << "format_version=1\n";
    return os.str();
}

void write_profile(const ProfileGrid& grid, const fs::path& csv, const fs::path& meta) {
    atomic_write(csv, profile_csv(grid));
    atomic_write(meta, profile_metadata(grid));
}

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double parse_number(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0') throw InputError("malformed number for " + what + ": '" + text + "'");
    return v;
}

}  // namespace

ProfileGrid read_profile(const fs::path& csv, const fs::path& meta) {
    std::map<std::string, std::string> kv;
    std::istringstream ms(slurp(meta));
    for (std::string line; std::getline(ms, line);) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("malformed metadata line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    for (const char* key : {"n", "r0", "h", "s_max", "kind", "format_version"})
        if (!kv.count(key)) throw InputError(std::string("metadata lacks ") + key);
    if (kv["format_version"] != "1") throw InputError("unsupported profile format " + kv["format_version"]);

    ProfileGrid g;
    g.n = static_cast<int>(parse_number(kv["n"], "n"));
    g.r0 = parse_number(kv["r0"], "r0");
    g.h = parse_number(kv["h"], "h");
    g.s_max = parse_number(kv["s_max"], "s_max");
    try {
        g.kind = surface_kind_from_string(kv["kind"]);
    } catch (const std::exception&) {
        throw InputError("unknown surface kind " + kv["kind"]);
    }

    std::istringstream cs(slurp(csv));
    std::string line;
    if (!std::getline(cs, line) || line != "s,r,z,rp,zp") throw InputError("profile CSV header mismatch");
    std::vector<std::array<double, 5>> rows;
    while (std::getline(cs, line)) {
        if (line.empty()) continue;
        std::array<double, 5> row{};
        std::size_t pos = 0;
        for (int c = 0; c < 5; ++c) {
            const auto next = c < 4 ? line.find(',', pos) : line.size();
            if (next == std::string::npos) throw InputError("short profile row: " + line);
            row[c] = parse_number(line.substr(pos, next - pos), "profile entry");
            pos = next + 1;
        }
        rows.push_back(row);
    }
    const auto N = static_cast<Eigen::Index>(rows.size());
    g.s.resize(N), g.r.resize(N), g.z.resize(N), g.rp.resize(N), g.zp.resize(N);
    for (Eigen::Index k = 0; k < N; ++k) {
        g.s(k) = rows[k][0], g.r(k) = rows[k][1], g.z(k) = rows[k][2], g.rp(k) = rows[k][3], g.zp(k) = rows[k][4];
    }
    try {
        check_invariants(g);
    } catch (const ConsistencyError& e) {
        throw InputError(std::string("profile file is inconsistent: ") + e.what());
    }
    return g;
}

fs::path ProfileCache::entry(SurfaceKind kind, int n, double r0, double s_max, Eigen::Index N) const {
    std::ostringstream os;
    os << to_string(kind) << "_n" << n << "_r" << format_double(r0) << "_s" << format_double(s_max) << "_N" << N;
    return dir_ / os.str();
}

ProfileGrid ProfileCache::fetch(SurfaceKind kind, int n, double r0, double s_max, Eigen::Index N) const {
    auto compute = [&] { return kind == SurfaceKind::plane ? make_plane(n, s_max, N) : solve_profile(n, r0, s_max, N); };
    if (!enabled()) return compute();
    const fs::path base = entry(kind, n, r0, s_max, N);
    fs::path csv = base, meta = base;
    csv += ".csv";
    meta += ".meta";
    if (fs::exists(csv) && fs::exists(meta)) {
        try {
            return read_profile(csv, meta);
        } catch (const InputError&) {
            // recompute below
        }
    }
    ProfileGrid g = compute();
    write_profile(g, csv, meta);
    return g;
}

ProfileGrid ProfileCache::catenoid(int n, double r0, double s_max, Eigen::Index N) const {
    return fetch(SurfaceKind::catenoid, n, r0, s_max, N);
}

ProfileGrid ProfileCache::plane(int n, double s_max, Eigen::Index N) const {
    return fetch(SurfaceKind::plane, n, 0.0, s_max, N);
}

}  // namespace morselab
