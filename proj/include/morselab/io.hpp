#pragma once

// Artifact plumbing: deterministic number formatting, atomic file writes,
// profile CSV + metadata files and the content-keyed profile cache.

#include "morselab/geometry.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace morselab {

/// %.17g; non-finite values become "nan", "inf" or "-inf".
std::string format_double(double x);

/// Writes `path` through a sibling temporary file and a rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// JSON text with sorted keys, two-space indent and doubles at 17 significant
/// digits; non-finite doubles are written as null.
std::string dump_json(const nlohmann::json& j);

/// Header `s,r,z,rp,zp`, one row per sample.
std::string profile_csv(const ProfileGrid& grid);
/// key=value lines: n, r0, h, s_max, kind, format_version=1.
std::string profile_metadata(const ProfileGrid& grid);

void write_profile(const ProfileGrid& grid, const std::filesystem::path& csv, const std::filesystem::path& meta);
/// Throws InputError on a malformed file or an unknown format version.
ProfileGrid read_profile(const std::filesystem::path& csv, const std::filesystem::path& meta);

/// Profiles keyed by (kind, n, r0, s_max, N). An empty directory disables
/// caching. A damaged entry is recomputed and overwritten.
class ProfileCache {
public:
    explicit ProfileCache(std::filesystem::path dir = {}) : dir_(std::move(dir)) {}

    ProfileGrid catenoid(int n, double r0, double s_max, Eigen::Index N) const;
    ProfileGrid plane(int n, double s_max, Eigen::Index N) const;

    bool enabled() const { return !dir_.empty(); }
    std::filesystem::path entry(SurfaceKind kind, int n, double r0, double s_max, Eigen::Index N) const;

private:
    ProfileGrid fetch(SurfaceKind kind, int n, double r0, double s_max, Eigen::Index N) const;

    std::filesystem::path dir_;
};

}  // namespace morselab
