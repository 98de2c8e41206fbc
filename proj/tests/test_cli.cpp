#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "morselab/config.hpp"
#include "morselab/errors.hpp"
#include "morselab/io.hpp"
#include "morselab/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace morselab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("morselab_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunConfig small(const fs::path& out) {
    RunConfig c;
    c.s_max = 20;
    c.N = 4000;
    c.S_sweep = {5, 10, 20};
    c.output_dir = out.string();
    return c;
}

}  // namespace

TEST_CASE("config round-trips through text") {
    RunConfig c;
    c.r0 = 0.1;
    c.S_sweep = {1.0 / 3.0, 2.5};
    c.s_max = 3;
    c.cache_dir = "/tmp/x";
    const RunConfig d = RunConfig::parse(c.to_text());
    CHECK(d == c);
    CHECK(d.S_sweep[0] == 1.0 / 3.0);
}

TEST_CASE("config rejects unknown keys and invalid values") {
    CHECK_THROWS_AS(RunConfig::parse("bogus=1\n"), InputError);
    CHECK_THROWS_AS(RunConfig::parse("n=four\n"), InputError);
    CHECK_THROWS_AS(RunConfig::parse("no equals sign\n"), InputError);
    RunConfig c;
    c.S_sweep = {20, 10};
    CHECK_THROWS_AS(c.validate(), InputError);
    c = RunConfig{};
    c.r0 = -1;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = RunConfig{};
    c.S_sweep = {100};
    CHECK_THROWS_AS(c.validate(), InputError);
    CHECK_NOTHROW(RunConfig{}.validate());
    CHECK(RunConfig::parse("# comment\n\nn = 5\n").n == 5);
}

TEST_CASE("JSON writer sorts keys and keeps 17 digits") {
    nlohmann::json j{{"b", 0.1}, {"a", 1}, {"c", {1.0 / 3.0}}};
    const std::string s = dump_json(j);
    CHECK(s.find("\"a\"") < s.find("\"b\""));
    CHECK(s.find("0.10000000000000001") != std::string::npos);
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(dump_json(nlohmann::json{{"x", INFINITY}}).find("null") != std::string::npos);
}

TEST_CASE("profile CSV round-trips exactly") {
    const fs::path dir = scratch("csv");
    const ProfileGrid g = solve_profile(5, 0.3, 4.0, 300);
    write_profile(g, dir / "p.csv", dir / "p.meta");
    const ProfileGrid h = read_profile(dir / "p.csv", dir / "p.meta");
    CHECK(h.n == g.n);
    CHECK(h.r0 == g.r0);
    CHECK(h.h == g.h);
    CHECK(h.kind == g.kind);
    CHECK(h.r == g.r);
    CHECK(h.zp == g.zp);
    std::ofstream(dir / "bad.meta") << "n=4\nformat_version=2\n";
    CHECK_THROWS_AS(read_profile(dir / "p.csv", dir / "bad.meta"), InputError);
}

TEST_CASE("cache writes entries and returns identical grids") {
    const fs::path dir = scratch("cache");
    const ProfileCache cache(dir);
    const ProfileGrid a = cache.catenoid(4, 1.0, 10.0, 500);
    CHECK(fs::exists(cache.entry(SurfaceKind::catenoid, 4, 1.0, 10.0, 500).string() + ".csv"));
    const ProfileGrid b = cache.catenoid(4, 1.0, 10.0, 500);
    CHECK(a.r == b.r);
    CHECK(a.z == b.z);
    std::ofstream(cache.entry(SurfaceKind::catenoid, 4, 1.0, 10.0, 500).string() + ".csv") << "garbage";
    const ProfileGrid c = cache.catenoid(4, 1.0, 10.0, 500);
    CHECK(c.r == a.r);
}

TEST_CASE("index artifact reports index one") {
    const fs::path out = scratch("index");
    std::ostringstream log;
    CHECK(run_subcommand("index", small(out), log) == exit_ok);
    const auto j = nlohmann::json::parse(slurp(out / "index.json"));
    CHECK(j["morse_index"] == 1);
    CHECK(j["surface"]["n"] == 4);
}

TEST_CASE("identities artifact is byte-identical across runs") {
    const fs::path out = scratch("ident");
    std::ostringstream log;
    RunConfig c = small(out);
    REQUIRE(run_subcommand("identities", c, log) == exit_ok);
    const std::string first = slurp(out / "identities.json");
    REQUIRE(run_subcommand("identities", c, log) == exit_ok);
    CHECK(slurp(out / "identities.json") == first);
}

TEST_CASE("deleting the cache does not change report values") {
    const fs::path out = scratch("coherence");
    std::ostringstream log;
    RunConfig c = small(out);
    c.cache_dir = (out / "cache").string();
    REQUIRE(run_subcommand("spectrum", c, log) == exit_ok);
    REQUIRE(fs::exists(out / "cache"));
    const std::string cached = slurp(out / "spectrum.json");
    REQUIRE(run_subcommand("spectrum", c, log) == exit_ok);  // read back from the cache
    CHECK(slurp(out / "spectrum.json") == cached);
    fs::remove_all(out / "cache");
    c.cache_dir.clear();
    REQUIRE(run_subcommand("spectrum", c, log) == exit_ok);
    CHECK(slurp(out / "spectrum.json") == cached);
}

TEST_CASE("mode cap gives the inconclusive exit code") {
    const fs::path out = scratch("cap");
    std::ostringstream log;
    RunConfig c = small(out);
    c.l_max_cap = 1;
    CHECK(run_subcommand("index", c, log) == exit_inconclusive);
    CHECK(nlohmann::json::parse(slurp(out / "index.json")).contains("inconclusive"));
}

TEST_CASE("unknown subcommand is a usage error") {
    std::ostringstream log;
    CHECK_THROWS_AS(run_subcommand("nope", small(scratch("nope")), log), InputError);
}

TEST_CASE("report on the plane passes with index 0 and no forms") {
    const fs::path out = scratch("plane");
    std::ostringstream log;
    RunConfig c = small(out);
    c.surface = "plane";
    CHECK(run_subcommand("report", c, log) == exit_ok);
    const auto j = nlohmann::json::parse(slurp(out / "verification_report.json"));
    CHECK(j["all_pass"] == true);
    for (const auto& check : j["checks"]) {
        for (const char* field : {"check_id", "paper_ref", "measured", "expected", "tol", "pass"})
            CHECK(check.contains(field));
        if (check["check_id"] == "morse_index") CHECK(check["measured"] == 0);
        if (check["check_id"] == "form_basis_dimension") CHECK(check["measured"] == 0);
    }
}

TEST_CASE("every subcommand runs on a small catenoid") {
    const fs::path out = scratch("all");
    std::ostringstream log;
    for (const auto& name : subcommand_names()) {
        if (name == "report") continue;
        CHECK_MESSAGE(run_subcommand(name, small(out), log) == exit_ok, name);
    }
    for (const char* f : {"profile.csv", "profile.meta", "curvature.csv", "spectrum.csv", "harmonic.csv",
                          "testfn.csv", "identities.json", "rigidity.json", "asymptotics.json"})
        CHECK_MESSAGE(fs::exists(out / f), f);
    CHECK(slurp(out / "spectrum.csv").rfind("S,l,lambda1,lambda2,neg_count\n", 0) == 0);
    CHECK(slurp(out / "testfn.csv").rfind("i,j,Q,residual\n", 0) == 0);
    CHECK(slurp(out / "harmonic.csv").rfind("s,phi,omega_radial\n", 0) == 0);
    CHECK(slurp(out / "profile.csv").rfind("s,r,z,rp,zp\n", 0) == 0);
}
