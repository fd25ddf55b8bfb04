#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kmlab/config.hpp"
#include "kmlab/dsmc.hpp"
#include "kmlab/errors.hpp"
#include "kmlab/persistence.hpp"

using namespace kmlab;
namespace fs = std::filesystem;

namespace {

const char* kKac = R"(# Kac scenario
[scenario]
model = kac
n = 1000
t_end = 0.5
seed = 11

[kernel]
profile = power
nu = 1
theta_min = 0.05

[initial]
law = gaussian
stddev = 1.5

[diagnostics]
orders = 2 4 6
exp_s = 1.3333333333333333
exp_alpha = 0.2
cadence = 0.125
)";

const char* kKacReordered = R"([kernel]
theta_min=0.05
nu = 1
profile   = power
[diagnostics]
cadence = 0.125
exp_alpha = 0.2
exp_s = 1.3333333333333333
orders = 2 4 6
[initial]
stddev = 1.5
law = gaussian
[scenario]
seed = 11
t_end = 0.5
n = 1000
model = kac
)";

fs::path temp_path(const std::string& name)
{
    return fs::temp_directory_path() / ("kmlab_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

DOCTEST_TEST_CASE("config parsing")
{
    const auto c = parse_config(kKac);
    DOCTEST_CHECK(c.scenario.n == 1000);
    DOCTEST_CHECK(c.scenario.kernel.family() == Family::Kac);
    DOCTEST_CHECK(c.scenario.kernel.theta_min() == 0.05);
    DOCTEST_CHECK(c.scenario.diagnostics.orders == std::vector<int>{2, 4, 6});
    DOCTEST_CHECK(c.scenario.seed == 11);
    DOCTEST_CHECK(c.warnings.empty());
}

DOCTEST_TEST_CASE("config errors name the line")
{
    const std::string bad = "[scenario]\nmodel = kac\nn = -4\nbogus = 1\n[nowhere]\n";
    try {
        parse_config(bad);
        DOCTEST_FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        DOCTEST_CHECK(msg.find("line 3") != std::string::npos);
        DOCTEST_CHECK(msg.find("line 4") != std::string::npos);
        DOCTEST_CHECK(msg.find("line 5") != std::string::npos);
    }
    DOCTEST_CHECK_THROWS_AS(parse_config("[kernel]\nprofile = constant\n"), ConfigError);
    DOCTEST_CHECK_THROWS_WITH_AS(parse_config("[scenario]\nmodel = kac\n[kernel]\nprofile = power\nnu = 1\n"),
                                 doctest::Contains("untruncated singular kernel"), ConfigError);
    DOCTEST_CHECK_THROWS_AS(parse_config("[scenario]\nmodel = kac\nd = 3\n"), ConfigError);
}

DOCTEST_TEST_CASE("overrides and admissibility warning")
{
    const std::vector<std::string> ov{"scenario.n=200", "diagnostics.exp_s=1.9"};
    const auto c = parse_config(kKac, ov);
    DOCTEST_CHECK(c.scenario.n == 200);
    DOCTEST_CHECK(!c.warnings.empty());
    const std::vector<std::string> bad{"scenario.n"};
    DOCTEST_CHECK_THROWS_AS(parse_config(kKac, bad), ConfigError);
}

DOCTEST_TEST_CASE("config round trip and hash")
{
    const auto c = parse_config(kKac);
    const auto again = parse_config(to_config_text(c));
    DOCTEST_CHECK(to_config_text(again) == to_config_text(c));
    DOCTEST_CHECK(again.scenario.seed == c.scenario.seed);
    DOCTEST_CHECK(again.scenario.diagnostics.exp_specs.size() == 1);
    DOCTEST_CHECK(config_hash(kKac) == config_hash(kKacReordered));
    DOCTEST_CHECK(config_hash(kKac).size() == 64);
    const std::vector<std::string> ov{"scenario.seed=12"};
    DOCTEST_CHECK(config_hash(kKac) != config_hash(kKac, ov));
}

DOCTEST_TEST_CASE("KM_SEED overrides the seed")
{
    auto c = parse_config(kKac);
    ::setenv("KM_SEED", "99", 1);
    DOCTEST_CHECK(apply_environment(c));
    DOCTEST_CHECK(c.scenario.seed == 99);
    ::unsetenv("KM_SEED");
    auto d = parse_config(kKac);
    DOCTEST_CHECK(!apply_environment(d));
    DOCTEST_CHECK(d.scenario.seed == 11);
}

DOCTEST_TEST_CASE("moment CSV round trip")
{
    const auto c = parse_config(kKac);
    const auto r = run(c.scenario);
    const auto text = moment_csv_text(r.table);
    const auto back = parse_moment_csv(text);
    DOCTEST_CHECK(back == r.table);
    const auto path = temp_path("m.csv").string();
    write_moment_csv(r.table, path);
    DOCTEST_CHECK(read_moment_csv(path) == r.table);
    fs::remove(path);
    DOCTEST_CHECK_THROWS_AS(parse_moment_csv("t,order_or_spec,value,std_err,flags\n0,m2,abc,0,ok\n"), IoError);
}

DOCTEST_TEST_CASE("snapshot round trip is bit exact and resumes identically")
{
    auto c = parse_config(kKac);
    const auto full = run(c.scenario);
    c.scenario.t_end = 0.25;
    const auto half = run(c.scenario);
    const auto path = temp_path("snap.bin").string();
    snapshot(half.final_state, path);
    const auto restored = restore(path);
    DOCTEST_CHECK(restored == half.final_state);
    c.scenario.t_end = 0.5;
    DOCTEST_CHECK(run(c.scenario, restored).final_state == full.final_state);

    auto bytes = snapshot_bytes(half.final_state);
    bytes.pop_back();
    DOCTEST_CHECK_THROWS_AS(restore_bytes(bytes), IoError);
    bytes = snapshot_bytes(half.final_state);
    bytes[0] = 'X';
    DOCTEST_CHECK_THROWS_AS(restore_bytes(bytes), IoError);
    DOCTEST_CHECK_THROWS_AS(restore(temp_path("missing").string()), IoError);
    fs::remove(path);
}

DOCTEST_TEST_CASE("manifest fields")
{
    RunManifest m;
    m.command = "simulate";
    m.config_hash = config_hash(kKac);
    m.seed = 11;
    m.start_time = utc_timestamp();
    m.end_time = utc_timestamp();
    m.outputs = {"a.csv"};
    const auto j = nlohmann::json::parse(manifest_json(m));
    for (const char* key : {"command", "config_hash", "seed", "version", "start_time", "end_time", "outputs"}) {
        DOCTEST_CHECK(j.contains(key));
    }
    DOCTEST_CHECK(j["seed"] == 11);
    DOCTEST_CHECK(j["version"] == std::string(library_version()));
}
