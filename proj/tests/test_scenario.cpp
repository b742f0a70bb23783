#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "cuksim/scenario.hpp"

using namespace cuksim;

namespace {

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::filesystem::path write_temp_config(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path;
}

constexpr const char* kValidConfig = R"({
  "params": {"L1": 1e-3, "L2": 1e-3, "C1": 1e-6, "C2": 2e-5, "R": 5.0, "v_in": 10.0},
  "op": {"d": 0.5, "T_s": 1e-5},
  "polytope": {"J": [1, 2], "k2_fraction": -0.5},
  "sim": {"duration": 1e-3, "x0": [0.0, 0.0, 0.0, 0.0]}
})";

}  // namespace

TEST_CASE("preset fig2 matches its published definition", "[scenario]") {
    const auto sc = preset_scenario("fig2");
    CHECK(sc.J == std::vector<int>{1, 2});
    CHECK(sc.k2_fraction == -0.5);
    CHECK(sc.k4_fraction == 0.0);
    CHECK(sc.op.d == 0.5);
    CHECK(sc.op.T_s == 1e-5);
    CHECK(sc.sim.duration == 5e-3);
    for (std::size_t i = 0; i < 4; ++i) CHECK(sc.sim.x0[i] == 0.0);
    CHECK(sc.params.L1 == 1e-3);
    CHECK(sc.params.L2 == 1e-3);
    CHECK(sc.params.C1 == 1e-6);
    CHECK(sc.params.C2 == 2e-5);
    CHECK(sc.params.R == 5.0);
    CHECK(sc.params.v_in == 10.0);
}

TEST_CASE("preset fig5 enables all four controlled variables", "[scenario]") {
    const auto sc = preset_scenario("fig5");
    CHECK(sc.J == std::vector<int>{1, 2, 3, 4});
    CHECK(sc.k2_fraction == -0.75);
    CHECK(sc.k4_fraction == -0.00125);
    const auto poly = make_polytope(sc);
    CHECK(poly.coeff(2) == Catch::Approx(-30.0).epsilon(1e-12));
    CHECK(poly.coeff(4) == Catch::Approx(-0.8).epsilon(1e-12));
}

TEST_CASE("preset serializations never drift", "[scenario]") {
    // Frozen FNV-1a checksums of the canonical JSON serialization.
    const std::pair<const char*, std::uint64_t> expected[] = {
        {"fig2", 0xdad4b61925960e02ull},
        {"fig3", 0x4d155acbe1c7c1e4ull},
        {"fig4", 0xbe521b00070c6bdbull},
        {"fig5", 0x4a4c9788f1df92c6ull},
    };
    for (const auto& [name, checksum] : expected) {
        const std::string dump = scenario_to_json(preset_scenario(name)).dump();
        INFO(name << " serializes to " << dump);
        INFO("fnv1a = 0x" << std::hex << fnv1a(dump));
        CHECK(fnv1a(dump) == checksum);
    }
}

TEST_CASE("unknown preset names are rejected", "[scenario]") {
    CHECK_THROWS_AS(preset_scenario("fig9"), ConfigError);
    CHECK(is_preset("fig3"));
    CHECK_FALSE(is_preset("fig9"));
}

TEST_CASE("a valid config file loads and validates", "[scenario]") {
    const auto path = write_temp_config("cuksim_valid.json", kValidConfig);
    const auto sc = load_config(path.string());
    CHECK(sc.name == "cuksim_valid");
    CHECK(sc.J == std::vector<int>{1, 2});
    CHECK(sc.k2_fraction == -0.5);
    CHECK(sc.sim.duration == 1e-3);
    // Omitted sim keys take the period-derived defaults.
    CHECK(sc.sim.max_step == 1e-5 / 50.0);
    CHECK(sc.sim.event_tol == 1e-12);
    CHECK(sc.sim.min_dwell == 1e-5 / 1000.0);
    CHECK(sc.sim.sample_stride == 1e-5 / 100.0);
    std::filesystem::remove(path);
}

TEST_CASE("missing keys are reported by path", "[scenario]") {
    const auto path = write_temp_config("cuksim_missing.json", R"({
      "params": {"L1": 1e-3, "L2": 1e-3, "C1": 1e-6, "R": 5.0, "v_in": 10.0},
      "op": {"d": 0.5, "T_s": 1e-5},
      "polytope": {"J": [1]}
    })");
    try {
        load_config(path.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("params.C2") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("out-of-range duty ratio is reported against op.d", "[scenario]") {
    const auto path = write_temp_config("cuksim_duty.json", R"({
      "params": {"L1": 1e-3, "L2": 1e-3, "C1": 1e-6, "C2": 2e-5, "R": 5.0, "v_in": 10.0},
      "op": {"d": 1.5, "T_s": 1e-5},
      "polytope": {"J": [1]}
    })");
    try {
        load_config(path.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("op.d") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("polytope index set is validated", "[scenario]") {
    const auto bad_index = write_temp_config("cuksim_badj.json", R"({
      "params": {"L1": 1e-3, "L2": 1e-3, "C1": 1e-6, "C2": 2e-5, "R": 5.0, "v_in": 10.0},
      "op": {"d": 0.5, "T_s": 1e-5},
      "polytope": {"J": [1, 7]}
    })");
    CHECK_THROWS_AS(load_config(bad_index.string()), ConfigError);
    std::filesystem::remove(bad_index);

    const auto no_one = write_temp_config("cuksim_noone.json", R"({
      "params": {"L1": 1e-3, "L2": 1e-3, "C1": 1e-6, "C2": 2e-5, "R": 5.0, "v_in": 10.0},
      "op": {"d": 0.5, "T_s": 1e-5},
      "polytope": {"J": [2, 3]}
    })");
    try {
        load_config(no_one.string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("index 1") != std::string::npos);
    }
    std::filesystem::remove(no_one);
}

TEST_CASE("malformed JSON and missing files are config errors", "[scenario]") {
    CHECK_THROWS_AS(load_config("/nonexistent/cuksim.json"), ConfigError);
    const auto path = write_temp_config("cuksim_broken.json", "{ not json");
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("load_scenario resolves presets before paths", "[scenario]") {
    const auto sc = load_scenario("fig4");
    CHECK(sc.name == "fig4");
    CHECK(sc.J == std::vector<int>{1, 2, 3});
}
