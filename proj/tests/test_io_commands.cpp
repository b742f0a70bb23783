#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuksim/commands.hpp"
#include "cuksim/scenario.hpp"
#include "cuksim/sim.hpp"
#include "cuksim/trace_io.hpp"

using namespace cuksim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

SimResult small_run() {
    Scenario sc = preset_scenario("fig2");
    sc.sim.duration = 2e-4;
    return run_simulation(sc.params, sc.op, make_polytope(sc), sc.sim);
}

}  // namespace

TEST_CASE("trace CSV carries the fixed column order and survives a round trip", "[io]") {
    const auto dir = fresh_dir("cuksim_io_trace");
    const auto run = small_run();
    const auto path = dir / "trace.csv";
    write_trace_csv(path.string(), run.trace);

    const auto lines = split_lines(slurp(path));
    REQUIRE(lines.size() == run.trace.size() + 1);
    CHECK(lines.front() == "t,i_L1,i_L2,v_C1,v_C2,q,V");

    // Full-precision scientific notation: parsing back returns the exact bits.
    for (std::size_t i : {std::size_t{1}, lines.size() / 2, lines.size() - 1}) {
        const auto& sample = run.trace[i - 1];
        double c[7];
        const char* p = lines[i].c_str();
        for (int f = 0; f < 7; ++f) {
            char* end = nullptr;
            c[f] = std::strtod(p, &end);
            p = *end == ',' ? end + 1 : end;
        }
        CHECK(c[0] == sample.t);
        for (std::size_t k = 0; k < 4; ++k) CHECK(c[1 + k] == sample.x[k]);
        CHECK(c[5] == sample.q);
        CHECK(c[6] == sample.V);
    }

    // Rows are time ordered.
    double prev = -1.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const double t = std::strtod(lines[i].c_str(), nullptr);
        CHECK(t >= prev);
        prev = t;
    }
    fs::remove_all(dir);
}

TEST_CASE("events CSV carries the fixed column order", "[io]") {
    const auto dir = fresh_dir("cuksim_io_events");
    const auto run = small_run();
    const auto path = dir / "events.csv";
    write_events_csv(path.string(), run.events);
    const auto lines = split_lines(slurp(path));
    REQUIRE(lines.size() == run.events.size() + 1);
    CHECK(lines.front() == "t,j,facet,q_before,q_after");
    fs::remove_all(dir);
}

TEST_CASE("metrics JSON mirrors the metrics fields exactly", "[io]") {
    const auto run = small_run();
    const Scenario sc = preset_scenario("fig2");
    const auto poly = make_polytope(sc);
    const auto equil = equilibrium(sc.params, sc.op);
    const auto m = compute_metrics(run.trace, run.events, poly, equil, 10.0 * sc.op.T_s);
    const auto j = metrics_to_json(m);

    const std::vector<std::string> expected = {
        "mean",          "ripple_measured",        "overshoot",
        "settle_time",   "period_measured",        "duty_measured",
        "switch_count",  "nonswitching_crossings", "max_V_steady"};
    CHECK(j.size() == expected.size());
    for (const auto& key : expected) CHECK(j.contains(key));
    CHECK(j["mean"].is_array());
    CHECK(j["mean"].size() == 4);
    CHECK(j["switch_count"].is_number_integer());
}

TEST_CASE("certificate JSON carries one object per pair", "[io]") {
    const Scenario sc = preset_scenario("fig4");
    const auto poly = make_polytope(sc);
    const auto [sub1, sub2] = build_subsystems(sc.params, sc.op);
    std::vector<CertificateReport> reports;
    for (const auto& pair : paper_certificates(sc.params, poly))
        reports.push_back(verify_certificate(pair, sub1, sub2));

    const auto dir = fresh_dir("cuksim_io_cert");
    const auto path = dir / "certificates.json";
    write_certificates_json(path.string(), reports);
    const auto parsed = nlohmann::json::parse(slurp(path));
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 3);
    for (const auto& r : parsed) {
        CHECK(r.contains("j"));
        CHECK(r.contains("LR"));
        CHECK(r.contains("LA1R"));
        CHECK(r.contains("LA2R"));
        CHECK(r.contains("pass"));
    }
    fs::remove_all(dir);
}

TEST_CASE("run command writes all artifacts and sane steady metrics", "[commands]") {
    const auto dir = fresh_dir("cuksim_cmd_run");
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.duration_override = 1.5e-3;
    REQUIRE(run_command(preset_scenario("fig2"), opts) == kExitOk);

    for (const char* name : {"trace.csv", "events.csv", "metrics.json", "certificates.json"})
        CHECK(fs::exists(dir / name));

    const auto metrics = nlohmann::json::parse(slurp(dir / "metrics.json"));
    const double period = metrics["period_measured"].get<double>();
    CHECK(period >= 9.8e-6);
    CHECK(period <= 1.02e-5);
    const auto certs = nlohmann::json::parse(slurp(dir / "certificates.json"));
    for (const auto& r : certs) CHECK(r["pass"].get<bool>());
    fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte identical", "[commands]") {
    const auto dir_a = fresh_dir("cuksim_cmd_rep_a");
    const auto dir_b = fresh_dir("cuksim_cmd_rep_b");
    RunOptions opts;
    opts.duration_override = 5e-4;
    opts.out_dir = dir_a.string();
    REQUIRE(run_command(preset_scenario("fig2"), opts) == kExitOk);
    opts.out_dir = dir_b.string();
    REQUIRE(run_command(preset_scenario("fig2"), opts) == kExitOk);
    CHECK(slurp(dir_a / "trace.csv") == slurp(dir_b / "trace.csv"));
    CHECK(slurp(dir_a / "events.csv") == slurp(dir_b / "events.csv"));
    CHECK(slurp(dir_a / "metrics.json") == slurp(dir_b / "metrics.json"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("the CSV window restricts emission without touching metrics", "[commands]") {
    const auto dir = fresh_dir("cuksim_cmd_window");
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.duration_override = 1.5e-3;
    opts.window = TimeWindow{1.0e-3, 1.2e-3};
    REQUIRE(run_command(preset_scenario("fig2"), opts) == kExitOk);

    const auto lines = split_lines(slurp(dir / "trace.csv"));
    REQUIRE(lines.size() > 2);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const double t = std::strtod(lines[i].c_str(), nullptr);
        CHECK(t >= 1.0e-3);
        CHECK(t <= 1.2e-3);
    }
    fs::remove_all(dir);
}

TEST_CASE("too short a run exits with the anomaly code", "[commands]") {
    const auto dir = fresh_dir("cuksim_cmd_short");
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.duration_override = 2e-5;  // only two switching cycles
    CHECK(run_command(preset_scenario("fig2"), opts) == kExitSimAnomaly);
    fs::remove_all(dir);
}

TEST_CASE("an unwritable output directory exits with the I/O code", "[commands]") {
    const auto dir = fresh_dir("cuksim_cmd_unwritable");
    const auto blocker = dir / "blocker";
    std::ofstream(blocker).put('x');
    RunOptions opts;
    opts.out_dir = (blocker / "out").string();  // path through a regular file
    opts.duration_override = 5e-4;
    CHECK(run_command(preset_scenario("fig2"), opts) == kExitConfigOrIo);
    fs::remove_all(dir);
}

TEST_CASE("certify command reports every controlled index and exit status", "[commands]") {
    std::ostringstream out;
    CHECK(certify_command(preset_scenario("fig4"), out) == kExitOk);
    const auto lines = split_lines(out.str());
    REQUIRE(lines.size() == 3);
    for (const auto& line : lines) {
        const auto r = nlohmann::json::parse(line);
        CHECK(r["pass"].get<bool>());
    }

    std::ostringstream out2;
    CHECK(certify_command(preset_scenario("fig2"), out2) == kExitOk);
    CHECK(split_lines(out2.str()).size() == 2);
}

TEST_CASE("certification fails with a corrupted coefficient sign", "[commands]") {
    const Scenario sc = preset_scenario("fig4");
    PolytopeSpec poly = make_polytope(sc);
    poly.k[2] = -poly.k[2];  // flip k3 to the invalid sign
    std::ostringstream out;
    CHECK(certify_with(sc.params, sc.op, poly, out) == kExitCertificateFailure);
    bool saw_failure = false;
    for (const auto& line : split_lines(out.str())) {
        const auto r = nlohmann::json::parse(line);
        if (!r["pass"].get<bool>()) saw_failure = true;
    }
    CHECK(saw_failure);
}
