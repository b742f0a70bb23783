#pragma once

// Command implementations behind the CLI: run a scenario and emit its
// artifacts, or check the stabilizability certificates.
//
// Exit codes: 0 success, 1 certificate failure, 2 I/O or config error,
// 3 simulation anomaly (chatter, insufficient steady-state data).

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cuksim/certificate.hpp"
#include "cuksim/metrics.hpp"
#include "cuksim/scenario.hpp"
#include "cuksim/sim.hpp"
#include "cuksim/trace_io.hpp"

namespace cuksim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificateFailure = 1;
inline constexpr int kExitConfigOrIo = 2;
inline constexpr int kExitSimAnomaly = 3;

struct RunOptions {
    std::string out_dir = "out";
    std::optional<TimeWindow> window;       // restricts CSV emission only
    std::optional<double> duration_override;
    double steady_periods = 10.0;           // steady window, in nominal periods
};

/// Simulates the scenario and writes trace.csv, events.csv, metrics.json and
/// certificates.json into the output directory.
inline int run_command(const Scenario& scenario, const RunOptions& opts,
                       std::ostream& log = std::cerr) {
    Scenario sc = scenario;
    if (opts.duration_override) sc.sim.duration = *opts.duration_override;

    PolytopeSpec poly;
    try {
        poly = make_polytope(sc);
        sc.sim.validate();
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfigOrIo;
    }

    SimResult result;
    Metrics metrics;
    try {
        result = run_simulation(sc.params, sc.op, poly, sc.sim);
        const auto equil = equilibrium(sc.params, sc.op);
        const double steady_window = std::min(opts.steady_periods * sc.op.T_s, sc.sim.duration);
        metrics = compute_metrics(result.trace, result.events, poly, equil, steady_window);
    } catch (const ChatterError& e) {
        log << "error: " << e.what() << '\n';
        return kExitSimAnomaly;
    } catch (const InsufficientDataError& e) {
        log << "error: " << e.what() << '\n';
        return kExitSimAnomaly;
    }

    std::vector<CertificateReport> reports;
    const auto [sub1, sub2] = build_subsystems(sc.params, sc.op);
    for (const auto& pair : paper_certificates(sc.params, poly))
        reports.push_back(verify_certificate(pair, sub1, sub2));

    try {
        std::filesystem::create_directories(opts.out_dir);
        const auto base = std::filesystem::path(opts.out_dir);
        write_trace_csv((base / "trace.csv").string(), result.trace, opts.window);
        write_events_csv((base / "events.csv").string(), result.events, opts.window);
        write_metrics_json((base / "metrics.json").string(), metrics);
        write_certificates_json((base / "certificates.json").string(), reports);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfigOrIo;
    }
    return kExitOk;
}

/// Prints one certificate report per controlled index; exit 0 iff all pass.
inline int certify_with(const ConverterParams& params, const OperatingSpec& op,
                        const PolytopeSpec& poly, std::ostream& out = std::cout) {
    const auto [sub1, sub2] = build_subsystems(params, op);
    bool all_pass = true;
    for (const auto& pair : paper_certificates(params, poly)) {
        const auto report = verify_certificate(pair, sub1, sub2);
        out << certificate_to_json(report).dump() << '\n';
        all_pass = all_pass && report.pass;
    }
    return all_pass ? kExitOk : kExitCertificateFailure;
}

inline int certify_command(const Scenario& scenario, std::ostream& out = std::cout,
                           std::ostream& log = std::cerr) {
    PolytopeSpec poly;
    try {
        poly = make_polytope(scenario);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfigOrIo;
    }
    return certify_with(scenario.params, scenario.op, poly, out);
}

}  // namespace cuksim
