// cuksim command-line interface.
//
//   cuksim run <preset|config.json>... [--out DIR] [--window T0:T1]
//                                      [--duration S] [--jobs N]
//   cuksim certify <preset|config.json>
//   cuksim presets list

#include <atomic>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cuksim/commands.hpp"
#include "cuksim/scenario.hpp"

namespace {

bool parse_window(const std::string& text, cuksim::TimeWindow& out) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return false;
    try {
        out.first = std::stod(text.substr(0, colon));
        out.second = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        return false;
    }
    return out.first <= out.second;
}

int run_many(const std::vector<std::string>& names, const cuksim::RunOptions& base_opts,
             unsigned jobs) {
    std::vector<cuksim::Scenario> scenarios;
    for (const auto& name : names) {
        try {
            scenarios.push_back(cuksim::load_scenario(name));
        } catch (const cuksim::ConfigError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return cuksim::kExitConfigOrIo;
        }
    }

    std::vector<int> codes(scenarios.size(), 0);
    std::atomic<std::size_t> cursor{0};
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= scenarios.size()) break;
            cuksim::RunOptions opts = base_opts;
            if (scenarios.size() > 1)
                opts.out_dir = (std::filesystem::path(base_opts.out_dir) / scenarios[i].name).string();
            codes[i] = cuksim::run_command(scenarios[i], opts);
        }
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    int status = cuksim::kExitOk;
    for (int c : codes) status = std::max(status, c);
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-driven simulator for the PLLF-controlled Cuk converter"};
    app.require_subcommand(1);

    std::vector<std::string> run_scenarios;
    std::string out_dir = "out";
    std::string window_text;
    double duration = 0.0;
    unsigned jobs = 1;
    auto* run = app.add_subcommand("run", "simulate scenarios and write trace/metrics artifacts");
    run->add_option("scenario", run_scenarios, "preset name or config path")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--window", window_text, "restrict CSV emission to T0:T1 seconds");
    auto* duration_opt = run->add_option("--duration", duration, "override simulation duration (s)");
    run->add_option("--jobs", jobs, "run scenarios concurrently");

    std::string certify_scenario;
    auto* certify = app.add_subcommand("certify", "check the stabilizability certificates");
    certify->add_option("scenario", certify_scenario, "preset name or config path")->required();

    std::string presets_action;
    auto* presets = app.add_subcommand("presets", "inspect built-in scenarios");
    presets->add_option("action", presets_action, "only 'list' is supported")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cuksim::kExitConfigOrIo;
    }

    if (run->parsed()) {
        cuksim::RunOptions opts;
        opts.out_dir = out_dir;
        if (!window_text.empty()) {
            cuksim::TimeWindow w;
            if (!parse_window(window_text, w)) {
                std::cerr << "error: --window expects T0:T1 with T0 <= T1\n";
                return cuksim::kExitConfigOrIo;
            }
            opts.window = w;
        }
        if (duration_opt->count() > 0) opts.duration_override = duration;
        return run_many(run_scenarios, opts, jobs);
    }

    if (certify->parsed()) {
        try {
            return cuksim::certify_command(cuksim::load_scenario(certify_scenario));
        } catch (const cuksim::ConfigError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return cuksim::kExitConfigOrIo;
        }
    }

    if (presets->parsed()) {
        if (presets_action != "list") {
            std::cerr << "error: unknown presets action '" << presets_action << "'\n";
            return cuksim::kExitConfigOrIo;
        }
        for (const auto& name : cuksim::preset_names()) {
            const auto sc = cuksim::preset_scenario(name);
            std::cout << name << "  J={";
            for (std::size_t i = 0; i < sc.J.size(); ++i) std::cout << (i ? "," : "") << sc.J[i];
            std::cout << "}  k2_fraction=" << sc.k2_fraction << "  k4_fraction=" << sc.k4_fraction
                      << "  d=" << sc.op.d << "  T_s=" << sc.op.T_s
                      << "  duration=" << sc.sim.duration << '\n';
        }
        return cuksim::kExitOk;
    }

    return cuksim::kExitConfigOrIo;
}
