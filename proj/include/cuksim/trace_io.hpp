#pragma once

// CSV and JSON emission for traces, events, metrics and certificate reports.
// CSV numbers use full-precision scientific notation so reruns are
// byte-identical and round-trips are lossless.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cuksim/certificate.hpp"
#include "cuksim/metrics.hpp"
#include "cuksim/sim.hpp"

namespace cuksim {

using TimeWindow = std::pair<double, double>;  // inclusive [t0, t1]

namespace detail {

inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

inline bool in_window(double t, const std::optional<TimeWindow>& w) {
    return !w || (t >= w->first && t <= w->second);
}

}  // namespace detail

inline void write_trace_csv(const std::string& path, const std::vector<TraceSample>& trace,
                            const std::optional<TimeWindow>& window = std::nullopt) {
    auto out = detail::open_for_write(path);
    out << "t,i_L1,i_L2,v_C1,v_C2,q,V\n";
    for (const auto& s : trace) {
        if (!detail::in_window(s.t, window)) continue;
        out << detail::sci(s.t) << ',' << detail::sci(s.x[0]) << ',' << detail::sci(s.x[1]) << ','
            << detail::sci(s.x[2]) << ',' << detail::sci(s.x[3]) << ',' << s.q << ','
            << detail::sci(s.V) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_events_csv(const std::string& path, const std::vector<SwitchEvent>& events,
                             const std::optional<TimeWindow>& window = std::nullopt) {
    auto out = detail::open_for_write(path);
    out << "t,j,facet,q_before,q_after\n";
    for (const auto& e : events) {
        if (!detail::in_window(e.t, window)) continue;
        out << detail::sci(e.t) << ',' << e.j << ',' << e.facet << ',' << e.q_before << ','
            << e.q_after << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json metrics_to_json(const Metrics& m) {
    const auto vec = [](const Vec4& v) { return nlohmann::json{v[0], v[1], v[2], v[3]}; };
    nlohmann::json j;
    j["mean"] = vec(m.mean);
    j["ripple_measured"] = vec(m.ripple_measured);
    j["overshoot"] = vec(m.overshoot);
    j["settle_time"] = std::isfinite(m.settle_time) ? nlohmann::json(m.settle_time)
                                                    : nlohmann::json(nullptr);
    j["period_measured"] = m.period_measured;
    j["duty_measured"] = m.duty_measured;
    j["switch_count"] = m.switch_count;
    j["nonswitching_crossings"] = m.nonswitching_crossings;
    j["max_V_steady"] = m.max_V_steady;
    return j;
}

inline nlohmann::json certificate_to_json(const CertificateReport& r) {
    nlohmann::json j;
    j["j"] = r.j;
    j["LR"] = r.LR;
    j["LA1R"] = r.LA1R;
    j["LA2R"] = r.LA2R;
    j["pass"] = r.pass;
    return j;
}

inline void write_metrics_json(const std::string& path, const Metrics& m) {
    auto out = detail::open_for_write(path);
    out << metrics_to_json(m).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_certificates_json(const std::string& path,
                                    const std::vector<CertificateReport>& reports) {
    auto out = detail::open_for_write(path);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(certificate_to_json(r));
    out << arr.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cuksim
