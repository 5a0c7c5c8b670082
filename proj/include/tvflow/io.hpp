#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvflow/error.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/grid.hpp"
#include "tvflow/resolvent.hpp"

namespace tvflow {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::json events_json(const std::vector<Event>& events) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Event& e : events) {
        arr.push_back({{"t", e.time},
                       {"kind", to_string(e.kind)},
                       {"facets", e.facets},
                       {"level", e.level},
                       {"interval", {e.x_lo, e.x_hi}},
                       {"resulting_kind", to_string(e.resulting_kind)},
                       {"side", to_string(e.side)},
                       {"parity", e.parity}});
    }
    return arr;
}

inline nlohmann::json summary_json(const Trajectory& tr) {
    nlohmann::json s;
    s["t_ext"] = tr.t_ext ? nlohmann::json(*tr.t_ext) : nlohmann::json(nullptr);
    s["bound"] = tr.bound.bound;
    s["bound_alt"] = tr.bound.bound_alt;
    s["k_ess0"] = tr.bound.k_ess0;
    s["n_events"] = tr.events.size();
    s["n_snapshots"] = tr.snapshots.size();
    s["A"] = tr.bound.A;
    s["ell"] = tr.bound.ell;
    return s;
}

/// Header `t,x,u`, n uniform samples per snapshot.
inline std::string snapshots_csv(const Trajectory& tr, std::size_t n) {
    std::ostringstream os;
    os << "t,x,u\n";
    for (const Snapshot& s : tr.snapshots) {
        const GridFunction g = grid_sample(s.u, n);
        for (std::size_t j = 0; j < g.size(); ++j)
            os << format_double(s.t) << ',' << format_double(j + 1 == g.size() ? s.u.b() : g.x(j)) << ','
               << format_double(g.values[j]) << '\n';
    }
    return os.str();
}

inline std::string sigma_csv(const FluxField& flux, std::size_t n) {
    const GridFunction g = grid_sample(flux.sigma, n);
    std::ostringstream os;
    os << "x,sigma\n";
    for (std::size_t j = 0; j < g.size(); ++j)
        os << format_double(j + 1 == g.size() ? flux.sigma.b() : g.x(j)) << ',' << format_double(g.values[j]) << '\n';
    return os.str();
}

/// Overlaid snapshot curves with time labels.
inline std::string snapshots_svg(const Trajectory& tr, std::size_t n = 512) {
    constexpr double width = 800.0;
    constexpr double height = 500.0;
    constexpr double margin = 50.0;
    double lo = 0.0;
    double hi = 1.0;
    double a = 0.0;
    double b = 1.0;
    if (!tr.snapshots.empty()) {
        const auto& u0 = tr.snapshots.front().u;
        a = u0.a();
        b = u0.b();
        lo = u0.min_value();
        hi = u0.max_value();
        for (const Snapshot& s : tr.snapshots) {
            lo = std::min(lo, s.u.min_value());
            hi = std::max(hi, s.u.max_value());
        }
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    auto px = [&](double x) { return margin + (x - a) / (b - a) * (width - 2 * margin); };
    auto py = [&](double y) { return height - margin - (y - lo) / (hi - lo) * (height - 2 * margin); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
       << height - margin << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"" << height - 20 << "\" font-size=\"12\">" << format_double(a) << "</text>\n";
    os << "<text x=\"" << width - margin << "\" y=\"" << height - 20 << "\" font-size=\"12\">" << format_double(b)
       << "</text>\n";
    os << "<text x=\"5\" y=\"" << margin << "\" font-size=\"12\">" << format_double(hi) << "</text>\n";
    os << "<text x=\"5\" y=\"" << height - margin << "\" font-size=\"12\">" << format_double(lo) << "</text>\n";
    const std::size_t count = tr.snapshots.size();
    for (std::size_t k = 0; k < count; ++k) {
        const Snapshot& s = tr.snapshots[k];
        const GridFunction g = grid_sample(s.u, n);
        const int shade = count > 1 ? static_cast<int>(200.0 * static_cast<double>(k) / static_cast<double>(count - 1)) : 0;
        os << "<polyline fill=\"none\" stroke=\"rgb(" << shade << ",0," << 200 - shade << ")\" points=\"";
        for (std::size_t j = 0; j < g.size(); ++j) os << px(g.x(j)) << ',' << py(g.values[j]) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << width - margin + 5 << "\" y=\"" << py(g.values.back()) << "\" font-size=\"10\">t="
           << format_double(s.t) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// Writes via a temporary file and a rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw Error(ErrorCode::Precondition, "cannot write " + tmp.string());
        f << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::SchemaError, "cannot read " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace tvflow
