#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvflow/error.hpp"
#include "tvflow/profile.hpp"

namespace tvflow {

struct ScenarioOptions {
    bool auto_shift = false;
    std::optional<double> normalize_min;  // translate so that min u0 equals this value
    int max_degree = 8;
};

namespace detail {

inline double number_at(const nlohmann::json& j, const char* what) {
    if (!j.is_number()) throw Error(ErrorCode::SchemaError, std::string(what) + " must be a number");
    return j.get<double>();
}

inline std::pair<double, double> interval_at(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw Error(ErrorCode::SchemaError, std::string(what) + " must be a two-element array");
    return {number_at(j[0], what), number_at(j[1], what)};
}

}  // namespace detail

/// Parses a scenario document:
///   { "domain": [a, b],
///     "pieces": [ { "interval": [x0, x1], "coeffs": [c0, c1, ...] }, ... ],
///     "boundary": { "left": .., "right": .. },            (optional)
///     "options": { "auto_shift": bool, "normalize_min": v } (optional) }
inline PiecewiseProfile load_scenario(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "scenario must be an object");
    if (!doc.contains("domain")) throw Error(ErrorCode::SchemaError, "missing 'domain'");
    if (!doc.contains("pieces") || !doc["pieces"].is_array())
        throw Error(ErrorCode::SchemaError, "missing 'pieces' array");
    const auto [a, b] = detail::interval_at(doc["domain"], "domain");
    if (!(a < b)) throw Error(ErrorCode::EmptyDomain, "domain must satisfy a < b");
    if (doc["pieces"].empty()) throw Error(ErrorCode::EmptyDomain, "no pieces");

    ScenarioOptions opt;
    if (doc.contains("options")) {
        const auto& o = doc["options"];
        if (!o.is_object()) throw Error(ErrorCode::SchemaError, "'options' must be an object");
        if (o.contains("auto_shift")) {
            if (!o["auto_shift"].is_boolean()) throw Error(ErrorCode::SchemaError, "auto_shift must be a boolean");
            opt.auto_shift = o["auto_shift"].get<bool>();
        }
        if (o.contains("normalize_min")) opt.normalize_min = detail::number_at(o["normalize_min"], "normalize_min");
        if (o.contains("max_degree")) opt.max_degree = static_cast<int>(detail::number_at(o["max_degree"], "max_degree"));
    }

    std::vector<Piece> pieces;
    for (const auto& jp : doc["pieces"]) {
        if (!jp.is_object() || !jp.contains("interval") || !jp.contains("coeffs") || !jp["coeffs"].is_array())
            throw Error(ErrorCode::SchemaError, "each piece needs 'interval' and 'coeffs'");
        const auto [x0, x1] = detail::interval_at(jp["interval"], "interval");
        if (!(x0 < x1)) throw Error(ErrorCode::SchemaError, "piece interval must satisfy x0 < x1");
        std::vector<double> c;
        for (const auto& v : jp["coeffs"]) c.push_back(detail::number_at(v, "coefficient"));
        if (c.empty()) throw Error(ErrorCode::SchemaError, "empty coefficient list");
        Polynomial poly(std::move(c));
        if (poly.degree() > opt.max_degree)
            throw Error(ErrorCode::DegreeOverflow, "piece degree exceeds the configured maximum");
        pieces.push_back({x0, x1, std::move(poly)});
    }
    const double span_tol = 1e-12 * std::max(1.0, b - a);
    if (std::abs(pieces.front().x0 - a) > span_tol || std::abs(pieces.back().x1 - b) > span_tol)
        throw Error(ErrorCode::SchemaError, "pieces must start at a and end at b");
    for (std::size_t k = 1; k < pieces.size(); ++k)
        if (std::abs(pieces[k].x0 - pieces[k - 1].x1) > span_tol)
            throw Error(ErrorCode::SchemaError, "pieces must be contiguous and ordered");

    if (opt.auto_shift) {
        for (std::size_t k = 1; k < pieces.size(); ++k) {
            const double x = pieces[k].x0;
            pieces[k].poly += pieces[k - 1].poly(x) - pieces[k].poly(x);
        }
    }
    std::optional<double> left;
    std::optional<double> right;
    if (doc.contains("boundary")) {
        const auto& bd = doc["boundary"];
        if (!bd.is_object()) throw Error(ErrorCode::SchemaError, "'boundary' must be an object");
        if (bd.contains("left")) left = detail::number_at(bd["left"], "boundary.left");
        if (bd.contains("right")) right = detail::number_at(bd["right"], "boundary.right");
    }
    PiecewiseProfile p = PiecewiseProfile::from_pieces(std::move(pieces));
    if (opt.normalize_min) p = translated(p, *opt.normalize_min - p.min_value());
    return PiecewiseProfile::from_pieces(std::vector<Piece>(p.pieces().begin(), p.pieces().end()), left, right);
}

inline PiecewiseProfile load_scenario(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, e.what());
    }
    return load_scenario(doc);
}

/// Serializes a profile with the scenario schema (auto_shift off).
inline nlohmann::json to_scenario_json(const PiecewiseProfile& p) {
    nlohmann::json doc;
    doc["domain"] = {p.a(), p.b()};
    nlohmann::json pieces = nlohmann::json::array();
    for (const Piece& pc : p.pieces()) {
        nlohmann::json jp;
        jp["interval"] = {pc.x0, pc.x1};
        jp["coeffs"] = std::vector<double>(pc.poly.coeffs().begin(), pc.poly.coeffs().end());
        pieces.push_back(std::move(jp));
    }
    doc["pieces"] = std::move(pieces);
    doc["boundary"] = {{"left", p.left_value()}, {"right", p.right_value()}};
    doc["options"] = {{"auto_shift", false}};
    return doc;
}

}  // namespace tvflow
