#pragma once

// JSON encodings. Every top-level document carries "schema": 1; nested
// values do not. Big integers are written as JSON numbers when they fit in
// 64 bits and as decimal strings otherwise; both forms are accepted on input.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcov/fgab.hpp"
#include "bcov/finmodel.hpp"
#include "bcov/ktheory.hpp"
#include "bcov/plcover.hpp"
#include "bcov/ratmap.hpp"

namespace bcov::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

class SchemaError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// {"schema": 1, ...body}
inline json document(json body) {
    json out = {{"schema", kSchemaVersion}};
    for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
    return out;
}

/// Rejects documents with a schema other than 1; a missing field is accepted.
inline void check_schema(const json& j) {
    if (j.is_object() && j.contains("schema") && j.at("schema") != kSchemaVersion)
        throw SchemaError("unsupported schema version " + j.at("schema").dump());
}

inline json integer_to_json(const Integer& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(v);
    return v.str();
}

inline Integer integer_from_json(const json& j) {
    if (j.is_number_integer()) return Integer(j.get<std::int64_t>());
    if (j.is_string()) {
        try {
            return Integer(j.get<std::string>());
        } catch (const std::exception&) {
            throw SchemaError("not an integer: " + j.dump());
        }
    }
    throw SchemaError("expected an integer, got " + j.dump());
}

// --- fgab ------------------------------------------------------------------

inline json to_json(const IntMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(integer_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Column count must be given for matrices with no rows.
inline IntMatrix matrix_from_json(const json& j, std::size_t cols_if_empty = 0) {
    if (!j.is_array()) throw SchemaError("matrix must be an array of rows");
    if (j.empty()) return IntMatrix(0, cols_if_empty);
    const std::size_t cols = j.front().size();
    IntMatrix m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw SchemaError("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = integer_from_json(j[r][c]);
    }
    return m;
}

inline json to_json(const FgAbelianGroup& g) {
    json t = json::array();
    for (const auto& d : g.torsion()) t.push_back(integer_to_json(d));
    return {{"rank", g.rank()}, {"torsion", t}};
}

inline FgAbelianGroup group_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rank")) throw SchemaError("group needs a \"rank\" field");
    std::vector<Integer> torsion;
    if (j.contains("torsion"))
        for (const auto& d : j.at("torsion")) torsion.push_back(integer_from_json(d));
    const auto rank = j.at("rank").get<long long>();
    if (rank < 0) throw SchemaError("group rank must be non-negative");
    try {
        return FgAbelianGroup(static_cast<std::size_t>(rank), torsion);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
}

inline json to_json(const GroupHom& h) {
    return {{"domain", to_json(h.domain())}, {"codomain", to_json(h.codomain())}, {"matrix", to_json(h.matrix())}};
}

inline GroupHom hom_from_json(const json& j) {
    auto dom = group_from_json(j.at("domain"));
    auto cod = group_from_json(j.at("codomain"));
    return GroupHom(dom, cod, matrix_from_json(j.at("matrix"), dom.generator_count()));
}

inline json to_json(const SmithForm& s) {
    json diag = json::array();
    for (std::size_t i = 0; i < std::min(s.d.rows(), s.d.cols()); ++i) diag.push_back(integer_to_json(s.d(i, i)));
    return {{"diagonal", diag}, {"u", to_json(s.u)}, {"d", to_json(s.d)}, {"v", to_json(s.v)}};
}

// --- ktheory ---------------------------------------------------------------

inline json to_json(const ktheory::SixTermSequence& seq) {
    json nodes = json::array(), maps = json::array();
    for (const auto& n : seq.nodes) {
        json e = n.is_known() ? json{{"known", to_json(*n.group)}} : json{{"unknown", n.label}};
        if (n.is_known() && !n.label.empty()) e["label"] = n.label;
        nodes.push_back(std::move(e));
    }
    for (const auto& m : seq.maps) {
        json e;
        switch (m.kind) {
            case ktheory::MapEntry::Kind::Known: e = {{"matrix", to_json(*m.matrix)}}; break;
            case ktheory::MapEntry::Kind::Zero: e = {{"zero", true}}; break;
            case ktheory::MapEntry::Kind::Unknown: e = {{"unknown", true}}; break;
        }
        if (!m.label.empty()) e["label"] = m.label;
        maps.push_back(std::move(e));
    }
    return {{"nodes", nodes}, {"maps", maps}};
}

inline ktheory::SixTermSequence sequence_from_json(const json& j) {
    check_schema(j);
    if (!j.contains("nodes") || !j.contains("maps") || j.at("nodes").size() != ktheory::kSixTerm ||
        j.at("maps").size() != ktheory::kSixTerm)
        throw SchemaError("six-term sequence needs exactly 6 nodes and 6 maps");
    ktheory::SixTermSequence seq;
    const auto& nl = ktheory::default_node_labels();
    const auto& ml = ktheory::default_map_labels();
    for (std::size_t i = 0; i < ktheory::kSixTerm; ++i) {
        const json& n = j.at("nodes")[i];
        std::string label = n.value("label", std::string(nl[i]));
        if (n.contains("known"))
            seq.nodes[i] = ktheory::Node::known(group_from_json(n.at("known")), label);
        else if (n.contains("unknown"))
            seq.nodes[i] = ktheory::Node::unknown(n.at("unknown").is_string() ? n.at("unknown").get<std::string>() : label);
        else
            throw SchemaError("node " + std::to_string(i) + " must be {\"known\":...} or {\"unknown\":...}");
    }
    for (std::size_t i = 0; i < ktheory::kSixTerm; ++i) {
        const json& m = j.at("maps")[i];
        std::string label = m.value("label", std::string(ml[i]));
        if (m.contains("matrix")) {
            const auto& dom = seq.nodes[i].group;
            seq.maps[i] = ktheory::MapEntry::known(matrix_from_json(m.at("matrix"), dom ? dom->generator_count() : 0), label);
        } else if (m.value("zero", false)) {
            seq.maps[i] = ktheory::MapEntry::zero(label);
        } else if (m.value("unknown", false)) {
            seq.maps[i] = ktheory::MapEntry::unknown(label);
        } else {
            throw SchemaError("map " + std::to_string(i) + " must be {\"matrix\":...}, {\"zero\":true} or {\"unknown\":true}");
        }
    }
    return seq;
}

inline json to_json(const ktheory::NodeSolution& s) {
    json out = {{"node", s.node}, {"label", s.label}};
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ktheory::Determined>) {
                out["status"] = "determined";
                out["group"] = to_json(r.group);
                out["display"] = r.group.to_string();
            } else if constexpr (std::is_same_v<T, ktheory::SplitAssumed>) {
                out["status"] = "split-assumed";
                out["group"] = to_json(r.group);
                out["display"] = r.group.to_string();
            } else if constexpr (std::is_same_v<T, ktheory::Ambiguous>) {
                out["status"] = "ambiguous";
                out["subgroup"] = to_json(r.subgroup);
                out["quotient"] = to_json(r.quotient);
            } else {
                out["status"] = "unconstrained";
                out["subgroup"] = r.subgroup ? to_json(*r.subgroup) : json(nullptr);
                out["quotient"] = r.quotient ? to_json(*r.quotient) : json(nullptr);
                out["blocking_maps"] = r.blocking_maps;
            }
            out["note"] = r.note;
        },
        s.result);
    return out;
}

inline json to_json(const ktheory::SequenceSolution& s) {
    json unknowns = json::array();
    for (const auto& u : s.unknowns) unknowns.push_back(to_json(u));
    return {{"unknowns", unknowns},
            {"fully_determined", s.fully_determined()},
            {"consistent", s.consistent ? json(*s.consistent) : json(nullptr)},
            {"inexact_at", s.inexact_at},
            {"forced_zero_maps", s.forced_zero_maps}};
}

inline json to_json(const ktheory::KPair& k) { return {{"k0", to_json(k.k0)}, {"k1", to_json(k.k1)}}; }

// --- sphere / ratmap -------------------------------------------------------

inline json to_json(const SpherePoint& p) {
    if (p.is_infinity()) return "inf";
    const Complex z = p.value();
    return {{"re", z.real()}, {"im", z.imag()}};
}

inline SpherePoint point_from_json(const json& j) {
    if (j.is_string()) {
        try {
            return parse_sphere_point(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw SchemaError(e.what());
        }
    }
    if (j.is_object() && j.contains("re") && j.contains("im"))
        return SpherePoint::finite({j.at("re").get<double>(), j.at("im").get<double>()});
    throw SchemaError("point must be \"inf\" or {\"re\":..,\"im\":..}");
}

inline json points_to_json(const std::vector<SpherePoint>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back(to_json(p));
    return a;
}

inline std::vector<SpherePoint> points_from_json(const json& j) {
    std::vector<SpherePoint> out;
    for (const auto& e : j) out.push_back(point_from_json(e));
    return out;
}

inline json to_json(const ratmap::BranchData& bd) {
    json crit = json::array();
    for (const auto& c : bd.critical_points) crit.push_back({{"point", to_json(c.point)}, {"local_degree", c.local_degree}});
    json out = {{"degree", bd.degree},
                {"critical_points", crit},
                {"critical_values", points_to_json(bd.critical_values)},
                {"upstairs_branch", points_to_json(bd.upstairs_branch)},
                {"infinity_local_degree", bd.infinity_local_degree},
                {"riemann_hurwitz_sum", bd.riemann_hurwitz_sum}};
    if (bd.postcritical)
        out["postcritical_set"] = {{"points", points_to_json(bd.postcritical->points)},
                                   {"finite", bd.postcritical->finite}};
    else
        out["postcritical_set"] = nullptr;
    return out;
}

inline ratmap::BranchData branch_data_from_json(const json& j) {
    check_schema(j);
    ratmap::BranchData bd;
    bd.degree = j.at("degree").get<int>();
    for (const auto& c : j.at("critical_points"))
        bd.critical_points.push_back({point_from_json(c.at("point")), c.at("local_degree").get<int>()});
    bd.critical_values = points_from_json(j.at("critical_values"));
    bd.upstairs_branch = points_from_json(j.at("upstairs_branch"));
    bd.infinity_local_degree = j.at("infinity_local_degree").get<int>();
    bd.riemann_hurwitz_sum = j.at("riemann_hurwitz_sum").get<int>();
    if (j.contains("postcritical_set") && !j.at("postcritical_set").is_null()) {
        const auto& pc = j.at("postcritical_set");
        bd.postcritical = ratmap::PostcriticalSet{points_from_json(pc.at("points")), pc.at("finite").get<bool>()};
    }
    return bd;
}

inline json to_json(const ratmap::OrbitRecord& o) {
    return {{"points", points_to_json(o.points)},
            {"cycle_entry", o.cycle_entry ? json(*o.cycle_entry) : json(nullptr)},
            {"cycle_length", o.cycle_length},
            {"finite", o.finite},
            {"converged_to_infinity", o.converged_to_infinity}};
}

inline json to_json(const std::vector<ratmap::FiberPoint>& f) {
    json a = json::array();
    for (const auto& p : f) a.push_back({{"point", to_json(p.point)}, {"multiplicity", p.multiplicity}});
    return a;
}

// --- plcover ---------------------------------------------------------------

inline json to_json(const plcover::RationalSet& s) {
    json a = json::array();
    for (const auto& r : s) a.push_back(plcover::to_string(r));
    return a;
}

inline json to_json(const plcover::PLMap& m) {
    json xs = json::array(), ys = json::array();
    for (const auto& x : m.breakpoints()) xs.push_back(plcover::to_string(x));
    for (const auto& y : m.values()) ys.push_back(plcover::to_string(y));
    return {{"breakpoints", xs}, {"values", ys}};
}

inline plcover::Rational rational_from_json(const json& j) {
    try {
        if (j.is_string()) return plcover::parse_rational(j.get<std::string>());
        if (j.is_number_integer()) return plcover::Rational(j.get<long long>());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    throw SchemaError("rational must be a \"p/q\" string or an integer, got " + j.dump());
}

inline plcover::PLMap plmap_from_json(const json& j) {
    check_schema(j);
    if (!j.contains("breakpoints") || !j.contains("values"))
        throw SchemaError("PL map needs \"breakpoints\" and \"values\"");
    std::vector<plcover::Rational> xs, ys;
    for (const auto& x : j.at("breakpoints")) xs.push_back(rational_from_json(x));
    for (const auto& y : j.at("values")) ys.push_back(rational_from_json(y));
    return plcover::PLMap(std::move(xs), std::move(ys));
}

inline json to_json(const plcover::ClassProfile& p) {
    return {{"point", plcover::to_string(p.point)},
            {"class_members", to_json(p.class_members)},
            {"class_size", p.class_size},
            {"generic_size", p.generic_size},
            {"multiplicity", p.integral ? json(p.multiplicity) : json(nullptr)},
            {"integral", p.integral}};
}

inline json to_json(const plcover::ConstraintProfile& p) {
    json ex = json::array(), irr = json::array();
    for (const auto& c : p.exceptional) ex.push_back(to_json(c));
    for (const auto& r : p.irregular) irr.push_back(plcover::to_string(r));
    return {{"level", p.level}, {"generic_size", p.generic_size}, {"exceptional", ex}, {"irregular", irr}};
}

inline json to_json(const plcover::FreenessResult& r) {
    json w = nullptr;
    if (r.witness)
        w = {{"m", r.witness->m},
             {"n", r.witness->n},
             {"lo", plcover::to_string(r.witness->lo)},
             {"hi", plcover::to_string(r.witness->hi)}};
    return {{"essentially_free", r.essentially_free}, {"witness", w}};
}

// --- finmodel --------------------------------------------------------------

inline json to_json(const finmodel::FiniteDynSys& s) {
    json map = json::object();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (auto n = s.next(i)) map[s.label(i)] = s.label(*n);
    return {{"points", s.labels()}, {"map", map}};
}

inline finmodel::FiniteDynSys finite_model_from_json(const json& j) {
    check_schema(j);
    if (!j.contains("points") || !j.at("points").is_array()) throw SchemaError("finite model needs a \"points\" array");
    std::map<std::string, std::string> map;
    if (j.contains("map")) {
        if (!j.at("map").is_object()) throw SchemaError("\"map\" must be an object");
        for (auto it = j.at("map").begin(); it != j.at("map").end(); ++it) map[it.key()] = it.value().get<std::string>();
    }
    try {
        return finmodel::FiniteDynSys(j.at("points").get<std::vector<std::string>>(), map);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
}

inline json labels_json(const finmodel::FiniteDynSys& s, const std::vector<std::size_t>& idx) {
    json a = json::array();
    for (auto i : idx) a.push_back(s.label(i));
    return a;
}

inline json to_json(const finmodel::FiniteDynSys& s, const finmodel::Partition& p) {
    json cls = json::array();
    for (const auto& c : p.classes) cls.push_back(labels_json(s, c));
    return {{"classes", cls}, {"closure_applied", p.closure_applied}};
}

inline json to_json(const finmodel::FiniteDynSys& s, const finmodel::BratteliDiagram& b) {
    json levels = json::array(), edges = json::array();
    for (std::size_t n = 0; n < b.levels.size(); ++n) {
        json vs = json::array();
        for (const auto& v : b.levels[n]) vs.push_back({{"members", labels_json(s, v.members)}, {"size", v.size()}});
        levels.push_back({{"level", n},
                          {"vertices", vs},
                          {"total_dimension", b.total_dimension(n)},
                          {"closure_applied", static_cast<bool>(b.closure_applied[n])}});
    }
    for (std::size_t n = 0; n < b.edges.size(); ++n)
        for (const auto& e : b.edges[n])
            edges.push_back({{"level", n}, {"from", e.from}, {"to", e.to}, {"multiplicity", e.multiplicity}});
    return {{"levels", levels}, {"edges", edges}};
}

}  // namespace bcov::io
