#pragma once

// Reproduction of the three worked examples (folding map, circle doubling
// style covering, Lattès map) as checked reports.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcov/io.hpp"

namespace bcov::report {

struct ExpectedValue {
    const char* key;
    const char* expected;
    const char* reference;  // where the value comes from
};

// The single table of expected values. Entries are compared against
// computed renderings in run_example.
inline constexpr ExpectedValue kExpected[] = {
    {"folding.k0", "Z^2", "folding map on [0,1]: K0 of the covering algebra"},
    {"folding.k1", "0", "folding map on [0,1]: K1 of the covering algebra"},
    {"folding.profile1", "{1/2:(1,2)}", "folding map, R_1 constraints: f(1/2) scalar with multiplicity 2"},
    {"folding.generic1", "2", "folding map, generic R_1 class size"},
    {"folding.profile2", "{0:(2,2), 1/4:(2,2), 1/2:(1,4), 3/4:(2,2), 1:(2,2)}",
     "folding map, R_2 constraints: 2x2 blocks twice at 0, 1/4, 3/4, 1; scalar four times at 1/2"},
    {"folding.generic2", "4", "folding map, generic R_2 class size"},
    {"folding.orbit0", "{0, 1}", "folding map: groupoid orbit of 0"},
    {"folding.free", "essentially free up to (4,3)", "folding map: no two iterates agree on an open set"},
    {"circle.k0", "Z^2", "circle covering: K0 of the covering algebra"},
    {"circle.k1", "Z", "circle covering: K1 of the covering algebra"},
    {"lattes.degree", "4", "Lattes map (z^2+1)^2/(4z(z^2-1)) has degree 4"},
    {"lattes.critical_points", "{i, -i, 1+sqrt2, -1-sqrt2, sqrt2-1, 1-sqrt2}",
     "Lattes map: nonsingular set is the sphere minus these six points"},
    {"lattes.critical_values", "{0, 1, -1}", "Lattes map: image of the nonsingular set misses 0, 1, -1"},
    {"lattes.riemann_hurwitz", "6", "degree 4 self-map of the sphere: sum (e-1) = 2*4-2"},
    {"lattes.postcritical", "{0, 1, -1, inf} finite", "Lattes map: forward orbits of critical points are finite"},
    {"lattes.k1_ideal", "Z^8", "Lattes map: K1 of C0 of the sphere minus the nine branch points"},
    {"lattes.sequence", "underdetermined", "Lattes map: the six-term diagram is left unsolved"},
};

inline const ExpectedValue& expected(const std::string& key) {
    for (const auto& e : kExpected)
        if (key == e.key) return e;
    throw std::out_of_range("no expected value '" + key + "'");
}

struct Check {
    std::string key;
    std::string expected;
    std::string computed;
    std::string reference;
    bool matched = false;
};

struct Heuristic {
    std::string name;
    std::string detail;
    bool passed = false;
};

struct ExampleOptions {
    std::uint64_t seed = 0;
    Tolerances tolerances{};
    std::size_t density_depth = 5;
    double density_epsilon = 0.25;
    std::size_t expansion_max_n = 12;
};

struct ExampleReport {
    std::string id;
    std::vector<Check> checks;
    std::vector<Heuristic> heuristics;  // sampling evidence, not proofs
    io::json artifacts = io::json::object();
    std::vector<std::string> notes;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.matched) return false;
        for (const auto& h : heuristics)
            if (!h.passed) return false;
        return true;
    }
};

namespace detail {

inline void add_check(ExampleReport& r, const std::string& key, const std::string& computed) {
    const auto& e = expected(key);
    r.checks.push_back({key, e.expected, computed, e.reference, computed == e.expected});
}

inline void add_check(ExampleReport& r, const std::string& key, const std::string& computed, bool matched) {
    const auto& e = expected(key);
    r.checks.push_back({key, e.expected, computed, e.reference, matched});
}

inline std::string render_profile(const plcover::ConstraintProfile& p) {
    std::string s = "{";
    for (std::size_t i = 0; i < p.exceptional.size(); ++i) {
        const auto& c = p.exceptional[i];
        if (i) s += ", ";
        s += plcover::to_string(c.point) + ":(" + std::to_string(c.class_size) + "," +
             (c.integral ? std::to_string(c.multiplicity) : std::string("?")) + ")";
    }
    return s + "}";
}

inline std::string render_points(const std::vector<SpherePoint>& ps) {
    std::string s = "{";
    for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? ", " : "") + ps[i].to_string(12);
    return s + "}";
}

/// Every expected point has a computed point within tol, and counts agree.
inline bool same_point_set(const std::vector<SpherePoint>& computed, const std::vector<SpherePoint>& want, double tol) {
    if (computed.size() != want.size()) return false;
    for (const auto& w : want) {
        bool hit = false;
        for (const auto& c : computed) hit = hit || chordal(c, w) <= tol;
        if (!hit) return false;
    }
    return true;
}

inline std::string node_display(const ktheory::SequenceSolution& s, std::size_t node) {
    const auto* u = s.find(node);
    if (!u) return "(known)";
    if (const auto* d = std::get_if<ktheory::Determined>(&u->result)) return d->group.to_string();
    if (const auto* d = std::get_if<ktheory::SplitAssumed>(&u->result)) return d->group.to_string() + " (split assumed)";
    if (std::holds_alternative<ktheory::Ambiguous>(u->result)) return "ambiguous";
    return "unconstrained";
}

inline void folding(ExampleReport& r, const ExampleOptions&) {
    const auto sol = ktheory::solve_six_term(ktheory::folding_sequence());
    r.artifacts["sequence"] = io::to_json(ktheory::folding_sequence());
    r.artifacts["solution"] = io::to_json(sol);
    add_check(r, "folding.k0", node_display(sol, 2));
    add_check(r, "folding.k1", node_display(sol, 5));

    const auto fold = plcover::PLMap::fold();
    r.artifacts["map"] = io::to_json(fold);
    for (std::size_t n : {1u, 2u}) {
        const auto p = plcover::constraint_profile(fold, n);
        r.artifacts["profile" + std::to_string(n)] = io::to_json(p);
        add_check(r, "folding.profile" + std::to_string(n), render_profile(p));
        add_check(r, "folding.generic" + std::to_string(n), std::to_string(p.generic_size));
    }
    const auto orbit = plcover::groupoid_orbit(fold, 0, 4);
    r.artifacts["orbit0"] = io::to_json(orbit);
    add_check(r, "folding.orbit0", plcover::to_string(orbit));
    const auto free = plcover::essential_freeness(fold, 4, 3);
    r.artifacts["freeness"] = io::to_json(free);
    add_check(r, "folding.free", free.essentially_free ? "essentially free up to (4,3)" : "not essentially free");
}

inline void circle(ExampleReport& r, const ExampleOptions&) {
    const auto seq = ktheory::circle_sequence();
    const auto sol = ktheory::solve_six_term(seq);
    r.artifacts["sequence"] = io::to_json(seq);
    r.artifacts["solution"] = io::to_json(sol);
    add_check(r, "circle.k0", node_display(sol, 2));
    add_check(r, "circle.k1", node_display(sol, 5));
    r.notes.push_back("map 3 (K1(I) -> K1(A)) is supplied as the zero map");
}

inline void lattes(ExampleReport& r, const ExampleOptions& opt) {
    const auto& tol = opt.tolerances;
    const auto q = ratmap::lattes_map();
    const auto bd = ratmap::analyze(q, 5, tol);
    r.artifacts["branch_data"] = io::to_json(bd);
    add_check(r, "lattes.degree", std::to_string(bd.degree));

    const double s2 = std::sqrt(2.0);
    const std::vector<SpherePoint> crit_want{SpherePoint::finite({0, 1}),     SpherePoint::finite({0, -1}),
                                             SpherePoint::finite(1 + s2),     SpherePoint::finite(-1 - s2),
                                             SpherePoint::finite(s2 - 1),     SpherePoint::finite(1 - s2)};
    std::vector<SpherePoint> crit;
    bool all_double = true;
    for (const auto& c : bd.critical_points) {
        crit.push_back(c.point);
        all_double = all_double && c.local_degree == 2;
    }
    add_check(r, "lattes.critical_points", render_points(crit) + (all_double ? " each e=2" : " (local degrees differ)"),
              all_double && same_point_set(crit, crit_want, 1e-9));
    add_check(r, "lattes.critical_values", render_points(bd.critical_values),
              same_point_set(bd.critical_values,
                             {SpherePoint::finite(0.0), SpherePoint::finite(1.0), SpherePoint::finite(-1.0)}, 1e-9));
    add_check(r, "lattes.riemann_hurwitz", std::to_string(bd.riemann_hurwitz_sum));
    const bool pc_ok = bd.postcritical && bd.postcritical->finite &&
                       same_point_set(bd.postcritical->points,
                                      {SpherePoint::finite(0.0), SpherePoint::finite(1.0), SpherePoint::finite(-1.0),
                                       SpherePoint::infinity()},
                                      1e-9);
    add_check(r, "lattes.postcritical",
              bd.postcritical ? render_points(bd.postcritical->points) + (bd.postcritical->finite ? " finite" : " not finite")
                              : "not computed",
              pc_ok);

    const auto seq = ktheory::lattes_sequence();
    add_check(r, "lattes.k1_ideal", seq.nodes[3].group->to_string());
    const auto sol = ktheory::solve_six_term(seq);
    r.artifacts["sequence"] = io::to_json(seq);
    r.artifacts["solution"] = io::to_json(sol);
    bool any_definite = false;
    for (const auto& u : sol.unknowns)
        any_definite = any_definite || std::holds_alternative<ktheory::Determined>(u.result) ||
                       std::holds_alternative<ktheory::SplitAssumed>(u.result);
    add_check(r, "lattes.sequence", any_definite ? "definite groups reported" : "underdetermined");
    r.notes.push_back("the map tensor(iota_I - [E]): K0(I) -> K0(A) is not supplied, so K0(O) and K1(O) stay open");

    const auto d = ratmap::backward_density_check(q, SpherePoint::finite(2.0), opt.density_depth, opt.density_epsilon,
                                                  opt.seed, tol);
    std::ostringstream dd;
    dd << "backward tree of 2 to depth " << opt.density_depth << ": " << d.point_count << " points, covering radius "
       << std::setprecision(6) << d.covering_radius << " against " << ratmap::kSphereSampleSize
       << " sample points (bound " << opt.density_epsilon << ")";
    r.heuristics.push_back({"backward orbit density", dd.str(), d.passed});
    r.artifacts["density"] = {{"covering_radius", d.covering_radius}, {"point_count", d.point_count}, {"passed", d.passed}};

    const SphericalCap cap{SpherePoint::finite({0.3, 0.2}), 0.1};
    const auto e = ratmap::expansion_check(q, cap, opt.expansion_max_n, opt.seed);
    std::ostringstream ed;
    ed << "cap of radius 0.1 about 0.3+0.2i: " << (e.covered ? "image 0.1-dense after n = " : "not dense within n = ")
       << e.n_found;
    r.heuristics.push_back({"expansion of a small cap", ed.str(), e.covered});
    r.artifacts["expansion"] = {{"n_found", e.n_found}, {"covered", e.covered}};
}

}  // namespace detail

inline constexpr const char* kExampleIds[] = {"folding", "circle", "lattes"};

inline ExampleReport run_example(const std::string& id, const ExampleOptions& opt = {}) {
    ExampleReport r;
    r.id = id;
    if (id == "folding")
        detail::folding(r, opt);
    else if (id == "circle")
        detail::circle(r, opt);
    else if (id == "lattes")
        detail::lattes(r, opt);
    else
        throw std::invalid_argument("unknown example '" + id + "' (expected folding, circle or lattes)");
    return r;
}

inline io::json to_json(const ExampleReport& r) {
    io::json checks = io::json::array(), heur = io::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"key", c.key},
                          {"expected", c.expected},
                          {"computed", c.computed},
                          {"reference", c.reference},
                          {"matched", c.matched}});
    for (const auto& h : r.heuristics)
        heur.push_back({{"name", h.name}, {"detail", h.detail}, {"passed", h.passed}});
    return io::document({{"example", r.id},
                         {"passed", r.passed()},
                         {"checks", checks},
                         {"heuristic_evidence", heur},
                         {"notes", r.notes},
                         {"artifacts", r.artifacts}});
}

inline std::string render_text(const ExampleReport& r) {
    std::ostringstream os;
    os << "example " << r.id << "\n";
    for (const auto& c : r.checks) {
        os << "  [" << (c.matched ? "match" : "MISMATCH") << "] " << c.key << "\n";
        os << "      expected: " << c.expected << "\n      computed: " << c.computed << "\n      (" << c.reference
           << ")\n";
    }
    if (!r.heuristics.empty()) {
        os << "  HEURISTIC EVIDENCE (finite sampling, not a proof)\n";
        for (const auto& h : r.heuristics)
            os << "  [" << (h.passed ? "pass" : "FAIL") << "] " << h.name << ": " << h.detail << "\n";
    }
    for (const auto& n : r.notes) os << "  note: " << n << "\n";
    os << (r.passed() ? "all checks matched" : "SOME CHECKS FAILED") << "\n";
    return os.str();
}

}  // namespace bcov::report
