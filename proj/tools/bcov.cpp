// bcov: command-line front end.
//
// Exit codes: 0 success, 1 computation failure (or a failed example check),
// 2 usage error (bad arguments, unreadable or malformed input).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bcov/bcov.hpp"
#include "bcov/io.hpp"
#include "bcov/report.hpp"

namespace {

using bcov::io::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    bool json = false;
    double tol = 0.0;  // 0: keep the default orbit tolerance
    std::uint64_t seed = 0;

    bcov::Tolerances tolerances() const {
        bcov::Tolerances t;
        if (tol > 0.0) t.orbit = tol;
        return t;
    }
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void emit(const json& body) { std::cout << bcov::io::document(body).dump(2) << "\n"; }

std::string describe(const bcov::ktheory::NodeSolution& u) {
    using namespace bcov::ktheory;
    std::ostringstream os;
    os << u.label << " = ";
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Determined>)
                os << r.group;
            else if constexpr (std::is_same_v<T, SplitAssumed>)
                os << r.group << "  (split extension assumed)";
            else if constexpr (std::is_same_v<T, Ambiguous>)
                os << "ambiguous extension of " << r.quotient << " by " << r.subgroup;
            else {
                os << "not determined";
                if (r.subgroup) os << "; subgroup " << *r.subgroup;
                if (r.quotient) os << "; quotient " << *r.quotient;
                if (!r.blocking_maps.empty()) {
                    os << "; needs map";
                    for (auto m : r.blocking_maps) os << ' ' << m;
                }
            }
            if (!r.note.empty()) os << "\n    " << r.note;
        },
        u.result);
    return os.str();
}

void print_sequence(const bcov::ktheory::SixTermSequence& seq) {
    for (std::size_t i = 0; i < bcov::ktheory::kSixTerm; ++i) {
        const auto& n = seq.nodes[i];
        std::cout << "  node " << i << " " << n.label << ": " << (n.is_known() ? n.group->to_string() : "?") << "\n";
    }
    for (std::size_t i = 0; i < bcov::ktheory::kSixTerm; ++i) {
        const auto& m = seq.maps[i];
        std::cout << "  map " << i << " " << m.label << ": ";
        switch (m.kind) {
            case bcov::ktheory::MapEntry::Kind::Known: std::cout << m.matrix->to_string(); break;
            case bcov::ktheory::MapEntry::Kind::Zero: std::cout << "0"; break;
            case bcov::ktheory::MapEntry::Kind::Unknown: std::cout << "?"; break;
        }
        std::cout << "\n";
    }
}

int solve_and_print(const Globals& g, const bcov::ktheory::SixTermSequence& seq, bool assume_split) {
    const auto sol = bcov::ktheory::solve_six_term(seq, {assume_split});
    if (g.json) {
        emit({{"sequence", bcov::io::to_json(seq)}, {"solution", bcov::io::to_json(sol)}});
        return 0;
    }
    print_sequence(seq);
    if (!sol.forced_zero_maps.empty()) {
        std::cout << "forced zero maps:";
        for (auto m : sol.forced_zero_maps) std::cout << ' ' << m;
        std::cout << "\n";
    }
    for (const auto& u : sol.unknowns) std::cout << describe(u) << "\n";
    if (sol.consistent) std::cout << "sequence " << (*sol.consistent ? "is" : "is NOT") << " exact\n";
    if (!sol.fully_determined()) std::cout << "sequence is underdetermined\n";
    return 0;
}

bcov::plcover::PLMap load_plmap(const std::string& name, const std::string& file) {
    if (!file.empty()) return bcov::io::plmap_from_json(read_json_file(file));
    if (name == "fold") return bcov::plcover::PLMap::fold();
    throw UsageError("unknown map '" + name + "' (use fold or --file)");
}

std::string points_text(const std::vector<bcov::SpherePoint>& ps) {
    std::string s;
    for (const auto& p : ps) s += "  " + p.to_string() + "\n";
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branched coverings: K-theory, branch data and orbit structure"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_flag("--json", g.json, "emit JSON");
    app.add_option("--tol", g.tol, "orbit matching tolerance for ratmap commands")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "seed for sphere sampling (0 = canonical lattice)");

    int status = 0;

    // ktheory -----------------------------------------------------------------
    auto* kt = app.add_subcommand("ktheory", "six-term exact sequences")->require_subcommand(1);
    std::string kt_file;
    bool assume_split = false;
    auto* kt_solve = kt->add_subcommand("solve", "solve a six-term sequence given as JSON");
    kt_solve->add_option("file", kt_file, "sequence JSON")->required();
    kt_solve->add_flag("--assume-split", assume_split, "take the direct sum where the extension is not unique");
    kt_solve->callback([&] { status = solve_and_print(g, bcov::io::sequence_from_json(read_json_file(kt_file)), assume_split); });

    std::string kt_example;
    auto* kt_ex = kt->add_subcommand("example", "built-in sequence");
    kt_ex->add_option("id", kt_example, "folding, circle or lattes")
        ->required()
        ->check(CLI::IsMember({"folding", "circle", "lattes"}));
    kt_ex->callback([&] {
        using namespace bcov::ktheory;
        const auto seq = kt_example == "folding" ? folding_sequence()
                         : kt_example == "circle" ? circle_sequence()
                                                  : lattes_sequence();
        status = solve_and_print(g, seq, assume_split);
    });

    std::string kt_space;
    auto* kt_ks = kt->add_subcommand("kspace", "K-groups of a catalog space");
    kt_ks->add_option("descriptor", kt_space, "e.g. circle, sphere2-minus(9), union(half-open,open)")->required();
    kt_ks->callback([&] {
        const auto sp = bcov::ktheory::parse_space(kt_space);
        const auto k = bcov::ktheory::k_groups(sp);
        if (g.json)
            emit({{"space", sp.to_string()}, {"k0", bcov::io::to_json(k.k0)}, {"k1", bcov::io::to_json(k.k1)}});
        else
            std::cout << sp.to_string() << ": K0 = " << k.k0 << ", K1 = " << k.k1 << "\n";
    });

    // ratmap ------------------------------------------------------------------
    auto* rm = app.add_subcommand("ratmap", "rational maps of the Riemann sphere")->require_subcommand(1);
    std::string expr, from = "2", at = "0";
    std::size_t steps = 20, depth = 5, fiber_n = 1;
    double eps = 0.25;

    auto* rm_an = rm->add_subcommand("analyze", "critical points, branch sets, postcritical set");
    rm_an->add_option("expr", expr, "rational expression in z")->required();
    rm_an->add_option("--steps", steps, "iterations for the postcritical orbit search")->capture_default_str();
    rm_an->callback([&] {
        const auto tol = g.tolerances();
        const auto q = bcov::ratmap::parse_rational_map(expr, tol);
        const auto bd = bcov::ratmap::analyze(q, steps, tol);
        if (g.json) {
            auto j = bcov::io::to_json(bd);
            j["map"] = q.to_string();
            emit(j);
            return;
        }
        std::cout << "map: " << q.to_string() << "\ndegree: " << bd.degree << "\ncritical points:\n";
        for (const auto& c : bd.critical_points) std::cout << "  " << c.point.to_string() << "  e=" << c.local_degree << "\n";
        std::cout << "critical values:\n" << points_text(bd.critical_values);
        std::cout << "upstairs branch set (" << bd.upstairs_branch.size() << " points):\n" << points_text(bd.upstairs_branch);
        std::cout << "Riemann-Hurwitz sum: " << bd.riemann_hurwitz_sum << " (2d-2 = " << 2 * bd.degree - 2 << ")\n";
        if (bd.postcritical)
            std::cout << "postcritical set (" << (bd.postcritical->finite ? "finite" : "not found finite") << " within "
                      << steps << " steps):\n"
                      << points_text(bd.postcritical->points);
    });

    auto* rm_orb = rm->add_subcommand("orbit", "forward orbit of a point");
    rm_orb->add_option("expr", expr)->required();
    rm_orb->add_option("--from", from, "start point, a+bi or inf")->required();
    rm_orb->add_option("--steps", steps)->capture_default_str();
    rm_orb->callback([&] {
        const auto tol = g.tolerances();
        const auto q = bcov::ratmap::parse_rational_map(expr, tol);
        const auto o = bcov::ratmap::forward_orbit(q, bcov::parse_sphere_point(from), steps, tol.orbit, tol);
        if (g.json) return emit(bcov::io::to_json(o));
        std::cout << points_text(o.points);
        if (o.finite)
            std::cout << "finite: enters a cycle of length " << o.cycle_length << " at index " << *o.cycle_entry << "\n";
        else if (o.converged_to_infinity)
            std::cout << "not finite: converges to inf\n";
        else
            std::cout << "no return within " << steps << " steps\n";
    });

    auto* rm_den = rm->add_subcommand("density", "covering radius of a backward tree (heuristic)");
    rm_den->add_option("expr", expr)->required();
    rm_den->add_option("--from", from, "root of the backward tree")->capture_default_str();
    rm_den->add_option("--depth", depth)->capture_default_str();
    rm_den->add_option("--eps", eps, "pass bound on the covering radius")->capture_default_str();
    rm_den->callback([&] {
        const auto tol = g.tolerances();
        const auto q = bcov::ratmap::parse_rational_map(expr, tol);
        const auto d = bcov::ratmap::backward_density_check(q, bcov::parse_sphere_point(from), depth, eps, g.seed, tol);
        if (g.json)
            return emit({{"heuristic", true},
                         {"covering_radius", d.covering_radius},
                         {"point_count", d.point_count},
                         {"passed", d.passed}});
        std::cout << "HEURISTIC EVIDENCE: " << d.point_count << " points, covering radius " << d.covering_radius
                  << (d.passed ? " <= " : " > ") << eps << "\n";
    });

    auto* rm_fib = rm->add_subcommand("fiber", "preimages of a point");
    rm_fib->add_option("expr", expr)->required();
    rm_fib->add_option("--at", at, "target point")->required();
    rm_fib->add_option("--n", fiber_n, "iterate")->capture_default_str()->check(CLI::PositiveNumber);
    rm_fib->callback([&] {
        const auto tol = g.tolerances();
        const auto q = bcov::ratmap::parse_rational_map(expr, tol);
        const auto f = bcov::ratmap::iterated_fiber(q, bcov::parse_sphere_point(at), fiber_n, tol);
        if (g.json) return emit({{"fiber", bcov::io::to_json(f)}});
        for (const auto& p : f) std::cout << "  " << p.point.to_string() << "  multiplicity " << p.multiplicity << "\n";
    });

    std::string center = "0.3+0.2i";
    double radius = 0.1;
    std::size_t max_n = 12;
    auto* rm_exp = rm->add_subcommand("expansion", "iterate a small cap until it is 0.1-dense (heuristic)");
    rm_exp->add_option("expr", expr)->required();
    rm_exp->add_option("--center", center)->capture_default_str();
    rm_exp->add_option("--radius", radius)->capture_default_str()->check(CLI::PositiveNumber);
    rm_exp->add_option("--max-n", max_n)->capture_default_str();
    rm_exp->callback([&] {
        const auto q = bcov::ratmap::parse_rational_map(expr, g.tolerances());
        const auto e = bcov::ratmap::expansion_check(q, {bcov::parse_sphere_point(center), radius}, max_n, g.seed);
        if (g.json) return emit({{"heuristic", true}, {"n_found", e.n_found}, {"covered", e.covered}});
        std::cout << "HEURISTIC EVIDENCE: " << (e.covered ? "covered at n = " : "not covered by n = ") << e.n_found << "\n";
    });

    // plmap -------------------------------------------------------------------
    auto* pl = app.add_subcommand("plmap", "piecewise-linear interval maps (exact)")->require_subcommand(1);
    std::string map_name = "fold", map_file, pl_from = "0";
    std::size_t level = 1, pl_depth = 4, pl_max = 4;
    auto add_map_opts = [&](CLI::App* c) {
        c->add_option("--map", map_name, "built-in map")->capture_default_str();
        c->add_option("--file", map_file, "PL map JSON");
    };

    auto* pl_prof = pl->add_subcommand("profile", "constraint profile of C*(R_N)");
    add_map_opts(pl_prof);
    pl_prof->add_option("--level", level)->required();
    pl_prof->callback([&] {
        const auto p = bcov::plcover::constraint_profile(load_plmap(map_name, map_file), level);
        if (g.json) return emit(bcov::io::to_json(p));
        std::cout << "level " << p.level << ", generic class size " << p.generic_size << "\n";
        for (const auto& c : p.exceptional)
            std::cout << "  " << c.point << ": class size " << c.class_size << ", multiplicity "
                      << (c.integral ? std::to_string(c.multiplicity) : std::string("non-integral")) << "  class "
                      << bcov::plcover::to_string(c.class_members) << "\n";
        if (!p.irregular.empty()) std::cout << "  warning: class size not constant between exceptional points\n";
    });

    auto* pl_orb = pl->add_subcommand("orbit", "groupoid orbit of a rational point");
    add_map_opts(pl_orb);
    pl_orb->add_option("--from", pl_from, "p/q")->capture_default_str();
    pl_orb->add_option("--depth", pl_depth)->capture_default_str();
    pl_orb->callback([&] {
        const auto o = bcov::plcover::groupoid_orbit(load_plmap(map_name, map_file),
                                                     bcov::plcover::parse_rational(pl_from), pl_depth);
        if (g.json) return emit({{"orbit", bcov::io::to_json(o)}, {"size", o.size()}});
        std::cout << bcov::plcover::to_string(o) << "\n";
    });

    auto* pl_free = pl->add_subcommand("free", "essential freeness up to (max, max-1)");
    add_map_opts(pl_free);
    pl_free->add_option("--max", pl_max)->capture_default_str()->check(CLI::Range(1, 12));
    pl_free->callback([&] {
        const auto r = bcov::plcover::essential_freeness(load_plmap(map_name, map_file), pl_max, pl_max - 1);
        if (g.json) return emit(bcov::io::to_json(r));
        if (r.essentially_free)
            std::cout << "essentially free up to (" << pl_max << "," << pl_max - 1 << ")\n";
        else
            std::cout << "not essentially free: T^" << r.witness->m << " = T^" << r.witness->n << " on ("
                      << r.witness->lo << ", " << r.witness->hi << ")\n";
        if (!r.essentially_free) status = 1;
    });

    // finmodel ----------------------------------------------------------------
    auto* fm = app.add_subcommand("finmodel", "finite models")->require_subcommand(1);
    std::string fm_file;
    std::size_t fm_level = 1, fm_levels = 3, fm_max = 4;
    bool dot = false;

    auto* fm_cls = fm->add_subcommand("classes", "R_N classes");
    fm_cls->add_option("file", fm_file)->required();
    fm_cls->add_option("--level", fm_level)->capture_default_str();
    fm_cls->callback([&] {
        const auto s = bcov::io::finite_model_from_json(read_json_file(fm_file));
        const auto p = bcov::finmodel::rn_classes(s, fm_level);
        if (g.json) {
            auto j = bcov::io::to_json(s, p);
            j["level"] = fm_level;
            return emit(j);
        }
        for (const auto& c : p.classes) {
            std::cout << " ";
            for (auto i : c) std::cout << ' ' << s.label(i);
            std::cout << "\n";
        }
        if (p.closure_applied) std::cout << "note: transitive closure was needed\n";
    });

    auto* fm_br = fm->add_subcommand("bratteli", "Bratteli diagram of the R_N tower");
    fm_br->add_option("file", fm_file)->required();
    fm_br->add_option("--levels", fm_levels)->capture_default_str()->check(CLI::PositiveNumber);
    fm_br->add_flag("--dot", dot, "emit Graphviz DOT text");
    fm_br->callback([&] {
        const auto s = bcov::io::finite_model_from_json(read_json_file(fm_file));
        const auto b = bcov::finmodel::bratteli(s, fm_levels);
        if (g.json) {
            auto j = bcov::io::to_json(s, b);
            j["dot"] = bcov::finmodel::bratteli_dot(s, b);
            return emit(j);
        }
        if (dot) {
            std::cout << bcov::finmodel::bratteli_dot(s, b);
            return;
        }
        for (std::size_t n = 0; n < b.levels.size(); ++n) {
            std::cout << "level " << n << ":";
            for (const auto& v : b.levels[n]) std::cout << ' ' << v.size();
            std::cout << "  (total dimension " << b.total_dimension(n) << ")\n";
        }
    });

    auto* fm_orb = fm->add_subcommand("orbits", "orbits, minimality and freeness diagnostics");
    fm_orb->add_option("file", fm_file)->required();
    fm_orb->add_option("--max", fm_max)->capture_default_str()->check(CLI::PositiveNumber);
    fm_orb->callback([&] {
        const auto s = bcov::io::finite_model_from_json(read_json_file(fm_file));
        const auto mr = bcov::finmodel::minimality_report(s, fm_max);
        const auto viol = bcov::finmodel::essential_freeness_check(s, fm_max);
        if (g.json) {
            json orbits = json::object(), v = json::array();
            for (std::size_t x = 0; x < s.size(); ++x)
                orbits[s.label(x)] = bcov::io::labels_json(s, bcov::finmodel::orbit(s, x, fm_max));
            for (const auto& f : viol) v.push_back({{"point", s.label(f.x)}, {"m", f.m}, {"n", f.n}});
            return emit({{"orbits", orbits},
                         {"minimal", mr.minimal},
                         {"freeness_violations", v},
                         {"caveat", bcov::finmodel::kFiniteModelCaveat}});
        }
        for (std::size_t x = 0; x < s.size(); ++x) {
            std::cout << s.label(x) << ":";
            for (auto y : bcov::finmodel::orbit(s, x, fm_max)) std::cout << ' ' << s.label(y);
            std::cout << "\n";
        }
        std::cout << (mr.minimal ? "every orbit is the whole model\n" : "not minimal\n");
        for (const auto& f : viol) std::cout << "T^" << f.m << " = T^" << f.n << " at " << s.label(f.x) << "\n";
        std::cout << "caveat: " << bcov::finmodel::kFiniteModelCaveat << "\n";
    });

    // example -----------------------------------------------------------------
    std::string ex_id;
    auto* ex = app.add_subcommand("example", "reproduce a worked example with checks");
    ex->add_option("id", ex_id, "folding, circle or lattes")
        ->required()
        ->check(CLI::IsMember({"folding", "circle", "lattes"}));
    ex->callback([&] {
        bcov::report::ExampleOptions opt;
        opt.seed = g.seed;
        opt.tolerances = g.tolerances();
        const auto r = bcov::report::run_example(ex_id, opt);
        if (g.json)
            std::cout << bcov::report::to_json(r).dump(2) << "\n";
        else
            std::cout << bcov::report::render_text(r);
        if (!r.passed()) status = 1;
    });

    // snf ---------------------------------------------------------------------
    std::string matrix_text;
    auto* snf = app.add_subcommand("snf", "Smith normal form u*m*v = d");
    snf->add_option("--matrix", matrix_text, "e.g. [[6,4],[4,6]]")->required();
    snf->callback([&] {
        json mj;
        try {
            mj = json::parse(matrix_text);
        } catch (const json::parse_error& e) {
            throw UsageError(std::string("--matrix: ") + e.what());
        }
        const auto s = bcov::smith_normal_form(bcov::io::matrix_from_json(mj));
        if (g.json) return emit(bcov::io::to_json(s));
        std::cout << "diag(";
        for (std::size_t i = 0; i < std::min(s.d.rows(), s.d.cols()); ++i) std::cout << (i ? "," : "") << s.d(i, i);
        std::cout << ")\nu = " << s.u << "\nd = " << s.d << "\nv = " << s.v << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return 1;
    }
    return status;
}
