#pragma once

// K-groups of the spaces that arise as X and U∩σ(U) for the coverings handled
// here, the cyclic six-term sequence of a Cuntz-Pimsner algebra, and a solver
// that fills in unknown nodes from exactness.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bcov/fgab.hpp"

namespace bcov::ktheory {

struct Space {
    enum class Kind {
        Point,
        ClosedInterval,
        HalfOpenInterval,
        OpenInterval,
        RealLine,
        Circle,
        Sphere2,
        Sphere2MinusPoints,
        DisjointUnion,
    };

    Kind kind = Kind::Point;
    std::size_t punctures = 0;  // Sphere2MinusPoints only
    std::vector<Space> parts;   // DisjointUnion only

    static Space point() { return {Kind::Point, 0, {}}; }
    static Space closed_interval() { return {Kind::ClosedInterval, 0, {}}; }
    static Space half_open_interval() { return {Kind::HalfOpenInterval, 0, {}}; }
    static Space open_interval() { return {Kind::OpenInterval, 0, {}}; }
    static Space real_line() { return {Kind::RealLine, 0, {}}; }
    static Space circle() { return {Kind::Circle, 0, {}}; }
    static Space sphere2() { return {Kind::Sphere2, 0, {}}; }
    static Space sphere2_minus(std::size_t n) {
        if (n == 0) throw std::invalid_argument("sphere2-minus: need at least one puncture (use sphere2)");
        return {Kind::Sphere2MinusPoints, n, {}};
    }
    static Space disjoint_union(std::vector<Space> parts) {
        if (parts.empty()) throw std::invalid_argument("union: needs at least one component");
        return {Kind::DisjointUnion, 0, std::move(parts)};
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::Point: return "point";
            case Kind::ClosedInterval: return "closed-interval";
            case Kind::HalfOpenInterval: return "half-open-interval";
            case Kind::OpenInterval: return "open-interval";
            case Kind::RealLine: return "real-line";
            case Kind::Circle: return "circle";
            case Kind::Sphere2: return "sphere2";
            case Kind::Sphere2MinusPoints: return "sphere2-minus(" + std::to_string(punctures) + ")";
            case Kind::DisjointUnion: {
                std::string s = "union(";
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    if (i) s += ",";
                    s += parts[i].to_string();
                }
                return s + ")";
            }
        }
        return "?";
    }
};

namespace detail {

struct SpaceParser {
    const std::string& text;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("space descriptor: " + msg + " at position " + std::to_string(pos));
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    std::string word() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '-'))
            ++pos;
        return text.substr(start, pos - start);
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    Space parse() {
        std::string w = word();
        if (w == "point") return Space::point();
        if (w == "closed-interval" || w == "closed") return Space::closed_interval();
        if (w == "half-open-interval" || w == "half-open") return Space::half_open_interval();
        if (w == "open-interval" || w == "open") return Space::open_interval();
        if (w == "real-line" || w == "real") return Space::real_line();
        if (w == "circle") return Space::circle();
        if (w == "sphere2") return Space::sphere2();
        if (w == "sphere2-minus") {
            if (!eat('(')) fail("expected '('");
            std::string n = word();
            if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos) fail("expected a count");
            if (!eat(')')) fail("expected ')'");
            return Space::sphere2_minus(std::stoul(n));
        }
        if (w == "union") {
            if (!eat('(')) fail("expected '('");
            std::vector<Space> parts;
            do {
                parts.push_back(parse());
            } while (eat(','));
            if (!eat(')')) fail("expected ')'");
            return Space::disjoint_union(std::move(parts));
        }
        fail("unknown space '" + w + "'");
    }
};

}  // namespace detail

/// Parses descriptors like `circle`, `sphere2-minus(9)` or
/// `union(half-open-interval,open-interval)`.
inline Space parse_space(const std::string& text) {
    detail::SpaceParser p{text};
    Space s = p.parse();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return s;
}

struct KPair {
    FgAbelianGroup k0;
    FgAbelianGroup k1;
    friend bool operator==(const KPair&, const KPair&) = default;
};

/// K-theory of the complement of n points in the 2-sphere, read off from
/// 0 -> C0(S^2 \ F) -> C(S^2) -> C^n -> 0. The restriction map j_* sends
/// the unit class to (1,...,1) and the Bott class to 0, and K1(C(S^2)) = 0,
/// so K0 = ker j_* and K1 = coker j_*.
inline KPair puncture_sphere_k(std::size_t n) {
    if (n == 0) throw std::invalid_argument("puncture_sphere_k: n must be >= 1 (use sphere2)");
    IntMatrix m(n, 2);
    for (std::size_t i = 0; i < n; ++i) m(i, 0) = 1;
    GroupHom restrict_to_points(FgAbelianGroup::free(2), FgAbelianGroup::free(n), m);
    return {kernel(restrict_to_points), cokernel(restrict_to_points)};
}

/// K0/K1 of C0(s).
inline KPair k_groups(const Space& s) {
    using K = Space::Kind;
    const auto z = FgAbelianGroup::free(1);
    const auto zero = FgAbelianGroup{};
    switch (s.kind) {
        case K::Point:
        case K::ClosedInterval: return {z, zero};
        // C0([0,1)) is the cone over C, hence contractible.
        case K::HalfOpenInterval: return {zero, zero};
        case K::OpenInterval:
        case K::RealLine: return {zero, z};
        case K::Circle: return {z, z};
        case K::Sphere2: return {FgAbelianGroup::free(2), zero};
        case K::Sphere2MinusPoints: return puncture_sphere_k(s.punctures);
        case K::DisjointUnion: {
            KPair acc{zero, zero};
            for (const auto& part : s.parts) {
                KPair k = k_groups(part);
                acc.k0 = direct_sum(acc.k0, k.k0);
                acc.k1 = direct_sum(acc.k1, k.k1);
            }
            return acc;
        }
    }
    throw std::logic_error("k_groups: unhandled space kind");
}

// ---------------------------------------------------------------------------
// Six-term sequences.
//
// Node order: 0 = K0(I), 1 = K0(A), 2 = K0(O), 3 = K1(I), 4 = K1(A), 5 = K1(O).
// Map i goes from node i to node (i + 1) % 6; maps 2 and 5 are the boundary maps.

inline constexpr std::size_t kSixTerm = 6;

struct Node {
    std::optional<FgAbelianGroup> group;  // empty when unknown
    std::string label;

    static Node known(FgAbelianGroup g, std::string label = {}) { return {std::move(g), std::move(label)}; }
    static Node unknown(std::string label) { return {std::nullopt, std::move(label)}; }
    bool is_known() const noexcept { return group.has_value(); }
};

struct MapEntry {
    enum class Kind { Known, Zero, Unknown };
    Kind kind = Kind::Unknown;
    std::optional<IntMatrix> matrix;  // Known only
    std::string label;

    static MapEntry known(IntMatrix m, std::string label = {}) { return {Kind::Known, std::move(m), std::move(label)}; }
    static MapEntry zero(std::string label = {}) { return {Kind::Zero, std::nullopt, std::move(label)}; }
    static MapEntry unknown(std::string label = {}) { return {Kind::Unknown, std::nullopt, std::move(label)}; }
};

struct SixTermSequence {
    std::array<Node, kSixTerm> nodes;
    std::array<MapEntry, kSixTerm> maps;
};

inline const std::array<const char*, kSixTerm>& default_node_labels() {
    static const std::array<const char*, kSixTerm> labels{"K0(I)", "K0(A)", "K0(O)", "K1(I)", "K1(A)", "K1(O)"};
    return labels;
}

inline const std::array<const char*, kSixTerm>& default_map_labels() {
    static const std::array<const char*, kSixTerm> labels{"tensor(iota_I - [E])", "i_*", "delta",
                                                          "tensor(iota_I - [E])", "i_*", "delta"};
    return labels;
}

struct KnownMap {
    std::size_t index;
    MapEntry entry;
};

/// Sequence for an augmented Cuntz-Pimsner algebra O over A = C0(x) with
/// ideal I = C0(i). The algebra's own K-groups (nodes 2, 5) are left unknown.
inline SixTermSequence pimsner_sequence(const Space& x, const Space& i, const std::vector<KnownMap>& known_maps = {}) {
    const KPair ki = k_groups(i);
    const KPair kx = k_groups(x);
    const auto& nl = default_node_labels();
    const auto& ml = default_map_labels();
    SixTermSequence seq;
    seq.nodes[0] = Node::known(ki.k0, nl[0]);
    seq.nodes[1] = Node::known(kx.k0, nl[1]);
    seq.nodes[2] = Node::unknown(nl[2]);
    seq.nodes[3] = Node::known(ki.k1, nl[3]);
    seq.nodes[4] = Node::known(kx.k1, nl[4]);
    seq.nodes[5] = Node::unknown(nl[5]);
    for (std::size_t m = 0; m < kSixTerm; ++m) seq.maps[m] = MapEntry::unknown(ml[m]);
    for (const auto& km : known_maps) {
        if (km.index >= kSixTerm) throw std::invalid_argument("pimsner_sequence: map index out of range");
        MapEntry e = km.entry;
        if (e.label.empty()) e.label = ml[km.index];
        seq.maps[km.index] = std::move(e);
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Solver.

struct Determined {
    FgAbelianGroup group;
    std::string note;
};
struct SplitAssumed {
    FgAbelianGroup group;
    std::string note;
};
/// 0 -> subgroup -> G -> quotient -> 0 with more than one possible G.
struct Ambiguous {
    FgAbelianGroup subgroup;
    FgAbelianGroup quotient;
    std::string note;
};
/// Not enough data; any partial knowledge of either side is recorded.
struct Unconstrained {
    std::optional<FgAbelianGroup> subgroup;
    std::optional<FgAbelianGroup> quotient;
    std::vector<std::size_t> blocking_maps;
    std::string note;
};

using NodeResult = std::variant<Determined, SplitAssumed, Ambiguous, Unconstrained>;

struct NodeSolution {
    std::size_t node;
    std::string label;
    NodeResult result;
};

struct SequenceSolution {
    std::vector<NodeSolution> unknowns;
    /// Set only when every node and map ended up known.
    std::optional<bool> consistent;
    std::vector<std::size_t> inexact_at;
    std::vector<std::size_t> forced_zero_maps;

    const NodeSolution* find(std::size_t node) const {
        for (const auto& u : unknowns)
            if (u.node == node) return &u;
        return nullptr;
    }
    /// The group at `node` if it was determined without assumptions.
    std::optional<FgAbelianGroup> determined(std::size_t node) const {
        const auto* u = find(node);
        if (!u) return std::nullopt;
        if (const auto* d = std::get_if<Determined>(&u->result)) return d->group;
        return std::nullopt;
    }
    bool fully_determined() const {
        for (const auto& u : unknowns)
            if (!std::holds_alternative<Determined>(u.result)) return false;
        return true;
    }
};

struct SolveOptions {
    /// Report the direct sum (as SplitAssumed) where the extension is not unique.
    bool assume_split = false;
};

/// Does every extension 0 -> sub -> G -> quot -> 0 split? Ext(quot, sub) is
/// the sum over torsion factors c of quot of sub / c sub.
inline bool extension_unique(const FgAbelianGroup& sub, const FgAbelianGroup& quot) {
    if (quot.is_free() || sub.is_trivial()) return true;
    if (sub.rank() > 0) return false;
    for (const auto& c : quot.torsion())
        for (const auto& a : sub.torsion())
            if (gcd(a, c) != 1) return false;
    return true;
}

namespace detail {

inline std::size_t prev_index(std::size_t i) { return (i + kSixTerm - 1) % kSixTerm; }
inline std::size_t next_index(std::size_t i) { return (i + 1) % kSixTerm; }

inline void validate(const SixTermSequence& seq) {
    for (std::size_t i = 0; i < kSixTerm; ++i) {
        const auto& m = seq.maps[i];
        if (m.kind == MapEntry::Kind::Known && !m.matrix)
            throw std::invalid_argument("six-term sequence: map " + std::to_string(i) + " is known but has no matrix");
        if (m.kind != MapEntry::Kind::Known && m.matrix)
            throw std::invalid_argument("six-term sequence: map " + std::to_string(i) +
                                        " carries a matrix but is not marked known");
        if (m.kind != MapEntry::Kind::Known) continue;
        const auto& src = seq.nodes[i].group;
        const auto& dst = seq.nodes[next_index(i)].group;
        if (src && m.matrix->cols() != src->generator_count())
            throw std::invalid_argument("six-term sequence: map " + std::to_string(i) + " has " +
                                        std::to_string(m.matrix->cols()) + " columns, source " + src->to_string() +
                                        " has " + std::to_string(src->generator_count()) + " generators");
        if (dst && m.matrix->rows() != dst->generator_count())
            throw std::invalid_argument("six-term sequence: map " + std::to_string(i) + " has " +
                                        std::to_string(m.matrix->rows()) + " rows, target " + dst->to_string() +
                                        " has " + std::to_string(dst->generator_count()) + " generators");
        if (src && dst) GroupHom(*src, *dst, *m.matrix);  // throws IllDefinedHom
    }
}

// The hom for map i when both endpoints are known and the map is known or zero.
inline std::optional<GroupHom> hom_of(const SixTermSequence& seq, std::size_t i) {
    const auto& src = seq.nodes[i].group;
    const auto& dst = seq.nodes[next_index(i)].group;
    if (!src || !dst) return std::nullopt;
    switch (seq.maps[i].kind) {
        case MapEntry::Kind::Zero: return GroupHom::zero(*src, *dst);
        case MapEntry::Kind::Known: return GroupHom(*src, *dst, *seq.maps[i].matrix);
        case MapEntry::Kind::Unknown: return std::nullopt;
    }
    return std::nullopt;
}

inline std::string map_description(const SixTermSequence& seq, std::size_t i) {
    auto name = [&](std::size_t n) {
        const auto& node = seq.nodes[n];
        return node.group ? node.group->to_string() : node.label;
    };
    std::string s = "map " + std::to_string(i);
    if (!seq.maps[i].label.empty()) s += " [" + seq.maps[i].label + "]";
    return s + ": " + name(i) + " -> " + name(next_index(i));
}

}  // namespace detail

/// Maps whose source or target is trivial are forced to zero. Returns the
/// indices that changed.
inline std::vector<std::size_t> force_trivial_zeros(SixTermSequence& seq) {
    std::vector<std::size_t> changed;
    for (std::size_t i = 0; i < kSixTerm; ++i) {
        if (seq.maps[i].kind == MapEntry::Kind::Zero) continue;
        const auto& src = seq.nodes[i].group;
        const auto& dst = seq.nodes[detail::next_index(i)].group;
        if ((src && src->is_trivial()) || (dst && dst->is_trivial())) {
            seq.maps[i].kind = MapEntry::Kind::Zero;
            seq.maps[i].matrix.reset();
            changed.push_back(i);
        }
    }
    return changed;
}

/// Solve for unknown nodes using exactness. For an unknown node G at index i,
///   0 -> coker(map i-2) -> G -> ker(map i+1) -> 0
/// is exact; G is reported as Determined when that extension is unique.
inline SequenceSolution solve_six_term(SixTermSequence seq, const SolveOptions& opts = {}) {
    detail::validate(seq);
    SequenceSolution sol;
    std::array<std::optional<NodeResult>, kSixTerm> results;

    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t z : force_trivial_zeros(seq))
            if (std::find(sol.forced_zero_maps.begin(), sol.forced_zero_maps.end(), z) == sol.forced_zero_maps.end())
                sol.forced_zero_maps.push_back(z);
        for (std::size_t i = 0; i < kSixTerm; ++i) {
            if (seq.nodes[i].is_known()) continue;
            const std::size_t before = (i + kSixTerm - 2) % kSixTerm;  // map into node i-1
            const std::size_t after = (i + 1) % kSixTerm;             // map out of node i+1
            auto in_hom = detail::hom_of(seq, before);
            auto out_hom = detail::hom_of(seq, after);
            std::optional<FgAbelianGroup> sub, quot;
            if (in_hom) sub = cokernel(*in_hom);
            if (out_hom) quot = kernel(*out_hom);

            if (sub && quot) {
                if (extension_unique(*sub, *quot)) {
                    FgAbelianGroup g = direct_sum(*sub, *quot);
                    results[i] = Determined{g, "0 -> " + sub->to_string() + " -> G -> " + quot->to_string() +
                                                   " -> 0 splits"};
                    seq.nodes[i].group = g;
                    progress = true;
                } else if (opts.assume_split) {
                    results[i] = SplitAssumed{direct_sum(*sub, *quot),
                                              "direct sum assumed; extension of " + quot->to_string() + " by " +
                                                  sub->to_string() + " is not unique"};
                } else {
                    results[i] = Ambiguous{*sub, *quot,
                                           "extension of " + quot->to_string() + " by " + sub->to_string() +
                                               " is not determined by exactness"};
                }
                continue;
            }

            Unconstrained u{sub, quot, {}, {}};
            std::ostringstream note;
            note << "0 -> ";
            if (sub) {
                note << sub->to_string();
            } else {
                note << "coker(" << detail::map_description(seq, before) << ")";
                u.blocking_maps.push_back(before);
            }
            note << " -> G -> ";
            if (quot) {
                note << quot->to_string();
            } else {
                note << "ker(" << detail::map_description(seq, after) << ")";
                u.blocking_maps.push_back(after);
            }
            note << " -> 0";
            u.note = note.str();
            results[i] = std::move(u);
        }
    }

    for (std::size_t i = 0; i < kSixTerm; ++i)
        if (results[i]) sol.unknowns.push_back({i, seq.nodes[i].label, *results[i]});

    bool all_known = true;
    for (std::size_t i = 0; i < kSixTerm; ++i)
        if (!detail::hom_of(seq, i)) all_known = false;
    if (all_known) {
        for (std::size_t i = 0; i < kSixTerm; ++i) {
            // exactness at node i: image of map i-1 equals kernel of map i
            if (!is_exact_at(*detail::hom_of(seq, detail::prev_index(i)), *detail::hom_of(seq, i)))
                sol.inexact_at.push_back(i);
        }
        sol.consistent = sol.inexact_at.empty();
    }
    return sol;
}

/// The three sequences worked out for the folding map, the circle wrap and
/// the degree-4 Lattès map.
inline SixTermSequence folding_sequence() {
    return pimsner_sequence(Space::closed_interval(),
                            Space::disjoint_union({Space::half_open_interval(), Space::open_interval()}));
}

inline SixTermSequence circle_sequence() {
    // ⊗(ι_I − [E]) on K1 is id − id.
    return pimsner_sequence(Space::circle(), Space::real_line(), {{3, MapEntry::zero()}});
}

inline SixTermSequence lattes_sequence() {
    // Six critical points plus the three critical values 0, ±1 are removed.
    return pimsner_sequence(Space::sphere2(), Space::sphere2_minus(9));
}

}  // namespace bcov::ktheory
