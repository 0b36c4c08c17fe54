#pragma once

// Finite models of partially defined dynamics: the relations R_N, the
// semidirect-product groupoid {(x, m-n, y) : T^m x = T^n y}, orbits,
// freeness diagnostics and the Bratteli diagram of the R_N tower.
//
// On a finite discrete set every point is open, so these are approximation
// devices: the covering axioms degenerate and freeness fails for any
// eventually periodic point.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace bcov::finmodel {

inline constexpr const char* kFiniteModelCaveat =
    "finite discrete model: every point is open, so freeness and minimality are approximations only; the groupoid "
    "enumerated is the semidirect-product object, not the germ groupoid";

class FiniteDynSys {
public:
    /// `labels` are sorted and must be unique; `map` sends labels in dom to labels.
    FiniteDynSys(std::vector<std::string> labels, const std::map<std::string, std::string>& map) {
        std::sort(labels.begin(), labels.end());
        if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
            throw std::invalid_argument("finite model: duplicate point label");
        labels_ = std::move(labels);
        next_.assign(labels_.size(), std::nullopt);
        for (const auto& [from, to] : map) next_[index_of(from)] = index_of(to);
    }

    /// Directly from indices; next[i] empty means i is outside dom(T).
    FiniteDynSys(std::vector<std::string> labels, std::vector<std::optional<std::size_t>> next)
        : labels_(std::move(labels)), next_(std::move(next)) {
        if (labels_.size() != next_.size()) throw std::invalid_argument("finite model: size mismatch");
        if (!std::is_sorted(labels_.begin(), labels_.end()) ||
            std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end())
            throw std::invalid_argument("finite model: labels must be sorted and unique");
        for (const auto& n : next_)
            if (n && *n >= labels_.size()) throw std::invalid_argument("finite model: map target out of range");
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    bool in_dom(std::size_t i) const { return next_.at(i).has_value(); }
    std::optional<std::size_t> next(std::size_t i) const { return next_.at(i); }

    std::size_t index_of(const std::string& l) const {
        auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
        if (it == labels_.end() || *it != l) throw std::invalid_argument("finite model: unknown point '" + l + "'");
        return static_cast<std::size_t>(it - labels_.begin());
    }

    /// T^n x, or empty when x is not in dom(T^n).
    std::optional<std::size_t> iterate(std::size_t x, std::size_t n) const {
        std::optional<std::size_t> cur = x;
        for (std::size_t k = 0; k < n && cur; ++k) cur = next_[*cur];
        return cur;
    }

    std::vector<std::size_t> range() const {
        std::set<std::size_t> r;
        for (const auto& n : next_)
            if (n) r.insert(*n);
        return {r.begin(), r.end()};
    }

private:
    std::vector<std::string> labels_;
    std::vector<std::optional<std::size_t>> next_;
};

struct Partition {
    std::vector<std::vector<std::size_t>> classes;  // sorted, ordered by first element
    bool closure_applied = false;                   // the raw pairs were not already transitive

    std::size_t class_of(std::size_t x) const {
        for (std::size_t c = 0; c < classes.size(); ++c)
            if (std::binary_search(classes[c].begin(), classes[c].end(), x)) return c;
        throw std::out_of_range("Partition: point not found");
    }
};

namespace detail {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace detail

/// Partition generated by {(x, y) : some n <= N with x, y in dom(T^n), T^n x = T^n y}.
inline Partition rn_classes(const FiniteDynSys& s, std::size_t level) {
    const std::size_t n = s.size();
    std::vector<std::vector<char>> related(n, std::vector<char>(n, 0));
    detail::DisjointSets ds(n);
    for (std::size_t k = 0; k <= level; ++k) {
        std::map<std::size_t, std::vector<std::size_t>> fibers;
        for (std::size_t x = 0; x < n; ++x)
            if (auto t = s.iterate(x, k)) fibers[*t].push_back(x);
        for (const auto& [target, pts] : fibers)
            for (std::size_t a : pts)
                for (std::size_t b : pts) {
                    related[a][b] = 1;
                    ds.unite(a, b);
                }
    }
    Partition p;
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t x = 0; x < n; ++x) groups[ds.find(x)].push_back(x);
    for (auto& [root, members] : groups) {
        for (std::size_t a : members)
            for (std::size_t b : members)
                if (!related[a][b]) p.closure_applied = true;
        p.classes.push_back(std::move(members));
    }
    return p;
}

struct GroupoidElement {
    std::size_t x;
    long k;
    std::size_t y;
    std::size_t m, n;  // witness: T^m x = T^n y, k = m - n

    friend bool operator==(const GroupoidElement&, const GroupoidElement&) = default;
};

/// All (x, m - n, y) with m, n <= max_exponent, one per (x, k, y) with the
/// lexicographically smallest witness (m, n), sorted by (x, k, y).
inline std::vector<GroupoidElement> groupoid_enumerate(const FiniteDynSys& s, std::size_t max_exponent) {
    std::map<std::tuple<std::size_t, long, std::size_t>, std::pair<std::size_t, std::size_t>> best;
    for (std::size_t m = 0; m <= max_exponent; ++m)
        for (std::size_t x = 0; x < s.size(); ++x) {
            auto tx = s.iterate(x, m);
            if (!tx) continue;
            for (std::size_t n = 0; n <= max_exponent; ++n)
                for (std::size_t y = 0; y < s.size(); ++y) {
                    auto ty = s.iterate(y, n);
                    if (!ty || *ty != *tx) continue;
                    const long k = static_cast<long>(m) - static_cast<long>(n);
                    auto key = std::make_tuple(x, k, y);
                    auto it = best.find(key);
                    if (it == best.end() || std::make_pair(m, n) < it->second) best[key] = {m, n};
                }
        }
    std::vector<GroupoidElement> out;
    out.reserve(best.size());
    for (const auto& [key, w] : best) out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w.first, w.second});
    return out;
}

/// Checks the stored witness of an element.
inline bool witness_valid(const FiniteDynSys& s, const GroupoidElement& g) {
    auto a = s.iterate(g.x, g.m);
    auto b = s.iterate(g.y, g.n);
    return a && b && *a == *b && g.k == static_cast<long>(g.m) - static_cast<long>(g.n);
}

/// {y : T^m x = T^n y for some m, n <= max_exponent}.
inline std::vector<std::size_t> orbit(const FiniteDynSys& s, std::size_t x, std::size_t max_exponent) {
    std::set<std::size_t> targets;
    for (std::size_t m = 0; m <= max_exponent; ++m)
        if (auto t = s.iterate(x, m)) targets.insert(*t);
    std::vector<std::size_t> out;
    for (std::size_t y = 0; y < s.size(); ++y)
        for (std::size_t n = 0; n <= max_exponent; ++n) {
            auto t = s.iterate(y, n);
            if (t && targets.count(*t)) {
                out.push_back(y);
                break;
            }
        }
    return out;
}

struct MinimalityReport {
    std::vector<std::size_t> orbit_sizes;  // indexed by point
    bool minimal = false;                  // every orbit is the whole model
};

inline MinimalityReport minimality_report(const FiniteDynSys& s, std::size_t max_exponent) {
    MinimalityReport r;
    r.minimal = true;
    for (std::size_t x = 0; x < s.size(); ++x) {
        r.orbit_sizes.push_back(orbit(s, x, max_exponent).size());
        if (r.orbit_sizes.back() != s.size()) r.minimal = false;
    }
    return r;
}

struct FreenessViolation {
    std::size_t x;
    std::size_t m, n;  // m > n, T^m x = T^n x
    friend bool operator==(const FreenessViolation&, const FreenessViolation&) = default;
};

/// Points where two distinct iterates agree, for n < m <= max_exponent.
inline std::vector<FreenessViolation> essential_freeness_check(const FiniteDynSys& s, std::size_t max_exponent) {
    if (max_exponent < 1) throw std::invalid_argument("essential_freeness_check: max_exponent must be >= 1");
    std::vector<FreenessViolation> out;
    for (std::size_t x = 0; x < s.size(); ++x)
        for (std::size_t m = 1; m <= max_exponent; ++m) {
            auto tm = s.iterate(x, m);
            if (!tm) break;
            for (std::size_t n = 0; n < m; ++n)
                if (s.iterate(x, n) == tm) out.push_back({x, m, n});
        }
    return out;
}

struct BratteliVertex {
    std::vector<std::size_t> members;
    std::size_t size() const noexcept { return members.size(); }
};

struct BratteliEdge {
    std::size_t from;  // vertex index at level N
    std::size_t to;    // vertex index at level N + 1
    std::size_t multiplicity = 1;
};

struct BratteliDiagram {
    std::vector<std::vector<BratteliVertex>> levels;
    std::vector<std::vector<BratteliEdge>> edges;  // edges[N]: level N -> N + 1
    std::vector<bool> closure_applied;

    /// Sum of squared block sizes at a level.
    std::size_t total_dimension(std::size_t level) const {
        std::size_t t = 0;
        for (const auto& v : levels.at(level)) t += v.size() * v.size();
        return t;
    }
};

inline BratteliDiagram bratteli(const FiniteDynSys& s, std::size_t max_level) {
    if (max_level < 1) throw std::invalid_argument("bratteli: need at least one level beyond 0");
    BratteliDiagram b;
    std::vector<Partition> parts;
    for (std::size_t n = 0; n <= max_level; ++n) {
        parts.push_back(rn_classes(s, n));
        std::vector<BratteliVertex> vs;
        for (const auto& c : parts.back().classes) vs.push_back({c});
        b.levels.push_back(std::move(vs));
        b.closure_applied.push_back(parts.back().closure_applied);
    }
    for (std::size_t n = 0; n < max_level; ++n) {
        std::vector<BratteliEdge> es;
        for (std::size_t v = 0; v < parts[n].classes.size(); ++v)
            es.push_back({v, parts[n + 1].class_of(parts[n].classes[v].front()), 1});
        b.edges.push_back(std::move(es));
    }
    return b;
}

inline std::string bratteli_dot(const FiniteDynSys& s, const BratteliDiagram& b) {
    std::ostringstream os;
    os << "digraph bratteli {\n  rankdir=TB;\n";
    for (std::size_t n = 0; n < b.levels.size(); ++n) {
        os << "  { rank=same;";
        for (std::size_t v = 0; v < b.levels[n].size(); ++v) os << " L" << n << "_" << v << ";";
        os << " }\n";
        for (std::size_t v = 0; v < b.levels[n].size(); ++v) {
            os << "  L" << n << "_" << v << " [label=\"";
            const auto& mem = b.levels[n][v].members;
            for (std::size_t i = 0; i < mem.size(); ++i) os << (i ? "," : "") << s.label(mem[i]);
            os << " (" << mem.size() << ")\"];\n";
        }
    }
    for (std::size_t n = 0; n < b.edges.size(); ++n)
        for (const auto& e : b.edges[n]) {
            os << "  L" << n << "_" << e.from << " -> L" << n + 1 << "_" << e.to;
            if (e.multiplicity != 1) os << " [label=\"" << e.multiplicity << "\"]";
            os << ";\n";
        }
    os << "}\n";
    return os.str();
}

}  // namespace bcov::finmodel
