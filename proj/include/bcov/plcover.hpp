#pragma once

// Piecewise-linear branched self-coverings of [0,1] in exact rational
// arithmetic: iterates, domains of the partial local homeomorphism T,
// the relations R_N, constraint profiles, essential freeness and orbits.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bcov::plcover {

using Rational = boost::multiprecision::cpp_rational;
using RationalSet = std::set<Rational>;

inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    try {
        const auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
        boost::multiprecision::cpp_int num(s.substr(0, slash)), den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse rational '" + text + "'");
    }
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline std::string to_string(const RationalSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& r : s) {
        if (!first) out += ", ";
        out += r.str();
        first = false;
    }
    return out + "}";
}

class PLMap {
public:
    /// Continuous PL map through (breakpoints[i], values[i]). Requires breakpoints
    /// 0 = x_0 < ... < x_k = 1, values in [0,1], nonzero slopes, image [0,1].
    PLMap(std::vector<Rational> breakpoints, std::vector<Rational> values)
        : xs_(std::move(breakpoints)), ys_(std::move(values)) {
        if (xs_.size() < 2 || xs_.size() != ys_.size())
            throw std::invalid_argument("PLMap: need at least two breakpoints and one value per breakpoint");
        if (xs_.front() != 0 || xs_.back() != 1) throw std::invalid_argument("PLMap: breakpoints must run from 0 to 1");
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
            if (!(xs_[i] < xs_[i + 1])) throw std::invalid_argument("PLMap: breakpoints must be strictly increasing");
            if (ys_[i] == ys_[i + 1])
                throw std::invalid_argument("PLMap: zero slope on [" + xs_[i].str() + ", " + xs_[i + 1].str() + "]");
        }
        for (const auto& y : ys_)
            if (y < 0 || y > 1) throw std::invalid_argument("PLMap: value " + y.str() + " outside [0,1]");
        if (*std::min_element(ys_.begin(), ys_.end()) != 0 || *std::max_element(ys_.begin(), ys_.end()) != 1)
            throw std::invalid_argument("PLMap: map is not onto [0,1]");
        for (std::size_t i = 1; i + 1 < xs_.size(); ++i)
            if ((slope(i - 1) > 0) != (slope(i) > 0)) branch_.push_back(xs_[i]);
    }

    /// The folding map 2t on [0,1/2], 2-2t on [1/2,1].
    static PLMap fold() { return PLMap({0, Rational(1, 2), 1}, {0, 1, 0}); }
    static PLMap identity() { return PLMap({0, 1}, {0, 1}); }

    const std::vector<Rational>& breakpoints() const noexcept { return xs_; }
    const std::vector<Rational>& values() const noexcept { return ys_; }
    /// Interior turning points: where the slope changes sign.
    const std::vector<Rational>& branch_set() const noexcept { return branch_; }
    std::size_t segment_count() const noexcept { return xs_.size() - 1; }

    Rational slope(std::size_t seg) const { return (ys_[seg + 1] - ys_[seg]) / (xs_[seg + 1] - xs_[seg]); }

    Rational operator()(const Rational& x) const {
        if (x < 0 || x > 1) throw std::invalid_argument("PLMap: point " + x.str() + " outside [0,1]");
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t seg = it == xs_.end() ? segment_count() - 1 : static_cast<std::size_t>(it - xs_.begin()) - 1;
        return ys_[seg] + slope(seg) * (x - xs_[seg]);
    }

    /// All x with f(x) = y.
    RationalSet preimages(const Rational& y) const {
        RationalSet out;
        for (std::size_t i = 0; i < segment_count(); ++i) {
            const Rational& lo = std::min(ys_[i], ys_[i + 1]);
            const Rational& hi = std::max(ys_[i], ys_[i + 1]);
            if (y < lo || y > hi) continue;
            out.insert(xs_[i] + (y - ys_[i]) / slope(i));
        }
        return out;
    }

    /// Same graph with redundant (collinear) breakpoints removed.
    PLMap simplified() const {
        std::vector<Rational> xs{xs_.front()}, ys{ys_.front()};
        for (std::size_t i = 1; i + 1 < xs_.size(); ++i)
            if (slope(i - 1) != slope(i)) {
                xs.push_back(xs_[i]);
                ys.push_back(ys_[i]);
            }
        xs.push_back(xs_.back());
        ys.push_back(ys_.back());
        return PLMap(std::move(xs), std::move(ys));
    }

    std::string to_string() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < xs_.size(); ++i) os << (i ? " " : "") << '(' << xs_[i] << ',' << ys_[i] << ')';
        return os.str();
    }

    friend bool operator==(const PLMap& a, const PLMap& b) { return a.xs_ == b.xs_ && a.ys_ == b.ys_; }

private:
    std::vector<Rational> xs_, ys_;
    std::vector<Rational> branch_;
};

/// outer ∘ inner, breakpoints refined by inner-preimages of outer's breakpoints.
inline PLMap compose(const PLMap& outer, const PLMap& inner) {
    RationalSet xs(inner.breakpoints().begin(), inner.breakpoints().end());
    for (const auto& b : outer.breakpoints())
        for (const auto& p : inner.preimages(b)) xs.insert(p);
    std::vector<Rational> bx(xs.begin(), xs.end()), by;
    by.reserve(bx.size());
    for (const auto& x : bx) by.push_back(outer(inner(x)));
    return PLMap(std::move(bx), std::move(by)).simplified();
}

inline PLMap iterate_pl(const PLMap& m, std::size_t n) {
    PLMap acc = PLMap::identity();
    for (std::size_t k = 0; k < n; ++k) acc = compose(m, acc);
    return acc;
}

inline Rational eval_pl(const PLMap& m, const Rational& x) { return m(x); }

/// m^n(x) by repeated evaluation.
inline Rational eval_iterate(const PLMap& m, Rational x, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) x = m(x);
    return x;
}

/// Is x in dom(T^n), i.e. do x, m(x), ..., m^{n-1}(x) all avoid the branch set?
inline bool in_domain(const PLMap& m, Rational x, std::size_t n) {
    const auto& s = m.branch_set();
    for (std::size_t k = 0; k < n; ++k) {
        if (std::binary_search(s.begin(), s.end(), x)) return false;
        x = m(x);
    }
    return true;
}

/// Complement of dom(T^n): union over k < n of the m^k-preimages of the branch set.
inline RationalSet dom_iterate(const PLMap& m, std::size_t n) {
    RationalSet excluded;
    RationalSet level(m.branch_set().begin(), m.branch_set().end());
    for (std::size_t k = 0; k < n; ++k) {
        excluded.insert(level.begin(), level.end());
        if (k + 1 == n) break;
        RationalSet next;
        for (const auto& y : level)
            for (const auto& x : m.preimages(y)) next.insert(x);
        level = std::move(next);
    }
    return excluded;
}

/// m^{-n}(y) by iterated single-step preimages.
inline RationalSet iterated_preimages(const PLMap& m, const Rational& y, std::size_t n) {
    RationalSet level{y};
    for (std::size_t k = 0; k < n; ++k) {
        RationalSet next;
        for (const auto& p : level)
            for (const auto& x : m.preimages(p)) next.insert(x);
        level = std::move(next);
    }
    return level;
}

/// R_N-class of x: union over n <= N with x in dom(T^n) of
/// {y in dom(T^n) : T^n y = T^n x}.
inline RationalSet rn_class(const PLMap& m, const Rational& x, std::size_t level) {
    if (x < 0 || x > 1) throw std::invalid_argument("rn_class: point outside [0,1]");
    RationalSet cls{x};
    for (std::size_t n = 1; n <= level; ++n) {
        if (!in_domain(m, x, n)) break;  // dom(T^n) shrinks with n
        for (const auto& y : iterated_preimages(m, eval_iterate(m, x, n), n))
            if (in_domain(m, y, n)) cls.insert(y);
    }
    return cls;
}

struct ClassProfile {
    Rational point;
    RationalSet class_members;
    std::size_t class_size = 0;
    std::size_t generic_size = 0;
    std::size_t multiplicity = 0;  // generic_size / class_size when integral
    bool integral = true;
};

struct ConstraintProfile {
    std::size_t level = 0;
    std::size_t generic_size = 1;
    std::vector<ClassProfile> exceptional;
    /// Midpoints between consecutive candidate points whose class size is not
    /// the generic one; empty when the generic size was verified constant.
    std::vector<Rational> irregular;
};

namespace detail {

inline ClassProfile make_profile(const PLMap& m, const Rational& x, std::size_t level, std::size_t generic) {
    ClassProfile p;
    p.point = x;
    p.class_members = rn_class(m, x, level);
    p.class_size = p.class_members.size();
    p.generic_size = generic;
    p.integral = generic % p.class_size == 0;
    p.multiplicity = generic / p.class_size;
    return p;
}

}  // namespace detail

/// Points of [0,1] where the R_N class is smaller than at a generic point.
/// Candidates are the m^n-preimages of m^n-images of breakpoints of m^n for
/// n <= N; off that finite set every class moves locally without collisions.
inline ConstraintProfile constraint_profile(const PLMap& m, std::size_t level) {
    ConstraintProfile cp;
    cp.level = level;
    const PLMap top = iterate_pl(m, level);
    for (std::size_t i = 0; i < top.segment_count(); ++i) {
        const Rational mid = (top.breakpoints()[i] + top.breakpoints()[i + 1]) / 2;
        cp.generic_size = std::max(cp.generic_size, rn_class(m, mid, level).size());
    }

    RationalSet candidates;
    for (std::size_t n = 0; n <= level; ++n) {
        const PLMap it = iterate_pl(m, n);
        RationalSet images;
        for (const auto& b : it.breakpoints()) images.insert(it(b));
        for (const auto& y : images)
            for (const auto& x : it.preimages(y)) candidates.insert(x);
    }
    for (const auto& x : dom_iterate(m, level)) candidates.insert(x);

    for (const auto& x : candidates) {
        ClassProfile p = detail::make_profile(m, x, level, cp.generic_size);
        if (p.class_size < cp.generic_size) cp.exceptional.push_back(std::move(p));
    }
    std::vector<Rational> pts(candidates.begin(), candidates.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Rational mid = (pts[i] + pts[i + 1]) / 2;
        if (rn_class(m, mid, level).size() != cp.generic_size) cp.irregular.push_back(mid);
    }
    return cp;
}

struct FreenessWitness {
    std::size_t m = 0, n = 0;
    Rational lo, hi;  // open interval on which T^m and T^n agree
};

struct FreenessResult {
    bool essentially_free = true;
    std::optional<FreenessWitness> witness;
};

/// Checks every pair 0 <= n < m <= max_m with n <= max_n for an open interval
/// on which the graphs of m^m and m^n coincide. dom(T^m) is cofinite, so
/// open agreement means a shared linear piece.
inline FreenessResult essential_freeness(const PLMap& map, std::size_t max_m, std::size_t max_n) {
    if (max_m <= max_n) throw std::invalid_argument("essential_freeness: need max_m > max_n");
    std::vector<PLMap> its;
    for (std::size_t k = 0; k <= max_m; ++k) its.push_back(iterate_pl(map, k));
    for (std::size_t n = 0; n <= max_n; ++n)
        for (std::size_t m = n + 1; m <= max_m; ++m) {
            const PLMap& f = its[m];
            const PLMap& g = its[n];
            RationalSet cuts(f.breakpoints().begin(), f.breakpoints().end());
            cuts.insert(g.breakpoints().begin(), g.breakpoints().end());
            std::vector<Rational> xs(cuts.begin(), cuts.end());
            std::optional<FreenessWitness> w;
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                const bool agree = f(xs[i]) == g(xs[i]) && f(xs[i + 1]) == g(xs[i + 1]);
                if (agree) {
                    if (!w) w = FreenessWitness{m, n, xs[i], xs[i + 1]};
                    else w->hi = xs[i + 1];
                } else if (w) {
                    break;
                }
            }
            if (w) return {false, w};
        }
    return {};
}

class OrbitTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kOrbitGuard = 100000;

/// Points reached from x by a groupoid element with lags a, b <= depth:
/// {z in dom(T^b) : T^b z = T^a x}. The unbounded closure is infinite for
/// most x (every preimage tree), so depth bounds both lags.
inline RationalSet groupoid_orbit(const PLMap& m, const Rational& x, std::size_t depth) {
    if (x < 0 || x > 1) throw std::invalid_argument("groupoid_orbit: point outside [0,1]");
    RationalSet orbit{x};
    Rational t = x;
    for (std::size_t a = 0; a <= depth; ++a) {
        if (a > 0) {
            if (!in_domain(m, t, 1)) break;
            t = m(t);
        }
        RationalSet level{t};
        for (std::size_t b = 0; b <= depth; ++b) {
            if (b > 0) {
                RationalSet next;
                for (const auto& y : level)
                    for (const auto& z : m.preimages(y))
                        if (in_domain(m, z, 1)) next.insert(z);
                level = std::move(next);
            }
            orbit.insert(level.begin(), level.end());
            if (orbit.size() > kOrbitGuard)
                throw OrbitTooLarge("groupoid_orbit: more than " + std::to_string(kOrbitGuard) + " points");
        }
    }
    return orbit;
}

}  // namespace bcov::plcover
