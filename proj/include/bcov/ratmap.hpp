#pragma once

// Rational self-maps of the Riemann sphere: evaluation in projective
// coordinates, critical points and branch sets, fibers, forward orbits,
// transfer sums and sampling-based evidence for minimality and expansion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bcov/expr.hpp"
#include "bcov/poly.hpp"
#include "bcov/sphere.hpp"

namespace bcov::ratmap {

class RationalMap {
public:
    /// Validates and reduces: trims negligible leading coefficients, rejects a
    /// zero denominator, constant maps and numerically non-coprime pairs.
    RationalMap(Poly num, Poly den, const Tolerances& tol = {}) : num_(std::move(num)), den_(std::move(den)) {
        num_.trim(tol.coefficient_zero);
        den_.trim(tol.coefficient_zero);
        if (den_.is_zero()) throw std::invalid_argument("rational map: denominator is the zero polynomial");
        degree_ = std::max(num_.degree(), den_.degree());
        if (num_.is_zero() || degree_ < 1) throw std::invalid_argument("rational map: constant maps are not allowed");
        const Poly n = (1.0 / num_.max_abs()) * num_;
        const Poly d = (1.0 / den_.max_abs()) * den_;
        resultant_ = std::abs(resultant(n, d));
        if (!(resultant_ > tol.coprime_resultant)) {
            throw std::invalid_argument("rational map: numerator and denominator share a root (|resultant| = " +
                                        std::to_string(resultant_) + ")");
        }
    }

    const Poly& num() const noexcept { return num_; }
    const Poly& den() const noexcept { return den_; }
    std::string to_string() const { return "(" + num_.to_string() + ") / (" + den_.to_string() + ")"; }
    int degree() const noexcept { return degree_; }
    double normalized_resultant() const noexcept { return resultant_; }

    SpherePoint operator()(const SpherePoint& p) const {
        // Homogenize to degree d: A(a,b) = sum num_k a^k b^(d-k).
        const std::size_t d = static_cast<std::size_t>(degree_);
        std::vector<Complex> pa(d + 1), pb(d + 1);
        pa[0] = pb[0] = 1.0;
        for (std::size_t k = 1; k <= d; ++k) {
            pa[k] = pa[k - 1] * p.a();
            pb[k] = pb[k - 1] * p.b();
        }
        Complex A(0.0), B(0.0);
        for (std::size_t k = 0; k <= d; ++k) {
            A += num_.coeff(k) * pa[k] * pb[d - k];
            B += den_.coeff(k) * pa[k] * pb[d - k];
        }
        if (A == Complex(0.0) && B == Complex(0.0))
            throw std::logic_error("rational map: indeterminate 0/0 at " + p.to_string());
        return SpherePoint(A, B);
    }

    SpherePoint operator()(Complex z) const { return (*this)(SpherePoint::finite(z)); }

    /// Local degree at infinity, computed in the chart u = 1/z around infinity
    /// and w' = w - q(inf) (or 1/w) around its image.
    int local_degree_at_infinity(const Tolerances& tol = {}) const {
        const std::size_t d = static_cast<std::size_t>(degree_);
        const Complex alpha = num_.coeff(d), beta = den_.coeff(d);
        // beta * num - alpha * den vanishes to order (d - deg) at infinity.
        Poly g = beta * num_ - alpha * den_;
        const double scale = std::max(num_.max_abs(), den_.max_abs()) * std::max(std::abs(alpha), std::abs(beta));
        std::vector<Complex> c = g.coeffs();
        while (!c.empty() && std::abs(c.back()) <= tol.coefficient_zero * scale) c.pop_back();
        return degree_ - (static_cast<int>(c.size()) - 1);
    }

private:
    Poly num_, den_;
    int degree_ = 0;
    double resultant_ = 0.0;
};

inline RationalMap parse_rational_map(const std::string& text, const Tolerances& tol = {}) {
    auto [num, den] = parse_rational_expression(text);
    return RationalMap(std::move(num), std::move(den), tol);
}

/// The degree-4 Lattès map (z^2+1)^2 / (4z(z^2-1)).
inline RationalMap lattes_map() { return parse_rational_map("(z^2+1)^2 / (4*z*(z^2-1))"); }

struct FiberPoint {
    SpherePoint point;
    std::size_t multiplicity;
};

struct CriticalPoint {
    SpherePoint point;
    int local_degree;
};

struct PostcriticalSet {
    std::vector<SpherePoint> points;
    bool finite = false;
};

struct BranchData {
    int degree = 0;
    std::vector<CriticalPoint> critical_points;
    std::vector<SpherePoint> critical_values;    // S'
    std::vector<SpherePoint> upstairs_branch;    // S = q^{-1}(S')
    int infinity_local_degree = 1;
    int riemann_hurwitz_sum = 0;                 // sum (e - 1)
    std::optional<PostcriticalSet> postcritical;
};

namespace detail {

// Chordal-deduplicating point set with a coarse spatial hash.
class PointSet {
public:
    explicit PointSet(double tol) : tol_(tol), cell_(std::max(1e-3, tol)) {}

    /// Index of an existing point within tol, or inserts and returns the new index.
    std::size_t insert(const SpherePoint& p, bool* inserted = nullptr) {
        const auto v = p.unit_vector();
        const long ci = cell(v[0]), cj = cell(v[1]), ck = cell(v[2]);
        for (long di = -1; di <= 1; ++di)
            for (long dj = -1; dj <= 1; ++dj)
                for (long dk = -1; dk <= 1; ++dk) {
                    auto it = grid_.find(key(ci + di, cj + dj, ck + dk));
                    if (it == grid_.end()) continue;
                    for (std::size_t idx : it->second)
                        if (chordal(points_[idx], p) <= tol_) {
                            if (inserted) *inserted = false;
                            return idx;
                        }
                }
        points_.push_back(p);
        grid_[key(ci, cj, ck)].push_back(points_.size() - 1);
        if (inserted) *inserted = true;
        return points_.size() - 1;
    }

    const std::vector<SpherePoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

private:
    long cell(double x) const { return static_cast<long>(std::floor(x / cell_)); }
    static std::uint64_t key(long i, long j, long k) {
        return (static_cast<std::uint64_t>(i + 4096) << 42) ^ (static_cast<std::uint64_t>(j + 4096) << 21) ^
               static_cast<std::uint64_t>(k + 4096);
    }

    double tol_;
    double cell_;
    std::vector<SpherePoint> points_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
};

inline void sort_points(std::vector<SpherePoint>& v) { std::sort(v.begin(), v.end(), projective_less); }

}  // namespace detail

/// Solutions of q(x) = w with multiplicities summing to deg q.
inline std::vector<FiberPoint> preimages(const RationalMap& q, const SpherePoint& w, const Tolerances& tol = {}) {
    const std::size_t d = static_cast<std::size_t>(q.degree());
    // b*num - a*den, homogenized to degree d; missing top degree = roots at infinity.
    std::vector<Complex> g(d + 1);
    double scale = 0.0;
    for (std::size_t k = 0; k <= d; ++k) {
        g[k] = w.b() * q.num().coeff(k) - w.a() * q.den().coeff(k);
        scale = std::max({scale, std::abs(q.num().coeff(k)), std::abs(q.den().coeff(k))});
    }
    while (!g.empty() && std::abs(g.back()) <= tol.coefficient_zero * scale) g.pop_back();
    if (g.empty()) throw std::logic_error("preimages: degenerate fiber equation");
    const std::size_t finite_degree = g.size() - 1;

    std::vector<FiberPoint> out;
    if (finite_degree > 0)
        for (const auto& r : find_roots(Poly(g), tol)) out.push_back({SpherePoint::finite(r.value), r.multiplicity});
    if (finite_degree < d) out.push_back({SpherePoint::infinity(), d - finite_degree});
    std::sort(out.begin(), out.end(),
              [](const FiberPoint& x, const FiberPoint& y) { return projective_less(x.point, y.point); });
    return out;
}

class BranchDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Critical points (roots of num'den - num den', plus infinity when its local
/// degree exceeds 1), critical values and the upstairs branch set.
inline BranchData critical_points(const RationalMap& q, const Tolerances& tol = {}) {
    if (q.degree() < 2) throw std::invalid_argument("critical_points: degree must be at least 2");
    const int d = q.degree();
    BranchData bd;
    bd.degree = d;

    Poly w = q.num().derivative() * q.den() - q.num() * q.den().derivative();
    w.trim(tol.coefficient_zero);
    if (w.is_zero()) throw BranchDataError("critical_points: Wronskian vanishes identically");
    for (const auto& r : find_roots(w, tol))
        bd.critical_points.push_back({SpherePoint::finite(r.value), static_cast<int>(r.multiplicity) + 1});
    bd.infinity_local_degree = q.local_degree_at_infinity(tol);
    if (bd.infinity_local_degree > 1) bd.critical_points.push_back({SpherePoint::infinity(), bd.infinity_local_degree});

    int sum = 0;
    for (const auto& c : bd.critical_points) sum += c.local_degree - 1;
    bd.riemann_hurwitz_sum = sum;
    if (sum != 2 * d - 2)
        throw BranchDataError("critical_points: Riemann-Hurwitz violated (sum of (e-1) = " + std::to_string(sum) +
                              ", expected " + std::to_string(2 * d - 2) + ")");

    detail::PointSet values(tol.value_dedupe);
    for (const auto& c : bd.critical_points) values.insert(q(c.point));
    bd.critical_values = values.points();
    detail::sort_points(bd.critical_values);

    detail::PointSet upstairs(tol.value_dedupe);
    for (const auto& v : bd.critical_values)
        for (const auto& f : preimages(q, v, tol)) upstairs.insert(f.point);
    bd.upstairs_branch = upstairs.points();
    detail::sort_points(bd.upstairs_branch);

    for (const auto& c : bd.critical_points) {
        double best = 2.0;
        for (const auto& u : bd.upstairs_branch) best = std::min(best, chordal(u, c.point));
        if (best > tol.cluster_radius)
            throw BranchDataError("critical_points: critical point " + c.point.to_string() +
                                  " missing from the upstairs branch set");
    }
    std::sort(bd.critical_points.begin(), bd.critical_points.end(),
              [](const CriticalPoint& x, const CriticalPoint& y) { return projective_less(x.point, y.point); });
    return bd;
}

struct OrbitRecord {
    std::vector<SpherePoint> points;      // z, q(z), ... up to the first return (or all iterates)
    std::optional<std::size_t> cycle_entry;
    std::size_t cycle_length = 0;
    bool finite = false;
    bool converged_to_infinity = false;   // hit the infinity snap threshold without an exact return
};

/// Iterates until an iterate returns within `tol` of an earlier one. A match
/// is rejected while the orbit is still contracting onto it (distance shrank
/// by more than half since the previous step), so convergence to an
/// attracting cycle is not mistaken for landing on it. Iterates whose second
/// projective coordinate drops below the snap threshold are treated as
/// infinity reached by convergence, which ends the orbit as not finite.
inline OrbitRecord forward_orbit(const RationalMap& q, const SpherePoint& z, std::size_t max_steps, double tol,
                                 const Tolerances& tols = {}) {
    if (max_steps < 1) throw std::invalid_argument("forward_orbit: max_steps must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("forward_orbit: tol must be positive");
    OrbitRecord rec;
    std::vector<SpherePoint> pts{z};
    for (std::size_t step = 1; step <= max_steps; ++step) {
        SpherePoint next = q(pts.back());
        if (!next.is_infinity() && std::abs(next.b()) < tols.infinity_snap) {
            pts.push_back(SpherePoint::infinity());
            rec.points = std::move(pts);
            rec.converged_to_infinity = true;
            return rec;
        }
        const std::size_t n = pts.size();
        std::optional<std::size_t> hit;
        for (std::size_t j = 0; j < n && !hit; ++j) {
            const double dist = chordal(next, pts[j]);
            if (dist > tol) continue;
            if (dist == 0.0 || j == 0) {
                hit = j;
                break;
            }
            const double before = chordal(pts[n - 1], pts[j - 1]);
            if (!(dist < 0.5 * before)) hit = j;
        }
        if (hit) {
            std::size_t entry = *hit;
            const std::size_t len = n - entry;
            // Earlier iterates that already shadow the cycle belong to it.
            while (entry > 0 && chordal(pts[entry - 1], pts[entry - 1 + len]) <= tol) --entry;
            // Shortest period consistent with the tolerance.
            std::size_t period = len;
            for (std::size_t p = 1; p < len; ++p) {
                bool ok = true;
                for (std::size_t k = entry; k + p < n && ok; ++k) ok = chordal(pts[k], pts[k + p]) <= tol;
                if (ok && chordal(next, pts[n - p]) <= tol) {
                    period = p;
                    break;
                }
            }
            pts.resize(entry + period);
            rec.points = std::move(pts);
            rec.cycle_entry = entry;
            rec.cycle_length = period;
            rec.finite = true;
            return rec;
        }
        pts.push_back(next);
    }
    rec.points = std::move(pts);
    return rec;
}

inline PostcriticalSet postcritical_set_from(const BranchData& bd, const RationalMap& q, std::size_t max_steps,
                                             double tol, const Tolerances& tols = {}) {
    PostcriticalSet pcs;
    pcs.finite = true;
    detail::PointSet set(tol);
    for (const auto& v : bd.critical_values) {
        OrbitRecord orb = forward_orbit(q, v, max_steps, tol, tols);
        pcs.finite = pcs.finite && orb.finite;
        for (const auto& p : orb.points) set.insert(p);
    }
    pcs.points = set.points();
    detail::sort_points(pcs.points);
    return pcs;
}

/// Union of the forward orbits of the critical values.
inline PostcriticalSet postcritical_set(const RationalMap& q, std::size_t max_steps, double tol,
                                        const Tolerances& tols = {}) {
    return postcritical_set_from(critical_points(q, tols), q, max_steps, tol, tols);
}

inline bool is_postcritically_finite(const RationalMap& q, std::size_t max_steps, double tol,
                                     const Tolerances& tols = {}) {
    return postcritical_set(q, max_steps, tol, tols).finite;
}

/// Branch data together with the postcritical set.
inline BranchData analyze(const RationalMap& q, std::size_t max_steps, const Tolerances& tols = {}) {
    BranchData bd = critical_points(q, tols);
    bd.postcritical = postcritical_set_from(bd, q, max_steps, tols.orbit, tols);
    return bd;
}

/// Distinct points of the q^n-fiber over y with accumulated multiplicities.
inline std::vector<FiberPoint> iterated_fiber(const RationalMap& q, const SpherePoint& y, std::size_t n,
                                              const Tolerances& tol = {}) {
    if (n < 1) throw std::invalid_argument("iterated_fiber: n must be >= 1");
    std::vector<FiberPoint> level{{y, 1}};
    for (std::size_t k = 0; k < n; ++k) {
        detail::PointSet set(tol.point_dedupe);
        std::vector<std::size_t> mult;
        for (const auto& p : level)
            for (const auto& f : preimages(q, p.point, tol)) {
                bool fresh = false;
                const std::size_t idx = set.insert(f.point, &fresh);
                if (fresh) mult.push_back(0);
                mult[idx] += p.multiplicity * f.multiplicity;
            }
        level.clear();
        for (std::size_t i = 0; i < set.size(); ++i) level.push_back({set.points()[i], mult[i]});
    }
    std::sort(level.begin(), level.end(),
              [](const FiberPoint& x, const FiberPoint& y2) { return projective_less(x.point, y2.point); });
    return level;
}

using ScalarField = std::function<Complex(const SpherePoint&)>;

struct TransferValue {
    Complex distinct;  // sum over distinct fiber points
    Complex weighted;  // sum counted with multiplicity
    std::size_t fiber_size = 0;
};

/// (P_n xi)(y) = sum of xi over the q^n-fiber of y.
inline TransferValue transfer_apply(const RationalMap& q, const ScalarField& xi, std::size_t n, const SpherePoint& y,
                                    const Tolerances& tol = {}) {
    TransferValue tv;
    for (const auto& f : iterated_fiber(q, y, n, tol)) {
        const Complex v = xi(f.point);
        tv.distinct += v;
        tv.weighted += v * static_cast<double>(f.multiplicity);
        ++tv.fiber_size;
    }
    return tv;
}

/// <xi, eta>(y) = sum over q(x) = y of conj(xi(x)) eta(x), distinct points.
inline Complex inner_product_eval(const RationalMap& q, const ScalarField& xi, const ScalarField& eta,
                                  const SpherePoint& y, const Tolerances& tol = {}) {
    ScalarField integrand = [&](const SpherePoint& x) { return std::conj(xi(x)) * eta(x); };
    return transfer_apply(q, integrand, 1, y, tol).distinct;
}

inline constexpr std::size_t kSphereSampleSize = 2000;

struct DensityResult {
    double covering_radius;
    std::size_t point_count;
    bool passed;
};

/// Backward tree of `start` to the given depth versus a 2000-point sphere
/// sample. Sampling evidence only.
inline DensityResult backward_density_check(const RationalMap& q, const SpherePoint& start, std::size_t depth,
                                            double epsilon, std::uint64_t seed = 0, const Tolerances& tol = {}) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("backward_density_check: epsilon must be positive");
    detail::PointSet tree(tol.point_dedupe);
    tree.insert(start);
    std::vector<SpherePoint> frontier{start};
    for (std::size_t level = 0; level < depth; ++level) {
        std::vector<SpherePoint> next;
        for (const auto& p : frontier)
            for (const auto& f : preimages(q, p, tol)) {
                bool fresh = false;
                tree.insert(f.point, &fresh);
                if (fresh) next.push_back(f.point);
                if (tree.size() > tol.max_tree_points)
                    throw std::runtime_error("backward_density_check: more than " +
                                             std::to_string(tol.max_tree_points) + " points");
            }
        frontier = std::move(next);
    }
    const double r = covering_radius(tree.points(), sphere_sample(kSphereSampleSize, seed));
    return {r, tree.size(), r <= epsilon};
}

struct ExpansionResult {
    std::size_t n_found = 0;
    bool covered = false;
};

inline constexpr double kExpansionEps = 0.1;
inline constexpr std::size_t kCapSampleSize = 20000;

/// First n for which q^n of a dense sample of the cap is 0.1-dense on the
/// sphere. Sampling evidence only.
inline ExpansionResult expansion_check(const RationalMap& q, const SphericalCap& cap, std::size_t max_n,
                                       std::uint64_t seed = 0) {
    if (!(cap.radius > 0.0)) throw std::invalid_argument("expansion_check: cap radius must be positive");
    const auto sample = sphere_sample(kSphereSampleSize, seed);
    std::vector<SpherePoint> pts = cap_sample(cap, kCapSampleSize);
    for (std::size_t n = 0; n <= max_n; ++n) {
        if (is_eps_dense(pts, sample, kExpansionEps)) return {n, true};
        if (n == max_n) break;
        for (auto& p : pts) p = q(p);
    }
    return {max_n, false};
}

}  // namespace bcov::ratmap
