#pragma once

// Complex polynomials in double precision and a simultaneous (Aberth-Ehrlich)
// root finder that recovers multiple roots by cluster merging.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcov/sphere.hpp"

namespace bcov {

/// Numerical thresholds for the rational-map code, gathered in one place.
struct Tolerances {
    double coefficient_zero = 1e-12;   // relative magnitude below which a coefficient is dropped
    double coprime_resultant = 1e-8;   // minimum |normalized resultant| of num and den
    double root_correction = 1e-12;    // Aberth stopping threshold, relative to root scale
    int max_sweeps = 500;
    double cluster_radius = 1e-6;      // roots closer than this merge into one multiple root
    double point_dedupe = 1e-10;       // chordal: identical points in fibers / trees
    double value_dedupe = 1e-8;        // chordal: identical critical values
    double orbit = 1e-9;               // chordal: cycle detection in forward orbits
    double infinity_snap = 1e-150;     // |b| below this is treated as exactly infinity
    std::size_t max_tree_points = 1'000'000;
};

class RootFindingError : public std::runtime_error {
public:
    RootFindingError(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Ascending coefficients; the zero polynomial has no coefficients.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(0.0); }

    static Poly constant(Complex c) { return Poly({c}); }
    static Poly monomial(Complex c, std::size_t k) {
        std::vector<Complex> v(k + 1, Complex(0.0));
        v[k] = c;
        return Poly(std::move(v));
    }
    static Poly variable() { return monomial(1.0, 1); }

    const std::vector<Complex>& coeffs() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    Complex coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Complex(0.0); }
    Complex leading() const { return c_.empty() ? Complex(0.0) : c_.back(); }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : c_) m = std::max(m, std::abs(x));
        return m;
    }

    /// Drops trailing coefficients with |c| <= rel * max|c|.
    Poly& trim(double rel) {
        const double cut = rel * max_abs();
        while (!c_.empty() && std::abs(c_.back()) <= cut) c_.pop_back();
        return *this;
    }

    Complex operator()(Complex z) const {
        Complex acc(0.0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<Complex> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
        return Poly(std::move(d));
    }

    friend Poly operator+(const Poly& p, const Poly& q) {
        std::vector<Complex> r(std::max(p.c_.size(), q.c_.size()), Complex(0.0));
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = p.coeff(k) + q.coeff(k);
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& p) {
        std::vector<Complex> r(p.c_);
        for (auto& x : r) x = -x;
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& p, const Poly& q) { return p + (-q); }
    friend Poly operator*(const Poly& p, const Poly& q) {
        if (p.is_zero() || q.is_zero()) return {};
        std::vector<Complex> r(p.c_.size() + q.c_.size() - 1, Complex(0.0));
        for (std::size_t i = 0; i < p.c_.size(); ++i)
            for (std::size_t j = 0; j < q.c_.size(); ++j) r[i + j] += p.c_[i] * q.c_[j];
        return Poly(std::move(r));
    }
    friend Poly operator*(Complex s, const Poly& p) { return Poly::constant(s) * p; }

    Poly pow(unsigned e) const {
        Poly r = constant(1.0), base = *this;
        while (e) {
            if (e & 1u) r = r * base;
            base = base * base;
            e >>= 1u;
        }
        return r;
    }

    std::string to_string() const {
        if (c_.empty()) return "0";
        std::ostringstream os;
        os.precision(12);
        bool first = true;
        for (std::size_t k = c_.size(); k-- > 0;) {
            if (c_[k] == Complex(0.0)) continue;
            if (!first) os << " + ";
            first = false;
            if (c_[k].imag() == 0.0)
                os << '(' << c_[k].real() << ')';
            else
                os << '(' << c_[k].real() << (c_[k].imag() < 0 ? "-" : "+") << std::abs(c_[k].imag()) << "i)";
            if (k >= 1) os << "*z";
            if (k >= 2) os << '^' << k;
        }
        return os.str();
    }

private:
    std::vector<Complex> c_;
};

struct Root {
    Complex value;
    std::size_t multiplicity;
};

namespace detail {

// Backward-error residual bound for p at z: |p(z)| relative to sum |a_k||z|^k.
inline double residual_scale(const std::vector<Complex>& a, Complex z) {
    double s = 0.0;
    const double r = std::abs(z);
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * r + std::abs(*it);
    return s;
}

inline std::vector<Complex> aberth(const Poly& p, const Tolerances& tol) {
    const int n = p.degree();
    if (n < 1) return {};
    const auto& a = p.coeffs();
    if (n == 1) return {-a[0] / a[1]};

    // Initial guesses on a circle whose radius is the geometric mean of root moduli.
    const double lead = std::abs(a[n]);
    double radius = std::pow(std::max(std::abs(a[0]), 1e-300) / lead, 1.0 / n);
    if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
    // Cauchy bound keeps the circle inside the root disk when a0 is tiny.
    double cauchy = 0.0;
    for (int k = 0; k < n; ++k) cauchy = std::max(cauchy, std::abs(a[k]) / lead);
    radius = std::min(std::max(radius, 1e-3), 1.0 + cauchy);

    const Complex centroid = -a[n - 1] / (static_cast<double>(n) * a[n]);
    std::vector<Complex> z(n);
    for (int k = 0; k < n; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / n + 0.4;
        z[k] = centroid + radius * Complex(std::cos(ang), std::sin(ang));
    }

    const Poly dp = p.derivative();
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<char> done(n, 0);
    for (int sweep = 0; sweep < tol.max_sweeps; ++sweep) {
        bool all_done = true;
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            const Complex pv = p(z[i]);
            const double bound = 4.0 * (n + 1) * eps * residual_scale(a, z[i]);
            if (std::abs(pv) <= bound) {
                done[i] = 1;
                continue;
            }
            const Complex ratio = pv / dp(z[i]);
            Complex s(0.0);
            for (int j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (z[i] - z[j]);
            Complex corr = ratio / (1.0 - ratio * s);
            if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) corr = ratio;
            z[i] -= corr;
            if (std::abs(corr) <= tol.root_correction * std::max(1.0, std::abs(z[i])))
                done[i] = 1;
            else
                all_done = false;
        }
        if (all_done) {
            bool ok = true;
            for (int i = 0; i < n; ++i) ok = ok && done[i];
            if (ok) return z;
        }
    }
    std::vector<double> res;
    for (int i = 0; i < n; ++i) res.push_back(std::abs(p(z[i])) / std::max(residual_scale(a, z[i]), 1e-300));
    throw RootFindingError("root finder did not converge within " + std::to_string(tol.max_sweeps) + " sweeps",
                           std::move(res));
}

inline constexpr double kWideClusterRadius = 1e-3;

inline Complex centroid(const std::vector<Complex>& g) {
    Complex c(0.0);
    for (const auto& x : g) c += x;
    return c / static_cast<double>(g.size());
}

// A root of multiplicity m is a simple root of the (m-1)-th derivative.
inline Complex polish_multiple(const Poly& q, Complex w, std::size_t m) {
    Poly d = q;
    for (std::size_t k = 1; k < m; ++k) d = d.derivative();
    const Poly dd = d.derivative();
    for (int it = 0; it < 20; ++it) {
        const Complex den = dd(w);
        if (den == Complex(0.0)) break;
        const Complex step = d(w) / den;
        w -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(w))) break;
    }
    return w;
}

inline bool is_multiple_root(const Poly& q, Complex w, std::size_t m) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
    const double eps = std::numeric_limits<double>::epsilon();
    Poly d = q;
    for (std::size_t k = 0; k < m; ++k) {
        if (std::abs(d(w)) > 1e3 * eps * residual_scale(d.coeffs(), w)) return false;
        d = d.derivative();
    }
    return true;
}

}  // namespace detail

/// Roots of p with multiplicities (multiplicities sum to deg p).
inline std::vector<Root> find_roots(const Poly& p, const Tolerances& tol = {}) {
    if (p.is_zero()) throw std::invalid_argument("find_roots: zero polynomial");
    // Exact zero roots first: they are common (z, z^2, 4z(z^2-1), ...).
    std::size_t zeros = 0;
    while (zeros < p.coeffs().size() && p.coeffs()[zeros] == Complex(0.0)) ++zeros;
    Poly q(std::vector<Complex>(p.coeffs().begin() + static_cast<std::ptrdiff_t>(zeros), p.coeffs().end()));
    std::vector<Complex> raw = detail::aberth(q, tol);

    // Single-linkage clustering with a relative radius.
    const std::size_t n = raw.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double scale = std::max({1.0, std::abs(raw[i]), std::abs(raw[j])});
            if (std::abs(raw[i] - raw[j]) <= tol.cluster_radius * scale) parent[find(i)] = find(j);
        }

    std::vector<Root> roots;
    std::vector<std::vector<Complex>> groups;
    std::vector<std::size_t> group_of(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (group_of[r] == n) {
            group_of[r] = groups.size();
            groups.emplace_back();
        }
        groups[group_of[r]].push_back(raw[i]);
    }
    // Roots of multiplicity m spread to about eps^(1/m) under rounding,
    // past the base radius. Merge nearby groups when the polished centre is a
    // numerical m-fold root (q, q', ..., q^(m-1) all vanish to rounding).
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        Complex bw;
        for (std::size_t i = 0; i < groups.size(); ++i)
            for (std::size_t j = i + 1; j < groups.size(); ++j) {
                const std::size_t m = groups[i].size() + groups[j].size();
                if (m < 2) continue;
                const Complex ci = detail::centroid(groups[i]), cj = detail::centroid(groups[j]);
                const double scale = std::max({1.0, std::abs(ci), std::abs(cj)});
                const double dist = std::abs(ci - cj) / scale;
                if (dist > detail::kWideClusterRadius || dist >= best) continue;
                std::vector<Complex> merged = groups[i];
                merged.insert(merged.end(), groups[j].begin(), groups[j].end());
                const Complex w = detail::polish_multiple(q, detail::centroid(merged), m);
                if (detail::is_multiple_root(q, w, m)) {
                    best = dist;
                    bi = i;
                    bj = j;
                    bw = w;
                }
            }
        if (!std::isfinite(best)) break;
        groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
    }

    for (const auto& g : groups) {
        Complex c = detail::centroid(g);
        if (g.size() > 1) {
            const Complex w = detail::polish_multiple(q, c, g.size());
            const double scale = std::max(1.0, std::abs(c));
            const double radius = g.size() > 2 ? detail::kWideClusterRadius : tol.cluster_radius;
            if (std::isfinite(w.real()) && std::isfinite(w.imag()) && std::abs(w - c) <= radius * scale) c = w;
        }
        roots.push_back({c, g.size()});
    }
    if (zeros) roots.push_back({Complex(0.0), zeros});
    std::sort(roots.begin(), roots.end(), [](const Root& x, const Root& y) {
        if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
        return x.value.imag() < y.value.imag();
    });
    return roots;
}

/// Determinant of a complex square matrix by partial-pivoting elimination.
inline Complex complex_determinant(std::vector<std::vector<Complex>> m) {
    const std::size_t n = m.size();
    Complex det(1.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
        if (m[piv][k] == Complex(0.0)) return Complex(0.0);
        if (piv != k) {
            std::swap(m[piv], m[k]);
            det = -det;
        }
        det *= m[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = m[i][k] / m[k][k];
            for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
        }
    }
    return det;
}

/// Resultant of p and q via the Sylvester matrix.
inline Complex resultant(const Poly& p, const Poly& q) {
    const int m = p.degree(), n = q.degree();
    if (m < 0 || n < 0) return Complex(0.0);
    if (m == 0) return std::pow(p.leading(), n);
    if (n == 0) return std::pow(q.leading(), m);
    const std::size_t size = static_cast<std::size_t>(m + n);
    std::vector<std::vector<Complex>> s(size, std::vector<Complex>(size, Complex(0.0)));
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) s[r][r + k] = p.coeff(static_cast<std::size_t>(m - k));
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) s[n + r][r + k] = q.coeff(static_cast<std::size_t>(n - k));
    return complex_determinant(std::move(s));
}

}  // namespace bcov
