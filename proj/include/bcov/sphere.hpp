#pragma once

// Points of the Riemann sphere as normalized projective pairs, the chordal
// metric, and quasi-uniform samples of the sphere and of spherical caps.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bcov {

using Complex = std::complex<double>;

/// The point a/b of the sphere, with max(|a|, |b|) == 1; b == 0 is infinity.
class SpherePoint {
public:
    SpherePoint() : a_(0.0), b_(1.0) {}
    SpherePoint(Complex a, Complex b) : a_(a), b_(b) { normalize(); }

    static SpherePoint finite(Complex z) { return SpherePoint(z, 1.0); }
    static SpherePoint infinity() { return SpherePoint(1.0, 0.0); }

    /// From a point (x, y, z) of the unit sphere, north pole = infinity.
    static SpherePoint from_unit_vector(const std::array<double, 3>& p) {
        const double x = p[0], y = p[1], z = p[2];
        // a/b = (x + iy)/(1 - z) = (1 + z)/(x - iy); pick the better conditioned pair.
        if (z <= 0.0) return SpherePoint(Complex(x, y), Complex(1.0 - z, 0.0));
        return SpherePoint(Complex(1.0 + z, 0.0), Complex(x, -y));
    }

    const Complex& a() const noexcept { return a_; }
    const Complex& b() const noexcept { return b_; }

    bool is_infinity() const noexcept { return b_ == Complex(0.0); }
    Complex value() const { return a_ / b_; }

    std::array<double, 3> unit_vector() const {
        const double na = std::norm(a_), nb = std::norm(b_);
        const double s = na + nb;
        const Complex ab = a_ * std::conj(b_);
        return {2.0 * ab.real() / s, 2.0 * ab.imag() / s, (na - nb) / s};
    }

    SpherePoint negated() const { return SpherePoint(-a_, b_); }
    SpherePoint conjugated() const { return SpherePoint(std::conj(a_), std::conj(b_)); }

    std::string to_string(int precision = 15) const {
        if (is_infinity()) return "inf";
        std::ostringstream os;
        os.precision(precision);
        Complex z = value();
        // drop round-off noise relative to |z| so that -1-6e-41i prints as -1+0i
        const double noise = 1e-14 * std::max(1.0, std::abs(z));
        if (std::abs(z.real()) < noise) z.real(0.0);
        if (std::abs(z.imag()) < noise) z.imag(0.0);
        os << z.real();
        if (z.imag() >= 0 || std::isnan(z.imag()))
            os << '+' << z.imag() << 'i';
        else
            os << '-' << -z.imag() << 'i';
        return os.str();
    }

private:
    void normalize() {
        const double m = std::max(std::abs(a_), std::abs(b_));
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("SpherePoint: degenerate projective pair");
        a_ /= m;
        b_ /= m;
        if (std::abs(a_) >= std::abs(b_)) {
            // make the dominant coordinate real positive for a stable representative
            const Complex phase = a_ / std::abs(a_);
            a_ /= phase;
            b_ /= phase;
        } else {
            const Complex phase = b_ / std::abs(b_);
            a_ /= phase;
            b_ /= phase;
        }
    }

    Complex a_, b_;
};

/// Chordal distance on the unit sphere (values in [0, 2]).
inline double chordal(const SpherePoint& p, const SpherePoint& q) {
    const double num = std::abs(p.a() * q.b() - p.b() * q.a());
    const double den = std::sqrt((std::norm(p.a()) + std::norm(p.b())) * (std::norm(q.a()) + std::norm(q.b())));
    return 2.0 * num / den;
}

/// Lexicographic order on the projective representative (for reproducible output).
inline bool projective_less(const SpherePoint& p, const SpherePoint& q) {
    auto key = [](const SpherePoint& s) {
        return std::array<double, 4>{s.a().real(), s.a().imag(), s.b().real(), s.b().imag()};
    };
    return key(p) < key(q);
}

/// Parses `inf`, `3`, `-2.5i`, `1+2i`, `0.3-0.2i`.
inline SpherePoint parse_sphere_point(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s == "inf" || s == "infinity" || s == "oo") return SpherePoint::infinity();
    if (s.empty()) throw std::invalid_argument("point: empty");
    auto fail = [&] { throw std::invalid_argument("point: cannot parse '" + text + "'"); };
    double re = 0.0, im = 0.0;
    std::size_t pos = 0;
    auto read_number = [&](double& out, bool& imag) {
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        std::size_t digits_start = pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
                                  ((s[pos] == 'e' || s[pos] == 'E') && pos + 1 < s.size()))) {
            if (s[pos] == 'e' || s[pos] == 'E') {
                ++pos;
                if (s[pos] == '+' || s[pos] == '-') ++pos;
                continue;
            }
            ++pos;
        }
        std::string num = s.substr(start, pos - start);
        imag = pos < s.size() && s[pos] == 'i';
        if (imag) ++pos;
        if (digits_start == pos - (imag ? 1 : 0)) {
            if (!imag) fail();
            num += "1";  // bare "i" / "-i"
        }
        try {
            out = std::stod(num);
        } catch (const std::exception&) {
            fail();
        }
    };
    double v = 0.0;
    bool imag = false;
    read_number(v, imag);
    (imag ? im : re) = v;
    if (pos < s.size()) {
        if (imag) fail();
        read_number(v, imag);
        if (!imag) fail();
        im = v;
    }
    if (pos != s.size()) fail();
    return SpherePoint::finite(Complex(re, im));
}

// ---------------------------------------------------------------------------
// Sampling.

/// n points spread quasi-uniformly over the sphere (Fibonacci lattice).
inline std::vector<std::array<double, 3>> fibonacci_sphere(std::size_t n) {
    std::vector<std::array<double, 3>> pts;
    pts.reserve(n);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return pts;
}

namespace detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline std::array<double, 3> apply(const Mat3& m, const std::array<double, 3>& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

// Rotation taking the south pole (0,0,-1) to the unit vector c.
inline Mat3 rotation_from_south_pole(const std::array<double, 3>& c) {
    // Columns: e1, e2 orthonormal to c, and -c.
    std::array<double, 3> t = std::abs(c[0]) < 0.9 ? std::array<double, 3>{1, 0, 0} : std::array<double, 3>{0, 1, 0};
    std::array<double, 3> e1{c[1] * t[2] - c[2] * t[1], c[2] * t[0] - c[0] * t[2], c[0] * t[1] - c[1] * t[0]};
    const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (auto& x : e1) x /= n1;
    std::array<double, 3> e2{c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]};
    return {{{e1[0], e2[0], -c[0]}, {e1[1], e2[1], -c[1]}, {e1[2], e2[2], -c[2]}}};
}

// Uniformly random rotation from a seeded generator (quaternion method).
inline Mat3 random_rotation(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
    const double q0 = std::sqrt(1 - u1) * std::sin(2 * std::numbers::pi * u2);
    const double q1 = std::sqrt(1 - u1) * std::cos(2 * std::numbers::pi * u2);
    const double q2 = std::sqrt(u1) * std::sin(2 * std::numbers::pi * u3);
    const double q3 = std::sqrt(u1) * std::cos(2 * std::numbers::pi * u3);
    return {{{1 - 2 * (q2 * q2 + q3 * q3), 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2)},
             {2 * (q1 * q2 + q0 * q3), 1 - 2 * (q1 * q1 + q3 * q3), 2 * (q2 * q3 - q0 * q1)},
             {2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), 1 - 2 * (q1 * q1 + q2 * q2)}}};
}

}  // namespace detail

/// Quasi-uniform sample of the sphere as SpherePoints. Seed 0 is the
/// canonical lattice; other seeds apply a reproducible random rotation.
inline std::vector<SpherePoint> sphere_sample(std::size_t n, std::uint64_t seed = 0) {
    auto pts = fibonacci_sphere(n);
    std::vector<SpherePoint> out;
    out.reserve(n);
    const auto rot = detail::random_rotation(seed);
    for (const auto& p : pts) out.push_back(SpherePoint::from_unit_vector(seed ? detail::apply(rot, p) : p));
    return out;
}

/// Closed cap {p : chordal(p, center) <= radius}.
struct SphericalCap {
    SpherePoint center;
    double radius;

    bool is_full_sphere() const noexcept { return radius >= 2.0; }
};

/// n quasi-uniform points in a cap (Fibonacci spiral restricted to the cap).
inline std::vector<SpherePoint> cap_sample(const SphericalCap& cap, std::size_t n) {
    if (!(cap.radius > 0.0)) throw std::invalid_argument("cap_sample: radius must be positive");
    const double r = std::min(cap.radius, 2.0);
    // chordal r = 2 sin(theta/2); height of the cap boundary above the south pole
    const double theta = 2.0 * std::asin(r / 2.0);
    const double zmax = -std::cos(theta);
    const auto rot = detail::rotation_from_south_pole(cap.center.unit_vector());
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<SpherePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double z = -1.0 + t * (zmax + 1.0);
        const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        out.push_back(SpherePoint::from_unit_vector(detail::apply(rot, {rr * std::cos(phi), rr * std::sin(phi), z})));
    }
    return out;
}

/// Largest distance from a sample point to its nearest point of `points`.
inline double covering_radius(const std::vector<SpherePoint>& points, const std::vector<SpherePoint>& sample) {
    if (points.empty()) return 2.0;
    std::vector<std::array<double, 3>> pv;
    pv.reserve(points.size());
    for (const auto& p : points) pv.push_back(p.unit_vector());
    double worst = 0.0;
    for (const auto& s : sample) {
        const auto sv = s.unit_vector();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pv) {
            const double dx = p[0] - sv[0], dy = p[1] - sv[1], dz = p[2] - sv[2];
            best = std::min(best, dx * dx + dy * dy + dz * dz);
        }
        worst = std::max(worst, std::sqrt(best));
    }
    return worst;
}

/// True when every sample point lies within eps of some point (grid-bucketed).
inline bool is_eps_dense(const std::vector<SpherePoint>& points, const std::vector<SpherePoint>& sample, double eps) {
    if (points.empty()) return false;
    auto cell_of = [eps](double x) { return static_cast<long>(std::floor(x / eps)); };
    auto key = [](long i, long j, long k) {
        return (static_cast<std::uint64_t>(i + 1024) << 42) ^ (static_cast<std::uint64_t>(j + 1024) << 21) ^
               static_cast<std::uint64_t>(k + 1024);
    };
    std::unordered_map<std::uint64_t, std::vector<std::array<double, 3>>> grid;
    for (const auto& p : points) {
        const auto v = p.unit_vector();
        grid[key(cell_of(v[0]), cell_of(v[1]), cell_of(v[2]))].push_back(v);
    }
    const double eps2 = eps * eps;
    for (const auto& s : sample) {
        const auto v = s.unit_vector();
        const long ci = cell_of(v[0]), cj = cell_of(v[1]), ck = cell_of(v[2]);
        bool hit = false;
        for (long di = -1; di <= 1 && !hit; ++di)
            for (long dj = -1; dj <= 1 && !hit; ++dj)
                for (long dk = -1; dk <= 1 && !hit; ++dk) {
                    auto it = grid.find(key(ci + di, cj + dj, ck + dk));
                    if (it == grid.end()) continue;
                    for (const auto& p : it->second) {
                        const double dx = p[0] - v[0], dy = p[1] - v[1], dz = p[2] - v[2];
                        if (dx * dx + dy * dy + dz * dz <= eps2) {
                            hit = true;
                            break;
                        }
                    }
                }
        if (!hit) return false;
    }
    return true;
}

}  // namespace bcov
