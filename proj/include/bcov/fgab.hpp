#pragma once

// Finitely generated abelian groups over exact integers: Smith normal form,
// canonical presentations, kernels, images, cokernels and exactness tests.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bcov {

using Integer = boost::multiprecision::cpp_int;

/// Raised when a homomorphism's matrix does not respect the torsion of its domain.
class IllDefinedHom : public std::invalid_argument {
public:
    IllDefinedHom(std::size_t generator, const std::string& what)
        : std::invalid_argument(what), generator_(generator) {}
    std::size_t generator() const noexcept { return generator_; }

private:
    std::size_t generator_;
};

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    IntMatrix(std::size_t rows, std::size_t cols, std::vector<Integer> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument("IntMatrix: entry count does not match rows*cols");
    }
    IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("IntMatrix: ragged initializer");
            for (long long v : r) data_.emplace_back(v);
        }
    }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<Integer>& entries() const noexcept { return data_; }

    std::vector<Integer> column(std::size_t c) const {
        std::vector<Integer> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    IntMatrix transpose() const {
        IntMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
    }
    // row[dst] += k * row[src]
    void add_row(std::size_t dst, std::size_t src, const Integer& k) {
        if (k == 0) return;
        for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += k * (*this)(src, c);
    }
    // col[dst] += k * col[src]
    void add_col(std::size_t dst, std::size_t src, const Integer& k) {
        if (k == 0) return;
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += k * (*this)(r, src);
    }
    void negate_row(std::size_t r) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
    }
    void negate_col(std::size_t c) {
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = -(*this)(r, c);
    }

    friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("IntMatrix: dimension mismatch in product");
        IntMatrix p(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Integer& aik = a(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += aik * b(k, j);
            }
        return p;
    }

    friend std::vector<Integer> operator*(const IntMatrix& a, const std::vector<Integer>& v) {
        if (a.cols_ != v.size()) throw std::invalid_argument("IntMatrix: dimension mismatch in product");
        std::vector<Integer> out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) out[i] += a(i, k) * v[k];
        return out;
    }

    /// Columns of `a` followed by columns of `b`.
    static IntMatrix hconcat(const IntMatrix& a, const IntMatrix& b) {
        if (a.rows_ != b.rows_) throw std::invalid_argument("IntMatrix: hconcat row mismatch");
        IntMatrix m(a.rows_, a.cols_ + b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r) {
            for (std::size_t c = 0; c < a.cols_; ++c) m(r, c) = a(r, c);
            for (std::size_t c = 0; c < b.cols_; ++c) m(r, a.cols_ + c) = b(r, c);
        }
        return m;
    }

    static IntMatrix from_columns(std::size_t rows, const std::vector<std::vector<Integer>>& cols) {
        IntMatrix m(rows, cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c].size() != rows) throw std::invalid_argument("IntMatrix: column length mismatch");
            for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c][r];
        }
        return m;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r) os << ',';
            os << '[';
            for (std::size_t c = 0; c < cols_; ++c) {
                if (c) os << ',';
                os << (*this)(r, c);
            }
            os << ']';
        }
        os << ']';
        return os.str();
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

inline std::ostream& operator<<(std::ostream& os, const IntMatrix& m) { return os << m.to_string(); }

/// Exact determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(IntMatrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    Integer sign = 1;
    Integer prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

struct SmithForm {
    IntMatrix u;  // rows x rows, unimodular
    IntMatrix d;  // rows x cols, diagonal with d_1 | d_2 | ...
    IntMatrix v;  // cols x cols, unimodular
};

namespace detail {

// Smith decomposition carrying the inverses of u and v as well; the lattice
// routines need u^{-1} to read off bases of column spans.
struct SmithFull {
    IntMatrix u, u_inv, d, v, v_inv;
    std::size_t rank = 0;
};

inline SmithFull smith_full(const IntMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    SmithFull s{IntMatrix::identity(rows), IntMatrix::identity(rows), m, IntMatrix::identity(cols),
                IntMatrix::identity(cols), 0};
    IntMatrix& a = s.d;

    // Row op "row i += k row j" on a is mirrored as u: row i += k row j and
    // u_inv: col j -= k col i. Column ops likewise with v / v_inv.
    auto row_add = [&](std::size_t dst, std::size_t src, const Integer& k) {
        a.add_row(dst, src, k);
        s.u.add_row(dst, src, k);
        s.u_inv.add_col(src, dst, -k);
    };
    auto row_swap = [&](std::size_t x, std::size_t y) {
        a.swap_rows(x, y);
        s.u.swap_rows(x, y);
        s.u_inv.swap_cols(x, y);
    };
    auto row_neg = [&](std::size_t r) {
        a.negate_row(r);
        s.u.negate_row(r);
        s.u_inv.negate_col(r);
    };
    auto col_add = [&](std::size_t dst, std::size_t src, const Integer& k) {
        a.add_col(dst, src, k);
        s.v.add_col(dst, src, k);
        s.v_inv.add_row(src, dst, -k);
    };
    auto col_swap = [&](std::size_t x, std::size_t y) {
        a.swap_cols(x, y);
        s.v.swap_cols(x, y);
        s.v_inv.swap_rows(x, y);
    };

    const std::size_t diag = std::min(rows, cols);
    std::size_t t = 0;
    while (t < diag) {
        // Smallest nonzero magnitude in the trailing block; ties go to the
        // lowest (row, col) in row-major order.
        std::optional<std::pair<std::size_t, std::size_t>> best;
        Integer best_abs;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j) {
                if (a(i, j) == 0) continue;
                Integer mag = abs(a(i, j));
                if (!best || mag < best_abs) {
                    best = {i, j};
                    best_abs = mag;
                }
            }
        if (!best) break;
        row_swap(t, best->first);
        col_swap(t, best->second);

        bool dirty = false;
        for (std::size_t i = t + 1; i < rows; ++i) {
            if (a(i, t) == 0) continue;
            Integer q = a(i, t) / a(t, t);
            row_add(i, t, -q);
            if (a(i, t) != 0) dirty = true;
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
            if (a(t, j) == 0) continue;
            Integer q = a(t, j) / a(t, t);
            col_add(j, t, -q);
            if (a(t, j) != 0) dirty = true;
        }
        if (dirty) continue;  // a strictly smaller remainder now exists

        // Pivot row/column are clear; enforce divisibility into the block.
        bool fixed = true;
        for (std::size_t i = t + 1; i < rows && fixed; ++i)
            for (std::size_t j = t + 1; j < cols; ++j)
                if (a(i, j) % a(t, t) != 0) {
                    row_add(t, i, 1);
                    fixed = false;
                    break;
                }
        if (!fixed) continue;
        if (a(t, t) < 0) row_neg(t);
        ++t;
    }
    s.rank = t;
    return s;
}

}  // namespace detail

/// Smith normal form: u * m * v == d with u, v unimodular.
inline SmithForm smith_normal_form(const IntMatrix& m) {
    auto s = detail::smith_full(m);
    return {std::move(s.u), std::move(s.d), std::move(s.v)};
}

/// Is `v` an integer combination of the columns of `gens`?
inline bool in_lattice(const std::vector<Integer>& v, const IntMatrix& gens) {
    if (gens.cols() == 0) return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
    if (v.size() != gens.rows()) throw std::invalid_argument("in_lattice: dimension mismatch");
    auto s = detail::smith_full(gens);
    auto y = s.u * v;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (i < s.rank) {
            if (y[i] % s.d(i, i) != 0) return false;
        } else if (y[i] != 0) {
            return false;
        }
    }
    return true;
}

/// Integer solutions x of a * x == 0, as columns of a basis matrix.
inline IntMatrix integer_kernel(const IntMatrix& a) {
    auto s = detail::smith_full(a);
    const std::size_t n = a.cols();
    IntMatrix k(n, n - s.rank);
    for (std::size_t j = s.rank; j < n; ++j)
        for (std::size_t r = 0; r < n; ++r) k(r, j - s.rank) = s.v(r, j);
    return k;
}

class FgAbelianGroup {
public:
    /// The trivial group.
    FgAbelianGroup() = default;

    /// Strict constructor: `torsion` must already be a divisibility chain of factors >= 2.
    FgAbelianGroup(std::size_t rank, std::vector<Integer> torsion) : rank_(rank), torsion_(std::move(torsion)) {
        for (std::size_t i = 0; i < torsion_.size(); ++i) {
            if (torsion_[i] < 2)
                throw std::invalid_argument("FgAbelianGroup: invariant factor " + torsion_[i].str() + " < 2");
            if (i && torsion_[i] % torsion_[i - 1] != 0)
                throw std::invalid_argument("FgAbelianGroup: invariant factors do not form a divisibility chain");
        }
    }

    static FgAbelianGroup free(std::size_t rank) { return FgAbelianGroup(rank, {}); }
    static FgAbelianGroup cyclic(const Integer& order) { return from_cyclic_orders({order}); }

    /// Z^gens / (column span of `relations`), reduced to canonical form.
    static FgAbelianGroup from_relations(const IntMatrix& relations) {
        const std::size_t gens = relations.rows();
        if (relations.cols() == 0) return free(gens);
        auto s = detail::smith_full(relations);
        std::vector<Integer> torsion;
        for (std::size_t i = 0; i < s.rank; ++i)
            if (s.d(i, i) != 1) torsion.push_back(s.d(i, i));
        return FgAbelianGroup(gens - s.rank, std::move(torsion));
    }

    /// Direct sum of cyclic groups Z/n_i (n_i == 0 meaning Z), canonicalised.
    static FgAbelianGroup from_cyclic_orders(const std::vector<Integer>& orders) {
        IntMatrix rel(orders.size(), orders.size());
        for (std::size_t i = 0; i < orders.size(); ++i) rel(i, i) = orders[i];
        return from_relations(rel);
    }

    std::size_t rank() const noexcept { return rank_; }
    const std::vector<Integer>& torsion() const noexcept { return torsion_; }
    std::size_t generator_count() const noexcept { return rank_ + torsion_.size(); }
    bool is_trivial() const noexcept { return rank_ == 0 && torsion_.empty(); }
    bool is_free() const noexcept { return torsion_.empty(); }
    bool is_finite() const noexcept { return rank_ == 0; }

    /// Order of generator i (0 for free generators).
    Integer generator_order(std::size_t i) const { return i < rank_ ? Integer(0) : torsion_.at(i - rank_); }

    /// Relation lattice as columns: one column d_i * e_{rank+i} per torsion factor.
    IntMatrix relations() const {
        IntMatrix r(generator_count(), torsion_.size());
        for (std::size_t i = 0; i < torsion_.size(); ++i) r(rank_ + i, i) = torsion_[i];
        return r;
    }

    /// Group order when finite.
    std::optional<Integer> order() const {
        if (rank_) return std::nullopt;
        Integer o = 1;
        for (const auto& d : torsion_) o *= d;
        return o;
    }

    /// Canonical coordinates: free entries untouched, torsion entries reduced into [0, d).
    std::vector<Integer> reduce(std::vector<Integer> v) const {
        for (std::size_t i = 0; i < torsion_.size(); ++i) {
            Integer& x = v.at(rank_ + i);
            x %= torsion_[i];
            if (x < 0) x += torsion_[i];
        }
        return v;
    }

    /// Is v zero in the group?
    bool is_zero_element(const std::vector<Integer>& v) const {
        for (std::size_t i = 0; i < rank_; ++i)
            if (v.at(i) != 0) return false;
        for (std::size_t i = 0; i < torsion_.size(); ++i)
            if (v.at(rank_ + i) % torsion_[i] != 0) return false;
        return true;
    }

    std::string to_string() const {
        if (is_trivial()) return "0";
        std::ostringstream os;
        bool first = true;
        if (rank_ == 1) {
            os << "Z";
            first = false;
        } else if (rank_ > 1) {
            os << "Z^" << rank_;
            first = false;
        }
        for (const auto& d : torsion_) {
            if (!first) os << " + ";
            os << "Z/" << d;
            first = false;
        }
        return os.str();
    }

    friend bool operator==(const FgAbelianGroup&, const FgAbelianGroup&) = default;

private:
    std::size_t rank_ = 0;
    std::vector<Integer> torsion_;
};

inline std::ostream& operator<<(std::ostream& os, const FgAbelianGroup& g) { return os << g.to_string(); }

inline FgAbelianGroup direct_sum(const FgAbelianGroup& a, const FgAbelianGroup& b) {
    std::vector<Integer> orders(a.rank() + b.rank(), Integer(0));
    orders.insert(orders.end(), a.torsion().begin(), a.torsion().end());
    orders.insert(orders.end(), b.torsion().begin(), b.torsion().end());
    return FgAbelianGroup::from_cyclic_orders(orders);
}

inline bool is_isomorphic(const FgAbelianGroup& a, const FgAbelianGroup& b) { return a == b; }

/// Homomorphism between canonical groups. matrix(i, j) is the coefficient of
/// codomain generator i in the image of domain generator j.
class GroupHom {
public:
    GroupHom(FgAbelianGroup domain, FgAbelianGroup codomain, IntMatrix matrix)
        : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
        if (matrix_.rows() != codomain_.generator_count() || matrix_.cols() != domain_.generator_count()) {
            std::ostringstream os;
            os << "GroupHom: matrix is " << matrix_.rows() << "x" << matrix_.cols() << ", expected "
               << codomain_.generator_count() << "x" << domain_.generator_count();
            throw std::invalid_argument(os.str());
        }
        for (std::size_t j = domain_.rank(); j < domain_.generator_count(); ++j) {
            auto col = matrix_.column(j);
            const Integer& d = domain_.generator_order(j);
            for (auto& x : col) x *= d;
            if (!codomain_.is_zero_element(col)) {
                std::ostringstream os;
                os << "GroupHom: ill-defined at domain generator " << j << " (order " << d
                   << "): image times order is nonzero in " << codomain_;
                throw IllDefinedHom(j, os.str());
            }
        }
    }

    static GroupHom zero(FgAbelianGroup domain, FgAbelianGroup codomain) {
        IntMatrix m(codomain.generator_count(), domain.generator_count());
        return GroupHom(std::move(domain), std::move(codomain), std::move(m));
    }
    static GroupHom identity(const FgAbelianGroup& g) {
        return GroupHom(g, g, IntMatrix::identity(g.generator_count()));
    }

    const FgAbelianGroup& domain() const noexcept { return domain_; }
    const FgAbelianGroup& codomain() const noexcept { return codomain_; }
    const IntMatrix& matrix() const noexcept { return matrix_; }

    std::vector<Integer> apply(const std::vector<Integer>& x) const { return codomain_.reduce(matrix_ * x); }

    bool is_zero() const {
        for (std::size_t j = 0; j < matrix_.cols(); ++j)
            if (!codomain_.is_zero_element(matrix_.column(j))) return false;
        return true;
    }

private:
    FgAbelianGroup domain_;
    FgAbelianGroup codomain_;
    IntMatrix matrix_;
};

/// g after f; the middle groups must match exactly.
inline GroupHom compose(const GroupHom& g, const GroupHom& f) {
    if (f.codomain() != g.domain())
        throw std::invalid_argument("compose: codomain " + f.codomain().to_string() + " does not match domain " +
                                    g.domain().to_string());
    return GroupHom(f.domain(), g.codomain(), g.matrix() * f.matrix());
}

namespace detail {

// (column span of gens) / (column span of rels), assuming span(rels) lies in span(gens).
inline FgAbelianGroup subquotient(const IntMatrix& gens, const IntMatrix& rels) {
    const std::size_t n = gens.rows();
    auto s = smith_full(gens);
    // Basis of span(gens): b_i = d_i * u_inv[:, i], i < rank. A vector w in the
    // span has coordinates c_i = (u w)_i / d_i.
    IntMatrix coords(s.rank, rels.cols());
    for (std::size_t j = 0; j < rels.cols(); ++j) {
        auto y = s.u * rels.column(j);
        for (std::size_t i = 0; i < n; ++i) {
            if (i < s.rank) {
                if (y[i] % s.d(i, i) != 0) throw std::logic_error("subquotient: relation outside generator span");
                coords(i, j) = y[i] / s.d(i, i);
            } else if (y[i] != 0) {
                throw std::logic_error("subquotient: relation outside generator span");
            }
        }
    }
    return FgAbelianGroup::from_relations(coords);
}

// Generators (columns, in the domain's free cover) of {x : M x in codomain relations}.
inline IntMatrix kernel_lattice(const GroupHom& h) {
    const std::size_t m = h.domain().generator_count();
    const IntMatrix rel = h.codomain().relations();
    IntMatrix neg_rel(rel.rows(), rel.cols());
    for (std::size_t r = 0; r < rel.rows(); ++r)
        for (std::size_t c = 0; c < rel.cols(); ++c) neg_rel(r, c) = -rel(r, c);
    IntMatrix k = integer_kernel(IntMatrix::hconcat(h.matrix(), neg_rel));
    IntMatrix out(m, k.cols());
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < k.cols(); ++c) out(r, c) = k(r, c);
    return out;
}

// Generators of image(h) + codomain relations, in the codomain's free cover.
inline IntMatrix image_lattice(const GroupHom& h) {
    return IntMatrix::hconcat(h.matrix(), h.codomain().relations());
}

}  // namespace detail

inline FgAbelianGroup cokernel(const GroupHom& h) {
    return FgAbelianGroup::from_relations(detail::image_lattice(h));
}

inline FgAbelianGroup image(const GroupHom& h) {
    return detail::subquotient(detail::image_lattice(h), h.codomain().relations());
}

inline FgAbelianGroup kernel(const GroupHom& h) {
    return detail::subquotient(detail::kernel_lattice(h), h.domain().relations());
}

/// image(f) == kernel(g) as subgroups of the middle group.
inline bool is_exact_at(const GroupHom& f, const GroupHom& g) {
    if (f.codomain() != g.domain())
        throw std::invalid_argument("is_exact_at: middle groups differ: " + f.codomain().to_string() + " vs " +
                                    g.domain().to_string());
    const IntMatrix im = detail::image_lattice(f);
    const IntMatrix ker = detail::kernel_lattice(g);
    // im subset of ker: g kills every image generator.
    for (std::size_t j = 0; j < f.matrix().cols(); ++j)
        if (!g.codomain().is_zero_element(g.matrix() * f.matrix().column(j))) return false;
    // ker subset of im (ker lattice already contains the middle relations).
    for (std::size_t j = 0; j < ker.cols(); ++j)
        if (!in_lattice(ker.column(j), im)) return false;
    return true;
}

}  // namespace bcov
