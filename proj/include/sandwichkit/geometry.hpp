#pragma once

#include "sandwichkit/numerics/linalg.hpp"
#include "sandwichkit/numerics/lp.hpp"

#include <string>
#include <utility>

namespace sandwichkit {

/// z -> linear * z + offset between coordinate spaces.
template <class F>
class AffineMap {
public:
    AffineMap() = default;

    AffineMap(std::size_t in_dim, Mat<F> linear, Vec<F> offset)
        : in_dim_(in_dim), linear_(std::move(linear)), offset_(std::move(offset))
    {
        if (linear_.size() != offset_.size())
            throw StructuralError("affine map has " + std::to_string(linear_.size()) + " rows but offset of length " +
                                  std::to_string(offset_.size()));
        for (const auto& row : linear_)
            if (row.size() != in_dim_)
                throw StructuralError("affine map row of length " + std::to_string(row.size()) + ", expected " +
                                      std::to_string(in_dim_));
    }

    /// Linear map with zero offset.
    static AffineMap linear(std::size_t in_dim, Mat<F> m)
    {
        Vec<F> zero(m.size(), F(0));
        return AffineMap(in_dim, std::move(m), std::move(zero));
    }

    static AffineMap identity(std::size_t dim)
    {
        Mat<F> m(dim, Vec<F>(dim, F(0)));
        for (std::size_t i = 0; i < dim; ++i)
            m[i][i] = 1;
        return linear(dim, std::move(m));
    }

    static AffineMap zero(std::size_t in_dim, std::size_t out_dim)
    {
        return linear(in_dim, Mat<F>(out_dim, Vec<F>(in_dim, F(0))));
    }

    /// Coordinate selection z -> (z[idx_0], z[idx_1], ...).
    static AffineMap projection(std::size_t in_dim, const std::vector<std::size_t>& idx)
    {
        Mat<F> m(idx.size(), Vec<F>(in_dim, F(0)));
        for (std::size_t r = 0; r < idx.size(); ++r) {
            if (idx[r] >= in_dim)
                throw StructuralError("projection index out of range");
            m[r][idx[r]] = 1;
        }
        return linear(in_dim, std::move(m));
    }

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return linear_.size(); }
    const Mat<F>& matrix() const { return linear_; }
    const Vec<F>& offset() const { return offset_; }
    bool is_linear() const { return all_zero(offset_); }

    Vec<F> apply(const Vec<F>& z) const
    {
        if (z.size() != in_dim_)
            throw StructuralError("affine map expects input of dimension " + std::to_string(in_dim_) + ", got " +
                                  std::to_string(z.size()));
        return add(mat_vec(linear_, z), offset_);
    }

    Vec<F> apply_linear(const Vec<F>& z) const { return mat_vec(linear_, z); }

    /// this ∘ inner
    AffineMap compose(const AffineMap& inner) const
    {
        if (inner.out_dim() != in_dim_)
            throw StructuralError("cannot compose maps: inner output dimension " + std::to_string(inner.out_dim()) +
                                  " vs outer input dimension " + std::to_string(in_dim_));
        Mat<F> m(out_dim(), Vec<F>(inner.in_dim(), F(0)));
        for (std::size_t r = 0; r < out_dim(); ++r)
            for (std::size_t k = 0; k < in_dim_; ++k) {
                if (is_zero(linear_[r][k]))
                    continue;
                for (std::size_t c = 0; c < inner.in_dim(); ++c)
                    m[r][c] += linear_[r][k] * inner.linear_[k][c];
            }
        return AffineMap(inner.in_dim(), std::move(m), apply(inner.offset_));
    }

    /// Stacks outputs: z -> (this(z), other(z)).
    AffineMap stack(const AffineMap& other) const
    {
        if (other.in_dim() != in_dim_)
            throw StructuralError("cannot stack maps with different input dimensions");
        Mat<F> m = linear_;
        m.insert(m.end(), other.linear_.begin(), other.linear_.end());
        Vec<F> off = offset_;
        off.insert(off.end(), other.offset_.begin(), other.offset_.end());
        return AffineMap(in_dim_, std::move(m), std::move(off));
    }

    AffineMap operator-(const AffineMap& other) const
    {
        if (other.in_dim() != in_dim_ || other.out_dim() != out_dim())
            throw StructuralError("cannot subtract maps of different shapes");
        Mat<F> m = linear_;
        for (std::size_t r = 0; r < m.size(); ++r)
            for (std::size_t c = 0; c < in_dim_; ++c)
                m[r][c] -= other.linear_[r][c];
        return AffineMap(in_dim_, std::move(m), sub(offset_, other.offset_));
    }

    friend bool operator==(const AffineMap& a, const AffineMap& b)
    {
        return a.in_dim_ == b.in_dim_ && a.linear_ == b.linear_ && a.offset_ == b.offset_;
    }

private:
    std::size_t in_dim_ = 0;
    Mat<F> linear_;
    Vec<F> offset_;
};

/// Convex hull of a nonempty finite point list.
template <class F>
class Polytope {
public:
    Polytope(std::size_t dim, std::vector<Vec<F>> vertices) : dim_(dim), vertices_(std::move(vertices))
    {
        if (vertices_.empty())
            throw StructuralError("polytope needs at least one vertex");
        for (const auto& v : vertices_)
            if (v.size() != dim_)
                throw StructuralError("polytope vertex of dimension " + std::to_string(v.size()) + ", expected " +
                                      std::to_string(dim_));
    }

    /// Axis-aligned box [lo_i, hi_i].
    static Polytope box(const Vec<F>& lo, const Vec<F>& hi)
    {
        const std::size_t d = lo.size();
        std::vector<Vec<F>> verts;
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
            Vec<F> v(d);
            for (std::size_t i = 0; i < d; ++i)
                v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
            verts.push_back(std::move(v));
        }
        return Polytope(d, std::move(verts));
    }

    std::size_t dim() const { return dim_; }
    const std::vector<Vec<F>>& vertices() const { return vertices_; }

    friend bool operator==(const Polytope& a, const Polytope& b)
    {
        return a.dim_ == b.dim_ && a.vertices_ == b.vertices_;
    }

private:
    std::size_t dim_;
    std::vector<Vec<F>> vertices_;
};

/// Linear span of independent vectors; an empty basis is {0}.
template <class F>
class Subspace {
public:
    Subspace(std::size_t ambient_dim, Mat<F> basis) : ambient_(ambient_dim), basis_(std::move(basis))
    {
        for (const auto& b : basis_)
            if (b.size() != ambient_)
                throw StructuralError("subspace basis vector has wrong dimension");
        if (rank(basis_, ambient_) != basis_.size())
            throw StructuralError("subspace basis vectors are linearly dependent");
    }

    /// Canonical (reduced row echelon) basis of span(vectors).
    static Subspace span(std::size_t ambient_dim, const std::vector<Vec<F>>& vectors)
    {
        return Subspace(ambient_dim, rref(vectors, ambient_dim).rows);
    }

    static Subspace full(std::size_t dim) { return span(dim, AffineMap<F>::identity(dim).matrix()); }

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return basis_.size(); }
    const Mat<F>& basis() const { return basis_; }

    bool contains(const Vec<F>& x) const
    {
        if (x.size() != ambient_)
            throw StructuralError("subspace membership query of wrong dimension");
        if (basis_.empty())
            return all_zero(x);
        return solve_linear(transpose(basis_, ambient_), x, basis_.size()).has_value();
    }

private:
    std::size_t ambient_;
    Mat<F> basis_;
};

namespace detail {

inline std::string dims_message(const char* what, std::size_t got, std::size_t want)
{
    return std::string(what) + " has dimension " + std::to_string(got) + ", expected " + std::to_string(want);
}

}  // namespace detail

template <class F>
Vec<F> affine_apply(const AffineMap<F>& m, const Vec<F>& z)
{
    return m.apply(z);
}

/// Barycentric weights expressing x in conv(points) (plus `extra` free
/// directions), or nullopt.
template <class F>
std::optional<Vec<F>> convex_weights(const std::vector<Vec<F>>& points, const Vec<F>& x,
                                     const std::vector<Vec<F>>& lineality = {})
{
    LpBuilder<F> lp;
    const std::size_t first = lp.add_vars(points.size(), F(0));
    const std::size_t first_free = lp.add_vars(lineality.size());
    std::vector<typename LpBuilder<F>::Term> simplex;
    for (std::size_t i = 0; i < points.size(); ++i)
        simplex.push_back({first + i, F(1)});
    lp.add_row(std::move(simplex), Relation::equal, F(1));
    for (std::size_t d = 0; d < x.size(); ++d) {
        std::vector<typename LpBuilder<F>::Term> row;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (!is_zero(points[i][d]))
                row.push_back({first + i, points[i][d]});
        for (std::size_t k = 0; k < lineality.size(); ++k)
            if (!is_zero(lineality[k][d]))
                row.push_back({first_free + k, lineality[k][d]});
        lp.add_row(std::move(row), Relation::equal, x[d]);
    }
    auto res = lp_solve(lp.build());
    if (res.status != LpStatus::optimal)
        return std::nullopt;
    return Vec<F>(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(points.size()));
}

template <class F>
bool polytope_contains(const Polytope<F>& p, const Vec<F>& x)
{
    if (x.size() != p.dim())
        throw StructuralError(detail::dims_message("query point", x.size(), p.dim()));
    return convex_weights(p.vertices(), x).has_value();
}

/// True iff target is a nonnegative combination of points plus a free combination of lineality.
template <class F>
bool in_cone(const std::vector<Vec<F>>& points, const Vec<F>& target, const std::vector<Vec<F>>& lineality = {})
{
    LpBuilder<F> lp;
    const std::size_t first = lp.add_vars(points.size(), F(0));
    const std::size_t first_free = lp.add_vars(lineality.size());
    for (std::size_t d = 0; d < target.size(); ++d) {
        std::vector<typename LpBuilder<F>::Term> row;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (!is_zero(points[i][d]))
                row.push_back({first + i, points[i][d]});
        for (std::size_t k = 0; k < lineality.size(); ++k)
            if (!is_zero(lineality[k][d]))
                row.push_back({first_free + k, lineality[k][d]});
        lp.add_row(std::move(row), Relation::equal, target[d]);
    }
    return lp_solve(lp.build()).status == LpStatus::optimal;
}

template <class F>
struct SubspaceTest {
    bool is_subspace = false;
    Subspace<F> basis;
};

/// Decides whether the union over λ > 0 of λ·(conv(points) + span(lineality))
/// is a linear subspace, and returns that subspace when it is.
///
/// The union contains 0 only when 0 lies in the hull itself, and is then the
/// cone generated by the points (plus the lineality space); a cone is a subspace
/// exactly when it contains the negative of each generator.
template <class F>
SubspaceTest<F> cone_union_is_subspace(const std::vector<Vec<F>>& points, const std::vector<Vec<F>>& lineality = {})
{
    if (points.empty())
        throw StructuralError("cone_union_is_subspace needs at least one point");
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim)
            throw StructuralError(detail::dims_message("point", p.size(), dim));
    std::vector<Vec<F>> spanning = points;
    spanning.insert(spanning.end(), lineality.begin(), lineality.end());
    auto span = Subspace<F>::span(dim, spanning);

    if (!convex_weights(points, Vec<F>(dim, F(0)), lineality))
        return {false, span};
    for (const auto& g : points)
        if (!all_zero(g) && !in_cone(points, negate(g), lineality))
            return {false, span};
    return {true, span};
}

}  // namespace sandwichkit
