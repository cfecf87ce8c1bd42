#pragma once

#include "sandwichkit/numerics/scalar.hpp"

#include <optional>
#include <span>
#include <string>

namespace sandwichkit {

template <class F>
F dot(std::span<const F> a, std::span<const F> b)
{
    if (a.size() != b.size())
        throw StructuralError("dot product of vectors with lengths " + std::to_string(a.size()) +
                              " and " + std::to_string(b.size()));
    F acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!is_zero(a[i]))
            acc += a[i] * b[i];
    return acc;
}

template <class F>
F dot(const Vec<F>& a, const Vec<F>& b)
{
    return dot(std::span<const F>(a), std::span<const F>(b));
}

template <class F>
Vec<F> add(const Vec<F>& a, const Vec<F>& b)
{
    if (a.size() != b.size())
        throw StructuralError("vector sum of mismatched lengths");
    Vec<F> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] + b[i];
    return out;
}

template <class F>
Vec<F> sub(const Vec<F>& a, const Vec<F>& b)
{
    if (a.size() != b.size())
        throw StructuralError("vector difference of mismatched lengths");
    Vec<F> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

template <class F>
Vec<F> scale(const F& s, const Vec<F>& a)
{
    Vec<F> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = s * a[i];
    return out;
}

template <class F>
Vec<F> negate(const Vec<F>& a)
{
    return scale(F(-1), a);
}

template <class F>
bool all_zero(const Vec<F>& a)
{
    for (const auto& x : a)
        if (!is_zero(x))
            return false;
    return true;
}

template <class F>
bool approx_eq(const Vec<F>& a, const Vec<F>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!approx_eq(a[i], b[i]))
            return false;
    return true;
}

/// Matrix-vector product; `m` has rows of length x.size().
template <class F>
Vec<F> mat_vec(const Mat<F>& m, const Vec<F>& x)
{
    Vec<F> out(m.size());
    for (std::size_t r = 0; r < m.size(); ++r)
        out[r] = dot(m[r], x);
    return out;
}

/// Transposed product m^T y; `cols` gives the column count for empty `m`.
template <class F>
Vec<F> mat_t_vec(const Mat<F>& m, const Vec<F>& y, std::size_t cols)
{
    if (m.size() != y.size())
        throw StructuralError("transpose product of mismatched dimensions");
    Vec<F> out(cols, F(0));
    for (std::size_t r = 0; r < m.size(); ++r) {
        if (is_zero(y[r]))
            continue;
        for (std::size_t c = 0; c < cols; ++c)
            out[c] += m[r][c] * y[r];
    }
    return out;
}

template <class F>
Mat<F> transpose(const Mat<F>& m, std::size_t cols)
{
    Mat<F> t(cols, Vec<F>(m.size()));
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c)
            t[c][r] = m[r][c];
    return t;
}

template <class F>
struct RowEchelon {
    Mat<F> rows;                      // reduced row echelon form, zero rows dropped
    std::vector<std::size_t> pivots;  // pivot column of each row
};

/// Gauss-Jordan elimination to reduced row echelon form.
template <class F>
RowEchelon<F> rref(Mat<F> m, std::size_t cols)
{
    std::size_t lead_row = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t c = 0; c < cols && lead_row < m.size(); ++c) {
        std::size_t best = m.size();
        for (std::size_t r = lead_row; r < m.size(); ++r)
            if (!is_zero(m[r][c])) {
                best = r;
                break;
            }
        if (best == m.size())
            continue;
        std::swap(m[lead_row], m[best]);
        const F inv = F(1) / m[lead_row][c];
        for (auto& x : m[lead_row])
            x *= inv;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == lead_row || is_zero(m[r][c]))
                continue;
            const F factor = m[r][c];
            for (std::size_t k = 0; k < cols; ++k)
                m[r][k] -= factor * m[lead_row][k];
        }
        pivots.push_back(c);
        ++lead_row;
    }
    m.resize(lead_row);
    return {std::move(m), std::move(pivots)};
}

template <class F>
std::size_t rank(const Mat<F>& m, std::size_t cols)
{
    return rref(m, cols).rows.size();
}

/// Some solution of A x = b, or nullopt when the system is inconsistent.
template <class F>
std::optional<Vec<F>> solve_linear(const Mat<F>& a, const Vec<F>& b, std::size_t cols)
{
    if (a.size() != b.size())
        throw StructuralError("linear system with " + std::to_string(a.size()) + " rows but rhs of length " +
                              std::to_string(b.size()));
    Mat<F> aug = a;
    for (std::size_t r = 0; r < aug.size(); ++r) {
        if (aug[r].size() != cols)
            throw StructuralError("linear system row has wrong length");
        aug[r].push_back(b[r]);
    }
    auto ech = rref(std::move(aug), cols + 1);
    Vec<F> x(cols, F(0));
    for (std::size_t r = 0; r < ech.rows.size(); ++r) {
        if (ech.pivots[r] == cols)
            return std::nullopt;
        x[ech.pivots[r]] = ech.rows[r][cols];
    }
    return x;
}

/// Basis of {x : A x = 0}.
template <class F>
Mat<F> nullspace(const Mat<F>& a, std::size_t cols)
{
    auto ech = rref(a, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : ech.pivots)
        is_pivot[p] = true;
    Mat<F> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free])
            continue;
        Vec<F> v(cols, F(0));
        v[free] = 1;
        for (std::size_t r = 0; r < ech.rows.size(); ++r)
            v[ech.pivots[r]] = -ech.rows[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace sandwichkit
