#pragma once

#include "sandwichkit/numerics/linalg.hpp"
#include "sandwichkit/numerics/scalar.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sandwichkit {

enum class Relation { less_equal, equal, greater_equal };
enum class Sense { minimize, maximize };
enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    default: return "unbounded";
    }
}

template <class F>
struct Constraint {
    Vec<F> coeffs;
    Relation relation = Relation::less_equal;
    F rhs = 0;
};

template <class F>
struct VarBound {
    std::optional<F> lower;
    std::optional<F> upper;
};

/// Dense linear program. Variables without an entry in `bounds` are free.
template <class F>
struct LinearProgram {
    std::size_t num_vars = 0;
    Vec<F> objective;
    Sense sense = Sense::minimize;
    std::vector<Constraint<F>> constraints;
    std::vector<VarBound<F>> bounds;

    void validate() const
    {
        if (objective.size() != num_vars)
            throw StructuralError("objective has length " + std::to_string(objective.size()) + ", expected " +
                                  std::to_string(num_vars));
        for (std::size_t i = 0; i < constraints.size(); ++i)
            if (constraints[i].coeffs.size() != num_vars)
                throw StructuralError("constraint " + std::to_string(i) + " has length " +
                                      std::to_string(constraints[i].coeffs.size()) + ", expected " +
                                      std::to_string(num_vars));
        if (!bounds.empty() && bounds.size() != num_vars)
            throw StructuralError("bounds given for " + std::to_string(bounds.size()) + " of " +
                                  std::to_string(num_vars) + " variables");
    }

    VarBound<F> bound(std::size_t j) const { return bounds.empty() ? VarBound<F>{} : bounds[j]; }
};

/// Result of lp_solve.
///
/// For `optimal`, `point` attains `value` and `duals` holds one multiplier per
/// constraint proving optimality (see dual_bound). For `infeasible`, `duals` is a
/// Farkas certificate: dual_bound with a zero objective is strictly positive.
/// For `unbounded`, `point` is feasible and `ray` is an improving recession direction.
template <class F>
struct LpResult {
    LpStatus status = LpStatus::infeasible;
    F value = 0;
    Vec<F> point;
    Vec<F> duals;
    Vec<F> ray;
};

/// Incremental construction of a LinearProgram with sparse rows.
template <class F>
class LpBuilder {
public:
    using Term = std::pair<std::size_t, F>;

    std::size_t add_var(std::optional<F> lower = std::nullopt, std::optional<F> upper = std::nullopt)
    {
        bounds_.push_back({std::move(lower), std::move(upper)});
        objective_.push_back(F(0));
        return bounds_.size() - 1;
    }

    std::size_t add_nonneg() { return add_var(F(0)); }

    std::size_t add_vars(std::size_t count, std::optional<F> lower = std::nullopt)
    {
        std::size_t first = bounds_.size();
        for (std::size_t i = 0; i < count; ++i)
            add_var(lower);
        return first;
    }

    std::size_t num_vars() const { return bounds_.size(); }

    void set_objective(std::size_t var, F coeff) { objective_[var] = std::move(coeff); }
    void add_objective(std::size_t var, const F& coeff) { objective_[var] += coeff; }
    void set_sense(Sense s) { sense_ = s; }

    void add_row(std::vector<Term> terms, Relation rel, F rhs)
    {
        rows_.push_back({std::move(terms), rel, std::move(rhs)});
    }

    LinearProgram<F> build() const
    {
        LinearProgram<F> lp;
        lp.num_vars = bounds_.size();
        lp.objective = objective_;
        lp.sense = sense_;
        lp.bounds = bounds_;
        for (const auto& row : rows_) {
            Constraint<F> c{Vec<F>(lp.num_vars, F(0)), row.rel, row.rhs};
            for (const auto& [idx, coeff] : row.terms) {
                if (idx >= lp.num_vars)
                    throw StructuralError("row references variable " + std::to_string(idx));
                c.coeffs[idx] += coeff;
            }
            lp.constraints.push_back(std::move(c));
        }
        return lp;
    }

private:
    struct Row {
        std::vector<Term> terms;
        Relation rel;
        F rhs;
    };
    std::vector<VarBound<F>> bounds_;
    Vec<F> objective_;
    Sense sense_ = Sense::minimize;
    std::vector<Row> rows_;
};

namespace detail {

// Dense two-phase tableau simplex with Bland's rule on a problem already in
// standard form: minimize c^T x subject to A x = b, x >= 0, b >= 0.
template <class F>
class Tableau {
public:
    Tableau(const Mat<F>& a, const Vec<F>& b, const Vec<F>& c)
        : m_(a.size()), n_(c.size()), width_(n_ + m_ + 1), rows_(m_ + 2, Vec<F>(width_, F(0))), basis_(m_)
    {
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t j = 0; j < n_; ++j)
                rows_[r][j] = a[r][j];
            rows_[r][n_ + r] = 1;
            rows_[r][rhs()] = b[r];
            basis_[r] = n_ + r;
        }
        Vec<F>& phase2 = rows_[m_];
        for (std::size_t j = 0; j < n_; ++j)
            phase2[j] = c[j];
        Vec<F>& phase1 = rows_[m_ + 1];
        for (std::size_t r = 0; r < m_; ++r)
            for (std::size_t j = 0; j < n_; ++j)
                phase1[j] -= rows_[r][j];
        for (std::size_t r = 0; r < m_; ++r)
            phase1[rhs()] -= rows_[r][rhs()];
    }

    enum class Outcome { optimal, unbounded };

    // Returns the entering column when unbounded.
    std::pair<Outcome, std::size_t> run(bool phase_one)
    {
        const std::size_t obj = phase_one ? m_ + 1 : m_;
        const std::size_t eligible = phase_one ? n_ + m_ : n_;
        for (;;) {
            std::size_t enter = eligible;
            for (std::size_t j = 0; j < eligible; ++j)
                if (sign(rows_[obj][j]) < 0) {
                    enter = j;
                    break;
                }
            if (enter == eligible)
                return {Outcome::optimal, 0};
            std::size_t leave = m_;
            F best_ratio = 0;
            for (std::size_t r = 0; r < m_; ++r) {
                if (sign(rows_[r][enter]) <= 0)
                    continue;
                F ratio = rows_[r][rhs()] / rows_[r][enter];
                if (leave == m_) {
                    leave = r;
                    best_ratio = ratio;
                    continue;
                }
                int cmp = sign(F(ratio - best_ratio));
                if (cmp < 0 || (cmp == 0 && basis_[r] < basis_[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
            if (leave == m_)
                return {Outcome::unbounded, enter};
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t s)
    {
        const F inv = F(1) / rows_[r][s];
        Vec<F>& prow = rows_[r];
        for (auto& x : prow)
            if (!is_zero(x))
                x *= inv;
        prow[s] = 1;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == r || is_zero(rows_[i][s]))
                continue;
            const F factor = rows_[i][s];
            Vec<F>& row = rows_[i];
            for (std::size_t k = 0; k < width_; ++k)
                if (!is_zero(prow[k]))
                    row[k] -= factor * prow[k];
            row[s] = 0;
        }
        basis_[r] = s;
    }

    // Pivots zero-level artificials out of the basis where a structural column allows it.
    void expel_artificials()
    {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_)
                continue;
            for (std::size_t j = 0; j < n_; ++j)
                if (!is_zero(rows_[r][j])) {
                    pivot(r, j);
                    break;
                }
        }
    }

    F phase_one_value() const { return -rows_[m_ + 1][rhs()]; }
    F phase_two_value() const { return -rows_[m_][rhs()]; }

    Vec<F> solution() const
    {
        Vec<F> x(n_, F(0));
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] < n_)
                x[basis_[r]] = rows_[r][rhs()];
        return x;
    }

    // Simplex multipliers y = c_B B^{-1}, read off the artificial columns.
    Vec<F> multipliers(bool phase_one) const
    {
        const std::size_t obj = phase_one ? m_ + 1 : m_;
        const F art_cost = phase_one ? F(1) : F(0);
        Vec<F> y(m_);
        for (std::size_t r = 0; r < m_; ++r)
            y[r] = art_cost - rows_[obj][n_ + r];
        return y;
    }

    Vec<F> ray(std::size_t enter) const
    {
        Vec<F> d(n_, F(0));
        d[enter] = 1;
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] < n_)
                d[basis_[r]] = -rows_[r][enter];
        return d;
    }

private:
    std::size_t rhs() const { return width_ - 1; }

    std::size_t m_, n_, width_;
    Mat<F> rows_;
    std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Solves `lp` exactly (or with the field tolerance for floating types).
///
/// Variables are mapped to nonnegative standard-form columns (shift by the
/// lower bound, reflect at the upper bound, or split when free); upper bounds of
/// doubly bounded variables become extra rows. Two-phase simplex with Bland's
/// rule guarantees termination.
template <class F>
LpResult<F> lp_solve(const LinearProgram<F>& lp)
{
    lp.validate();
    const std::size_t n = lp.num_vars;

    // x_j = offset_j + sum coeff * std column
    struct VarMap {
        F offset = 0;
        std::vector<std::pair<std::size_t, F>> cols;
    };
    std::vector<VarMap> vmap(n);
    std::size_t ncols = 0;
    std::vector<std::pair<std::size_t, F>> box_rows;  // (std column, width)
    for (std::size_t j = 0; j < n; ++j) {
        auto b = lp.bound(j);
        if (b.lower) {
            vmap[j].offset = *b.lower;
            vmap[j].cols.push_back({ncols, F(1)});
            if (b.upper)
                box_rows.push_back({ncols, F(*b.upper - *b.lower)});
            ++ncols;
        } else if (b.upper) {
            vmap[j].offset = *b.upper;
            vmap[j].cols.push_back({ncols++, F(-1)});
        } else {
            vmap[j].cols.push_back({ncols++, F(1)});
            vmap[j].cols.push_back({ncols++, F(-1)});
        }
    }
    std::vector<std::size_t> slack_col(lp.constraints.size(), SIZE_MAX);
    for (std::size_t i = 0; i < lp.constraints.size(); ++i)
        if (lp.constraints[i].relation != Relation::equal)
            slack_col[i] = ncols++;
    const std::size_t first_box_slack = ncols;
    ncols += box_rows.size();

    const std::size_t m = lp.constraints.size() + box_rows.size();
    Mat<F> a(m, Vec<F>(ncols, F(0)));
    Vec<F> b(m, F(0));
    std::vector<int> row_sign(m, 1);
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& con = lp.constraints[i];
        F rhs = con.rhs;
        for (std::size_t j = 0; j < n; ++j) {
            if (is_zero(con.coeffs[j]))
                continue;
            rhs -= con.coeffs[j] * vmap[j].offset;
            for (const auto& [col, k] : vmap[j].cols)
                a[i][col] += con.coeffs[j] * k;
        }
        if (con.relation == Relation::less_equal)
            a[i][slack_col[i]] = 1;
        else if (con.relation == Relation::greater_equal)
            a[i][slack_col[i]] = -1;
        b[i] = rhs;
    }
    for (std::size_t k = 0; k < box_rows.size(); ++k) {
        std::size_t r = lp.constraints.size() + k;
        a[r][box_rows[k].first] = 1;
        a[r][first_box_slack + k] = 1;
        b[r] = box_rows[k].second;
    }
    for (std::size_t r = 0; r < m; ++r)
        if (sign(b[r]) < 0) {
            row_sign[r] = -1;
            for (auto& x : a[r])
                x = -x;
            b[r] = -b[r];
        }

    const bool maximize = lp.sense == Sense::maximize;
    Vec<F> c(ncols, F(0));
    F c_offset = 0;
    for (std::size_t j = 0; j < n; ++j) {
        F cj = maximize ? F(-lp.objective[j]) : lp.objective[j];
        if (is_zero(cj))
            continue;
        c_offset += cj * vmap[j].offset;
        for (const auto& [col, k] : vmap[j].cols)
            c[col] += cj * k;
    }

    auto to_original = [&](const Vec<F>& xs, bool with_offset) {
        Vec<F> x(n, F(0));
        for (std::size_t j = 0; j < n; ++j) {
            F v = with_offset ? vmap[j].offset : F(0);
            for (const auto& [col, k] : vmap[j].cols)
                v += k * xs[col];
            x[j] = v;
        }
        return x;
    };
    auto original_multipliers = [&](const Vec<F>& ys, bool flip) {
        Vec<F> y(lp.constraints.size());
        for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
            F v = row_sign[i] < 0 ? F(-ys[i]) : ys[i];
            y[i] = flip ? F(-v) : v;
        }
        return y;
    };

    detail::Tableau<F> tab(a, b, c);
    tab.run(true);
    LpResult<F> res;
    if (sign(tab.phase_one_value()) > 0) {
        res.status = LpStatus::infeasible;
        res.duals = original_multipliers(tab.multipliers(true), false);
        return res;
    }
    tab.expel_artificials();
    auto [outcome, enter] = tab.run(false);
    res.point = to_original(tab.solution(), true);
    if (outcome == detail::Tableau<F>::Outcome::unbounded) {
        res.status = LpStatus::unbounded;
        res.ray = to_original(tab.ray(enter), false);
        return res;
    }
    res.status = LpStatus::optimal;
    F value = tab.phase_two_value() + c_offset;
    res.value = maximize ? F(-value) : value;
    res.duals = original_multipliers(tab.multipliers(false), maximize);
    return res;
}

/// Bound on the optimal value implied by constraint multipliers `y`.
///
/// For minimization this is a lower bound, valid when y_i >= 0 on ">=" rows and
/// y_i <= 0 on "<=" rows; the reduced costs c - A^T y are minimized over the
/// variable box. Maximization is handled by symmetry. Sign-invalid multipliers
/// give -inf (min) / +inf (max), an unusable certificate.
template <class F>
Extended<F> dual_bound(const LinearProgram<F>& lp, const Vec<F>& y, bool zero_objective = false)
{
    lp.validate();
    if (y.size() != lp.constraints.size())
        throw StructuralError("multiplier vector has wrong length");
    const bool maximize = lp.sense == Sense::maximize;
    const Extended<F> invalid = maximize ? Extended<F>::pos_inf() : Extended<F>::neg_inf();
    // Work on the minimization form: min s*c, multipliers s*y.
    const F s = maximize ? F(-1) : F(1);
    F bound = 0;
    Vec<F> reduced(lp.num_vars, F(0));
    for (std::size_t j = 0; j < lp.num_vars; ++j)
        reduced[j] = zero_objective ? F(0) : F(s * lp.objective[j]);
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& con = lp.constraints[i];
        F yi = s * y[i];
        if (zero_objective)
            yi = y[i];
        int sg = sign(yi);
        if ((con.relation == Relation::greater_equal && sg < 0) || (con.relation == Relation::less_equal && sg > 0))
            return invalid;
        if (sg == 0)
            continue;
        bound += yi * con.rhs;
        for (std::size_t j = 0; j < lp.num_vars; ++j)
            reduced[j] -= yi * con.coeffs[j];
    }
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
        int sg = sign(reduced[j]);
        if (sg == 0)
            continue;
        auto bnd = lp.bound(j);
        if (sg > 0) {
            if (!bnd.lower)
                return invalid;
            bound += reduced[j] * *bnd.lower;
        } else {
            if (!bnd.upper)
                return invalid;
            bound += reduced[j] * *bnd.upper;
        }
    }
    if (zero_objective)
        return Extended<F>(bound);
    return Extended<F>(maximize ? F(-bound) : bound);
}

/// True iff x satisfies every constraint and bound (exactly, or within tolerance).
template <class F>
bool is_feasible(const LinearProgram<F>& lp, const Vec<F>& x)
{
    if (x.size() != lp.num_vars)
        return false;
    for (const auto& con : lp.constraints) {
        int sg = sign(F(dot(con.coeffs, x) - con.rhs));
        if ((con.relation == Relation::less_equal && sg > 0) || (con.relation == Relation::greater_equal && sg < 0) ||
            (con.relation == Relation::equal && sg != 0))
            return false;
    }
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
        auto b = lp.bound(j);
        if (b.lower && sign(F(x[j] - *b.lower)) < 0)
            return false;
        if (b.upper && sign(F(x[j] - *b.upper)) > 0)
            return false;
    }
    return true;
}

/// Farkas check: multipliers prove that no feasible point exists.
template <class F>
bool certifies_infeasible(const LinearProgram<F>& lp, const Vec<F>& y)
{
    LinearProgram<F> probe = lp;
    probe.sense = Sense::minimize;
    auto bound = dual_bound(probe, y, true);
    return bound.is_finite() ? sign(bound.value()) > 0 : false;
}

/// Checks that `ray` is a recession direction of the feasible set along which the objective improves.
template <class F>
bool certifies_unbounded(const LinearProgram<F>& lp, const Vec<F>& point, const Vec<F>& ray)
{
    if (!is_feasible(lp, point) || ray.size() != lp.num_vars)
        return false;
    for (const auto& con : lp.constraints) {
        int sg = sign(dot(con.coeffs, ray));
        if ((con.relation == Relation::less_equal && sg > 0) || (con.relation == Relation::greater_equal && sg < 0) ||
            (con.relation == Relation::equal && sg != 0))
            return false;
    }
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
        auto b = lp.bound(j);
        if (b.lower && sign(ray[j]) < 0)
            return false;
        if (b.upper && sign(ray[j]) > 0)
            return false;
    }
    int gain = sign(dot(lp.objective, ray));
    return lp.sense == Sense::minimize ? gain < 0 : gain > 0;
}

}  // namespace sandwichkit
