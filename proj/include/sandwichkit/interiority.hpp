#pragma once

#include "sandwichkit/convexfn.hpp"

#include <optional>
#include <random>

namespace sandwichkit {

/// Phi, B and a level gamma, together with Y = union of lambda B(dom Phi).
template <class F>
struct SublevelQuery {
    SeparableFunction<F> phi;
    AffineMap<F> B;
    F gamma;
    Subspace<F> Y;
};

/// Extra affine equality A z = target imposed on every point of an LP.
template <class F>
struct FiberConstraint {
    AffineMap<F> A;
    Vec<F> target;
};

/// Images under B of the points spanning dom phi.
template <class F>
std::vector<Vec<F>> image_points(const SeparableFunction<F>& phi, const AffineMap<F>& B)
{
    if (B.in_dim() != phi.dim())
        throw StructuralError("map B has input dimension " + std::to_string(B.in_dim()) +
                              " but the function has dimension " + std::to_string(phi.dim()));
    std::vector<Vec<F>> out;
    for (const auto& z : phi.domain_points())
        out.push_back(B.apply(z));
    return out;
}

/// Whether union of lambda B(dom phi) over lambda > 0 is a linear subspace.
template <class F>
SubspaceTest<F> subspace_condition(const SeparableFunction<F>& phi, const AffineMap<F>& B)
{
    return cone_union_is_subspace(image_points(phi, B));
}

/// Builds a query with Y taken from the subspace test (never supplied separately).
template <class F>
SublevelQuery<F> make_sublevel_query(const SeparableFunction<F>& phi, const AffineMap<F>& B, const F& gamma)
{
    return {phi, B, gamma, subspace_condition(phi, B).basis};
}

/// inf phi over {Bz = 0} (and the optional fiber), +inf when that set misses dom phi.
template <class F>
SupResult<F> fiber_min(const SeparableFunction<F>& phi, const AffineMap<F>& B,
                       const std::optional<FiberConstraint<F>>& extra = std::nullopt)
{
    auto terms = phi.terms();
    terms.push_back({point_indicator(Vec<F>(B.out_dim(), F(0))), B});
    if (extra)
        terms.push_back({point_indicator(extra->target), extra->A});
    return inf_affine_plus_convex(phi.shift(), terms);
}

namespace detail {

/// Adds a copy of z with the rows phi(z) <= level - slack_coeff * slack.
template <class F>
std::vector<std::size_t> add_sublevel_point(LpBuilder<F>& lp, const SeparableFunction<F>& phi, const F& level,
                                            std::optional<std::size_t> slack = std::nullopt)
{
    auto z = add_point(lp, phi.dim());
    Terms<F> row;
    for (const auto& t : phi.terms()) {
        auto cost = encode_term(lp, z, t.f, t.map);
        row.insert(row.end(), cost.begin(), cost.end());
    }
    for (std::size_t c = 0; c < z.size(); ++c)
        if (!is_zero(phi.shift().coeffs[c]))
            row.push_back({z[c], phi.shift().coeffs[c]});
    if (slack)
        row.push_back({*slack, F(1)});
    lp.add_row(std::move(row), Relation::less_equal, F(level - phi.shift().constant));
    return z;
}

/// Largest r such that B z = +-r b_j is reachable inside {phi <= level} (and the
/// fiber) for every basis vector b_j; nullopt when even r = 0 is unreachable.
template <class F>
std::optional<F> margin_at_level(const SeparableFunction<F>& phi, const AffineMap<F>& B, const Mat<F>& basis,
                                 const F& level, const std::optional<FiberConstraint<F>>& extra)
{
    LpBuilder<F> lp;
    const std::size_t r = lp.add_var(F(0));
    lp.set_objective(r, F(1));
    lp.set_sense(Sense::maximize);
    for (const auto& b : basis)
        for (int sgn : {1, -1}) {
            auto z = add_sublevel_point(lp, phi, level);
            for (std::size_t row = 0; row < B.out_dim(); ++row) {
                Terms<F> terms;
                for (std::size_t c = 0; c < z.size(); ++c)
                    if (!is_zero(B.matrix()[row][c]))
                        terms.push_back({z[c], B.matrix()[row][c]});
                if (!is_zero(b[row]))
                    terms.push_back({r, F(-sgn * b[row])});
                lp.add_row(std::move(terms), Relation::equal, F(-B.offset()[row]));
            }
            if (extra)
                add_map_equals(lp, z, extra->A, extra->target);
        }
    auto res = lp_solve(lp.build());
    if (res.status == LpStatus::infeasible)
        return std::nullopt;
    if (res.status == LpStatus::unbounded)
        throw std::logic_error("interiority margin unbounded; function domain must be bounded");
    return res.value;
}

/// max t subject to phi(z) <= level - t and B z = y (plus the fiber); nullopt if infeasible.
template <class F>
std::optional<F> max_slack(const SeparableFunction<F>& phi, const AffineMap<F>& B, const Vec<F>& y, const F& level)
{
    LpBuilder<F> lp;
    const std::size_t t = lp.add_var();
    lp.set_objective(t, F(1));
    lp.set_sense(Sense::maximize);
    auto z = add_sublevel_point(lp, phi, level, t);
    add_map_equals(lp, z, B, y);
    auto res = lp_solve(lp.build());
    if (res.status != LpStatus::optimal)
        return std::nullopt;
    return res.value;
}

}  // namespace detail

template <class F>
struct MarginResult {
    bool holds = false;
    F margin = 0;
    F level_used = 0;
    Extended<F> fiber_inf;
    int levels_tried = 0;
};

/// Decides 0 in int_Y B({phi < gamma}) by sweeping levels
/// gamma - (gamma - m) 2^-k, m = inf phi on B^{-1}{0}.
///
/// The margin is concave and nondecreasing in the level and vanishes at the
/// bottom level m, so a zero margin at two consecutive levels means it is zero
/// on the whole sweep and the sweep stops.
template <class F>
MarginResult<F> interiority_margin(const SublevelQuery<F>& q, const std::optional<FiberConstraint<F>>& extra = std::nullopt)
{
    if (q.Y.ambient_dim() != q.B.out_dim())
        throw StructuralError(detail::dims_message("subspace Y", q.Y.ambient_dim(), q.B.out_dim()));
    MarginResult<F> out;
    out.fiber_inf = fiber_min(q.phi, q.B, extra).value;
    out.level_used = q.gamma;
    if (!out.fiber_inf.is_finite() || Extended<F>(q.gamma) <= out.fiber_inf)
        return out;
    const F m = out.fiber_inf.value();
    if (q.Y.dim() == 0) {
        // Relative interior of {0} in Y = {0}.
        out.holds = true;
        out.level_used = F((q.gamma + m) / 2);
        return out;
    }
    std::optional<F> prev;
    F step = F(q.gamma - m);
    for (int k = 1; k <= 16; ++k) {
        step /= 2;
        const F level = F(q.gamma - step);
        auto r = detail::margin_at_level(q.phi, q.B, q.Y.basis(), level, extra);
        out.levels_tried = k;
        out.level_used = level;
        out.margin = r.value_or(F(0));
        if (sign(out.margin) > 0) {
            out.holds = true;
            return out;
        }
        if (prev && approx_eq(*prev, out.margin))
            return out;
        prev = out.margin;
    }
    return out;
}

/// 0 in int_X B(A^{-1}{A z0} and {psi < delta}) for a given point z0 and bound delta.
template <class F>
MarginResult<F> boundedness_condition(const SeparableFunction<F>& psi, const AffineMap<F>& A, const AffineMap<F>& B,
                                      const Vec<F>& z0, const F& delta)
{
    if (!psi.eval(z0).is_finite())
        throw PreconditionError("z0 lies outside the domain of the function");
    SublevelQuery<F> q{psi, B, delta, Subspace<F>::full(B.out_dim())};
    return interiority_margin(q, std::optional<FiberConstraint<F>>(FiberConstraint<F>{A, A.apply(z0)}));
}

template <class F>
struct BoundednessSearch {
    bool holds = false;
    F radius = 0;
    Vec<F> p;  ///< common fiber value A z over the direction points
};

/// Whether some z0 and delta satisfy the boundedness condition. Since dom psi is
/// bounded, delta can be taken above max psi, so it suffices to find one fiber
/// A^{-1}{p} whose image under B contains +-r e_j for all j with r > 0.
template <class F>
BoundednessSearch<F> boundedness_search(const SeparableFunction<F>& psi, const AffineMap<F>& A, const AffineMap<F>& B)
{
    if (A.in_dim() != psi.dim() || B.in_dim() != psi.dim())
        throw StructuralError("maps A and B must act on the function's space");
    LpBuilder<F> lp;
    // Capped: only the sign of the radius matters, and with X = {0} it is unconstrained.
    const std::size_t r = lp.add_var(F(0), F(1));
    lp.set_objective(r, F(1));
    lp.set_sense(Sense::maximize);
    auto p = detail::add_point(lp, A.out_dim());
    const std::size_t xd = B.out_dim();
    auto add_copy = [&](std::optional<std::size_t> axis, int sgn) {
        auto z = detail::add_point(lp, psi.dim());
        for (const auto& t : psi.terms())
            detail::encode_term(lp, z, t.f, t.map);
        for (std::size_t row = 0; row < A.out_dim(); ++row) {
            detail::Terms<F> terms{{p[row], F(-1)}};
            for (std::size_t c = 0; c < z.size(); ++c)
                if (!is_zero(A.matrix()[row][c]))
                    terms.push_back({z[c], A.matrix()[row][c]});
            lp.add_row(std::move(terms), Relation::equal, F(-A.offset()[row]));
        }
        for (std::size_t row = 0; row < xd; ++row) {
            detail::Terms<F> terms;
            for (std::size_t c = 0; c < z.size(); ++c)
                if (!is_zero(B.matrix()[row][c]))
                    terms.push_back({z[c], B.matrix()[row][c]});
            if (axis && *axis == row)
                terms.push_back({r, F(-sgn)});
            lp.add_row(std::move(terms), Relation::equal, F(-B.offset()[row]));
        }
    };
    if (xd == 0)
        add_copy(std::nullopt, 1);
    for (std::size_t j = 0; j < xd; ++j) {
        add_copy(j, 1);
        add_copy(j, -1);
    }
    auto res = lp_solve(lp.build());
    BoundednessSearch<F> out;
    if (res.status == LpStatus::unbounded)
        throw std::logic_error("boundedness search unbounded; function domain must be bounded");
    if (res.status != LpStatus::optimal)
        return out;
    out.radius = res.value;
    out.holds = xd == 0 || sign(res.value) > 0;
    for (auto v : p)
        out.p.push_back(res.point[v]);
    return out;
}

template <class F>
struct EquivalenceResult {
    bool interior = false;  ///< 0 in int_Y B(sigma(gamma))
    bool in_image = false;  ///< 0 in B(sigma(gamma))
    bool above_inf = false;  ///< gamma > inf phi(B^{-1}{0})
    Extended<F> fiber_inf;
    MarginResult<F> margin;
    bool agree() const { return interior == in_image && in_image == above_inf; }
};

/// The three conditions computed by three separate procedures: a fiber
/// minimization (above_inf), a strict-feasibility LP on the fiber (in_image), and the
/// interiority margin sweep (interior).
template <class F>
EquivalenceResult<F> theorem20_equivalence(const SublevelQuery<F>& q)
{
    auto sub = subspace_condition(q.phi, q.B);
    if (!sub.is_subspace)
        throw PreconditionError("the cone generated by B(dom phi) is not a linear subspace");
    EquivalenceResult<F> out;
    out.fiber_inf = fiber_min(q.phi, q.B).value;
    out.above_inf = out.fiber_inf.is_finite() && Extended<F>(q.gamma) > out.fiber_inf;
    auto t = detail::max_slack(q.phi, q.B, Vec<F>(q.B.out_dim(), F(0)), q.gamma);
    out.in_image = t && sign(*t) > 0;
    out.margin = interiority_margin(SublevelQuery<F>{q.phi, q.B, q.gamma, sub.basis});
    out.interior = out.margin.holds;
    return out;
}

template <class F>
struct CoveringResult {
    bool holds = true;
    std::vector<std::size_t> multipliers;  ///< smallest i per probe, 0 when uncovered
    std::optional<std::size_t> failing_probe;
};

/// Checks that every probe y lies in i B({phi < delta}) for some i <= i_max.
template <class F>
CoveringResult<F> lemma19a_check(const SublevelQuery<F>& q, const F& delta, const std::vector<Vec<F>>& probes,
                                std::size_t i_max)
{
    auto m = fiber_min(q.phi, q.B).value;
    if (!m.is_finite() || Extended<F>(delta) <= m)
        throw PreconditionError("delta must exceed the infimum of phi on B^{-1}{0}, which is " + m.str());
    CoveringResult<F> out;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        if (!q.Y.contains(probes[k]))
            throw PreconditionError("probe " + std::to_string(k) + " lies outside the subspace Y");
        std::size_t found = 0;
        for (std::size_t i = 1; i <= i_max && !found; ++i) {
            auto t = detail::max_slack(q.phi, q.B, scale(F(F(1) / F(static_cast<long>(i))), probes[k]), delta);
            if (t && sign(*t) > 0)
                found = i;
        }
        out.multipliers.push_back(found);
        if (!found && out.holds) {
            out.holds = false;
            out.failing_probe = k;
        }
    }
    return out;
}

/// Default probes: +-basis vectors of Y and `extra` random integer combinations.
template <class F>
std::vector<Vec<F>> default_probes(const Subspace<F>& Y, std::size_t extra, std::uint64_t seed)
{
    std::vector<Vec<F>> out;
    for (const auto& b : Y.basis()) {
        out.push_back(b);
        out.push_back(negate(b));
    }
    if (Y.dim() == 0) {
        out.push_back(Vec<F>(Y.ambient_dim(), F(0)));
        return out;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-4, 4);
    for (std::size_t k = 0; k < extra; ++k) {
        Vec<F> v(Y.ambient_dim(), F(0));
        for (const auto& b : Y.basis())
            v = add(v, scale(F(coef(rng)), b));
        out.push_back(std::move(v));
    }
    return out;
}

template <class F>
struct AutoLevelResult {
    F gamma;
    bool holds = false;
    MarginResult<F> margin;
};

/// gamma = inf phi(B^{-1}{0}) + 1, with the interiority condition checked there.
template <class F>
AutoLevelResult<F> corollary21_auto(const SeparableFunction<F>& phi, const AffineMap<F>& B)
{
    auto sub = subspace_condition(phi, B);
    if (!sub.is_subspace)
        throw PreconditionError("the cone generated by B(dom phi) is not a linear subspace");
    auto m = fiber_min(phi, B).value;
    if (!m.is_finite())
        throw PreconditionError("B^{-1}{0} does not meet the domain of phi");
    AutoLevelResult<F> out;
    out.gamma = F(m.value() + 1);
    out.margin = interiority_margin(SublevelQuery<F>{phi, B, out.gamma, sub.basis});
    out.holds = out.margin.holds;
    return out;
}

}  // namespace sandwichkit
