#pragma once

#include "sandwichkit/convexfn.hpp"

#include <optional>

namespace sandwichkit {

/// Data of an asymmetric sandwich problem: S on X, k on Z, B: Z -> X.
template <class F>
struct SandwichInstance {
    SublinearFunctional<F> S;
    Polytope<F> Z;
    PolyhedralFunction<F> k;
    AffineMap<F> B;

    void validate() const
    {
        if (!k.is_vform())
            throw StructuralError("sandwich function k must be in V-form");
        if (k.dim() != Z.dim())
            throw StructuralError("function k has dimension " + std::to_string(k.dim()) + " but space Z has dimension " +
                                  std::to_string(Z.dim()));
        if (B.in_dim() != Z.dim())
            throw StructuralError("map B has input dimension " + std::to_string(B.in_dim()) +
                                  " but space Z has dimension " + std::to_string(Z.dim()));
        if (B.out_dim() != S.dim())
            throw StructuralError("map B has output dimension " + std::to_string(B.out_dim()) +
                                  " but functional S has dimension " + std::to_string(S.dim()));
        for (const auto& z : k.points())
            if (!polytope_contains(Z, z))
                throw StructuralError("a sample of k lies outside the space Z");
    }
};

template <class F>
struct HypothesisCheck {
    bool holds = false;
    F min_value = 0;  ///< min over Z of S(Bz) + k(z)
    Vec<F> argmin;
};

/// Decides S(Bz) + k(z) >= 0 on Z with one LP (epigraph of S, simplex weights for k).
template <class F>
HypothesisCheck<F> verify_hypothesis(const SandwichInstance<F>& inst)
{
    inst.validate();
    std::vector<ComposedTerm<F>> terms{{inst.k, AffineMap<F>::identity(inst.Z.dim())},
                                       {PolyhedralFunction<F>::from_sublinear(inst.S), inst.B}};
    auto r = inf_affine_plus_convex(AffineFunctional<F>::zero(inst.Z.dim()), terms);
    if (!r.value.is_finite())
        throw std::logic_error("sandwich hypothesis LP did not reach a finite optimum");
    return {sign(r.value.value()) >= 0, r.value.value(), r.argmax};
}

/// Outcome of find_separator: a covector x', or a point z violating the hypothesis.
template <class F>
struct SeparatorResult {
    std::optional<Vec<F>> xprime;
    Vec<F> violation_point;
    F violation_value = 0;
};

/// Finds x' in conv(generators of S) with <x', B z_i> + v_i >= 0 at every sample
/// (z_i, v_i) of k. The sample constraints are enough: z -> <x', Bz> + k(z) is
/// convex and the samples majorize k.
template <class F>
SeparatorResult<F> find_separator(const SandwichInstance<F>& inst)
{
    auto hyp = verify_hypothesis(inst);
    if (!hyp.holds)
        return {std::nullopt, hyp.argmin, hyp.min_value};

    const auto& gens = inst.S.generators();
    LpBuilder<F> lp;
    const std::size_t first = lp.add_vars(gens.size(), F(0));
    detail::Terms<F> simplex;
    for (std::size_t j = 0; j < gens.size(); ++j)
        simplex.push_back({first + j, F(1)});
    lp.add_row(std::move(simplex), Relation::equal, F(1));
    for (std::size_t i = 0; i < inst.k.size(); ++i) {
        const Vec<F> bz = inst.B.apply(inst.k.points()[i]);
        detail::Terms<F> row;
        for (std::size_t j = 0; j < gens.size(); ++j) {
            F c = dot(gens[j], bz);
            if (!is_zero(c))
                row.push_back({first + j, c});
        }
        lp.add_row(std::move(row), Relation::greater_equal, F(-inst.k.values()[i]));
    }
    auto res = lp_solve(lp.build());
    if (res.status != LpStatus::optimal)
        throw std::logic_error("separator LP infeasible although the hypothesis holds");
    Vec<F> x(inst.S.dim(), F(0));
    for (std::size_t j = 0; j < gens.size(); ++j)
        if (!is_zero(res.point[first + j]))
            x = add(x, scale(res.point[first + j], gens[j]));
    return {std::move(x), {}, F(0)};
}

template <class F>
struct SeparatorCheck {
    bool dominated_by_S = false;  ///< <x', .> <= S on X
    bool supports_k = false;      ///< <x', B.> >= -k on Z
    bool ok() const { return dominated_by_S && supports_k; }
};

/// Checks both separator conditions by LPs independent of find_separator:
/// hull membership for the first, and sup_z [-<x', Bz> - k(z)] <= 0 for the second.
template <class F>
SeparatorCheck<F> check_separator(const SandwichInstance<F>& inst, const Vec<F>& xprime)
{
    SeparatorCheck<F> out;
    out.dominated_by_S = inst.S.dominates(xprime);
    auto phi = AffineFunctional<F>(negate(xprime)).compose(inst.B);
    auto sup = sup_affine_minus_convex(phi, {{inst.k, AffineMap<F>::identity(inst.Z.dim())}});
    out.supports_k = sup.value <= Extended<F>(F(0));
    return out;
}

/// T(x) = inf over lambda >= 0 and z in dom k of S(x + lambda B z) + lambda k(z),
/// via homogenized weights mu (sum mu_i = lambda, w = sum mu_i z_i). The
/// lambda = 0 slice gives S(x) >= T(x), so admitting it does not change the value.
template <class F>
Extended<F> aux_T(const SandwichInstance<F>& inst, const Vec<F>& x)
{
    if (x.size() != inst.S.dim())
        throw StructuralError(detail::dims_message("point x", x.size(), inst.S.dim()));
    const auto& gens = inst.S.generators();
    LpBuilder<F> lp;
    const std::size_t t = lp.add_var();
    const std::size_t first = lp.add_vars(inst.k.size(), F(0));
    lp.set_objective(t, F(1));
    for (std::size_t i = 0; i < inst.k.size(); ++i)
        lp.set_objective(first + i, inst.k.values()[i]);
    // lambda B z = sum_i mu_i B(z_i) because sum_i mu_i = lambda and B is affine.
    std::vector<Vec<F>> bz;
    for (const auto& z : inst.k.points())
        bz.push_back(inst.B.apply(z));
    for (const auto& g : gens) {
        detail::Terms<F> row{{t, F(1)}};
        for (std::size_t i = 0; i < bz.size(); ++i) {
            F c = dot(g, bz[i]);
            if (!is_zero(c))
                row.push_back({first + i, F(-c)});
        }
        lp.add_row(std::move(row), Relation::greater_equal, dot(g, x));
    }
    auto res = lp_solve(lp.build());
    if (res.status == LpStatus::unbounded)
        return Extended<F>::neg_inf();
    return Extended<F>(res.value);
}

/// Cross-check through the Fenchel form of the problem:
/// (k + SB)*(0) = min over x* of k*(-x*B) + S*(x*).
template <class F>
struct FenchelSandwichCheck {
    Extended<F> conjugate_at_zero;  ///< (k + SB)*(0), computed on the primal side
    Extended<F> dual_min;           ///< min over x* in conv(gens) of k*(-x* B)
    Vec<F> witness;                 ///< attaining x*
    bool hypothesis_holds = false;  ///< (k + SB)*(0) <= 0
};

template <class F>
FenchelSandwichCheck<F> fenchel_sandwich_check(const SandwichInstance<F>& inst)
{
    inst.validate();
    const std::size_t zd = inst.Z.dim();
    const std::size_t xd = inst.S.dim();
    FenchelSandwichCheck<F> out;
    out.conjugate_at_zero =
        sup_affine_minus_convex(AffineFunctional<F>::zero(zd), {{inst.k, AffineMap<F>::identity(zd)},
                                                                {PolyhedralFunction<F>::from_sublinear(inst.S), inst.B}})
            .value;

    // Over y = x*: k*(-y B) = conj(k)(-B_lin^T y) - y . b_off, and S*(y) is the
    // indicator of conv(gens), the V-form conjugate of S.
    Mat<F> m = transpose(inst.B.matrix(), zd);
    for (auto& row : m)
        for (auto& v : row)
            v = -v;
    std::vector<ComposedTerm<F>> terms{
        {conjugate(inst.k), AffineMap<F>::linear(xd, std::move(m))},
        {conjugate(PolyhedralFunction<F>::from_sublinear(inst.S)), AffineMap<F>::identity(xd)}};
    auto r = inf_affine_plus_convex(AffineFunctional<F>(negate(inst.B.offset())), terms);
    out.dual_min = r.value;
    out.witness = r.argmax;
    out.hypothesis_holds = out.conjugate_at_zero <= Extended<F>(F(0));
    return out;
}

}  // namespace sandwichkit
