#pragma once

#include "sandwichkit/geometry.hpp"
#include "sandwichkit/numerics/lp.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sandwichkit {

/// x -> <coeffs, x> + constant.
template <class F>
struct AffineFunctional {
    Vec<F> coeffs;
    F constant = 0;

    AffineFunctional() = default;
    explicit AffineFunctional(Vec<F> c, F k = F(0)) : coeffs(std::move(c)), constant(std::move(k)) {}

    static AffineFunctional zero(std::size_t dim) { return AffineFunctional(Vec<F>(dim, F(0))); }

    std::size_t dim() const { return coeffs.size(); }
    bool is_linear() const { return is_zero(constant); }

    F operator()(const Vec<F>& x) const
    {
        if (x.size() != coeffs.size())
            throw StructuralError("affine functional of dimension " + std::to_string(coeffs.size()) +
                                  " applied to point of dimension " + std::to_string(x.size()));
        return F(dot(coeffs, x) + constant);
    }

    /// The functional z -> this(m(z)).
    AffineFunctional compose(const AffineMap<F>& m) const
    {
        if (m.out_dim() != coeffs.size())
            throw StructuralError("cannot pull back functional of dimension " + std::to_string(coeffs.size()) +
                                  " through map with output dimension " + std::to_string(m.out_dim()));
        return AffineFunctional(mat_t_vec(m.matrix(), coeffs, m.in_dim()), F(dot(coeffs, m.offset()) + constant));
    }

    friend AffineFunctional operator+(const AffineFunctional& a, const AffineFunctional& b)
    {
        return AffineFunctional(add(a.coeffs, b.coeffs), F(a.constant + b.constant));
    }
    friend AffineFunctional operator-(const AffineFunctional& a, const AffineFunctional& b)
    {
        return AffineFunctional(sub(a.coeffs, b.coeffs), F(a.constant - b.constant));
    }
    friend bool operator==(const AffineFunctional& a, const AffineFunctional& b)
    {
        return a.coeffs == b.coeffs && a.constant == b.constant;
    }
};

/// Support function x -> max_g <g, x> of finitely many covectors.
template <class F>
class SublinearFunctional {
public:
    explicit SublinearFunctional(std::vector<Vec<F>> generators) : generators_(std::move(generators))
    {
        if (generators_.empty())
            throw StructuralError("sublinear functional needs at least one generator");
        for (const auto& g : generators_)
            if (g.size() != generators_.front().size())
                throw StructuralError("sublinear functional generators of mixed dimension");
    }

    std::size_t dim() const { return generators_.front().size(); }
    const std::vector<Vec<F>>& generators() const { return generators_; }

    F operator()(const Vec<F>& x) const
    {
        F best = dot(generators_.front(), x);
        for (std::size_t j = 1; j < generators_.size(); ++j) {
            F v = dot(generators_[j], x);
            if (sign(F(v - best)) > 0)
                best = v;
        }
        return best;
    }

    /// <x', .> <= S everywhere iff x' lies in the hull of the generators.
    bool dominates(const Vec<F>& xprime) const
    {
        if (xprime.size() != dim())
            throw StructuralError(detail::dims_message("covector", xprime.size(), dim()));
        return convex_weights(generators_, xprime).has_value();
    }

private:
    std::vector<Vec<F>> generators_;
};

enum class Form { V, H };

/// Proper polyhedral convex function.
///
/// V-form: lower convex envelope of samples (z_i, v_i), +inf outside conv{z_i}.
/// H-form: max_j <a_j, x> + b_j on the whole space.
/// Both are stored as (point, value) rows, so conjugation only swaps the form
/// tag and negates the values.
template <class F>
class PolyhedralFunction {
public:
    PolyhedralFunction(Form form, std::size_t dim, std::vector<Vec<F>> points, Vec<F> values)
        : form_(form), dim_(dim), points_(std::move(points)), values_(std::move(values))
    {
        if (points_.empty())
            throw StructuralError(form_ == Form::V ? "V-form function needs at least one sample"
                                                   : "H-form function needs at least one piece");
        if (points_.size() != values_.size())
            throw StructuralError("polyhedral function point/value count mismatch");
        for (const auto& p : points_)
            if (p.size() != dim_)
                throw StructuralError(detail::dims_message("polyhedral function row", p.size(), dim_));
    }

    static PolyhedralFunction vform(std::vector<std::pair<Vec<F>, F>> samples)
    {
        if (samples.empty())
            throw StructuralError("V-form function needs at least one sample");
        std::vector<Vec<F>> pts;
        Vec<F> vals;
        for (auto& [p, v] : samples) {
            pts.push_back(std::move(p));
            vals.push_back(std::move(v));
        }
        const std::size_t d = pts.front().size();
        return PolyhedralFunction(Form::V, d, std::move(pts), std::move(vals));
    }

    static PolyhedralFunction hform(const std::vector<AffineFunctional<F>>& pieces)
    {
        if (pieces.empty())
            throw StructuralError("H-form function needs at least one piece");
        std::vector<Vec<F>> pts;
        Vec<F> vals;
        for (const auto& p : pieces) {
            pts.push_back(p.coeffs);
            vals.push_back(p.constant);
        }
        const std::size_t d = pts.front().size();
        return PolyhedralFunction(Form::H, d, std::move(pts), std::move(vals));
    }

    /// Constant `value` on the polytope (its indicator shifted by value).
    static PolyhedralFunction constant_on(const Polytope<F>& p, const F& value = F(0))
    {
        return PolyhedralFunction(Form::V, p.dim(), p.vertices(), Vec<F>(p.vertices().size(), value));
    }

    static PolyhedralFunction from_sublinear(const SublinearFunctional<F>& s)
    {
        return PolyhedralFunction(Form::H, s.dim(), s.generators(), Vec<F>(s.generators().size(), F(0)));
    }

    Form form() const { return form_; }
    bool is_vform() const { return form_ == Form::V; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return points_.size(); }

    /// Sample locations (V) or piece slopes (H).
    const std::vector<Vec<F>>& points() const { return points_; }
    /// Sample values (V) or piece constants (H).
    const Vec<F>& values() const { return values_; }

    std::vector<AffineFunctional<F>> pieces() const
    {
        std::vector<AffineFunctional<F>> out;
        for (std::size_t j = 0; j < points_.size(); ++j)
            out.emplace_back(points_[j], values_[j]);
        return out;
    }

    Polytope<F> domain() const
    {
        if (form_ != Form::V)
            throw StructuralError("domain() of an H-form function is the whole space");
        return Polytope<F>(dim_, points_);
    }

    /// Same function plus an affine functional (exact for either form).
    PolyhedralFunction plus(const AffineFunctional<F>& a) const
    {
        if (a.dim() != dim_)
            throw StructuralError(detail::dims_message("added functional", a.dim(), dim_));
        auto pts = points_;
        auto vals = values_;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (form_ == Form::V) {
                vals[j] += a(pts[j]);
            } else {
                pts[j] = add(pts[j], a.coeffs);
                vals[j] += a.constant;
            }
        }
        return PolyhedralFunction(form_, dim_, std::move(pts), std::move(vals));
    }

    friend bool operator==(const PolyhedralFunction& a, const PolyhedralFunction& b)
    {
        return a.form_ == b.form_ && a.dim_ == b.dim_ && a.points_ == b.points_ && a.values_ == b.values_;
    }

private:
    Form form_;
    std::size_t dim_;
    std::vector<Vec<F>> points_;
    Vec<F> values_;
};

/// f(map(z)) as one summand of a composite objective.
template <class F>
struct ComposedTerm {
    PolyhedralFunction<F> f;
    AffineMap<F> map;
};

namespace detail {

template <class F>
using Terms = std::vector<typename LpBuilder<F>::Term>;

/// Encodes f(map(z)) for z given by the LP variables `zvars`. V-form terms get
/// simplex weights w with sum_i w_i s_i = map(z); H-form terms get an epigraph
/// variable t >= every piece. Returns (var, coeff) pairs whose sum bounds
/// f(map(z)) from above and can be driven down to equality by the LP.
template <class F>
Terms<F> encode_term(LpBuilder<F>& lp, const std::vector<std::size_t>& zvars, const PolyhedralFunction<F>& f,
                     const AffineMap<F>& map)
{
    if (map.out_dim() != f.dim())
        throw StructuralError("term map output dimension " + std::to_string(map.out_dim()) +
                              " does not match function dimension " + std::to_string(f.dim()));
    if (map.in_dim() != zvars.size())
        throw StructuralError("term map input dimension " + std::to_string(map.in_dim()) +
                              " does not match variable dimension " + std::to_string(zvars.size()));
    if (!f.is_vform()) {
        const std::size_t t = lp.add_var();
        for (std::size_t j = 0; j < f.size(); ++j) {
            const auto& a = f.points()[j];
            Terms<F> row{{t, F(1)}};
            for (std::size_t c = 0; c < zvars.size(); ++c) {
                F coeff = 0;
                for (std::size_t r = 0; r < a.size(); ++r)
                    if (!is_zero(a[r]))
                        coeff += a[r] * map.matrix()[r][c];
                if (!is_zero(coeff))
                    row.push_back({zvars[c], F(-coeff)});
            }
            lp.add_row(std::move(row), Relation::greater_equal, F(f.values()[j] + dot(a, map.offset())));
        }
        return {{t, F(1)}};
    }
    const std::size_t first = lp.add_vars(f.size(), F(0));
    Terms<F> simplex;
    for (std::size_t i = 0; i < f.size(); ++i)
        simplex.push_back({first + i, F(1)});
    lp.add_row(std::move(simplex), Relation::equal, F(1));
    for (std::size_t r = 0; r < f.dim(); ++r) {
        Terms<F> row;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (!is_zero(f.points()[i][r]))
                row.push_back({first + i, f.points()[i][r]});
        for (std::size_t c = 0; c < zvars.size(); ++c)
            if (!is_zero(map.matrix()[r][c]))
                row.push_back({zvars[c], F(-map.matrix()[r][c])});
        lp.add_row(std::move(row), Relation::equal, map.offset()[r]);
    }
    Terms<F> cost;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!is_zero(f.values()[i]))
            cost.push_back({first + i, f.values()[i]});
    return cost;
}

/// Adds the rows map(z) = target.
template <class F>
void add_map_equals(LpBuilder<F>& lp, const std::vector<std::size_t>& zvars, const AffineMap<F>& map,
                    const Vec<F>& target)
{
    if (map.out_dim() != target.size())
        throw StructuralError(dims_message("map target", target.size(), map.out_dim()));
    for (std::size_t r = 0; r < map.out_dim(); ++r) {
        Terms<F> row;
        for (std::size_t c = 0; c < zvars.size(); ++c)
            if (!is_zero(map.matrix()[r][c]))
                row.push_back({zvars[c], map.matrix()[r][c]});
        lp.add_row(std::move(row), Relation::equal, F(target[r] - map.offset()[r]));
    }
}

template <class F>
std::vector<std::size_t> add_point(LpBuilder<F>& lp, std::size_t dim)
{
    std::vector<std::size_t> vars(dim);
    for (auto& v : vars)
        v = lp.add_var();
    return vars;
}

}  // namespace detail

/// Evaluation together with a subgradient certificate (V-form, finite value only).
template <class F>
struct EvalResult {
    Extended<F> value;
    Vec<F> subgradient;
};

/// f(z) with the eval LP's dual multipliers as a subgradient of f at z.
template <class F>
EvalResult<F> eval_with_subgradient(const PolyhedralFunction<F>& f, const Vec<F>& z)
{
    if (z.size() != f.dim())
        throw StructuralError(detail::dims_message("evaluation point", z.size(), f.dim()));
    if (!f.is_vform()) {
        std::size_t best = 0;
        F best_val = F(dot(f.points()[0], z) + f.values()[0]);
        for (std::size_t j = 1; j < f.size(); ++j) {
            F v = F(dot(f.points()[j], z) + f.values()[j]);
            if (sign(F(v - best_val)) > 0) {
                best = j;
                best_val = v;
            }
        }
        return {Extended<F>(best_val), f.points()[best]};
    }
    LpBuilder<F> lp;
    const std::size_t first = lp.add_vars(f.size(), F(0));
    detail::Terms<F> simplex;
    for (std::size_t i = 0; i < f.size(); ++i) {
        simplex.push_back({first + i, F(1)});
        lp.set_objective(first + i, f.values()[i]);
    }
    lp.add_row(std::move(simplex), Relation::equal, F(1));
    for (std::size_t r = 0; r < f.dim(); ++r) {
        detail::Terms<F> row;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (!is_zero(f.points()[i][r]))
                row.push_back({first + i, f.points()[i][r]});
        lp.add_row(std::move(row), Relation::equal, z[r]);
    }
    auto res = lp_solve(lp.build());
    if (res.status != LpStatus::optimal)
        return {Extended<F>::pos_inf(), {}};
    return {Extended<F>(res.value), Vec<F>(res.duals.begin() + 1, res.duals.end())};
}

/// f(z); +inf outside the domain of a V-form function.
template <class F>
Extended<F> eval(const PolyhedralFunction<F>& f, const Vec<F>& z)
{
    return eval_with_subgradient(f, z).value;
}

/// Legendre-Fenchel conjugate. V-form samples (z_i, v_i) become H-form pieces
/// y -> <y, z_i> - v_i and vice versa; exact because a function and its convex
/// envelope share one conjugate.
template <class F>
PolyhedralFunction<F> conjugate(const PolyhedralFunction<F>& f)
{
    return PolyhedralFunction<F>(f.is_vform() ? Form::H : Form::V, f.dim(), f.points(), negate(f.values()));
}

/// f*(zeta) for an affine functional zeta = <a, .> + c, which is f*(a) + c.
template <class F>
Extended<F> eval_conjugate(const PolyhedralFunction<F>& f, const AffineFunctional<F>& zeta)
{
    auto v = eval(conjugate(f), zeta.coeffs);
    return v.is_finite() ? Extended<F>(F(v.value() + zeta.constant)) : v;
}

/// Indicator of W x {0} in W x R^{v_dim}.
template <class F>
PolyhedralFunction<F> indicator_of_zero_section(const Polytope<F>& w, std::size_t v_dim)
{
    std::vector<Vec<F>> pts;
    for (const auto& vert : w.vertices()) {
        Vec<F> p = vert;
        p.resize(vert.size() + v_dim, F(0));
        pts.push_back(std::move(p));
    }
    return PolyhedralFunction<F>(Form::V, w.dim() + v_dim, std::move(pts), Vec<F>(w.vertices().size(), F(0)));
}

template <class F>
struct SupResult {
    Extended<F> value;
    Vec<F> argmax;
};

/// sup_z [phi(z) - sum_k f_k(A_k z)] as a single LP over z and the terms'
/// weights; -inf when the terms' domains do not meet. With V-form terms only
/// the supremum is finite or -inf; H-form terms alone may leave it +inf.
template <class F>
SupResult<F> sup_affine_minus_convex(const AffineFunctional<F>& phi, const std::vector<ComposedTerm<F>>& terms)
{
    LpBuilder<F> lp;
    auto z = detail::add_point(lp, phi.dim());
    for (std::size_t c = 0; c < z.size(); ++c)
        lp.set_objective(z[c], phi.coeffs[c]);
    for (const auto& t : terms)
        for (const auto& [var, v] : detail::encode_term(lp, z, t.f, t.map))
            lp.add_objective(var, F(-v));
    lp.set_sense(Sense::maximize);
    auto res = lp_solve(lp.build());
    switch (res.status) {
    case LpStatus::infeasible: return {Extended<F>::neg_inf(), {}};
    case LpStatus::unbounded: return {Extended<F>::pos_inf(), Vec<F>(res.point.begin(), res.point.begin() + z.size())};
    default: break;
    }
    return {Extended<F>(F(res.value + phi.constant)), Vec<F>(res.point.begin(), res.point.begin() + z.size())};
}

/// inf_z [phi(z) + sum_k f_k(A_k z)], with a minimizer when finite.
template <class F>
SupResult<F> inf_affine_plus_convex(const AffineFunctional<F>& phi, const std::vector<ComposedTerm<F>>& terms)
{
    auto neg = AffineFunctional<F>(negate(phi.coeffs), F(-phi.constant));
    auto r = sup_affine_minus_convex(neg, terms);
    return {-r.value, std::move(r.argmax)};
}

/// One summand of a separable function: f applied to the listed coordinates.
template <class F>
struct Block {
    PolyhedralFunction<F> f;
    std::vector<std::size_t> coords;
};

/// z -> sum_k f_k(z restricted to coords_k) + shift(z), the blocks' coordinate
/// lists partitioning {0, ..., dim-1}. Never flattened for LP work; the product
/// form is available for small-instance checks only.
template <class F>
class SeparableFunction {
public:
    SeparableFunction(std::size_t dim, std::vector<Block<F>> blocks)
        : SeparableFunction(dim, std::move(blocks), AffineFunctional<F>::zero(dim))
    {
    }

    SeparableFunction(std::size_t dim, std::vector<Block<F>> blocks, AffineFunctional<F> shift)
        : dim_(dim), blocks_(std::move(blocks)), shift_(std::move(shift))
    {
        if (blocks_.empty())
            throw StructuralError("separable function needs at least one block");
        if (shift_.dim() != dim_)
            throw StructuralError(detail::dims_message("separable function shift", shift_.dim(), dim_));
        std::vector<int> seen(dim_, 0);
        for (const auto& b : blocks_) {
            if (b.coords.size() != b.f.dim())
                throw StructuralError("block function of dimension " + std::to_string(b.f.dim()) + " bound to " +
                                      std::to_string(b.coords.size()) + " coordinates");
            for (auto c : b.coords) {
                if (c >= dim_)
                    throw StructuralError("block coordinate " + std::to_string(c) + " out of range");
                ++seen[c];
            }
        }
        for (std::size_t c = 0; c < dim_; ++c)
            if (seen[c] != 1)
                throw StructuralError("block coordinates must partition the space; coordinate " + std::to_string(c) +
                                      " is covered " + std::to_string(seen[c]) + " times");
    }

    static SeparableFunction single(const PolyhedralFunction<F>& f)
    {
        std::vector<std::size_t> coords(f.dim());
        for (std::size_t i = 0; i < coords.size(); ++i)
            coords[i] = i;
        return SeparableFunction(f.dim(), {Block<F>{f, std::move(coords)}});
    }

    std::size_t dim() const { return dim_; }
    const std::vector<Block<F>>& blocks() const { return blocks_; }
    const AffineFunctional<F>& shift() const { return shift_; }
    bool all_vform() const
    {
        for (const auto& b : blocks_)
            if (!b.f.is_vform())
                return false;
        return true;
    }

    SeparableFunction plus(const AffineFunctional<F>& a) const { return SeparableFunction(dim_, blocks_, shift_ + a); }

    /// The blocks as composed terms over the full variable z (shift excluded).
    std::vector<ComposedTerm<F>> terms() const
    {
        std::vector<ComposedTerm<F>> out;
        for (const auto& b : blocks_)
            out.push_back({b.f, AffineMap<F>::projection(dim_, b.coords)});
        return out;
    }

    /// The blocks composed with an outer map m: z' -> f_k((m z')|coords_k).
    std::vector<ComposedTerm<F>> terms_through(const AffineMap<F>& m) const
    {
        std::vector<ComposedTerm<F>> out;
        for (const auto& b : blocks_)
            out.push_back({b.f, AffineMap<F>::projection(dim_, b.coords).compose(m)});
        return out;
    }

    Extended<F> eval(const Vec<F>& z) const
    {
        if (z.size() != dim_)
            throw StructuralError(detail::dims_message("evaluation point", z.size(), dim_));
        F total = shift_(z);
        for (const auto& b : blocks_) {
            auto v = sandwichkit::eval(b.f, restrict(z, b.coords));
            if (!v.is_finite())
                return v;
            total += v.value();
        }
        return Extended<F>(total);
    }

    /// Conjugate at an affine functional zeta, evaluated blockwise.
    Extended<F> conjugate_at(const AffineFunctional<F>& zeta) const
    {
        if (zeta.dim() != dim_)
            throw StructuralError(detail::dims_message("conjugate argument", zeta.dim(), dim_));
        const Vec<F> y = sub(zeta.coeffs, shift_.coeffs);
        F total = zeta.constant - shift_.constant;
        for (const auto& b : blocks_) {
            auto v = sandwichkit::eval(conjugate(b.f), restrict(y, b.coords));
            if (!v.is_finite())
                return v;
            total += v.value();
        }
        return Extended<F>(total);
    }

    /// Vertices spanning the product domain (all combinations of block samples).
    std::vector<Vec<F>> domain_points() const
    {
        std::vector<Vec<F>> pts{Vec<F>(dim_, F(0))};
        for (const auto& b : blocks_) {
            if (!b.f.is_vform())
                throw StructuralError("domain points need V-form blocks");
            std::vector<Vec<F>> next;
            for (const auto& p : pts)
                for (const auto& s : b.f.points()) {
                    Vec<F> q = p;
                    for (std::size_t i = 0; i < b.coords.size(); ++i)
                        q[b.coords[i]] = s[i];
                    next.push_back(std::move(q));
                }
            pts = std::move(next);
        }
        return pts;
    }

    /// Single V-form function equal to this one (product samples, summed values).
    PolyhedralFunction<F> materialize() const
    {
        std::vector<Vec<F>> pts{Vec<F>(dim_, F(0))};
        Vec<F> vals{F(0)};
        for (const auto& b : blocks_) {
            if (!b.f.is_vform())
                throw StructuralError("only V-form blocks can be materialized");
            std::vector<Vec<F>> next_pts;
            Vec<F> next_vals;
            for (std::size_t k = 0; k < pts.size(); ++k)
                for (std::size_t i = 0; i < b.f.size(); ++i) {
                    Vec<F> q = pts[k];
                    for (std::size_t c = 0; c < b.coords.size(); ++c)
                        q[b.coords[c]] = b.f.points()[i][c];
                    next_pts.push_back(std::move(q));
                    next_vals.push_back(F(vals[k] + b.f.values()[i]));
                }
            pts = std::move(next_pts);
            vals = std::move(next_vals);
        }
        for (std::size_t k = 0; k < pts.size(); ++k)
            vals[k] += shift_(pts[k]);
        return PolyhedralFunction<F>(Form::V, dim_, std::move(pts), std::move(vals));
    }

    static Vec<F> restrict(const Vec<F>& z, const std::vector<std::size_t>& coords)
    {
        Vec<F> out;
        out.reserve(coords.size());
        for (auto c : coords)
            out.push_back(z[c]);
        return out;
    }

private:
    std::size_t dim_;
    std::vector<Block<F>> blocks_;
    AffineFunctional<F> shift_;
};

/// sup_z [phi(z) - psi(z)] subject to extra composed terms (e.g. indicators of
/// constraint sets), treating the shift of psi exactly.
template <class F>
SupResult<F> sup_minus_separable(const AffineFunctional<F>& phi, const SeparableFunction<F>& psi,
                                 std::vector<ComposedTerm<F>> extra = {})
{
    auto terms = psi.terms();
    terms.insert(terms.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
    return sup_affine_minus_convex(phi - psi.shift(), terms);
}

/// Indicator of the single point `p`, as a V-form function.
template <class F>
PolyhedralFunction<F> point_indicator(const Vec<F>& p)
{
    return PolyhedralFunction<F>(Form::V, p.size(), {p}, Vec<F>{F(0)});
}

}  // namespace sandwichkit
