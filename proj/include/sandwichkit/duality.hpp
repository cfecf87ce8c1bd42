#pragma once

#include "sandwichkit/interiority.hpp"

#include <map>
#include <string>
#include <variant>

namespace sandwichkit {

enum class Kind { sublevel, trivariate, fenchel, quadrivariate, bibivariate, partial_infconv, indicator_linear };
enum class HypothesisMode { boundedness, closed_subspace };

inline const char* to_string(Kind k)
{
    switch (k) {
    case Kind::sublevel: return "sublevel";
    case Kind::trivariate: return "trivariate";
    case Kind::fenchel: return "fenchel";
    case Kind::quadrivariate: return "quadrivariate";
    case Kind::bibivariate: return "bibivariate";
    case Kind::partial_infconv: return "partial_infconv";
    case Kind::indicator_linear: return "indicator_linear";
    }
    return "?";
}

inline const char* to_string(HypothesisMode m)
{
    return m == HypothesisMode::boundedness ? "boundedness" : "closed_subspace";
}

inline Kind parse_kind(const std::string& s)
{
    for (Kind k : {Kind::sublevel, Kind::trivariate, Kind::fenchel, Kind::quadrivariate, Kind::bibivariate,
                   Kind::partial_infconv, Kind::indicator_linear})
        if (s == to_string(k))
            return k;
    throw StructuralError("unknown scenario kind '" + s + "'");
}

inline HypothesisMode parse_mode(const std::string& s)
{
    if (s == "boundedness")
        return HypothesisMode::boundedness;
    if (s == "closed_subspace")
        return HypothesisMode::closed_subspace;
    throw StructuralError("unknown hypothesis mode '" + s + "'");
}

/// h(p) = inf psi(A^{-1}{p} and B^{-1}{0}).
template <class F>
struct TrivariateData {
    SeparableFunction<F> psi;
    AffineMap<F> A;
    AffineMap<F> B;
};

/// h = f + g C with f on P, g on X, C: P -> X.
template <class F>
struct FenchelData {
    PolyhedralFunction<F> f;
    PolyhedralFunction<F> g;
    AffineMap<F> C;
};

/// h(w, v) = inf_u psi(u, v - Du, w, Cw), psi on U x V x W x X in that coordinate order.
template <class F>
struct QuadrivariateData {
    SeparableFunction<F> psi;
    AffineMap<F> C;  ///< W -> X
    AffineMap<F> D;  ///< U -> V
    std::size_t du() const { return D.in_dim(); }
    std::size_t dv() const { return D.out_dim(); }
    std::size_t dw() const { return C.in_dim(); }
    std::size_t dx() const { return C.out_dim(); }
};

/// h(w, v) = inf_u f(w, v - Du) + g(Cw, u), f on W x V, g on X x U.
template <class F>
struct BibivariateData {
    PolyhedralFunction<F> f;
    PolyhedralFunction<F> g;
    AffineMap<F> C;  ///< W -> X
    AffineMap<F> D;  ///< U -> V
};

/// h(w, v) = inf { g(Cw, u) : Du = v }, W a full vector space and C linear.
template <class F>
struct IndicatorLinearData {
    PolyhedralFunction<F> g;  ///< on X x U
    AffineMap<F> C;           ///< W -> X, zero offset
    AffineMap<F> D;           ///< U -> V
};

template <class F>
using ScenarioData =
    std::variant<TrivariateData<F>, FenchelData<F>, QuadrivariateData<F>, BibivariateData<F>, IndicatorLinearData<F>>;

template <class F>
struct DualityScenario {
    DualityScenario(Kind k, ScenarioData<F> d) : kind(k), data(std::move(d)) {}

    Kind kind = Kind::trivariate;
    HypothesisMode mode = HypothesisMode::boundedness;
    ScenarioData<F> data;
    std::vector<AffineFunctional<F>> queries;
    std::optional<Vec<F>> z0;
    std::optional<F> delta;
    std::optional<F> gamma;
};

template <class F>
struct HypothesisFlag {
    std::string name;
    bool value = false;
};

template <class F>
struct DualityReport {
    AffineFunctional<F> query;
    Extended<F> lhs;
    Extended<F> rhs;
    Extended<F> gap;  ///< rhs - lhs; 0 when both sides are the same infinity
    Vec<F> witness;   ///< empty when there is none
    bool attained = false;
    std::vector<HypothesisFlag<F>> flags;
    std::vector<std::string> notes;

    bool flags_hold() const
    {
        for (const auto& f : flags)
            if (!f.value)
                return false;
        return true;
    }
    bool weak_duality() const { return gap >= Extended<F>(F(0)); }
    bool both_infinite() const { return !lhs.is_finite() && lhs.kind() == rhs.kind(); }
    /// "pass", "fail" or "hypotheses_unmet"; equality is only asserted when all flags hold.
    std::string verdict() const
    {
        if (!weak_duality())
            return "fail";
        if (!flags_hold())
            return "hypotheses_unmet";
        if (both_infinite())
            return "pass";
        return gap == Extended<F>(F(0)) && attained ? "pass" : "fail";
    }
};

namespace detail {

inline std::string dim_clash(const std::string& a, std::size_t da, const std::string& b, std::size_t db)
{
    return a + " has dimension " + std::to_string(da) + " but " + b + " has dimension " + std::to_string(db);
}

template <class F>
Mat<F> zeros(std::size_t rows, std::size_t cols)
{
    return Mat<F>(rows, Vec<F>(cols, F(0)));
}

/// Places a block matrix at (r0, c0).
template <class F>
void put(Mat<F>& m, std::size_t r0, std::size_t c0, const Mat<F>& block, const F& factor = F(1))
{
    for (std::size_t r = 0; r < block.size(); ++r)
        for (std::size_t c = 0; c < block[r].size(); ++c)
            m[r0 + r][c0 + c] = factor * block[r][c];
}

template <class F>
Mat<F> identity_mat(std::size_t n)
{
    return AffineMap<F>::identity(n).matrix();
}

/// Conjugate-side terms: for zeta(y) = M y + m on Z (one row of M per z coordinate),
/// psi*(zeta(y)) = sum_k conj(f_k)((M y + m - shift)|coords_k) + (constants handled by caller).
template <class F>
std::vector<ComposedTerm<F>> conjugate_terms(const SeparableFunction<F>& psi, const Mat<F>& M, const Vec<F>& m,
                                             std::size_t ydim)
{
    std::vector<ComposedTerm<F>> out;
    for (const auto& b : psi.blocks()) {
        Mat<F> rows;
        Vec<F> off;
        for (auto c : b.coords) {
            rows.push_back(M[c]);
            off.push_back(F(m[c] - psi.shift().coeffs[c]));
        }
        out.push_back({conjugate(b.f), AffineMap<F>(ydim, std::move(rows), std::move(off))});
    }
    return out;
}

/// One side of an identity: sup of phi minus terms, or inf of lin plus terms.
template <class F>
struct LpPair {
    AffineFunctional<F> primal_phi;
    std::vector<ComposedTerm<F>> primal_terms;
    AffineFunctional<F> dual_lin;
    std::vector<ComposedTerm<F>> dual_terms;
};

template <class F>
LpPair<F> pair_for(const TrivariateData<F>& d, const AffineFunctional<F>& q)
{
    const std::size_t zd = d.psi.dim();
    const std::size_t xd = d.B.out_dim();
    LpPair<F> out;
    out.primal_phi = q.compose(d.A) - d.psi.shift();
    out.primal_terms = d.psi.terms();
    out.primal_terms.push_back({point_indicator(Vec<F>(xd, F(0))), d.B});
    // zeta(y) = q A + y B on Z.
    Mat<F> M = transpose(d.B.matrix(), zd);
    Vec<F> m = mat_t_vec(d.A.matrix(), q.coeffs, zd);
    out.dual_terms = conjugate_terms(d.psi, M, m, xd);
    out.dual_lin = AffineFunctional<F>(d.B.offset(), F(q.constant + dot(q.coeffs, d.A.offset()) - d.psi.shift().constant));
    return out;
}

template <class F>
LpPair<F> pair_for(const FenchelData<F>& d, const AffineFunctional<F>& q)
{
    const std::size_t pd = d.f.dim();
    const std::size_t xd = d.g.dim();
    LpPair<F> out;
    out.primal_phi = q;
    out.primal_terms = {{d.f, AffineMap<F>::identity(pd)}, {d.g, d.C}};
    // f*(q - y C) + g*(y)
    Mat<F> M = transpose(d.C.matrix(), pd);
    for (auto& row : M)
        for (auto& v : row)
            v = -v;
    out.dual_terms = {{conjugate(d.f), AffineMap<F>(xd, std::move(M), q.coeffs)},
                      {conjugate(d.g), AffineMap<F>::identity(xd)}};
    out.dual_lin = AffineFunctional<F>(negate(d.C.offset()), q.constant);
    return out;
}

/// (w, v, u) -> (u, v - Du, w, Cw)
template <class F>
AffineMap<F> quadrivariate_embedding(std::size_t du, std::size_t dv, std::size_t dw, std::size_t dx,
                                     const AffineMap<F>& C, const AffineMap<F>& D)
{
    const std::size_t in = dw + dv + du;
    const std::size_t out = du + dv + dw + dx;
    Mat<F> m = zeros<F>(out, in);
    Vec<F> off(out, F(0));
    put(m, 0, dw + dv, identity_mat<F>(du));
    put(m, du, dw, identity_mat<F>(dv));
    put(m, du, dw + dv, D.matrix(), F(-1));
    for (std::size_t i = 0; i < dv; ++i)
        off[du + i] = -D.offset()[i];
    put(m, du + dv, 0, identity_mat<F>(dw));
    put(m, du + dv + dw, 0, C.matrix());
    for (std::size_t i = 0; i < dx; ++i)
        off[du + dv + dw + i] = C.offset()[i];
    return AffineMap<F>(in, std::move(m), std::move(off));
}

/// The query (w_flat, v_flat) as a functional on (w, v, u).
template <class F>
AffineFunctional<F> pad_query(const AffineFunctional<F>& q, std::size_t extra)
{
    Vec<F> c = q.coeffs;
    c.resize(c.size() + extra, F(0));
    return AffineFunctional<F>(std::move(c), q.constant);
}

template <class F>
LpPair<F> pair_for(const QuadrivariateData<F>& d, const AffineFunctional<F>& q)
{
    const std::size_t du = d.du(), dv = d.dv(), dw = d.dw(), dx = d.dx();
    const auto G = quadrivariate_embedding(du, dv, dw, dx, d.C, d.D);
    LpPair<F> out;
    out.primal_phi = pad_query(q, du) - d.psi.shift().compose(G);
    out.primal_terms = d.psi.terms_through(G);
    // zeta(y) = (D^T v_flat, v_flat, w_flat - C^T y, y) with constant v_flat . d_off - y . c_off.
    const Vec<F> wflat(q.coeffs.begin(), q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw));
    const Vec<F> vflat(q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw), q.coeffs.end());
    Mat<F> M = zeros<F>(du + dv + dw + dx, dx);
    put(M, du + dv, 0, transpose(d.C.matrix(), dw), F(-1));
    put(M, du + dv + dw, 0, identity_mat<F>(dx));
    Vec<F> m = mat_t_vec(d.D.matrix(), vflat, du);
    m.insert(m.end(), vflat.begin(), vflat.end());
    m.insert(m.end(), wflat.begin(), wflat.end());
    m.resize(du + dv + dw + dx, F(0));
    out.dual_terms = conjugate_terms(d.psi, M, m, dx);
    out.dual_lin = AffineFunctional<F>(negate(d.C.offset()),
                                       F(q.constant + dot(vflat, d.D.offset()) - d.psi.shift().constant));
    return out;
}

template <class F>
LpPair<F> pair_for(const BibivariateData<F>& d, const AffineFunctional<F>& q)
{
    const std::size_t dw = d.C.in_dim(), dx = d.C.out_dim(), du = d.D.in_dim(), dv = d.D.out_dim();
    const std::size_t in = dw + dv + du;
    // f(w, v - Du) and g(Cw, u) over (w, v, u).
    Mat<F> mf = zeros<F>(dw + dv, in);
    Vec<F> of(dw + dv, F(0));
    put(mf, 0, 0, identity_mat<F>(dw));
    put(mf, dw, dw, identity_mat<F>(dv));
    put(mf, dw, dw + dv, d.D.matrix(), F(-1));
    for (std::size_t i = 0; i < dv; ++i)
        of[dw + i] = -d.D.offset()[i];
    Mat<F> mg = zeros<F>(dx + du, in);
    Vec<F> og(dx + du, F(0));
    put(mg, 0, 0, d.C.matrix());
    for (std::size_t i = 0; i < dx; ++i)
        og[i] = d.C.offset()[i];
    put(mg, dx, dw + dv, identity_mat<F>(du));
    LpPair<F> out;
    out.primal_phi = pad_query(q, du);
    out.primal_terms = {{d.f, AffineMap<F>(in, std::move(mf), std::move(of))},
                        {d.g, AffineMap<F>(in, std::move(mg), std::move(og))}};
    // f*(w_flat - y C, v_flat) + g*(y, v_flat D)
    const Vec<F> wflat(q.coeffs.begin(), q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw));
    const Vec<F> vflat(q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw), q.coeffs.end());
    Mat<F> Mf = zeros<F>(dw + dv, dx);
    put(Mf, 0, 0, transpose(d.C.matrix(), dw), F(-1));
    Vec<F> mfo = wflat;
    mfo.insert(mfo.end(), vflat.begin(), vflat.end());
    Mat<F> Mg = zeros<F>(dx + du, dx);
    put(Mg, 0, 0, identity_mat<F>(dx));
    Vec<F> mgo(dx, F(0));
    auto dtv = mat_t_vec(d.D.matrix(), vflat, du);
    mgo.insert(mgo.end(), dtv.begin(), dtv.end());
    out.dual_terms = {{conjugate(d.f), AffineMap<F>(dx, std::move(Mf), std::move(mfo))},
                      {conjugate(d.g), AffineMap<F>(dx, std::move(Mg), std::move(mgo))}};
    out.dual_lin = AffineFunctional<F>(negate(d.C.offset()), F(q.constant + dot(vflat, d.D.offset())));
    return out;
}

template <class F>
LpPair<F> pair_for(const IndicatorLinearData<F>& d, const AffineFunctional<F>& q)
{
    const std::size_t dw = d.C.in_dim(), dx = d.C.out_dim(), du = d.D.in_dim();
    const Vec<F> wprime(q.coeffs.begin(), q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw));
    const Vec<F> vprime(q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw), q.coeffs.end());
    // sup over (w, u) of w' w + v'(Du) - g(Cw, u)
    Mat<F> mg = zeros<F>(dx + du, dw + du);
    put(mg, 0, 0, d.C.matrix());
    put(mg, dx, dw, identity_mat<F>(du));
    Vec<F> phi = wprime;
    auto dtv = mat_t_vec(d.D.matrix(), vprime, du);
    phi.insert(phi.end(), dtv.begin(), dtv.end());
    LpPair<F> out;
    out.primal_phi = AffineFunctional<F>(std::move(phi), F(q.constant + dot(vprime, d.D.offset())));
    out.primal_terms = {{d.g, AffineMap<F>::linear(dw + du, std::move(mg))}};
    // min of g*(y, v'D) over C^T y = w'
    Mat<F> Mg = zeros<F>(dx + du, dx);
    put(Mg, 0, 0, identity_mat<F>(dx));
    Vec<F> mgo(dx, F(0));
    mgo.insert(mgo.end(), dtv.begin(), dtv.end());
    out.dual_terms = {{conjugate(d.g), AffineMap<F>(dx, std::move(Mg), std::move(mgo))},
                      {point_indicator(wprime), AffineMap<F>::linear(dx, transpose(d.C.matrix(), dw))}};
    out.dual_lin = AffineFunctional<F>(Vec<F>(dx, F(0)), F(q.constant + dot(vprime, d.D.offset())));
    return out;
}

/// Value of the dual objective at y, by direct evaluation of each term.
template <class F>
Extended<F> dual_objective_at(const LpPair<F>& p, const Vec<F>& y)
{
    F total = p.dual_lin(y);
    for (const auto& t : p.dual_terms) {
        auto v = eval(t.f, t.map.apply(y));
        if (!v.is_finite())
            return v;
        total += v.value();
    }
    return Extended<F>(total);
}

}  // namespace detail

/// h(p) = inf psi over A^{-1}{p} and B^{-1}{0}; +inf when that fiber misses dom psi.
template <class F>
Extended<F> fiber_inf(const SeparableFunction<F>& psi, const AffineMap<F>& A, const AffineMap<F>& B, const Vec<F>& p)
{
    if (p.size() != A.out_dim())
        throw StructuralError(detail::dims_message("fiber value p", p.size(), A.out_dim()));
    return fiber_min(psi, B, std::optional<FiberConstraint<F>>(FiberConstraint<F>{A, p})).value;
}

/// Query dimension for each kind (the space P on which h lives).
template <class F>
std::size_t query_dim(const ScenarioData<F>& data)
{
    return std::visit(
        [](const auto& d) -> std::size_t {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrivariateData<F>>)
                return d.A.out_dim();
            else if constexpr (std::is_same_v<T, FenchelData<F>>)
                return d.f.dim();
            else
                return d.C.in_dim() + d.D.out_dim();
        },
        data);
}

/// Dimension checks naming both objects of each clash.
template <class F>
void validate(const DualityScenario<F>& s)
{
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            using detail::dim_clash;
            if constexpr (std::is_same_v<T, TrivariateData<F>>) {
                if (!d.psi.all_vform())
                    throw StructuralError("function psi must be in V-form");
                if (d.A.in_dim() != d.psi.dim())
                    throw StructuralError(dim_clash("map A input", d.A.in_dim(), "function psi", d.psi.dim()));
                if (d.B.in_dim() != d.psi.dim())
                    throw StructuralError(dim_clash("map B input", d.B.in_dim(), "function psi", d.psi.dim()));
            } else if constexpr (std::is_same_v<T, FenchelData<F>>) {
                if (!d.f.is_vform() || !d.g.is_vform())
                    throw StructuralError("functions f and g must be in V-form");
                if (d.C.in_dim() != d.f.dim())
                    throw StructuralError(dim_clash("map C input", d.C.in_dim(), "function f", d.f.dim()));
                if (d.C.out_dim() != d.g.dim())
                    throw StructuralError(dim_clash("map C output", d.C.out_dim(), "function g", d.g.dim()));
            } else if constexpr (std::is_same_v<T, QuadrivariateData<F>>) {
                if (!d.psi.all_vform())
                    throw StructuralError("function psi must be in V-form");
                const std::size_t want = d.du() + d.dv() + d.dw() + d.dx();
                if (d.psi.dim() != want)
                    throw StructuralError(dim_clash("function psi", d.psi.dim(), "U x V x W x X from maps C and D", want));
            } else if constexpr (std::is_same_v<T, BibivariateData<F>>) {
                if (!d.f.is_vform() || !d.g.is_vform())
                    throw StructuralError("functions f and g must be in V-form");
                if (d.f.dim() != d.C.in_dim() + d.D.out_dim())
                    throw StructuralError(dim_clash("function f", d.f.dim(), "W x V from maps C and D",
                                                    d.C.in_dim() + d.D.out_dim()));
                if (d.g.dim() != d.C.out_dim() + d.D.in_dim())
                    throw StructuralError(dim_clash("function g", d.g.dim(), "X x U from maps C and D",
                                                    d.C.out_dim() + d.D.in_dim()));
            } else {
                if (!d.g.is_vform())
                    throw StructuralError("function g must be in V-form");
                if (!d.C.is_linear())
                    throw StructuralError("map C must be linear (zero offset) for kind indicator_linear");
                if (d.g.dim() != d.C.out_dim() + d.D.in_dim())
                    throw StructuralError(dim_clash("function g", d.g.dim(), "X x U from maps C and D",
                                                    d.C.out_dim() + d.D.in_dim()));
            }
        },
        s.data);
    const std::size_t qd = query_dim(s.data);
    for (std::size_t i = 0; i < s.queries.size(); ++i)
        if (s.queries[i].dim() != qd)
            throw StructuralError(detail::dim_clash("query " + std::to_string(i), s.queries[i].dim(),
                                                    "the space of h", qd));
    if (s.kind == Kind::partial_infconv) {
        const auto* b = std::get_if<BibivariateData<F>>(&s.data);
        if (!b || !(b->C == AffineMap<F>::identity(b->C.in_dim())) || !(b->D == AffineMap<F>::identity(b->D.in_dim())))
            throw StructuralError("partial_infconv requires identity maps C and D");
    }
}

/// psi(u, v, w, x) = f(w, v) + g(x, u).
template <class F>
QuadrivariateData<F> to_quadrivariate(const BibivariateData<F>& d)
{
    const std::size_t du = d.D.in_dim(), dv = d.D.out_dim(), dw = d.C.in_dim(), dx = d.C.out_dim();
    std::vector<std::size_t> fc, gc;
    for (std::size_t i = 0; i < dw; ++i)
        fc.push_back(du + dv + i);
    for (std::size_t i = 0; i < dv; ++i)
        fc.push_back(du + i);
    for (std::size_t i = 0; i < dx; ++i)
        gc.push_back(du + dv + dw + i);
    for (std::size_t i = 0; i < du; ++i)
        gc.push_back(i);
    SeparableFunction<F> psi(du + dv + dw + dx, {Block<F>{d.f, fc}, Block<F>{d.g, gc}});
    return {psi, d.C, d.D};
}

/// The product construction reducing each kind to the trivariate form.
template <class F>
TrivariateData<F> to_trivariate(const ScenarioData<F>& data)
{
    return std::visit(
        [](const auto& d) -> TrivariateData<F> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, TrivariateData<F>>) {
                return d;
            } else if constexpr (std::is_same_v<T, FenchelData<F>>) {
                // Z = P x X, A(p, x) = p, B(p, x) = x - Cp, psi(p, x) = f(p) + g(x)
                const std::size_t pd = d.f.dim(), xd = d.g.dim();
                std::vector<std::size_t> pc(pd), xc(xd);
                for (std::size_t i = 0; i < pd; ++i)
                    pc[i] = i;
                for (std::size_t i = 0; i < xd; ++i)
                    xc[i] = pd + i;
                SeparableFunction<F> psi(pd + xd, {Block<F>{d.f, pc}, Block<F>{d.g, xc}});
                Mat<F> b = detail::zeros<F>(xd, pd + xd);
                detail::put(b, 0, 0, d.C.matrix(), F(-1));
                detail::put(b, 0, pd, detail::identity_mat<F>(xd));
                return {psi, AffineMap<F>::projection(pd + xd, pc), AffineMap<F>(pd + xd, std::move(b), negate(d.C.offset()))};
            } else if constexpr (std::is_same_v<T, QuadrivariateData<F>>) {
                // Z = U x V x W x X, A = (w, v + Du), B = x - Cw
                const std::size_t du = d.du(), dv = d.dv(), dw = d.dw(), dx = d.dx();
                const std::size_t zd = du + dv + dw + dx;
                Mat<F> a = detail::zeros<F>(dw + dv, zd);
                Vec<F> ao(dw + dv, F(0));
                detail::put(a, 0, du + dv, detail::identity_mat<F>(dw));
                detail::put(a, dw, du, detail::identity_mat<F>(dv));
                detail::put(a, dw, 0, d.D.matrix());
                for (std::size_t i = 0; i < dv; ++i)
                    ao[dw + i] = d.D.offset()[i];
                Mat<F> b = detail::zeros<F>(dx, zd);
                detail::put(b, 0, du + dv, d.C.matrix(), F(-1));
                detail::put(b, 0, du + dv + dw, detail::identity_mat<F>(dx));
                return {d.psi, AffineMap<F>(zd, std::move(a), std::move(ao)),
                        AffineMap<F>(zd, std::move(b), negate(d.C.offset()))};
            } else if constexpr (std::is_same_v<T, BibivariateData<F>>) {
                return to_trivariate<F>(ScenarioData<F>(to_quadrivariate(d)));
            } else {
                throw StructuralError("kind indicator_linear has no bounded product construction");
            }
        },
        data);
}

namespace detail {

template <class F>
LpPair<F> pair_for_data(const ScenarioData<F>& data, const AffineFunctional<F>& q)
{
    return std::visit([&](const auto& d) { return pair_for(d, q); }, data);
}

/// The (u0, w0) neighborhood condition for indicator_linear: some u and w with
/// (Cw +- r e_j, u) in dom g for all j and r > 0.
template <class F>
bool indicator_linear_bounded(const IndicatorLinearData<F>& d)
{
    const std::size_t dw = d.C.in_dim(), dx = d.C.out_dim(), du = d.D.in_dim();
    if (dx == 0)
        return true;
    LpBuilder<F> lp;
    const std::size_t r = lp.add_var(F(0), F(1));
    lp.set_objective(r, F(1));
    lp.set_sense(Sense::maximize);
    auto w = add_point(lp, dw);
    auto u = add_point(lp, du);
    for (std::size_t j = 0; j < dx; ++j)
        for (int sgn : {1, -1}) {
            auto pt = add_point(lp, dx + du);
            encode_term(lp, pt, d.g, AffineMap<F>::identity(dx + du));
            for (std::size_t i = 0; i < dx; ++i) {
                Terms<F> row{{pt[i], F(1)}};
                for (std::size_t c = 0; c < dw; ++c)
                    if (!is_zero(d.C.matrix()[i][c]))
                        row.push_back({w[c], F(-d.C.matrix()[i][c])});
                if (i == j)
                    row.push_back({r, F(-sgn)});
                lp.add_row(std::move(row), Relation::equal, F(0));
            }
            for (std::size_t i = 0; i < du; ++i)
                lp.add_row({{pt[dx + i], F(1)}, {u[i], F(-1)}}, Relation::equal, F(0));
        }
    auto res = lp_solve(lp.build());
    return res.status == LpStatus::optimal && sign(res.value) > 0;
}

}  // namespace detail

/// Scenario-level hypothesis flags (shared by every query).
template <class F>
std::vector<HypothesisFlag<F>> scenario_flags(const DualityScenario<F>& s, std::vector<std::string>& notes)
{
    std::vector<HypothesisFlag<F>> flags;
    if (const auto* il = std::get_if<IndicatorLinearData<F>>(&s.data)) {
        if (s.mode == HypothesisMode::boundedness) {
            flags.push_back({"g_bounded_near_Cw0", detail::indicator_linear_bounded(*il)});
        } else {
            std::vector<Vec<F>> xs;
            for (const auto& p : il->g.points())
                xs.emplace_back(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(il->C.out_dim()));
            auto cols = transpose(il->C.matrix(), il->C.in_dim());
            flags.push_back({"closed_subspace", cone_union_is_subspace(xs, cols).is_subspace});
        }
        notes.push_back("W is a full vector space, so the bounded-domain restriction on W is lifted for this kind");
        return flags;
    }
    const auto t = to_trivariate(s.data);
    if (s.kind == Kind::sublevel) {
        auto sub = subspace_condition(t.psi, t.B);
        flags.push_back({"subspace", sub.is_subspace});
        bool interior = false;
        if (s.gamma) {
            interior = interiority_margin(SublevelQuery<F>{t.psi, t.B, *s.gamma, sub.basis}).holds;
        } else if (sub.is_subspace && fiber_min(t.psi, t.B).value.is_finite()) {
            interior = corollary21_auto(t.psi, t.B).holds;
            notes.push_back("interiority level chosen automatically as the fiber infimum plus one");
        }
        flags.push_back({"interiority", interior});
        return flags;
    }
    flags.push_back({"h_bounded_below", true});
    notes.push_back("h is bounded below because every domain is a polytope and every value finite");
    if (s.mode == HypothesisMode::boundedness) {
        bool holds;
        if (s.z0 && s.delta) {
            holds = boundedness_condition(t.psi, t.A, t.B, *s.z0, *s.delta).holds;
        } else {
            holds = boundedness_search(t.psi, t.A, t.B).holds;
            notes.push_back("z0 and delta searched by LP");
        }
        flags.push_back({"bounded_interiority", holds});
    } else {
        flags.push_back({"closed_subspace", subspace_condition(t.psi, t.B).is_subspace});
        flags.push_back({"continuity", true});
        notes.push_back("continuity of the query composed with A is automatic in finite dimension");
    }
    return flags;
}

/// Verifies the scenario's identity at one query, LHS and RHS by separate LPs.
template <class F>
DualityReport<F> verify_query(const DualityScenario<F>& s, const AffineFunctional<F>& q,
                              const std::vector<HypothesisFlag<F>>& base_flags, const std::vector<std::string>& base_notes)
{
    DualityReport<F> rep;
    rep.query = q;
    rep.flags = base_flags;
    rep.notes = base_notes;
    const auto pair = detail::pair_for_data(s.data, q);

    if (const auto* il = std::get_if<IndicatorLinearData<F>>(&s.data)) {
        const Vec<F> wprime(q.coeffs.begin(), q.coeffs.begin() + static_cast<std::ptrdiff_t>(il->C.in_dim()));
        const bool finite =
            solve_linear(transpose(il->C.matrix(), il->C.in_dim()), wprime, il->C.out_dim()).has_value();
        rep.flags.push_back({"conjugate_finite", finite});
        if (!finite) {
            rep.lhs = rep.rhs = Extended<F>::pos_inf();
            rep.gap = Extended<F>(F(0));
            rep.notes.push_back("w' is not in the range of C^T, so both sides are +inf");
            return rep;
        }
    }

    rep.lhs = sup_affine_minus_convex(pair.primal_phi, pair.primal_terms).value;
    auto rhs = inf_affine_plus_convex(pair.dual_lin, pair.dual_terms);
    rep.rhs = rhs.value;
    if (rep.rhs.is_finite()) {
        rep.witness = rhs.argmax;
        rep.attained = detail::dual_objective_at(pair, rep.witness) == rep.rhs;
    } else if (rep.rhs.is_neg_inf()) {
        rep.notes.push_back("dual objective unbounded below: h is identically +inf");
    }
    if (rep.both_infinite())
        rep.gap = Extended<F>(F(0));
    else
        rep.gap = rep.rhs - rep.lhs;

    if (s.kind != Kind::sublevel && s.kind != Kind::indicator_linear && s.mode == HypothesisMode::closed_subspace) {
        // Interiority for psi - qA at the automatic level.
        const auto t = to_trivariate(s.data);
        auto phi = t.psi.plus(AffineFunctional<F>(negate(q.coeffs), F(-q.constant)).compose(t.A));
        bool interior = false;
        if (subspace_condition(phi, t.B).is_subspace && fiber_min(phi, t.B).value.is_finite())
            interior = corollary21_auto(phi, t.B).holds;
        rep.flags.push_back({"interiority", interior});
    }
    return rep;
}

template <class F>
std::vector<DualityReport<F>> verify(const DualityScenario<F>& s)
{
    validate(s);
    std::vector<std::string> notes;
    auto flags = scenario_flags(s, notes);
    std::vector<AffineFunctional<F>> queries = s.queries;
    if (queries.empty() && s.kind == Kind::sublevel)
        queries.push_back(AffineFunctional<F>::zero(0));
    std::vector<DualityReport<F>> out;
    for (const auto& q : queries)
        out.push_back(verify_query(s, q, flags, notes));
    return out;
}

/// Identity computed on the trivariate product construction of any bounded kind.
template <class F>
DualityReport<F> verify_via_product(const ScenarioData<F>& data, const AffineFunctional<F>& q)
{
    DualityScenario<F> s(Kind::trivariate, to_trivariate(data));
    return verify_query(s, q, {}, {});
}

}  // namespace sandwichkit
