#pragma once

// Seeded generators of small exact instances for property suites.

#include "sandwichkit/duality.hpp"
#include "sandwichkit/sandwich.hpp"

#include <random>

namespace sandwichkit::gen {

using Rng = std::mt19937_64;
using Q = Rational;

inline long uniform(Rng& rng, long lo, long hi)
{
    return std::uniform_int_distribution<long>(lo, hi)(rng);
}

/// p/q in lowest terms.
inline Q ratio(long p, long q)
{
    Q r(p, q);
    r.canonicalize();
    return r;
}

/// p/q with |p| <= num, 1 <= q <= den.
inline Q rational(Rng& rng, long num = 20, long den = 20)
{
    Q q(uniform(rng, -num, num), uniform(rng, 1, den));
    q.canonicalize();
    return q;
}

inline Vec<Q> vec(Rng& rng, std::size_t d, long num = 20, long den = 20)
{
    Vec<Q> v(d);
    for (auto& x : v)
        x = rational(rng, num, den);
    return v;
}

inline Mat<Q> mat(Rng& rng, std::size_t rows, std::size_t cols, long num = 3, long den = 1)
{
    Mat<Q> m(rows);
    for (auto& r : m)
        r = vec(rng, cols, num, den);
    return m;
}

inline AffineMap<Q> affine_map(Rng& rng, std::size_t in, std::size_t out)
{
    return AffineMap<Q>(in, mat(rng, out, in), vec(rng, out, 3, 2));
}

/// Random V-form with the given samples and values.
inline PolyhedralFunction<Q> vform_on(Rng& rng, const std::vector<Vec<Q>>& pts, long vnum = 20, long vden = 20)
{
    std::vector<std::pair<Vec<Q>, Q>> pairs;
    for (const auto& p : pts)
        pairs.emplace_back(p, rational(rng, vnum, vden));
    return PolyhedralFunction<Q>::vform(std::move(pairs));
}

inline PolyhedralFunction<Q> vform(Rng& rng, std::size_t dim, std::size_t samples, long num = 20, long den = 20)
{
    std::vector<Vec<Q>> pts;
    for (std::size_t i = 0; i < samples; ++i)
        pts.push_back(vec(rng, dim, num, den));
    return vform_on(rng, pts, num, den);
}

/// Vertices of the box center +- radius.
inline std::vector<Vec<Q>> box(const Vec<Q>& center, const Q& radius)
{
    Vec<Q> lo = center, hi = center;
    for (std::size_t i = 0; i < center.size(); ++i) {
        lo[i] -= radius;
        hi[i] += radius;
    }
    return Polytope<Q>::box(lo, hi).vertices();
}

/// Random convex combination of the samples of f (a point of dom f).
inline Vec<Q> domain_point(Rng& rng, const std::vector<Vec<Q>>& pts)
{
    Vec<Q> w(pts.size());
    Q total = 0;
    for (auto& x : w) {
        x = uniform(rng, 0, 4);
        total += x;
    }
    if (total == 0) {
        w[0] = 1;
        total = 1;
    }
    Vec<Q> z(pts[0].size(), Q(0));
    for (std::size_t i = 0; i < pts.size(); ++i)
        z = add(z, scale(Q(w[i] / total), pts[i]));
    return z;
}

inline SandwichInstance<Q> sandwich(Rng& rng)
{
    const std::size_t xd = static_cast<std::size_t>(uniform(rng, 1, 2));
    const std::size_t zd = static_cast<std::size_t>(uniform(rng, 1, 2));
    std::vector<Vec<Q>> gens;
    const auto ng = uniform(rng, 1, 4);
    for (long i = 0; i < ng; ++i)
        gens.push_back(vec(rng, xd, 4, 2));
    std::vector<Vec<Q>> zs;
    const auto nz = uniform(rng, 1, 5);
    for (long i = 0; i < nz; ++i)
        zs.push_back(vec(rng, zd, 6, 2));
    SandwichInstance<Q> inst{SublinearFunctional<Q>(gens), Polytope<Q>(zd, zs), vform_on(rng, zs, 6, 2),
                             affine_map(rng, zd, xd)};
    // Shift k so that the hypothesis holds, tightly about half the time.
    auto h = verify_hypothesis(inst);
    Q lift = h.min_value < 0 ? Q(-h.min_value) : Q(0);
    if (uniform(rng, 0, 1))
        lift += ratio(uniform(rng, 0, 4), 2);
    Vec<Q> vals = inst.k.values();
    std::vector<std::pair<Vec<Q>, Q>> pairs;
    for (std::size_t i = 0; i < zs.size(); ++i)
        pairs.emplace_back(zs[i], Q(vals[i] + lift));
    inst.k = PolyhedralFunction<Q>::vform(std::move(pairs));
    return inst;
}

/// Queries in [-3, 3]^d with small denominators.
inline std::vector<AffineFunctional<Q>> queries(Rng& rng, std::size_t d, std::size_t count)
{
    std::vector<AffineFunctional<Q>> out;
    for (std::size_t i = 0; i < count; ++i)
        out.emplace_back(vec(rng, d, 6, 2));
    return out;
}

/// Fenchel data whose g domain contains a full-dimensional box around C p0 with p0 in dom f.
inline FenchelData<Q> fenchel_bounded(Rng& rng, std::size_t pd = 0, std::size_t xd = 0)
{
    if (!pd)
        pd = static_cast<std::size_t>(uniform(rng, 1, 2));
    if (!xd)
        xd = static_cast<std::size_t>(uniform(rng, 1, 2));
    auto f = vform(rng, pd, static_cast<std::size_t>(uniform(rng, 2, 5)), 6, 2);
    auto C = affine_map(rng, pd, xd);
    const Vec<Q> p0 = domain_point(rng, f.points());
    auto pts = box(C.apply(p0), Q(uniform(rng, 1, 3)));
    const auto extra = uniform(rng, 0, 3);
    for (long i = 0; i < extra; ++i)
        pts.push_back(vec(rng, xd, 8, 2));
    return {f, vform_on(rng, pts, 6, 2), C};
}

/// Fenchel data where dom g is a segment in R^2, so no box fits around C p0.
inline FenchelData<Q> fenchel_violating(Rng& rng)
{
    auto f = vform(rng, 1, static_cast<std::size_t>(uniform(rng, 2, 4)), 6, 2);
    auto C = affine_map(rng, 1, 2);
    const Vec<Q> p0 = domain_point(rng, f.points());
    auto x = C.apply(p0);
    Vec<Q> d{Q(1), Q(uniform(rng, -2, 2))};
    std::vector<Vec<Q>> pts{add(x, d), sub(x, d)};
    return {f, vform_on(rng, pts, 6, 2), C};
}

/// Trivariate data with B(dom psi) symmetric about 0: the cone union is a subspace.
inline TrivariateData<Q> trivariate_subspace(Rng& rng)
{
    const std::size_t zd = static_cast<std::size_t>(uniform(rng, 1, 3));
    const std::size_t pd = static_cast<std::size_t>(uniform(rng, 1, 2));
    const std::size_t xd = static_cast<std::size_t>(uniform(rng, 0, std::min<long>(2, static_cast<long>(zd))));
    const Vec<Q> z0 = vec(rng, zd, 4, 2);
    auto pts = box(z0, Q(uniform(rng, 1, 2)));
    const auto extra = uniform(rng, 0, 2);
    for (long i = 0; i < extra; ++i)
        pts.push_back(vec(rng, zd, 6, 2));
    auto M = mat(rng, xd, zd);
    auto B = AffineMap<Q>(zd, M, negate(mat_vec(M, z0)));
    auto psi = SeparableFunction<Q>::single(vform_on(rng, pts, 6, 2));
    return {psi, affine_map(rng, zd, pd), B};
}

/// Trivariate data where B(dom psi) sits strictly on one side of 0.
inline TrivariateData<Q> trivariate_violating(Rng& rng)
{
    const std::size_t zd = static_cast<std::size_t>(uniform(rng, 1, 2));
    const Vec<Q> z0 = vec(rng, zd, 4, 2);
    auto pts = box(z0, Q(1));
    Vec<Q> row(zd, Q(0));
    row[0] = 1;
    // B(dom psi) = [t, t + 2] with t in {0, 1}: touches 0 on the boundary or misses it.
    const Q t = Q(uniform(rng, 0, 1));
    auto B = AffineMap<Q>(zd, Mat<Q>{row}, Vec<Q>{Q(-(z0[0] - 1) + t)});
    auto psi = SeparableFunction<Q>::single(vform_on(rng, pts, 6, 2));
    return {psi, affine_map(rng, zd, 1), B};
}

/// Random bibivariate data with small block dimensions.
/// Adds p +- 1/2 e_j for the first `axes` coordinates.
inline void cross(std::vector<Vec<Q>>& out, const Vec<Q>& p, std::size_t axes)
{
    for (std::size_t j = 0; j < axes; ++j)
        for (int sgn : {1, -1}) {
            Vec<Q> q = p;
            q[j] += Q(sgn, 2);
            out.push_back(std::move(q));
        }
}

/// With `interior`, g also has samples at the anchor moved by 1/2 along each
/// x axis, which puts 0 inside B(dom psi) and makes the dual minimum attained.
inline BibivariateData<Q> bibivariate(Rng& rng, bool identities = false, bool interior = false)
{
    std::size_t dw, dv, du, dx;
    if (identities) {
        dw = dx = static_cast<std::size_t>(uniform(rng, 0, 1));
        dv = du = dw ? static_cast<std::size_t>(uniform(rng, 0, 1)) : 1;
    } else {
        dw = static_cast<std::size_t>(uniform(rng, 0, 1));
        dv = static_cast<std::size_t>(uniform(rng, dw ? 0 : 1, 1));
        dx = static_cast<std::size_t>(uniform(rng, 0, 1));
        du = static_cast<std::size_t>(uniform(rng, dx ? 0 : 1, 1));
    }
    auto f = vform(rng, dw + dv, static_cast<std::size_t>(uniform(rng, 2, 5)), 6, 2);
    auto C = identities ? AffineMap<Q>::identity(dw) : affine_map(rng, dw, dx);
    auto D = identities ? AffineMap<Q>::identity(du) : affine_map(rng, du, dv);
    // One g sample sits over C w0 for the w-part of an f sample, so the fiber is nonempty.
    const Vec<Q>& s0 = f.points()[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(f.size()) - 1))];
    Vec<Q> anchor = C.apply(Vec<Q>(s0.begin(), s0.begin() + static_cast<std::ptrdiff_t>(dw)));
    auto u0 = vec(rng, du, 6, 2);
    anchor.insert(anchor.end(), u0.begin(), u0.end());
    std::vector<Vec<Q>> gp{anchor};
    if (interior)
        cross(gp, anchor, dx);
    const auto extra = uniform(rng, interior ? 0 : 1, interior ? 2 : 4);
    for (long i = 0; i < extra; ++i)
        gp.push_back(vec(rng, dx + du, 6, 2));
    return {f, vform_on(rng, gp, 6, 2), C, D};
}

/// Random indicator_linear data; C linear. `interior` as for bibivariate.
inline IndicatorLinearData<Q> indicator_linear(Rng& rng, bool interior = false)
{
    const std::size_t dw = 1, dx = static_cast<std::size_t>(uniform(rng, 1, 2)), du = 1,
                      dv = static_cast<std::size_t>(uniform(rng, 0, 1));
    auto C = AffineMap<Q>::linear(dw, mat(rng, dx, dw));
    // One sample over range C keeps h finite somewhere.
    Vec<Q> anchor = C.apply(vec(rng, dw, 4, 2));
    anchor.push_back(rational(rng, 6, 2));
    std::vector<Vec<Q>> gp{anchor};
    if (interior)
        cross(gp, anchor, dx);
    const auto extra = uniform(rng, interior ? 0 : 1, interior ? 2 : 4);
    for (long i = 0; i < extra; ++i)
        gp.push_back(vec(rng, dx + du, 6, 2));
    return {vform_on(rng, gp, 6, 2), C, affine_map(rng, du, dv)};
}

/// Queries of indicator_linear with w' in the range of C^T.
inline std::vector<AffineFunctional<Q>> indicator_queries(Rng& rng, const IndicatorLinearData<Q>& d, std::size_t count)
{
    std::vector<AffineFunctional<Q>> out;
    for (std::size_t i = 0; i < count; ++i) {
        auto y = vec(rng, d.C.out_dim(), 4, 2);
        auto c = mat_t_vec(d.C.matrix(), y, d.C.in_dim());
        auto v = vec(rng, d.D.out_dim(), 4, 2);
        c.insert(c.end(), v.begin(), v.end());
        out.emplace_back(std::move(c));
    }
    return out;
}

/// Random quadrivariate data: psi as two blocks over (u, v) and (w, x).
inline QuadrivariateData<Q> quadrivariate(Rng& rng)
{
    auto b = bibivariate(rng);
    auto q = to_quadrivariate(b);
    return q;
}

/// Sublevel query satisfying the subspace precondition, gamma around the fiber infimum.
inline SublevelQuery<Q> sublevel_query(Rng& rng)
{
    auto t = trivariate_subspace(rng);
    auto m = fiber_min(t.psi, t.B).value.value();
    const Q gamma = m + ratio(uniform(rng, -2, 4), 2);
    return make_sublevel_query(t.psi, t.B, gamma);
}

}  // namespace sandwichkit::gen
