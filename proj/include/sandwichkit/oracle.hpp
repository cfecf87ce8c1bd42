#pragma once

// Brute-force evaluators that share no code path with the LP engines: every
// quantity here comes from subset enumeration, linear solves and grids.

#include "sandwichkit/duality.hpp"

#include <algorithm>
#include <functional>

namespace sandwichkit::oracle {

/// Calls visit(subset) for every k-subset of {0..n-1} in lexicographic order.
inline void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& visit)
{
    if (k > n)
        return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i)
        idx[i] = i;
    while (true) {
        visit(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1)
            --i;
        if (i == 0)
            return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

/// Dimension of the affine hull of a nonempty point list.
template <class F>
std::size_t affine_dim(const std::vector<Vec<F>>& pts)
{
    std::vector<Vec<F>> diffs;
    for (std::size_t i = 1; i < pts.size(); ++i)
        diffs.push_back(sub(pts[i], pts[0]));
    return diffs.empty() ? 0 : rank(diffs, pts[0].size());
}

/// Unique weights lambda (sum 1) with sum lambda_i p_i = x and the extra rows
/// E(sum lambda_i p_i) = e, when the system has exactly one solution.
template <class F>
std::optional<Vec<F>> unique_weights(const std::vector<Vec<F>>& pts, const Mat<F>& E, const Vec<F>& e,
                                     const std::optional<Vec<F>>& x = std::nullopt)
{
    const std::size_t n = pts.size();
    Mat<F> rows;
    Vec<F> rhs;
    rows.push_back(Vec<F>(n, F(1)));
    rhs.push_back(F(1));
    for (std::size_t r = 0; r < E.size(); ++r) {
        Vec<F> row(n);
        for (std::size_t i = 0; i < n; ++i)
            row[i] = dot(E[r], pts[i]);
        rows.push_back(std::move(row));
        rhs.push_back(e[r]);
    }
    if (x) {
        for (std::size_t d = 0; d < x->size(); ++d) {
            Vec<F> row(n);
            for (std::size_t i = 0; i < n; ++i)
                row[i] = pts[i][d];
            rows.push_back(std::move(row));
            rhs.push_back((*x)[d]);
        }
    }
    if (rank(rows, n) != n)
        return std::nullopt;
    return solve_linear(rows, rhs, n);
}

/// Membership in conv(points) by Caratheodory: some affinely independent
/// subset carries x with nonnegative weights.
template <class F>
bool hull_contains(const std::vector<Vec<F>>& pts, const Vec<F>& x)
{
    const std::size_t k = affine_dim(pts);
    bool found = false;
    for (std::size_t size = 1; size <= k + 1 && !found; ++size)
        for_each_subset(pts.size(), size, [&](const std::vector<std::size_t>& s) {
            if (found)
                return;
            std::vector<Vec<F>> sub_pts;
            for (auto i : s)
                sub_pts.push_back(pts[i]);
            auto w = unique_weights(sub_pts, Mat<F>{}, Vec<F>{}, std::optional<Vec<F>>(x));
            if (!w)
                return;
            for (const auto& wi : *w)
                if (sign(wi) < 0)
                    return;
            found = true;
        });
    return found;
}

/// Affine functions through affinely independent (k+1)-subsets of the samples
/// that lie on or below every sample. Their max is the lower envelope on the hull.
template <class F>
std::vector<AffineFunctional<F>> envelope_facets(const PolyhedralFunction<F>& f)
{
    if (!f.is_vform())
        throw StructuralError("envelope_facets needs a V-form function");
    const auto& pts = f.points();
    const auto& vals = f.values();
    const std::size_t d = f.dim();
    const std::size_t k = affine_dim(pts);
    std::vector<AffineFunctional<F>> out;
    for_each_subset(pts.size(), k + 1, [&](const std::vector<std::size_t>& s) {
        Mat<F> rows;
        Vec<F> rhs;
        for (auto i : s) {
            Vec<F> row = pts[i];
            row.push_back(F(1));
            rows.push_back(std::move(row));
            rhs.push_back(vals[i]);
        }
        if (rank(rows, d + 1) != k + 1)
            return;
        auto sol = solve_linear(rows, rhs, d + 1);
        if (!sol)
            return;
        AffineFunctional<F> a(Vec<F>(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(d)), (*sol)[d]);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (sign(F(vals[i] - a(pts[i]))) < 0)
                return;
        out.push_back(std::move(a));
    });
    return out;
}

/// Function value by brute force: hull test plus max over envelope facets.
template <class F>
Extended<F> brute_eval(const PolyhedralFunction<F>& f, const Vec<F>& x)
{
    if (x.size() != f.dim())
        throw StructuralError(detail::dims_message("oracle evaluation point", x.size(), f.dim()));
    if (!f.is_vform()) {
        F best = f.values()[0] + dot(f.points()[0], x);
        for (std::size_t i = 1; i < f.size(); ++i)
            best = std::max(best, F(f.values()[i] + dot(f.points()[i], x)));
        return Extended<F>(best);
    }
    if (!hull_contains(f.points(), x))
        return Extended<F>::pos_inf();
    auto facets = envelope_facets(f);
    F best = facets.at(0)(x);
    for (std::size_t i = 1; i < facets.size(); ++i)
        best = std::max(best, facets[i](x));
    return Extended<F>(best);
}

/// Envelope facets computed once; evaluation is a max over them.
template <class F>
class Envelope {
public:
    explicit Envelope(const PolyhedralFunction<F>& f) : f_(f), facets_(f.is_vform() ? envelope_facets(f) : f.pieces()) {}

    /// Value at x; the domain test is skipped when the caller knows x is inside.
    Extended<F> operator()(const Vec<F>& x, bool check_domain = true) const
    {
        if (check_domain && f_.is_vform() && !hull_contains(f_.points(), x))
            return Extended<F>::pos_inf();
        F best = facets_.at(0)(x);
        for (std::size_t i = 1; i < facets_.size(); ++i)
            best = std::max(best, facets_[i](x));
        return Extended<F>(best);
    }

    const std::vector<AffineFunctional<F>>& facets() const { return facets_; }

private:
    PolyhedralFunction<F> f_;
    std::vector<AffineFunctional<F>> facets_;
};

/// Block-wise envelopes of a separable function.
template <class F>
class SeparableEnvelope {
public:
    explicit SeparableEnvelope(const SeparableFunction<F>& psi) : psi_(psi)
    {
        for (const auto& b : psi.blocks())
            blocks_.emplace_back(b.f);
    }

    Extended<F> operator()(const Vec<F>& z, bool check_domain = true) const
    {
        F total = psi_.shift()(z);
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            auto v = blocks_[k](SeparableFunction<F>::restrict(z, psi_.blocks()[k].coords), check_domain);
            if (!v.is_finite())
                return v;
            total += v.value();
        }
        return Extended<F>(total);
    }

private:
    SeparableFunction<F> psi_;
    std::vector<Envelope<F>> blocks_;
};

/// f*(a) for a V-form function: the max of a.z_i - v_i over the samples.
template <class F>
F brute_conjugate(const PolyhedralFunction<F>& f, const Vec<F>& a)
{
    if (!f.is_vform())
        throw StructuralError("brute_conjugate needs a V-form function");
    F best = F(dot(a, f.points()[0]) - f.values()[0]);
    for (std::size_t i = 1; i < f.size(); ++i)
        best = std::max(best, F(dot(a, f.points()[i]) - f.values()[i]));
    return best;
}

/// Points spanning conv(points) intersected with {E z = e}: the unique
/// nonnegative solutions over affinely independent subsets of size <= rank E + 1.
/// Every vertex of the slice is among them.
template <class F>
std::vector<Vec<F>> slice_vertices(const std::vector<Vec<F>>& pts, const Mat<F>& E, const Vec<F>& e)
{
    if (pts.empty())
        return {};
    const std::size_t d = pts[0].size();
    const std::size_t r = E.empty() ? 0 : rank(E, d);
    std::vector<Vec<F>> out;
    for (std::size_t size = 1; size <= std::min(r + 1, pts.size()); ++size)
        for_each_subset(pts.size(), size, [&](const std::vector<std::size_t>& s) {
            std::vector<Vec<F>> sub_pts;
            for (auto i : s)
                sub_pts.push_back(pts[i]);
            if (affine_dim(sub_pts) + 1 != size)
                return;
            auto w = unique_weights(sub_pts, E, e);
            if (!w)
                return;
            Vec<F> z(d, F(0));
            for (std::size_t i = 0; i < size; ++i) {
                if (sign((*w)[i]) < 0)
                    return;
                z = add(z, scale((*w)[i], sub_pts[i]));
            }
            if (std::find(out.begin(), out.end(), z) == out.end())
                out.push_back(std::move(z));
        });
    return out;
}

/// An interval known to contain a true value.
template <class F>
struct Bracket {
    Extended<F> lower;
    Extended<F> upper;
    bool conclusive = true;
    std::string note;
    std::size_t evaluations = 0;

    bool contains(const Extended<F>& v) const { return conclusive && lower <= v && v <= upper; }
};

/// Sup of a concave G over conv(region) with G finite on the region, from the
/// barycentric grid of resolution n on each affinely independent (k+1)-subset.
/// Every point x* of a simplex has a grid point (1 - s) x* + s y with y in the
/// simplex and s = (k+1)/n, so sup - grid <= s/(1-s) (grid - min over vertices).
/// For n <= k+1 the upper end is +inf.
/// Simplices covering conv(pts) for affine dimension k <= 2: the extreme pair
/// of a segment, or a fan over the convex polygon.
template <class F>
std::vector<std::vector<std::size_t>> hull_triangulation(const std::vector<Vec<F>>& pts, std::size_t k)
{
    if (k == 0)
        return {{0}};
    std::vector<Vec<F>> basis;
    for (const auto& p : pts) {
        auto d = sub(p, pts[0]);
        auto trial = basis;
        trial.push_back(d);
        if (rank(trial, d.size()) > basis.size())
            basis = std::move(trial);
        if (basis.size() == k)
            break;
    }
    // Coordinates in the basis through the Gram system.
    Mat<F> gram(k, Vec<F>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            gram[i][j] = dot(basis[i], basis[j]);
    std::vector<Vec<F>> xy;
    for (const auto& p : pts) {
        auto d = sub(p, pts[0]);
        Vec<F> rhs(k);
        for (std::size_t i = 0; i < k; ++i)
            rhs[i] = dot(basis[i], d);
        xy.push_back(*solve_linear(gram, rhs, k));
    }
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xy[a] < xy[b]; });
    if (k == 1)
        return {{order.front(), order.back()}};
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return F((xy[a][0] - xy[o][0]) * (xy[b][1] - xy[o][1]) - (xy[a][1] - xy[o][1]) * (xy[b][0] - xy[o][0]));
    };
    // Monotone chain; collinear points dropped.
    std::vector<std::size_t> hull(2 * order.size());
    std::size_t m = 0;
    for (auto i : order) {
        while (m >= 2 && !(cross(hull[m - 2], hull[m - 1], i) > 0))
            --m;
        hull[m++] = i;
    }
    for (std::size_t j = order.size() - 1, lower = m + 1; j-- > 0;) {
        const auto i = order[j];
        while (m >= lower && !(cross(hull[m - 2], hull[m - 1], i) > 0))
            --m;
        hull[m++] = i;
    }
    hull.resize(m - 1);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 1; i + 1 < hull.size(); ++i)
        out.push_back({hull[0], hull[i], hull[i + 1]});
    return out;
}

template <class F>
Bracket<F> grid_sup(const std::function<F(const Vec<F>&)>& G, const std::vector<Vec<F>>& region, std::size_t n)
{
    Bracket<F> out;
    if (region.empty()) {
        out.lower = out.upper = Extended<F>::neg_inf();
        out.note = "empty region";
        return out;
    }
    const std::size_t k = affine_dim(region);
    if (n == 0)
        throw StructuralError("grid resolution must be positive");
    F gmin = G(region[0]);
    for (const auto& v : region)
        gmin = std::min(gmin, G(v));
    std::optional<F> best;
    const F inv_n = F(F(1) / F(static_cast<long>(n)));
    auto cover = [&](const std::function<void(const std::vector<std::size_t>&)>& visit) {
        if (k <= 2)
            for (const auto& s : hull_triangulation(region, k))
                visit(s);
        else
            for_each_subset(region.size(), k + 1, visit);
    };
    cover([&](const std::vector<std::size_t>& s) {
        std::vector<Vec<F>> verts;
        for (auto i : s)
            verts.push_back(region[i]);
        if (affine_dim(verts) != k)
            return;
        // compositions c of n into k+1 parts
        std::vector<std::size_t> c(k + 1, 0);
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
            if (pos == k) {
                c[k] = left;
                Vec<F> x(verts[0].size(), F(0));
                for (std::size_t i = 0; i <= k; ++i)
                    if (c[i])
                        x = add(x, scale(F(F(static_cast<long>(c[i])) * inv_n), verts[i]));
                F g = G(x);
                ++out.evaluations;
                if (!best || g > *best)
                    best = g;
                return;
            }
            for (std::size_t t = 0; t <= left; ++t) {
                c[pos] = t;
                rec(pos + 1, left - t);
            }
        };
        rec(0, n);
    });
    out.lower = Extended<F>(*best);
    if (k == 0) {
        out.upper = out.lower;
    } else if (n <= k + 1) {
        // Too coarse for the bound; the grid maximum is still a lower bound.
        out.upper = Extended<F>::pos_inf();
        out.note = "resolution too coarse for an upper bound";
    } else {
        const F s = F(F(static_cast<long>(k + 1)) * inv_n);
        out.upper = Extended<F>(F(*best + s / (F(1) - s) * (*best - gmin)));
    }
    return out;
}

struct GridSpec {
    std::size_t resolution = 8;  ///< barycentric weights in multiples of 1/resolution
};

/// sup of phi - sum_k f_k(A_k z) over the grid on dom f_0, which must be
/// composed with the identity. Grid points outside another term's domain are
/// skipped; the bound is dropped (conclusive = false) when a polytope vertex is.
template <class F>
Bracket<F> grid_sup(const AffineFunctional<F>& phi, const std::vector<ComposedTerm<F>>& terms, const GridSpec& spec)
{
    if (terms.empty() || !(terms[0].map == AffineMap<F>::identity(phi.dim())) || !terms[0].f.is_vform())
        throw StructuralError("grid_sup needs a V-form first term composed with the identity");
    std::vector<Envelope<F>> envs;
    for (const auto& t : terms)
        envs.emplace_back(t.f);
    bool vertices_inside = true;
    auto value = [&](const Vec<F>& z) -> Extended<F> {
        F total = phi(z);
        for (std::size_t k = 0; k < terms.size(); ++k) {
            auto v = envs[k](terms[k].map.apply(z), k > 0);
            if (!v.is_finite())
                return Extended<F>::neg_inf();
            total -= v.value();
        }
        return Extended<F>(total);
    };
    const auto& region = terms[0].f.points();
    for (const auto& v : region)
        vertices_inside = vertices_inside && value(v).is_finite();
    if (vertices_inside)
        return grid_sup<F>([&](const Vec<F>& z) { return value(z).value(); }, region, spec.resolution);
    // Without the concavity bound only the grid maximum is reported.
    Bracket<F> out;
    Extended<F> best = Extended<F>::neg_inf();
    const std::size_t k = affine_dim(region);
    const F inv_n = F(F(1) / F(static_cast<long>(spec.resolution)));
    for_each_subset(region.size(), k + 1, [&](const std::vector<std::size_t>& s) {
        std::vector<std::size_t> c(k + 1, 0);
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
            if (pos == k) {
                c[k] = left;
                Vec<F> x(phi.dim(), F(0));
                for (std::size_t i = 0; i <= k; ++i)
                    x = add(x, scale(F(F(static_cast<long>(c[i])) * inv_n), region[s[i]]));
                auto v = value(x);
                ++out.evaluations;
                if (v > best)
                    best = v;
                return;
            }
            for (std::size_t t = 0; t <= left; ++t) {
                c[pos] = t;
                rec(pos + 1, left - t);
            }
        };
        rec(0, spec.resolution);
    });
    out.lower = best;
    out.upper = Extended<F>::pos_inf();
    out.conclusive = false;
    out.note = "a grid polytope vertex lies outside another term's domain; no bound";
    return out;
}

/// Dual objective y0 + N t -> constant + lin.y + sum_k max_i ((M_k y + m_k).z_i - v_i).
template <class F>
struct DualModel {
    struct Piece {
        Mat<F> M;  ///< one row per coordinate of the conjugated function
        Vec<F> m;
        PolyhedralFunction<F> f;  ///< V-form, evaluated through its conjugate
    };
    Vec<F> y0;
    Mat<F> N;  ///< columns as rows: y = y0 + sum_j t_j N[j]
    F constant = 0;
    Vec<F> lin;
    std::vector<Piece> pieces;

    Vec<F> point(const Vec<F>& t) const
    {
        Vec<F> y = y0;
        for (std::size_t j = 0; j < N.size(); ++j)
            y = add(y, scale(t[j], N[j]));
        return y;
    }

    F operator()(const Vec<F>& t) const
    {
        const Vec<F> y = point(t);
        F total = F(constant + dot(lin, y));
        for (const auto& p : pieces)
            total += brute_conjugate(p.f, add(mat_vec(p.M, y), p.m));
        return total;
    }

    /// Lipschitz constant in t for the sup norm.
    F lipschitz() const
    {
        auto l1 = [](const Vec<F>& v) {
            F s = 0;
            for (const auto& x : v)
                s += x < 0 ? F(-x) : x;
            return s;
        };
        F L = 0;
        Vec<F> lt;
        for (const auto& col : N)
            lt.push_back(dot(col, lin));
        L += l1(lt);
        for (const auto& p : pieces) {
            F worst = 0;
            for (const auto& z : p.f.points()) {
                // d/dt of (M y).z = N^T M^T z
                Vec<F> g;
                const Vec<F> mtz = mat_t_vec(p.M, z, y0.size());
                for (const auto& col : N)
                    g.push_back(dot(col, mtz));
                worst = std::max(worst, l1(g));
            }
            L += worst;
        }
        return L;
    }
};

/// Primal model: sup of a concave G over conv(region).
template <class F>
struct PrimalModel {
    std::vector<Vec<F>> region;
    std::function<F(const Vec<F>&)> G;
};

/// Oracle evaluation of a separable function, block by block.
template <class F>
Extended<F> brute_eval(const SeparableFunction<F>& psi, const Vec<F>& z)
{
    return SeparableEnvelope<F>(psi)(z);
}

template <class F>
std::vector<Vec<F>> product_points(const SeparableFunction<F>& psi)
{
    std::vector<Vec<F>> out{Vec<F>(psi.dim(), F(0))};
    for (const auto& b : psi.blocks()) {
        std::vector<Vec<F>> next;
        for (const auto& z : out)
            for (const auto& p : b.f.points()) {
                Vec<F> w = z;
                for (std::size_t i = 0; i < b.coords.size(); ++i)
                    w[b.coords[i]] = p[i];
                next.push_back(std::move(w));
            }
        out = std::move(next);
    }
    return out;
}

/// h*(q) = sup over Bz = 0 of q(Az) - psi(z), on the trivariate product form.
template <class F>
PrimalModel<F> primal_model(const TrivariateData<F>& t, const AffineFunctional<F>& q)
{
    PrimalModel<F> out;
    out.region = slice_vertices(product_points(t.psi), t.B.matrix(), negate(t.B.offset()));
    out.G = [t, q, env = SeparableEnvelope<F>(t.psi)](const Vec<F>& z) {
        return F(q(t.A.apply(z)) - env(z, false).value());
    };
    return out;
}

/// min over y of psi*(qA + yB) on the trivariate product form.
template <class F>
DualModel<F> dual_model(const TrivariateData<F>& t, const AffineFunctional<F>& q)
{
    const std::size_t zd = t.psi.dim(), xd = t.B.out_dim();
    DualModel<F> out;
    out.y0 = Vec<F>(xd, F(0));
    // Moving y along ker B^T leaves the objective flat once the fiber is
    // nonempty, so the search runs over range B only.
    out.N = nullspace(nullspace(transpose(t.B.matrix(), zd), xd), xd);
    out.lin = t.B.offset();
    out.constant = F(q.constant + dot(q.coeffs, t.A.offset()) - t.psi.shift().constant);
    const Vec<F> aq = mat_t_vec(t.A.matrix(), q.coeffs, zd);
    for (const auto& b : t.psi.blocks()) {
        typename DualModel<F>::Piece p{{}, {}, b.f};
        for (auto c : b.coords) {
            Vec<F> row(xd);
            for (std::size_t r = 0; r < xd; ++r)
                row[r] = t.B.matrix()[r][c];
            p.M.push_back(std::move(row));
            p.m.push_back(F(aq[c] - t.psi.shift().coeffs[c]));
        }
        out.pieces.push_back(std::move(p));
    }
    return out;
}

/// For indicator_linear: x = Cw ranges over range C, w'w = y0.x with C^T y0 = w'.
template <class F>
std::optional<PrimalModel<F>> primal_model(const IndicatorLinearData<F>& d, const AffineFunctional<F>& q)
{
    const std::size_t dw = d.C.in_dim(), dx = d.C.out_dim(), du = d.D.in_dim();
    const Vec<F> wp(q.coeffs.begin(), q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw));
    const Vec<F> vp(q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw), q.coeffs.end());
    const Mat<F> ct = transpose(d.C.matrix(), dw);
    auto y0 = solve_linear(ct, wp, dx);
    if (!y0)
        return std::nullopt;
    Mat<F> E;
    for (auto n : nullspace(ct, dx)) {
        n.resize(dx + du, F(0));
        E.push_back(std::move(n));
    }
    PrimalModel<F> out;
    out.region = slice_vertices(d.g.points(), E, Vec<F>(E.size(), F(0)));
    out.G = [d, q, vp, y = *y0, dx, env = Envelope<F>(d.g)](const Vec<F>& xu) {
        const Vec<F> x(xu.begin(), xu.begin() + static_cast<std::ptrdiff_t>(dx));
        const Vec<F> u(xu.begin() + static_cast<std::ptrdiff_t>(dx), xu.end());
        return F(dot(y, x) + dot(vp, d.D.apply(u)) + q.constant - env(xu, false).value());
    };
    return out;
}

template <class F>
std::optional<DualModel<F>> dual_model(const IndicatorLinearData<F>& d, const AffineFunctional<F>& q)
{
    const std::size_t dw = d.C.in_dim(), dx = d.C.out_dim(), du = d.D.in_dim();
    const Vec<F> wp(q.coeffs.begin(), q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw));
    const Vec<F> vp(q.coeffs.begin() + static_cast<std::ptrdiff_t>(dw), q.coeffs.end());
    const Mat<F> ct = transpose(d.C.matrix(), dw);
    auto y0 = solve_linear(ct, wp, dx);
    if (!y0)
        return std::nullopt;
    DualModel<F> out;
    out.y0 = *y0;
    out.N = nullspace(ct, dx);
    out.lin = Vec<F>(dx, F(0));
    out.constant = F(q.constant + dot(vp, d.D.offset()));
    typename DualModel<F>::Piece p{{}, {}, d.g};
    for (std::size_t i = 0; i < dx; ++i) {
        Vec<F> row(dx, F(0));
        row[i] = 1;
        p.M.push_back(std::move(row));
        p.m.push_back(F(0));
    }
    const Vec<F> dtv = mat_t_vec(d.D.matrix(), vp, du);
    for (std::size_t i = 0; i < du; ++i) {
        p.M.push_back(Vec<F>(dx, F(0)));
        p.m.push_back(dtv[i]);
    }
    out.pieces.push_back(std::move(p));
    return out;
}

/// Minimum of the dual objective by Lipschitz branch and bound over cubes in
/// t-space, starting from [-R, R]^dim. A cube with center c and half-width w
/// holds no value below D(c) - L w, so it is dropped once that exceeds the best
/// value seen. If a cube touching the outer boundary survives, the box minimum
/// may sit on the boundary and the bracket is marked inconclusive; otherwise the
/// box minimum is interior and, by convexity, global.
template <class F>
Bracket<F> box_min(const DualModel<F>& dm, const F& R, const F& tolerance, std::size_t budget = 20000)
{
    Bracket<F> out;
    const std::size_t dim = dm.N.size();
    if (dim == 0) {
        const F v = dm(Vec<F>{});
        out.lower = out.upper = Extended<F>(v);
        out.evaluations = 1;
        return out;
    }
    struct Cell {
        Vec<F> c;
        F w;
        F value;
    };
    const F L = dm.lipschitz();
    auto touches = [&](const Cell& cell) {
        for (const auto& x : cell.c)
            if (!(F(x + cell.w) < R) || !(F(x - cell.w) > F(-R)))
                return true;
        return false;
    };
    std::vector<Cell> live{{Vec<F>(dim, F(0)), R, dm(Vec<F>(dim, F(0)))}};
    out.evaluations = 1;
    F best = live[0].value;
    std::size_t children = 1;
    for (std::size_t i = 0; i < dim; ++i)
        children *= 3;
    auto bound = [&](const Cell& cell) { return F(cell.value - L * cell.w); };
    while (true) {
        F lower = bound(live[0]);
        for (const auto& cell : live)
            lower = std::min(lower, bound(cell));
        out.lower = Extended<F>(lower);
        out.upper = Extended<F>(best);
        // Once the gap is small, only boundary cubes still matter.
        const bool narrow = !(F(best - lower) > tolerance);
        std::vector<Cell> next, split;
        bool stuck = false;
        for (auto& cell : live) {
            // A boundary cube already below the resolution that is still not
            // pruned means the minimum reaches the boundary of this box.
            stuck = stuck || (narrow && touches(cell) && !(F(L * cell.w) > tolerance));
            (narrow && !touches(cell) ? next : split).push_back(std::move(cell));
        }
        if (split.empty())
            break;
        if (stuck || out.evaluations + split.size() * children > budget) {
            out.conclusive = !std::any_of(split.begin(), split.end(), touches);
            if (!out.conclusive)
                out.note = "a cube on the box boundary could still hold the minimum";
            break;
        }
        for (const auto& cell : split) {
            const F w = F(cell.w / 3);
            for (std::size_t k = 0; k < children; ++k) {
                Vec<F> c = cell.c;
                std::size_t rem = k;
                bool center = true;
                for (std::size_t j = 0; j < dim; ++j) {
                    const long off = static_cast<long>(rem % 3) - 1;
                    rem /= 3;
                    center = center && off == 0;
                    c[j] += F(F(2 * off) * w);
                }
                const F v = center ? cell.value : dm(c);
                if (!center)
                    ++out.evaluations;
                best = std::min(best, v);
                next.push_back({std::move(c), w, v});
            }
        }
        live.clear();
        for (auto& cell : next)
            if (!(bound(cell) > best))
                live.push_back(std::move(cell));
    }
    return out;
}

/// Both oracle brackets for one query of a scenario.
template <class F>
struct QueryOracle {
    Bracket<F> lhs;
    Bracket<F> rhs;
};

template <class F>
QueryOracle<F> bracket_query(const ScenarioData<F>& data, const AffineFunctional<F>& q, std::size_t n, const F& R,
                             const F& tolerance)
{
    QueryOracle<F> out;
    if (const auto* il = std::get_if<IndicatorLinearData<F>>(&data)) {
        auto pm = primal_model(*il, q);
        if (!pm) {
            out.lhs.lower = out.lhs.upper = out.rhs.lower = out.rhs.upper = Extended<F>::pos_inf();
            out.lhs.note = out.rhs.note = "w' outside the range of C^T";
            return out;
        }
        out.lhs = grid_sup(pm->G, pm->region, n);
        out.rhs = box_min(*dual_model(*il, q), R, tolerance);
        return out;
    }
    const auto t = to_trivariate(data);
    auto pm = primal_model(t, q);
    out.lhs = grid_sup(pm.G, pm.region, n);
    if (pm.region.empty()) {
        out.rhs.lower = out.rhs.upper = Extended<F>::neg_inf();
        out.rhs.conclusive = false;
        out.rhs.note = "empty fiber: the dual side is not scanned";
        return out;
    }
    out.rhs = box_min(dual_model(t, q), R, tolerance);
    return out;
}

/// Larger of the primal region's affine dimension and the dual search
/// dimension; the cross-check is stated for instances where this is at most 2.
template <class F>
std::size_t instance_dim(const ScenarioData<F>& data, const AffineFunctional<F>& q)
{
    if (const auto* il = std::get_if<IndicatorLinearData<F>>(&data)) {
        auto pm = primal_model(*il, q);
        if (!pm)
            return 0;
        return std::max(affine_dim(pm->region), dual_model(*il, q)->N.size());
    }
    const auto t = to_trivariate(data);
    return std::max(affine_dim(primal_model(t, q).region), dual_model(t, q).N.size());
}

/// inf psi over A^{-1}{p} and B^{-1}{0} by slice enumeration and a grid.
template <class F>
Bracket<F> grid_fiber_inf(const SeparableFunction<F>& psi, const AffineMap<F>& A, const AffineMap<F>& B, const Vec<F>& p,
                          std::size_t n)
{
    Mat<F> E = A.matrix();
    E.insert(E.end(), B.matrix().begin(), B.matrix().end());
    Vec<F> e = sub(p, A.offset());
    auto nb = negate(B.offset());
    e.insert(e.end(), nb.begin(), nb.end());
    auto region = slice_vertices(product_points(psi), E, e);
    Bracket<F> out;
    if (region.empty()) {
        out.lower = out.upper = Extended<F>::pos_inf();
        out.note = "empty fiber";
        return out;
    }
    const SeparableEnvelope<F> env(psi);
    auto neg = grid_sup<F>([&env](const Vec<F>& z) { return F(-env(z, false).value()); }, region, n);
    out.lower = -neg.upper;
    out.upper = -neg.lower;
    out.evaluations = neg.evaluations;
    return out;
}

}  // namespace sandwichkit::oracle
