#pragma once

// Randomized property suites shared by the acceptance binary and `selftest`.

#include "sandwichkit/oracle.hpp"
#include "sandwichkit/random.hpp"

#include <sstream>

namespace sandwichkit::props {

using gen::Q;
using gen::Rng;

struct SuiteResult {
    explicit SuiteResult(std::string n) : name(std::move(n)) {}

    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::size_t inconclusive = 0;
    std::string first_failure;

    bool passed() const { return cases > 0 && failures == 0; }
    void fail(const std::string& why)
    {
        if (!failures)
            first_failure = why;
        ++failures;
    }
};

inline std::string str(const Vec<Q>& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + sandwichkit::to_string(v[i]);
    return s + ")";
}

/// f**(z) = sup_a [a.z - f*(a)] with f* in H-form: an LP over covectors.
inline Extended<Q> biconjugate_at(const PolyhedralFunction<Q>& f, const Vec<Q>& z)
{
    return sup_affine_minus_convex(AffineFunctional<Q>(z), {{conjugate(f), AffineMap<Q>::identity(f.dim())}}).value;
}

/// f** = f at random domain points, through the covector LP, the envelope LP and the oracle.
inline SuiteResult biconjugation(Rng& rng, std::size_t instances, std::size_t points)
{
    SuiteResult r{"biconjugation"};
    for (std::size_t i = 0; i < instances; ++i) {
        const auto dim = static_cast<std::size_t>(gen::uniform(rng, 1, 3));
        auto f = gen::vform(rng, dim, static_cast<std::size_t>(gen::uniform(rng, 1, 12)));
        for (std::size_t k = 0; k < points; ++k) {
            auto z = gen::domain_point(rng, f.points());
            auto a = eval(f, z);
            auto b = biconjugate_at(f, z);
            ++r.cases;
            if (!(a == b))
                r.fail("instance " + std::to_string(i) + " at " + str(z) + ": f = " + a.str() + ", f** = " + b.str());
        }
    }
    return r;
}

/// Separator passes the independent check and lies below T at sampled points; T <= S there.
inline SuiteResult sandwich_soundness(Rng& rng, std::size_t instances, std::size_t points)
{
    SuiteResult r{"sandwich_soundness"};
    for (std::size_t i = 0; i < instances; ++i) {
        auto inst = gen::sandwich(rng);
        ++r.cases;
        if (!verify_hypothesis(inst).holds) {
            r.fail("instance " + std::to_string(i) + ": generated hypothesis fails");
            continue;
        }
        auto sep = find_separator(inst);
        if (!sep.xprime) {
            r.fail("instance " + std::to_string(i) + ": no separator");
            continue;
        }
        if (!check_separator(inst, *sep.xprime).ok())
            r.fail("instance " + std::to_string(i) + ": separator " + str(*sep.xprime) + " fails the check");
        for (std::size_t k = 0; k < points; ++k) {
            auto x = gen::vec(rng, inst.S.dim(), 10, 4);
            auto t = aux_T(inst, x);
            if (!(Extended<Q>(dot(*sep.xprime, x)) <= t) || !(t <= Extended<Q>(inst.S(x))))
                r.fail("instance " + std::to_string(i) + " at " + str(x) + ": x' <= T <= S fails, T = " + t.str());
        }
    }
    return r;
}

/// Every query passes with gap 0 and a witness; all flags must hold.
inline void expect_strong(SuiteResult& r, const DualityScenario<Q>& s, const std::string& label)
{
    for (const auto& rep : verify(s)) {
        ++r.cases;
        if (!rep.flags_hold())
            r.fail(label + ": a hypothesis flag is false");
        else if (!(rep.gap == Extended<Q>(Q(0))) || !rep.attained)
            r.fail(label + ": gap " + rep.gap.str() + ", attained " + std::to_string(rep.attained));
    }
}

inline SuiteResult strong_fenchel(Rng& rng, std::size_t instances)
{
    SuiteResult r{"strong_duality_boundedness"};
    for (std::size_t i = 0; i < instances; ++i) {
        auto d = gen::fenchel_bounded(rng);
        DualityScenario<Q> s(Kind::fenchel, d);
        s.queries = gen::queries(rng, d.f.dim(), 3);
        expect_strong(r, s, "fenchel instance " + std::to_string(i));
    }
    return r;
}

inline SuiteResult strong_trivariate(Rng& rng, std::size_t instances)
{
    SuiteResult r{"strong_duality_closed_subspace"};
    for (std::size_t i = 0; i < instances; ++i) {
        auto d = gen::trivariate_subspace(rng);
        DualityScenario<Q> s(Kind::trivariate, d);
        s.mode = HypothesisMode::closed_subspace;
        s.queries = gen::queries(rng, d.A.out_dim(), 3);
        expect_strong(r, s, "trivariate instance " + std::to_string(i));
    }
    return r;
}

/// gap >= 0 everywhere; on violating scenarios no query may claim a pass.
inline SuiteResult weak_duality(Rng& rng, std::size_t satisfying, std::size_t violating)
{
    SuiteResult r{"weak_duality"};
    auto check = [&](const DualityScenario<Q>& s, bool must_violate, const std::string& label) {
        for (const auto& rep : verify(s)) {
            ++r.cases;
            if (!rep.weak_duality())
                r.fail(label + ": negative gap " + rep.gap.str());
            if (must_violate && (rep.flags_hold() || rep.verdict() == "pass"))
                r.fail(label + ": violating scenario asserted equality");
        }
    };
    for (std::size_t i = 0; i < satisfying; ++i) {
        if (i % 2 == 0) {
            auto d = gen::fenchel_bounded(rng);
            DualityScenario<Q> s(Kind::fenchel, d);
            s.queries = gen::queries(rng, d.f.dim(), 2);
            check(s, false, "fenchel " + std::to_string(i));
        } else {
            auto d = gen::trivariate_subspace(rng);
            DualityScenario<Q> s(Kind::trivariate, d);
            s.mode = HypothesisMode::closed_subspace;
            s.queries = gen::queries(rng, d.A.out_dim(), 2);
            check(s, false, "trivariate " + std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < violating; ++i) {
        if (i % 2 == 0) {
            auto d = gen::fenchel_violating(rng);
            DualityScenario<Q> s(Kind::fenchel, d);
            s.queries = gen::queries(rng, 1, 2);
            check(s, true, "violating fenchel " + std::to_string(i));
        } else {
            auto d = gen::trivariate_violating(rng);
            DualityScenario<Q> s(Kind::trivariate, d);
            s.mode = HypothesisMode::closed_subspace;
            s.queries = gen::queries(rng, 1, 2);
            check(s, true, "violating trivariate " + std::to_string(i));
        }
    }
    return r;
}

inline SuiteResult theorem20(Rng& rng, std::size_t instances)
{
    SuiteResult r{"theorem20_equivalence"};
    for (std::size_t i = 0; i < instances; ++i) {
        auto q = gen::sublevel_query(rng);
        auto t = theorem20_equivalence(q);
        ++r.cases;
        if (!t.agree())
            r.fail("instance " + std::to_string(i) + ": (" + std::to_string(t.interior) + ", " + std::to_string(t.in_image) + ", " +
                   std::to_string(t.above_inf) + ") at gamma " + sandwichkit::to_string(q.gamma));
    }
    return r;
}

inline bool same(const DualityReport<Q>& a, const DualityReport<Q>& b)
{
    return a.lhs == b.lhs && a.rhs == b.rhs && a.gap == b.gap;
}

inline SuiteResult reductions(Rng& rng, std::size_t instances)
{
    SuiteResult r{"reduction_consistency"};
    for (std::size_t i = 0; i < instances; ++i) {
        auto d = gen::fenchel_bounded(rng);
        DualityScenario<Q> s(Kind::fenchel, d);
        for (const auto& q : gen::queries(rng, d.f.dim(), 2)) {
            auto direct = verify_query(s, q, {}, {});
            auto product = verify_via_product(s.data, q);
            ++r.cases;
            if (!same(direct, product))
                r.fail("fenchel instance " + std::to_string(i) + ": direct " + direct.lhs.str() + "/" + direct.rhs.str() +
                       " vs product " + product.lhs.str() + "/" + product.rhs.str());
        }
    }
    for (std::size_t i = 0; i < instances; ++i) {
        auto b = gen::bibivariate(rng);
        DualityScenario<Q> sb(Kind::bibivariate, b);
        DualityScenario<Q> sq(Kind::quadrivariate, to_quadrivariate(b));
        for (const auto& q : gen::queries(rng, b.C.in_dim() + b.D.out_dim(), 2)) {
            auto direct = verify_query(sb, q, {}, {});
            auto quad = verify_query(sq, q, {}, {});
            ++r.cases;
            if (!same(direct, quad))
                r.fail("bibivariate instance " + std::to_string(i) + ": " + direct.lhs.str() + "/" + direct.rhs.str() +
                       " vs quadrivariate " + quad.lhs.str() + "/" + quad.rhs.str());
        }
    }
    return r;
}

/// The three worked examples with their exact values.
inline SuiteResult worked_examples()
{
    SuiteResult r{"worked_examples"};
    auto check = [&](bool ok, const std::string& what) {
        ++r.cases;
        if (!ok)
            r.fail(what);
    };
    {
        auto f = PolyhedralFunction<Q>::vform({{{Q(-1)}, Q(0)}, {{Q(1)}, Q(0)}});
        auto g = PolyhedralFunction<Q>::vform({{{Q(-2)}, Q(2)}, {{Q(0)}, Q(0)}, {{Q(2)}, Q(2)}});
        DualityScenario<Q> s(Kind::fenchel, FenchelData<Q>{f, g, AffineMap<Q>::identity(1)});
        s.queries = {AffineFunctional<Q>({Q(3)})};
        auto rep = verify(s).at(0);
        check(rep.lhs == Extended<Q>(Q(2)) && rep.rhs == Extended<Q>(Q(2)) && rep.witness == Vec<Q>{Q(1)} &&
                  rep.verdict() == "pass",
              "(f + gC)*(3): lhs " + rep.lhs.str() + ", rhs " + rep.rhs.str() + ", witness " + str(rep.witness));
    }
    {
        std::vector<std::pair<Vec<Q>, Q>> pairs;
        for (int x : {-1, 1})
            for (int v : {-1, 0, 1})
                pairs.push_back({{Q(x), Q(v)}, Q(v < 0 ? -v : v)});
        auto f = PolyhedralFunction<Q>::vform(pairs);
        DualityScenario<Q> s(Kind::partial_infconv,
                             BibivariateData<Q>{f, f, AffineMap<Q>::identity(1), AffineMap<Q>::identity(1)});
        s.queries = {AffineFunctional<Q>({Q(0), Q(2)})};
        auto rep = verify(s).at(0);
        check(rep.lhs == Extended<Q>(Q(2)) && rep.rhs == Extended<Q>(Q(2)) && rep.witness == Vec<Q>{Q(0)} &&
                  rep.verdict() == "pass",
              "partial inf-convolution h*(0, 2): lhs " + rep.lhs.str() + ", rhs " + rep.rhs.str() + ", witness " +
                  str(rep.witness));
    }
    {
        SandwichInstance<Q> inst{SublinearFunctional<Q>({{Q(1)}, {Q(-1)}}), Polytope<Q>(1, {{Q(1)}, {Q(2)}}),
                                 PolyhedralFunction<Q>::vform({{{Q(1)}, Q(-1)}, {{Q(2)}, Q(-1)}}),
                                 AffineMap<Q>::identity(1)};
        auto sep = find_separator(inst);
        check(sep.xprime && *sep.xprime == Vec<Q>{Q(1)}, "sandwich separator for S = |.|, Z = [1, 2], k = -1");
    }
    return r;
}

/// Engine values inside the oracle brackets; the box is widened until the scan is conclusive.
inline SuiteResult oracle_crosscheck(Rng& rng, std::size_t per_kind, std::size_t resolution = 8)
{
    SuiteResult r{"oracle_crosscheck"};
    auto run = [&](const DualityScenario<Q>& s, const std::string& label) {
        for (const auto& rep : verify(s)) {
            ++r.cases;
            oracle::QueryOracle<Q> o;
            for (long R : {4, 16, 64, 256, 1024}) {
                o = oracle::bracket_query(s.data, rep.query, resolution, Q(R), Q(1, 64));
                if (o.lhs.conclusive && o.rhs.conclusive)
                    break;
            }
            if (!o.lhs.conclusive || !o.rhs.conclusive) {
                ++r.inconclusive;
                r.fail(label + ": oracle inconclusive (" + o.lhs.note + o.rhs.note + ")");
            } else if (!o.lhs.contains(rep.lhs) || !o.rhs.contains(rep.rhs)) {
                r.fail(label + ": engine " + rep.lhs.str() + "/" + rep.rhs.str() + " outside [" + o.lhs.lower.str() + ", " +
                       o.lhs.upper.str() + "] / [" + o.rhs.lower.str() + ", " + o.rhs.upper.str() + "]");
            }
        }
    };
    // Redraw until every query sits in dimension at most 2.
    auto small = [](const DualityScenario<Q>& s) {
        for (const auto& q : s.queries)
            if (oracle::instance_dim(s.data, q) > 2)
                return false;
        return true;
    };
    auto draw = [&](auto make) {
        for (int attempt = 0;; ++attempt) {
            auto s = make();
            if (small(s) || attempt == 1000)
                return s;
        }
    };
    for (std::size_t i = 0; i < per_kind; ++i) {
        const auto tag = " " + std::to_string(i);
        run(draw([&] {
                auto t = gen::trivariate_subspace(rng);
                DualityScenario<Q> s(Kind::sublevel, TrivariateData<Q>{t.psi, AffineMap<Q>::zero(t.psi.dim(), 0), t.B});
                s.queries = {AffineFunctional<Q>::zero(0)};
                return s;
            }),
            "sublevel" + tag);
        run(draw([&] {
                auto t = gen::trivariate_subspace(rng);
                DualityScenario<Q> s(Kind::trivariate, t);
                s.queries = gen::queries(rng, t.A.out_dim(), 1);
                return s;
            }),
            "trivariate" + tag);
        run(draw([&] {
                auto d = gen::fenchel_bounded(rng, 1, static_cast<std::size_t>(gen::uniform(rng, 1, 2)));
                DualityScenario<Q> s(Kind::fenchel, d);
                s.queries = gen::queries(rng, 1, 1);
                return s;
            }),
            "fenchel" + tag);
        run(draw([&] {
                auto b = gen::bibivariate(rng, false, true);
                DualityScenario<Q> s(Kind::bibivariate, b);
                s.queries = gen::queries(rng, b.C.in_dim() + b.D.out_dim(), 1);
                return s;
            }),
            "bibivariate" + tag);
        run(draw([&] {
                auto b = gen::bibivariate(rng, false, true);
                DualityScenario<Q> s(Kind::quadrivariate, to_quadrivariate(b));
                s.queries = gen::queries(rng, b.C.in_dim() + b.D.out_dim(), 1);
                return s;
            }),
            "quadrivariate" + tag);
        run(draw([&] {
                auto b = gen::bibivariate(rng, true, true);
                DualityScenario<Q> s(Kind::partial_infconv, b);
                s.queries = gen::queries(rng, b.C.in_dim() + b.D.out_dim(), 1);
                return s;
            }),
            "partial_infconv" + tag);
        run(draw([&] {
                auto d = gen::indicator_linear(rng, true);
                DualityScenario<Q> s(Kind::indicator_linear, d);
                s.queries = gen::indicator_queries(rng, d, 1);
                return s;
            }),
            "indicator_linear" + tag);
    }
    return r;
}

}  // namespace sandwichkit::props
