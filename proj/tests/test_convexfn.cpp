#include "sandwichkit/convexfn.hpp"
#include "sandwichkit/oracle.hpp"
#include "sandwichkit/random.hpp"

#include <gtest/gtest.h>

using namespace sandwichkit;
using Q = Rational;

namespace {

PolyhedralFunction<Q> abs_on(const Q& r)
{
    return PolyhedralFunction<Q>::vform({{{Q(-r)}, r}, {{Q(0)}, Q(0)}, {{r}, r}});
}

PolyhedralFunction<Q> zero_on(const Q& lo, const Q& hi)
{
    return PolyhedralFunction<Q>::vform({{{lo}, Q(0)}, {{hi}, Q(0)}});
}

Extended<Q> fin(const Q& q) { return Extended<Q>(q); }

}  // namespace

TEST(Eval, AbsoluteValueOnInterval)
{
    auto f = abs_on(Q(1));
    EXPECT_EQ(eval(f, Vec<Q>{Q(0)}), fin(0));
    EXPECT_EQ(eval(f, Vec<Q>{Q(1, 2)}), fin(Q(1, 2)));
    EXPECT_TRUE(eval(f, Vec<Q>{Q(2)}).is_pos_inf());
    EXPECT_THROW(eval(f, Vec<Q>{Q(0), Q(0)}), StructuralError);
}

TEST(Eval, DominatedSamplesAreHarmless)
{
    auto f = PolyhedralFunction<Q>::vform({{{Q(-1)}, Q(1)}, {{Q(0)}, Q(5)}, {{Q(1)}, Q(1)}});
    EXPECT_EQ(eval(f, Vec<Q>{Q(0)}), fin(1));
}

TEST(Eval, HFormIsMaxOfPieces)
{
    auto s = PolyhedralFunction<Q>::hform({AffineFunctional<Q>({Q(1)}), AffineFunctional<Q>({Q(-1)})});
    EXPECT_EQ(eval(s, Vec<Q>{Q(-7, 3)}), fin(Q(7, 3)));
}

TEST(Conjugate, IndicatorOfOriginIsZero)
{
    auto f = PolyhedralFunction<Q>::vform({{{Q(0)}, Q(0)}});
    auto fs = conjugate(f);
    EXPECT_FALSE(fs.is_vform());
    for (int y : {-3, 0, 5})
        EXPECT_EQ(eval(fs, Vec<Q>{Q(y)}), fin(0));
}

TEST(Conjugate, AbsoluteValueAtThree)
{
    auto fs = conjugate(abs_on(Q(1)));
    EXPECT_EQ(eval(fs, Vec<Q>{Q(3)}), fin(2));
    EXPECT_EQ(oracle::brute_conjugate(abs_on(Q(1)), Vec<Q>{Q(3)}), Q(2));
}

TEST(Conjugate, AbsoluteValueConjugatesToIndicator)
{
    auto s = PolyhedralFunction<Q>::hform({AffineFunctional<Q>({Q(1)}), AffineFunctional<Q>({Q(-1)})});
    auto ss = conjugate(s);
    ASSERT_TRUE(ss.is_vform());
    EXPECT_EQ(eval(ss, Vec<Q>{Q(1, 3)}), fin(0));
    EXPECT_EQ(eval(ss, Vec<Q>{Q(-1)}), fin(0));
    EXPECT_TRUE(eval(ss, Vec<Q>{Q(3, 2)}).is_pos_inf());
}

TEST(IndicatorOfZeroSection, SamplesAndValues)
{
    auto f = indicator_of_zero_section(Polytope<Q>(1, {{Q(0)}, {Q(1)}}), 1);
    EXPECT_EQ(f.points(), (std::vector<Vec<Q>>{{Q(0), Q(0)}, {Q(1), Q(0)}}));
    EXPECT_EQ(eval(f, Vec<Q>{Q(1, 2), Q(0)}), fin(0));
    EXPECT_TRUE(eval(f, Vec<Q>{Q(1, 2), Q(1, 10)}).is_pos_inf());
}

TEST(SupAffineMinusConvex, IndicatorOfOrigin)
{
    auto r = sup_affine_minus_convex(AffineFunctional<Q>::zero(1),
                                     {{PolyhedralFunction<Q>::vform({{{Q(0)}, Q(0)}}), AffineMap<Q>::identity(1)}});
    EXPECT_EQ(r.value, fin(0));
    EXPECT_EQ(r.argmax, Vec<Q>{Q(0)});
}

TEST(SupAffineMinusConvex, SumOfTwoTerms)
{
    auto r = sup_affine_minus_convex(AffineFunctional<Q>({Q(3)}), {{zero_on(Q(-1), Q(1)), AffineMap<Q>::identity(1)},
                                                                   {abs_on(Q(2)), AffineMap<Q>::identity(1)}});
    EXPECT_EQ(r.value, fin(2));
    EXPECT_EQ(r.argmax, Vec<Q>{Q(1)});
}

TEST(SupAffineMinusConvex, NonpositiveIntegrand)
{
    auto r = sup_affine_minus_convex(AffineFunctional<Q>({Q(1)}), {{abs_on(Q(1)), AffineMap<Q>::identity(1)}});
    EXPECT_EQ(r.value, fin(0));
}

TEST(SupAffineMinusConvex, DisjointDomainsGiveMinusInfinity)
{
    auto r = sup_affine_minus_convex(AffineFunctional<Q>({Q(1)}), {{zero_on(Q(0), Q(1)), AffineMap<Q>::identity(1)},
                                                                   {zero_on(Q(2), Q(3)), AffineMap<Q>::identity(1)}});
    EXPECT_TRUE(r.value.is_neg_inf());
}

TEST(Sublinear, ValuesAndDomination)
{
    SublinearFunctional<Q> s({{Q(1), Q(0)}, {Q(-1), Q(0)}, {Q(0), Q(2)}});
    EXPECT_EQ(s(Vec<Q>{Q(-3), Q(1)}), Q(3));
    EXPECT_EQ(s(Vec<Q>{Q(0), Q(0)}), Q(0));
    EXPECT_TRUE(s.dominates({Q(0), Q(1)}));
    EXPECT_FALSE(s.dominates({Q(0), Q(3)}));
}

// ---- properties ------------------------------------------------------------

TEST(ConvexfnProperties, BiconjugateReproducesTheEnvelope)
{
    gen::Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        auto f = gen::vform(rng, 1 + trial % 3, 2 + trial % 8);
        auto fss = conjugate(conjugate(f));
        for (int k = 0; k < 20; ++k) {
            auto z = gen::domain_point(rng, f.points());
            EXPECT_EQ(eval(fss, z), eval(f, z)) << "trial " << trial;
        }
    }
}

TEST(ConvexfnProperties, EvalMatchesBruteForceEnvelope)
{
    gen::Rng rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        auto f = gen::vform(rng, 1 + trial % 2, 3 + trial % 5);
        for (int k = 0; k < 10; ++k) {
            auto z = gen::domain_point(rng, f.points());
            EXPECT_EQ(eval(f, z), oracle::brute_eval(f, z)) << "trial " << trial;
        }
    }
}

TEST(ConvexfnProperties, FenchelYoungWithEqualityAtSubgradients)
{
    gen::Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + trial % 3;
        auto f = gen::vform(rng, d, 2 + trial % 6);
        auto fs = conjugate(f);
        auto z = gen::domain_point(rng, f.points());
        auto y = gen::vec(rng, d, 5, 2);
        auto fz = eval(f, z).value();
        EXPECT_GE(fz + eval(fs, y).value(), dot(y, z)) << "trial " << trial;
        auto e = eval_with_subgradient(f, z);
        EXPECT_EQ(fz + eval(fs, e.subgradient).value(), dot(e.subgradient, z)) << "trial " << trial;
    }
}

TEST(ConvexfnProperties, SublinearAxioms)
{
    gen::Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + trial % 3;
        std::vector<Vec<Q>> gens;
        for (int j = 0; j < 1 + trial % 4; ++j)
            gens.push_back(gen::vec(rng, d));
        SublinearFunctional<Q> s(gens);
        auto a = gen::vec(rng, d), b = gen::vec(rng, d);
        const Q lambda = gen::ratio(gen::uniform(rng, 1, 20), gen::uniform(rng, 1, 20));
        EXPECT_LE(s(add(a, b)), s(a) + s(b));
        EXPECT_EQ(s(scale(lambda, a)), lambda * s(a));
    }
}

TEST(ConvexfnProperties, SupAgreesWithGridOracleInLowDimension)
{
    gen::Rng rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 1 + trial % 2;
        auto f = gen::vform(rng, d, 3 + trial % 4);
        // g's domain covers dom f, so every grid point is feasible.
        auto g = gen::vform_on(rng, gen::box(Vec<Q>(d, Q(0)), Q(20)));
        auto phi = AffineFunctional<Q>(gen::vec(rng, d));
        std::vector<ComposedTerm<Q>> terms{{f, AffineMap<Q>::identity(d)}, {g, AffineMap<Q>::identity(d)}};
        auto engine = sup_affine_minus_convex(phi, terms);
        auto grid = oracle::grid_sup(phi, terms, oracle::GridSpec{8});
        ASSERT_TRUE(grid.conclusive) << grid.note;
        EXPECT_TRUE(grid.contains(engine.value)) << "trial " << trial << ": engine " << engine.value.str()
                                                 << " outside [" << grid.lower.str() << ", " << grid.upper.str() << "]";
    }
}
