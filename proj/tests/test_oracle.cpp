#include "sandwichkit/oracle.hpp"
#include "sandwichkit/properties.hpp"

#include <gtest/gtest.h>

using namespace sandwichkit;
using Q = Rational;

namespace {

PolyhedralFunction<Q> abs_unit() { return PolyhedralFunction<Q>::vform({{{Q(-1)}, Q(1)}, {{Q(0)}, Q(0)}, {{Q(1)}, Q(1)}}); }

Extended<Q> fin(const Q& q) { return Extended<Q>(q); }

}  // namespace

TEST(GridSup, IndicatorOfOriginAtAnyResolution)
{
    for (std::size_t n : {1u, 3u, 8u}) {
        auto b = oracle::grid_sup(AffineFunctional<Q>::zero(1),
                                  {{point_indicator(Vec<Q>{Q(0)}), AffineMap<Q>::identity(1)}}, oracle::GridSpec{n});
        EXPECT_EQ(b.lower, fin(0));
        EXPECT_EQ(b.upper, fin(0));
    }
}

TEST(GridSup, VertexAttainedMaximumIsExact)
{
    auto b = oracle::grid_sup(AffineFunctional<Q>({Q(3)}), {{abs_unit(), AffineMap<Q>::identity(1)}}, oracle::GridSpec{8});
    EXPECT_EQ(b.lower, fin(2));
    EXPECT_TRUE(b.contains(fin(2)));
}

TEST(GridSup, NonpositiveIntegrand)
{
    auto b = oracle::grid_sup(AffineFunctional<Q>({Q(1)}), {{abs_unit(), AffineMap<Q>::identity(1)}}, oracle::GridSpec{8});
    EXPECT_EQ(b.lower, fin(0));
    EXPECT_TRUE(b.contains(fin(0)));
}

TEST(GridSup, FirstTermMustBeAnIdentityVForm)
{
    auto h = conjugate(abs_unit());
    EXPECT_THROW(oracle::grid_sup(AffineFunctional<Q>({Q(1)}), {{h, AffineMap<Q>::identity(1)}}, oracle::GridSpec{4}),
                 StructuralError);
}

TEST(GridFiberInf, HalfInTheFenchelSetup)
{
    auto f = PolyhedralFunction<Q>::vform({{{Q(-1)}, Q(0)}, {{Q(1)}, Q(0)}});
    auto g = PolyhedralFunction<Q>::vform({{{Q(-2)}, Q(2)}, {{Q(0)}, Q(0)}, {{Q(2)}, Q(2)}});
    SeparableFunction<Q> psi(2, {Block<Q>{f, {0}}, Block<Q>{g, {1}}});
    auto b = oracle::grid_fiber_inf(psi, AffineMap<Q>::projection(2, {0}), AffineMap<Q>::linear(2, {{Q(-1), Q(1)}}),
                                    Vec<Q>{Q(1, 2)}, 8);
    EXPECT_TRUE(b.contains(fin(Q(1, 2))));
    EXPECT_LE(b.upper.value() - b.lower.value(), Q(1, 2));
}

// Slices are computed exactly, so an empty fiber is certain rather than a grid miss.
TEST(GridFiberInf, EmptyFiberIsCertified)
{
    auto psi = SeparableFunction<Q>::single(abs_unit());
    auto b = oracle::grid_fiber_inf(psi, AffineMap<Q>::identity(1), AffineMap<Q>::zero(1, 0), Vec<Q>{Q(5)}, 8);
    EXPECT_TRUE(b.lower.is_pos_inf());
    EXPECT_EQ(b.note, "empty fiber");
}

TEST(GridFiberInf, SingletonDomainIsExact)
{
    auto psi = SeparableFunction<Q>::single(PolyhedralFunction<Q>::vform({{{Q(1), Q(2)}, Q(7, 3)}}));
    auto b = oracle::grid_fiber_inf(psi, AffineMap<Q>::projection(2, {0}), AffineMap<Q>::zero(2, 0), Vec<Q>{Q(1)}, 4);
    EXPECT_EQ(b.lower, fin(Q(7, 3)));
    EXPECT_EQ(b.upper, fin(Q(7, 3)));
}

TEST(BruteForce, EnvelopeAndConjugate)
{
    EXPECT_EQ(oracle::brute_eval(abs_unit(), Vec<Q>{Q(1, 2)}), fin(Q(1, 2)));
    EXPECT_TRUE(oracle::brute_eval(abs_unit(), Vec<Q>{Q(3, 2)}).is_pos_inf());
    EXPECT_EQ(oracle::brute_conjugate(abs_unit(), Vec<Q>{Q(-3)}), Q(2));
}

TEST(BracketQuery, FenchelExampleBracketsBothSides)
{
    auto f = PolyhedralFunction<Q>::vform({{{Q(-1)}, Q(0)}, {{Q(1)}, Q(0)}});
    auto g = PolyhedralFunction<Q>::vform({{{Q(-2)}, Q(2)}, {{Q(0)}, Q(0)}, {{Q(2)}, Q(2)}});
    ScenarioData<Q> data = FenchelData<Q>{f, g, AffineMap<Q>::identity(1)};
    auto o = oracle::bracket_query(data, AffineFunctional<Q>({Q(3)}), 8, Q(4), Q(1, 64));
    EXPECT_TRUE(o.lhs.contains(fin(2)));
    EXPECT_TRUE(o.rhs.contains(fin(2)));
    EXPECT_LE(o.rhs.upper.value() - o.rhs.lower.value(), Q(1, 64));
}

// ---- properties ------------------------------------------------------------

TEST(OracleProperties, VertexAttainedOptimaMatchTheEngine)
{
    // phi linear and f affine on a polytope: the sup sits at a vertex.
    gen::Rng rng(51);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 1 + trial % 2;
        std::vector<Vec<Q>> pts;
        for (int i = 0; i < 3 + trial % 3; ++i)
            pts.push_back(gen::vec(rng, d, 5, 1));
        auto slope = gen::vec(rng, d, 3, 1);
        std::vector<std::pair<Vec<Q>, Q>> pairs;
        for (const auto& p : pts)
            pairs.emplace_back(p, dot(slope, p));
        auto f = PolyhedralFunction<Q>::vform(pairs);
        AffineFunctional<Q> phi(gen::vec(rng, d, 4, 1));
        std::vector<ComposedTerm<Q>> terms{{f, AffineMap<Q>::identity(d)}};
        auto engine = sup_affine_minus_convex(phi, terms).value;
        for (std::size_t n : {1u, 2u, 5u})
            EXPECT_EQ(oracle::grid_sup(phi, terms, oracle::GridSpec{n}).lower, engine) << "trial " << trial;
    }
}

TEST(OracleProperties, NestedRefinementIsMonotoneAndConverges)
{
    gen::Rng rng(52);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + trial % 2;
        auto f = gen::vform(rng, d, 3 + trial % 3);
        AffineFunctional<Q> phi(gen::vec(rng, d));
        std::vector<ComposedTerm<Q>> terms{{f, AffineMap<Q>::identity(d)}};
        auto engine = sup_affine_minus_convex(phi, terms).value;
        Extended<Q> prev = Extended<Q>::neg_inf();
        Q prev_width = -1;
        for (std::size_t n : {4u, 8u, 16u, 32u}) {
            auto b = oracle::grid_sup(phi, terms, oracle::GridSpec{n});
            EXPECT_GE(b.lower, prev) << "trial " << trial << " n " << n;
            EXPECT_TRUE(b.contains(engine)) << "trial " << trial << " n " << n;
            if (n > 4) {
                const Q width = b.upper.value() - b.lower.value();
                EXPECT_LE(width, prev_width) << "trial " << trial << " n " << n;
                prev_width = width;
            } else {
                prev_width = b.upper.value() - b.lower.value();
            }
            prev = b.lower;
        }
    }
}

TEST(OracleProperties, EngineAgreesWithOraclePerKind)
{
    gen::Rng rng(53);
    auto r = props::oracle_crosscheck(rng, 4);
    EXPECT_TRUE(r.passed()) << r.first_failure;
    EXPECT_EQ(r.cases, 28u);
}
