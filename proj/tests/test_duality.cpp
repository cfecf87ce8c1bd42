#include "sandwichkit/duality.hpp"
#include "sandwichkit/oracle.hpp"
#include "sandwichkit/random.hpp"

#include <gtest/gtest.h>

using namespace sandwichkit;
using Q = Rational;

namespace {

Extended<Q> fin(const Q& q) { return Extended<Q>(q); }

PolyhedralFunction<Q> abs_on(const Q& r)
{
    return PolyhedralFunction<Q>::vform({{{Q(-r)}, r}, {{Q(0)}, Q(0)}, {{r}, r}});
}

PolyhedralFunction<Q> zero_on_unit() { return PolyhedralFunction<Q>::vform({{{Q(-1)}, Q(0)}, {{Q(1)}, Q(0)}}); }

// Sum of absolute values on [-1, 1]^d, sampled on {-1, 0, 1}^d.
PolyhedralFunction<Q> l1_on_cube(std::size_t d)
{
    std::vector<std::pair<Vec<Q>, Q>> pairs;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i)
        total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
        Vec<Q> p(d);
        Q v = 0;
        std::size_t c = code;
        for (std::size_t i = 0; i < d; ++i, c /= 3) {
            p[i] = Q(static_cast<long>(c % 3) - 1);
            v += abs(p[i]);
        }
        pairs.emplace_back(std::move(p), v);
    }
    return PolyhedralFunction<Q>::vform(std::move(pairs));
}

DualityScenario<Q> fenchel_example()
{
    DualityScenario<Q> s(Kind::fenchel, FenchelData<Q>{zero_on_unit(), abs_on(Q(2)), AffineMap<Q>::identity(1)});
    s.queries = {AffineFunctional<Q>({Q(3)}), AffineFunctional<Q>({Q(0)})};
    return s;
}

// Psi(p, x) = f(p) + g(x), A(p, x) = p, B(p, x) = x - p.
TrivariateData<Q> fiber_example()
{
    SeparableFunction<Q> psi(2, {Block<Q>{zero_on_unit(), {0}}, Block<Q>{abs_on(Q(2)), {1}}});
    return {psi, AffineMap<Q>::projection(2, {0}), AffineMap<Q>::linear(2, {{Q(-1), Q(1)}})};
}

}  // namespace

TEST(FiberInf, AbsoluteValueThroughTheFiber)
{
    auto t = fiber_example();
    EXPECT_EQ(fiber_inf(t.psi, t.A, t.B, Vec<Q>{Q(0)}), fin(0));
    EXPECT_EQ(fiber_inf(t.psi, t.A, t.B, Vec<Q>{Q(1, 2)}), fin(Q(1, 2)));
    EXPECT_EQ(fiber_inf(t.psi, t.A, t.B, Vec<Q>{Q(1)}), fin(1));
}

TEST(FiberInf, EmptyFiberIsPlusInfinity)
{
    auto t = fiber_example();
    EXPECT_TRUE(fiber_inf(t.psi, t.A, t.B, Vec<Q>{Q(3)}).is_pos_inf());
}

TEST(FiberInf, IndicatorOfOrigin)
{
    auto psi = SeparableFunction<Q>::single(point_indicator(Vec<Q>{Q(0), Q(0)}));
    EXPECT_EQ(fiber_inf(psi, AffineMap<Q>::projection(2, {0}), AffineMap<Q>::projection(2, {1}), Vec<Q>{Q(0)}), fin(0));
}

TEST(FiberInf, DimensionMismatchThrows)
{
    auto t = fiber_example();
    EXPECT_THROW(fiber_inf(t.psi, t.A, t.B, Vec<Q>{Q(0), Q(0)}), StructuralError);
}

TEST(Verify, FenchelSumAtThreeAndZero)
{
    auto reps = verify(fenchel_example());
    ASSERT_EQ(reps.size(), 2u);
    EXPECT_EQ(reps[0].lhs, fin(2));
    EXPECT_EQ(reps[0].rhs, fin(2));
    EXPECT_EQ(reps[0].gap, fin(0));
    EXPECT_EQ(reps[0].witness, Vec<Q>{Q(1)});
    EXPECT_TRUE(reps[0].attained);
    EXPECT_EQ(reps[0].verdict(), "pass");
    EXPECT_EQ(reps[1].lhs, fin(0));
    EXPECT_EQ(reps[1].rhs, fin(0));
    EXPECT_EQ(reps[1].witness, Vec<Q>{Q(0)});
}

TEST(Verify, FenchelWithoutNeighbourhoodFailsTheFlag)
{
    // g lives on {0} only, so g is not bounded above near C(dom f).
    DualityScenario<Q> s(Kind::fenchel,
                         FenchelData<Q>{zero_on_unit(), point_indicator(Vec<Q>{Q(0)}), AffineMap<Q>::identity(1)});
    s.queries = {AffineFunctional<Q>({Q(1)})};
    auto rep = verify(s).at(0);
    EXPECT_FALSE(rep.flags_hold());
    EXPECT_TRUE(rep.weak_duality());
    EXPECT_EQ(rep.verdict(), "hypotheses_unmet");
}

TEST(Verify, PartialInfConvolutionAtZeroTwo)
{
    std::vector<std::pair<Vec<Q>, Q>> pairs;
    for (int x : {-1, 1})
        for (int v : {-1, 0, 1})
            pairs.push_back({{Q(x), Q(v)}, Q(std::abs(v))});
    auto f = PolyhedralFunction<Q>::vform(pairs);
    DualityScenario<Q> s(Kind::partial_infconv,
                         BibivariateData<Q>{f, f, AffineMap<Q>::identity(1), AffineMap<Q>::identity(1)});
    s.queries = {AffineFunctional<Q>({Q(0), Q(2)})};
    auto rep = verify(s).at(0);
    EXPECT_EQ(rep.lhs, fin(2));
    EXPECT_EQ(rep.rhs, fin(2));
    EXPECT_EQ(rep.witness, Vec<Q>{Q(0)});
    EXPECT_EQ(rep.verdict(), "pass");
}

TEST(VerifyIndicatorLinear, IdentityMapsAtOrigin)
{
    DualityScenario<Q> s(Kind::indicator_linear,
                         IndicatorLinearData<Q>{l1_on_cube(2), AffineMap<Q>::identity(1), AffineMap<Q>::identity(1)});
    s.queries = {AffineFunctional<Q>({Q(0), Q(0)})};
    auto rep = verify(s).at(0);
    EXPECT_EQ(rep.lhs, fin(0));
    EXPECT_EQ(rep.rhs, fin(0));
    EXPECT_EQ(rep.witness, Vec<Q>{Q(0)});
}

TEST(VerifyIndicatorLinear, ZeroMapGivesInfiniteConjugate)
{
    DualityScenario<Q> s(Kind::indicator_linear,
                         IndicatorLinearData<Q>{l1_on_cube(2), AffineMap<Q>::zero(1, 1), AffineMap<Q>::identity(1)});
    s.queries = {AffineFunctional<Q>({Q(1), Q(0)})};
    auto rep = verify(s).at(0);
    EXPECT_TRUE(rep.lhs.is_pos_inf());
    EXPECT_TRUE(rep.rhs.is_pos_inf());
    EXPECT_TRUE(rep.witness.empty());
    EXPECT_TRUE(rep.weak_duality());
}

// C = (1, 1)^T, D = id, g = |x1| + |x2| + |u| on the cube: h(w, v) = 2|w| + |v|
// on [-1, 1]^2, so h*(3, 1/2) = 1, attained by any x* with x1 + x2 = 3 and
// both coordinates in [1, 2].
TEST(VerifyIndicatorLinear, DiagonalEmbedding)
{
    DualityScenario<Q> s(Kind::indicator_linear, IndicatorLinearData<Q>{l1_on_cube(3), AffineMap<Q>::linear(1, {{Q(1)}, {Q(1)}}),
                                                                        AffineMap<Q>::identity(1)});
    s.queries = {AffineFunctional<Q>({Q(3), Q(1, 2)})};
    auto rep = verify(s).at(0);
    EXPECT_EQ(rep.lhs, fin(1));
    EXPECT_EQ(rep.rhs, fin(1));
    ASSERT_EQ(rep.witness.size(), 2u);
    EXPECT_EQ(rep.witness[0] + rep.witness[1], Q(3));
    EXPECT_TRUE(rep.attained);
    auto o = oracle::bracket_query(s.data, s.queries[0], 8, Q(4), Q(1, 64));
    EXPECT_TRUE(o.lhs.contains(rep.lhs));
}

TEST(Verify, SublevelKindUsesTheFiberInfimum)
{
    auto phi = SeparableFunction<Q>::single(abs_on(Q(1)));
    DualityScenario<Q> s(Kind::sublevel, TrivariateData<Q>{phi, AffineMap<Q>::zero(1, 0), AffineMap<Q>::identity(1)});
    auto rep = verify(s).at(0);
    EXPECT_EQ(rep.lhs, fin(0));
    EXPECT_EQ(rep.rhs, fin(0));
    EXPECT_EQ(rep.verdict(), "pass");
}

TEST(Verify, InconsistentDimensionsNameBothObjects)
{
    DualityScenario<Q> s(Kind::fenchel, FenchelData<Q>{zero_on_unit(), l1_on_cube(2), AffineMap<Q>::identity(1)});
    s.queries = {AffineFunctional<Q>({Q(1)})};
    try {
        verify(s);
        FAIL() << "expected a structural error";
    } catch (const StructuralError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find('C'), std::string::npos) << msg;
        EXPECT_NE(msg.find('g'), std::string::npos) << msg;
    }
}

// ---- properties ------------------------------------------------------------

TEST(DualityProperties, StrongDualityUnderBoundedness)
{
    gen::Rng rng(31);
    for (int trial = 0; trial < 15; ++trial) {
        DualityScenario<Q> s(Kind::fenchel, gen::fenchel_bounded(rng));
        s.queries = gen::queries(rng, std::get<FenchelData<Q>>(s.data).f.dim(), 3);
        for (const auto& r : verify(s)) {
            EXPECT_TRUE(r.flags_hold()) << "trial " << trial;
            EXPECT_EQ(r.gap, fin(0)) << "trial " << trial;
            EXPECT_TRUE(r.attained) << "trial " << trial;
        }
    }
}

TEST(DualityProperties, StrongDualityUnderSubspaceCondition)
{
    gen::Rng rng(32);
    for (int trial = 0; trial < 15; ++trial) {
        DualityScenario<Q> s(Kind::trivariate, gen::trivariate_subspace(rng));
        s.mode = HypothesisMode::closed_subspace;
        s.queries = gen::queries(rng, std::get<TrivariateData<Q>>(s.data).A.out_dim(), 3);
        for (const auto& r : verify(s)) {
            EXPECT_TRUE(r.flags_hold()) << "trial " << trial;
            EXPECT_EQ(r.gap, fin(0)) << "trial " << trial;
            EXPECT_TRUE(r.attained) << "trial " << trial;
        }
    }
}

TEST(DualityProperties, WeakDualityOnViolatingScenarios)
{
    gen::Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        DualityScenario<Q> s = trial % 2 ? DualityScenario<Q>(Kind::fenchel, gen::fenchel_violating(rng))
                                         : DualityScenario<Q>(Kind::trivariate, gen::trivariate_violating(rng));
        if (trial % 2 == 0)
            s.mode = HypothesisMode::closed_subspace;
        s.queries = gen::queries(rng, query_dim(s.data), 3);
        for (const auto& r : verify(s)) {
            EXPECT_TRUE(r.weak_duality()) << "trial " << trial;
            if (!r.flags_hold()) {
                EXPECT_NE(r.verdict(), "pass") << "trial " << trial;
            }
        }
    }
}

TEST(DualityProperties, FenchelMatchesTrivariateProduct)
{
    gen::Rng rng(34);
    for (int trial = 0; trial < 10; ++trial) {
        DualityScenario<Q> s(Kind::fenchel, gen::fenchel_bounded(rng));
        s.queries = gen::queries(rng, query_dim(s.data), 2);
        for (const auto& r : verify(s)) {
            auto p = verify_via_product(s.data, r.query);
            EXPECT_EQ(r.lhs, p.lhs) << "trial " << trial;
            EXPECT_EQ(r.rhs, p.rhs) << "trial " << trial;
            EXPECT_EQ(r.gap, p.gap) << "trial " << trial;
        }
    }
}

TEST(DualityProperties, BibivariateMatchesQuadrivariate)
{
    gen::Rng rng(35);
    for (int trial = 0; trial < 10; ++trial) {
        auto b = gen::bibivariate(rng);
        DualityScenario<Q> direct(Kind::bibivariate, b);
        direct.queries = gen::queries(rng, query_dim(direct.data), 2);
        DualityScenario<Q> quad(Kind::quadrivariate, to_quadrivariate(b));
        quad.queries = direct.queries;
        auto a = verify(direct), c = verify(quad);
        ASSERT_EQ(a.size(), c.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].lhs, c[i].lhs) << "trial " << trial;
            EXPECT_EQ(a[i].rhs, c[i].rhs) << "trial " << trial;
            EXPECT_EQ(a[i].gap, c[i].gap) << "trial " << trial;
        }
    }
}

TEST(DualityProperties, EngineInsideOracleBracketsForFenchel)
{
    gen::Rng rng(36);
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        DualityScenario<Q> s(Kind::fenchel, gen::fenchel_bounded(rng, 1, 1));
        s.queries = gen::queries(rng, 1, 2);
        for (const auto& r : verify(s)) {
            if (oracle::instance_dim(s.data, r.query) > 2)
                continue;
            auto o = oracle::bracket_query(s.data, r.query, 8, Q(64), Q(1, 64));
            if (!o.rhs.conclusive)
                continue;
            ++checked;
            EXPECT_TRUE(o.lhs.contains(r.lhs)) << "trial " << trial << " lhs " << r.lhs.str();
            EXPECT_TRUE(o.rhs.contains(r.rhs)) << "trial " << trial << " rhs " << r.rhs.str();
        }
    }
    EXPECT_GE(checked, 10);
}
