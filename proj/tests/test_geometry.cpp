#include "sandwichkit/geometry.hpp"
#include "sandwichkit/random.hpp"

#include <gtest/gtest.h>

using namespace sandwichkit;
using Q = Rational;

TEST(AffineApply, IdentityMap)
{
    EXPECT_EQ(affine_apply(AffineMap<Q>::identity(2), Vec<Q>{Q(2), Q(3)}), (Vec<Q>{Q(2), Q(3)}));
}

TEST(AffineApply, ProjectionMinusConstant)
{
    AffineMap<Q> m(2, {{Q(1), Q(0)}}, {Q(-1)});
    EXPECT_EQ(affine_apply(m, Vec<Q>{Q(1), Q(5)}), Vec<Q>{Q(0)});
}

TEST(AffineApply, MidpointIdentity)
{
    AffineMap<Q> m(1, {{Q(2)}}, {Q(1)});
    auto mid = affine_apply(m, Vec<Q>{Q(1)});
    auto avg = scale(Q(1, 2), add(affine_apply(m, Vec<Q>{Q(0)}), affine_apply(m, Vec<Q>{Q(2)})));
    EXPECT_EQ(mid, Vec<Q>{Q(3)});
    EXPECT_EQ(mid, avg);
}

TEST(AffineApply, DimensionMismatchThrows)
{
    EXPECT_THROW(affine_apply(AffineMap<Q>::identity(2), Vec<Q>{Q(1)}), StructuralError);
    EXPECT_THROW(AffineMap<Q>(2, {{Q(1)}}, {Q(0)}), StructuralError);
}

TEST(PolytopeContains, SegmentMembership)
{
    Polytope<Q> seg(1, {{Q(0)}, {Q(1)}});
    EXPECT_TRUE(polytope_contains(seg, Vec<Q>{Q(1, 2)}));
    EXPECT_FALSE(polytope_contains(seg, Vec<Q>{Q(2)}));
    EXPECT_THROW(polytope_contains(seg, Vec<Q>{Q(0), Q(0)}), StructuralError);
}

TEST(PolytopeContains, TriangleCentroid)
{
    Polytope<Q> tri(2, {{Q(1), Q(0)}, {Q(0), Q(1)}, {Q(-1), Q(-1)}});
    EXPECT_TRUE(polytope_contains(tri, Vec<Q>{Q(0), Q(0)}));
    EXPECT_FALSE(polytope_contains(tri, Vec<Q>{Q(1), Q(1)}));
}

TEST(PolytopeContains, EmptyVertexListRejected)
{
    EXPECT_THROW(Polytope<Q>(1, {}), StructuralError);
}

TEST(ConeUnion, SymmetricSegmentThroughOrigin)
{
    auto r = cone_union_is_subspace<Q>({{Q(1), Q(0)}, {Q(-1), Q(0)}, {Q(0), Q(0)}});
    EXPECT_TRUE(r.is_subspace);
    EXPECT_EQ(r.basis.basis(), (Mat<Q>{{Q(1), Q(0)}}));
}

TEST(ConeUnion, QuadrantIsNotASubspace)
{
    EXPECT_FALSE(cone_union_is_subspace<Q>({{Q(1), Q(0)}, {Q(0), Q(1)}}).is_subspace);
}

TEST(ConeUnion, TriangleAroundOriginSpansThePlane)
{
    auto r = cone_union_is_subspace<Q>({{Q(1), Q(0)}, {Q(-1), Q(1)}, {Q(0), Q(-1)}});
    EXPECT_TRUE(r.is_subspace);
    EXPECT_EQ(r.basis.dim(), 2u);
}

TEST(ConeUnion, EmptyInputRejected)
{
    EXPECT_THROW(cone_union_is_subspace<Q>({}), StructuralError);
}

TEST(Subspace, MembershipAndTrivialSubspace)
{
    auto line = Subspace<Q>::span(2, {{Q(2), Q(4)}});
    EXPECT_TRUE(line.contains({Q(-1), Q(-2)}));
    EXPECT_FALSE(line.contains({Q(1), Q(0)}));
    Subspace<Q> zero(2, {});
    EXPECT_TRUE(zero.contains({Q(0), Q(0)}));
    EXPECT_FALSE(zero.contains({Q(0), Q(1)}));
    EXPECT_THROW(Subspace<Q>(2, {{Q(1), Q(1)}, {Q(2), Q(2)}}), StructuralError);
}

namespace {

std::vector<Vec<Q>> random_points(gen::Rng& rng, std::size_t count, std::size_t dim)
{
    std::vector<Vec<Q>> pts;
    for (std::size_t i = 0; i < count; ++i)
        pts.push_back(gen::vec(rng, dim, 3, 1));
    return pts;
}

}  // namespace

TEST(ConeUnionProperties, InvariantUnderPositiveScaling)
{
    gen::Rng rng(3);
    for (int trial = 0; trial < 60; ++trial) {
        auto pts = random_points(rng, 2 + trial % 4, 1 + trial % 3);
        auto before = cone_union_is_subspace(pts);
        for (auto& p : pts)
            p = scale(gen::ratio(gen::uniform(rng, 1, 9), gen::uniform(rng, 1, 5)), p);
        auto after = cone_union_is_subspace(pts);
        EXPECT_EQ(before.is_subspace, after.is_subspace) << "trial " << trial;
        EXPECT_EQ(before.basis.basis(), after.basis.basis()) << "trial " << trial;
    }
}

TEST(ConeUnionProperties, BasisIsGeneratedByTheInputCone)
{
    gen::Rng rng(4);
    int positives = 0;
    for (int trial = 0; trial < 80; ++trial) {
        auto pts = random_points(rng, 3 + trial % 4, 1 + trial % 3);
        // Half the trials are symmetrized so the condition holds often.
        if (trial % 2) {
            auto n = pts.size();
            for (std::size_t i = 0; i < n; ++i)
                pts.push_back(negate(pts[i]));
        }
        auto r = cone_union_is_subspace(pts);
        if (!r.is_subspace)
            continue;
        ++positives;
        for (const auto& p : pts)
            EXPECT_TRUE(r.basis.contains(p));
        for (const auto& b : r.basis.basis()) {
            EXPECT_TRUE(in_cone(pts, b));
            EXPECT_TRUE(in_cone(pts, negate(b)));
        }
    }
    EXPECT_GE(positives, 40);
}

// Brute force: a point is in the hull iff some grid of barycentric weights with
// denominator 12 reaches it, for targets built from such weights.
TEST(PolytopeContainsProperties, AgreesWithBarycentricGrid)
{
    gen::Rng rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t nv = 2 + trial % 3, dim = 1 + trial % 2;
        auto verts = random_points(rng, nv, dim);
        Polytope<Q> P(dim, verts);
        Vec<Q> w(nv, Q(0));
        long left = 12;
        for (std::size_t i = 0; i + 1 < nv; ++i) {
            long take = gen::uniform(rng, 0, left);
            w[i] = gen::ratio(take, 12);
            left -= take;
        }
        w[nv - 1] = gen::ratio(left, 12);
        Vec<Q> inside(dim, Q(0));
        for (std::size_t i = 0; i < nv; ++i)
            inside = add(inside, scale(w[i], verts[i]));
        EXPECT_TRUE(polytope_contains(P, inside)) << "trial " << trial;
        // Far outside every vertex's bounding box.
        Vec<Q> outside(dim, Q(10));
        EXPECT_FALSE(polytope_contains(P, outside)) << "trial " << trial;
    }
}
