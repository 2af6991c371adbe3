#include "entnet/surface.hpp"
#include "entnet/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace entnet;

TEST(Surface, HomogeneousRoots) {
    EXPECT_NEAR(solve_homogeneous(square_surface()), 0.5, 1e-12);
    EXPECT_NEAR(solve_homogeneous(triangular_surface()), 0.34729635533386070, 1e-12);
    EXPECT_NEAR(solve_homogeneous(honeycomb_surface()), 0.65270364466613930, 1e-12);
    EXPECT_NEAR(solve_homogeneous(bowtie_surface()), 0.40451831940585170, 1e-12);
}

TEST(Surface, TriangularHoneycombDuality) {
    EXPECT_NEAR(solve_homogeneous(triangular_surface()) + solve_homogeneous(honeycomb_surface()),
                1.0, 1e-12);
}

TEST(Surface, BowtieReducesToSquareWithoutVerticals) {
    // Killing the shared vertical edge leaves a (rotated) square lattice:
    // the four diagonals at probability 1/2 must be exactly critical.
    const CriticalSurface s = bowtie_surface();
    EXPECT_NEAR(s.residual({0.5, 0.5, 0.5, 0.5, 0.0}), 0.0, 1e-15);
}

TEST(Surface, ScaledRootSquareIsosceles) {
    // Triangular lattice stretched into right isosceles cells: two unit
    // legs and one sqrt(2) hypotenuse.
    const double root = solve_scaled(triangular_surface(), {1.0, 1.0, std::numbers::sqrt2});
    EXPECT_NEAR(root, 0.38851010140782907, 1e-12);
    // All-equal weights collapse to the homogeneous root.
    EXPECT_NEAR(solve_scaled(triangular_surface(), {1, 1, 1}),
                solve_homogeneous(triangular_surface()), 1e-12);
    EXPECT_NEAR(solve_scaled(square_surface(), {1, 1}), 0.5, 1e-12);
}

TEST(Surface, CriticalLengthsAtStandardFiberLoss) {
    const double alpha = 1.0 / 22.0;
    const LengthProfile sq = critical_lengths(square_surface(), {1, 1}, alpha);
    EXPECT_NEAR(sq.scale, 22.0 * std::log(2.0), 1e-9);
    EXPECT_NEAR(sq.scale, 15.249237972318797, 1e-9);
    EXPECT_NEAR(sq.x, 0.5, 1e-12);
    EXPECT_NEAR(sq.lengths[0], sq.scale, 0.0);
    EXPECT_NEAR(sq.probabilities[0], 0.5, 1e-12);

    const LengthProfile tri = critical_lengths(triangular_surface(), {1, 1, 1}, alpha);
    EXPECT_NEAR(tri.scale, 23.266689898648567, 1e-9);

    // Longer reachable links on the triangular lattice than on the square:
    // more redundancy tolerates more loss.
    EXPECT_GT(tri.scale, sq.scale);
}

TEST(Surface, MonotoneInEveryProbability) {
    StreamRng rng(7u);
    const CriticalSurface surfaces[] = {square_surface(), triangular_surface(),
                                        honeycomb_surface(), bowtie_surface()};
    for (const CriticalSurface& s : surfaces) {
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> p(static_cast<std::size_t>(s.num_classes));
            for (double& v : p) v = rng.next_unit();
            const double f0 = s.evaluate(p);
            for (std::size_t i = 0; i < p.size(); ++i) {
                std::vector<double> q = p;
                q[i] = std::min(1.0, q[i] + 1e-3);
                EXPECT_GE(s.evaluate(q) - f0, -1e-12) << s.lattice;
            }
        }
    }
}

TEST(Surface, EvaluateValidatesArity) {
    EXPECT_THROW(square_surface().evaluate({0.5}), std::invalid_argument);
    EXPECT_THROW(solve_scaled(square_surface(), {1.0}), std::invalid_argument);
    EXPECT_THROW(solve_scaled(square_surface(), {1.0, -2.0}), std::invalid_argument);
    EXPECT_THROW(surface_for("kagome"), std::invalid_argument);
    EXPECT_TRUE(has_surface("bowtie"));
    EXPECT_FALSE(has_surface("3.6.3.6"));
}

TEST(Surface, MaxClassLengthSquare) {
    const double alpha = 1.0 / 22.0;
    // Vertical links fixed at 10 km: horizontal links may stretch until
    // p_h = 1 - p_v.
    const CriticalSurface s = square_surface();
    const ClassLengthLimit lim = max_class_length(s, 0, {0.0, 10.0}, alpha);
    ASSERT_EQ(lim.status, ClassLengthLimit::Status::Bounded);
    const double pv = std::exp(-alpha * 10.0);
    EXPECT_NEAR(lim.p_required, 1.0 - pv, 1e-12);
    EXPECT_NEAR(lim.max_length, -22.0 * std::log(1.0 - pv), 1e-9);
}

TEST(Surface, MaxClassLengthUnboundedAndInfeasible) {
    const double alpha = 1.0 / 22.0;
    // Two zero-length triangular classes percolate by themselves, so the
    // third class may be arbitrarily long.
    EXPECT_EQ(max_class_length(triangular_surface(), 2, {0.0, 0.0, 5.0}, alpha).status,
              ClassLengthLimit::Status::Unbounded);
    // Honeycomb with two nearly dead classes cannot reach criticality at
    // any length of the remaining one.
    EXPECT_EQ(max_class_length(honeycomb_surface(), 0, {1.0, 200.0, 200.0}, alpha).status,
              ClassLengthLimit::Status::Infeasible);
}

TEST(Surface, ExactnessFlagsSeparateProvenFromConjectured) {
    EXPECT_TRUE(square_surface().exact);
    EXPECT_TRUE(triangular_surface().exact);
    EXPECT_TRUE(honeycomb_surface().exact);
    EXPECT_FALSE(bowtie_surface().exact);
    EXPECT_FALSE(surface_for("bowtie-I").exact); // roman-numeral alias
}

TEST(Surface, LosslessFiberMakesEveryLengthScaleUnbounded) {
    const LengthProfile prof = critical_lengths(square_surface(), {1.0, 2.0}, 0.0);
    EXPECT_TRUE(std::isinf(prof.scale));
    ASSERT_EQ(prof.lengths.size(), 2u);
    EXPECT_TRUE(std::isinf(prof.lengths[0]));
    EXPECT_TRUE(std::isinf(prof.lengths[1]));
    // The probabilities themselves stay on the critical surface.
    ASSERT_EQ(prof.probabilities.size(), 2u);
    EXPECT_NEAR(prof.probabilities[0] + prof.probabilities[1], 1.0, 1e-12);
    EXPECT_THROW(critical_lengths(square_surface(), {1.0, 2.0}, -0.1),
                 std::invalid_argument);
}
