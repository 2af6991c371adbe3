#include "entnet/bell.hpp"
#include "entnet/rng.hpp"

#include <gtest/gtest.h>

using namespace entnet;

TEST(Bell, StatesAreOrthonormal) {
    for (std::uint8_t a1 = 0; a1 < 2; ++a1)
        for (std::uint8_t b1 = 0; b1 < 2; ++b1)
            for (std::uint8_t a2 = 0; a2 < 2; ++a2)
                for (std::uint8_t b2 = 0; b2 < 2; ++b2) {
                    const DenseTwoQubitState s1 = bell_state({a1, b1});
                    const DenseTwoQubitState s2 = bell_state({a2, b2});
                    const double f = fidelity(s1, s2);
                    if (a1 == a2 && b1 == b2) {
                        EXPECT_NEAR(f, 1.0, 1e-12);
                        EXPECT_NEAR(s1.norm2(), 1.0, 1e-12);
                    } else {
                        EXPECT_NEAR(f, 0.0, 1e-12);
                    }
                }
}

// The XOR bookkeeping must agree with an explicit amplitude-level Bell
// measurement for every combination of input labels and reported outcome.
TEST(Bell, SwapRuleMatchesDenseOracleForAllTriples) {
    for (int i = 0; i < 64; ++i) {
        const BellLabel l1{static_cast<std::uint8_t>(i & 1), static_cast<std::uint8_t>((i >> 1) & 1)};
        const BellLabel l2{static_cast<std::uint8_t>((i >> 2) & 1), static_cast<std::uint8_t>((i >> 3) & 1)};
        const BellLabel out{static_cast<std::uint8_t>((i >> 4) & 1), static_cast<std::uint8_t>((i >> 5) & 1)};

        const BellMeasurementResult r = bell_oracle(l1, l2, out);
        const BellLabel expected = swap_update(l1, l2, out);

        EXPECT_NEAR(r.probability, 0.25, 1e-12);
        EXPECT_EQ(r.label.a, expected.a);
        EXPECT_EQ(r.label.b, expected.b);
        EXPECT_NEAR(r.label_fidelity, 1.0, 1e-12);
        EXPECT_NEAR(fidelity(r.post, bell_state(expected)), 1.0, 1e-12);
    }
}

TEST(Bell, CorrectionRestoresReferenceState) {
    for (std::uint8_t a = 0; a < 2; ++a)
        for (std::uint8_t b = 0; b < 2; ++b) {
            const BellLabel label{a, b};
            const PauliCorrection corr = chain_correction({label});
            EXPECT_EQ(apply_correction(label, corr), (BellLabel{0, 0}));
            const DenseTwoQubitState fixed = apply_correction(bell_state(label), corr);
            EXPECT_NEAR(fidelity(fixed, bell_state({0, 0})), 1.0, 1e-12);
        }
}

// A chain of swaps over reference-state sources accumulates the XOR of all
// outcomes; folding those outcomes into one correction must cancel it.
TEST(Bell, ChainCorrectionCancelsAccumulatedLabel) {
    StreamRng rng(20260822u);
    for (int rep = 0; rep < 200; ++rep) {
        const int swaps = 1 + static_cast<int>(rng.next_below(12));
        BellLabel running{0, 0};
        std::vector<BellLabel> outcomes;
        outcomes.reserve(static_cast<std::size_t>(swaps));
        for (int s = 0; s < swaps; ++s) {
            const BellLabel out{static_cast<std::uint8_t>(rng.next_below(2)),
                                static_cast<std::uint8_t>(rng.next_below(2))};
            outcomes.push_back(out);
            running = swap_update(running, BellLabel{0, 0}, out);
        }
        const PauliCorrection corr = chain_correction(outcomes);
        EXPECT_EQ(apply_correction(running, corr), (BellLabel{0, 0}));
    }
}
