// Opt-in full regression of the threshold estimator: every lattice with a
// generator, bond and site, against the published values.  Takes tens of
// minutes single-threaded; enable with -DENTNET_EXHAUSTIVE_TESTS=ON.

#include "entnet/percolation.hpp"
#include "entnet/tilings.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

using namespace entnet;

int main() {
    int failures = 0;
    for (const ThresholdRow& row : reference_thresholds()) {
        if (!row.has_generator) continue;
        const UnitCell cell = unit_cell(row.name);
        for (const PercolationKind kind : {PercolationKind::Bond, PercolationKind::Site}) {
            const bool is_bond = kind == PercolationKind::Bond;
            if (!is_bond && !row.has_site) continue;
            const double want = is_bond ? row.bond : row.site;

            const auto start = std::chrono::steady_clock::now();
            ThresholdSettings settings;
            const ThresholdEstimate est = estimate_threshold(cell, kind, settings);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();

            const double diff = est.value - want;
            const bool ok = std::fabs(diff) <= 0.01;
            if (!ok) ++failures;
            std::printf("[%s] %-12s %-4s estimate %.6f reference %.6f diff %+.6f (%.1fs)\n",
                        ok ? "PASS" : "FAIL", row.name.c_str(), is_bond ? "bond" : "site",
                        est.value, want, diff, secs);
            std::fflush(stdout);
        }
    }
    if (failures) std::printf("%d estimates off by more than 0.01\n", failures);
    return failures;
}
