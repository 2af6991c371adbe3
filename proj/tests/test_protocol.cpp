#include "entnet/protocol.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace entnet;

namespace {

// Normalize a traced chain so it reads left user -> right user.
struct NormalChain {
    int x_row = -1, y_row = -1;
    std::vector<std::pair<int, int>> terminals; // (col, row), left to right
    std::vector<std::pair<int, int>> sources;   // (col, row), left to right
};

NormalChain normalize(const ProtocolNetwork& net, const Chain& c) {
    NormalChain n;
    const int M = net.cfg.cols;
    std::vector<std::pair<int, int>> terms;
    for (int tid : c.terminals) terms.push_back({tid % (M + 2), tid / (M + 2)});
    std::vector<std::pair<int, int>> srcs;
    for (int sid : c.sources) srcs.push_back({net.source_col(sid), net.source_row(sid)});
    const bool starts_left = c.start_col == 0;
    if (starts_left) {
        n.x_row = c.start_row;
        n.y_row = c.end_row;
    } else {
        n.x_row = c.end_row;
        n.y_row = c.start_row;
        std::reverse(terms.begin(), terms.end());
        std::reverse(srcs.begin(), srcs.end());
    }
    n.terminals = terms;
    n.sources = srcs;
    return n;
}

} // namespace

TEST(Protocol, DefaultTilingTrajectoriesFollowTheFold) {
    for (int N = 2; N <= 8; ++N) {
        for (int M = 1; M <= 8; ++M) {
            BravaisConfig cfg;
            cfg.rows = N;
            cfg.cols = M;
            const ProtocolNetwork net = build_network(cfg);
            const TraceResult trace = trace_chains(net);

            ASSERT_EQ(static_cast<int>(trace.chains.size()), 2 * (N - 1)) << N << "x" << M;
            EXPECT_EQ(trace.num_cycles, 0);

            // Expected (start row, direction) pairs: up from every row but
            // the top, down from every row but the bottom.
            std::multiset<std::pair<int, int>> expected_ends, traced_ends;
            for (int j0 = 0; j0 < N; ++j0)
                for (int dir : {+1, -1}) {
                    if (dir == +1 && j0 == N - 1) continue;
                    if (dir == -1 && j0 == 0) continue;
                    expected_ends.insert({j0, folded_row(N, j0, dir, M + 1)});
                }

            for (const Chain& c : trace.chains) {
                EXPECT_TRUE(c.connects_users);
                EXPECT_EQ(c.sources.size(), static_cast<std::size_t>(M + 1));
                EXPECT_EQ(c.terminals.size(), static_cast<std::size_t>(M));
                EXPECT_EQ(c.photons.size(), static_cast<std::size_t>(2 * (M + 1)));
                const NormalChain n = normalize(net, c);
                traced_ends.insert({n.x_row, n.y_row});

                // Work out the direction from the first step and check every
                // terminal and source against the fold formula.
                const int dir = n.terminals.empty()
                                    ? (n.sources[0].second == n.x_row ? +1 : -1)
                                    : (n.terminals[0].second > n.x_row ? +1 : -1);
                for (int k = 1; k <= M; ++k) {
                    EXPECT_EQ(n.terminals[static_cast<std::size_t>(k - 1)].first, k);
                    EXPECT_EQ(n.terminals[static_cast<std::size_t>(k - 1)].second,
                              folded_row(N, n.x_row, dir, k));
                }
                for (int k = 0; k <= M; ++k) {
                    EXPECT_EQ(n.sources[static_cast<std::size_t>(k)].first, k);
                    const int a = folded_row(N, n.x_row, dir, k);
                    const int b = folded_row(N, n.x_row, dir, k + 1);
                    EXPECT_EQ(n.sources[static_cast<std::size_t>(k)].second, std::min(a, b));
                }
            }
            EXPECT_EQ(traced_ends, expected_ends);
        }
    }
}

TEST(Protocol, FiveByFourReferencePath) {
    BravaisConfig cfg;
    cfg.rows = 5;
    cfg.cols = 4;
    const ProtocolNetwork net = build_network(cfg);
    const TraceResult trace = trace_chains(net);

    // The diagonal chain that starts at the bottom-left user climbs to the
    // top row and bounces once before exiting on row 3.
    bool found = false;
    for (const Chain& c : trace.chains) {
        const NormalChain n = normalize(net, c);
        if (n.x_row != 0) continue;
        found = true;
        EXPECT_EQ(n.y_row, 3);
        const std::vector<std::pair<int, int>> want_terms = {{1, 1}, {2, 2}, {3, 3}, {4, 4}};
        EXPECT_EQ(n.terminals, want_terms);
        const std::vector<std::pair<int, int>> want_srcs = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 3}};
        EXPECT_EQ(n.sources, want_srcs);
    }
    EXPECT_TRUE(found);
}

TEST(Protocol, NoParityPathToOppositeCornerAtFourColumns) {
    // With M = 4 the user columns are 5 steps apart: an odd number of +/-1
    // row moves cannot bridge the even row offset 4, so no default chain
    // links the bottom-left to the top-right user.
    BravaisConfig cfg;
    cfg.rows = 5;
    cfg.cols = 4;
    const ProtocolNetwork net = build_network(cfg);
    for (const Chain& c : trace_chains(net).chains) {
        const NormalChain n = normalize(net, c);
        EXPECT_FALSE(n.x_row == 0 && n.y_row == 4);
    }
}

TEST(Protocol, MenuOverrideReroutesToOppositeCorner) {
    // Default five-column grid sends the bottom-left diagonal to row 2;
    // re-grouping one terminal to TopBottom turns the final descent into a
    // climb and delivers the opposite corner.
    BravaisConfig cfg;
    cfg.rows = 5;
    cfg.cols = 5;
    {
        const ProtocolNetwork net = build_network(cfg);
        bool found = false;
        for (const Chain& c : trace_chains(net).chains) {
            const NormalChain n = normalize(net, c);
            if (n.x_row == 0) {
                EXPECT_EQ(n.y_row, 2);
                found = true;
            }
        }
        EXPECT_TRUE(found);
    }
    cfg.terminal_menus[{5, 3}] = Menu::TopBottom;
    {
        const ProtocolNetwork net = build_network(cfg);
        bool corner = false;
        int user_photons = 0, chain_photons = 0, total_user_chains = 0;
        const TraceResult trace = trace_chains(net);
        for (const Chain& c : trace.chains) {
            const NormalChain n = normalize(net, c);
            chain_photons += static_cast<int>(c.photons.size());
            if (c.connects_users) ++total_user_chains;
            if (n.x_row == 0 && n.y_row == 4) corner = true;
        }
        for (int pid = 0; pid < net.num_photons; ++pid)
            if (net.terminal_partner[static_cast<std::size_t>(pid)] < 0) ++user_photons;
        EXPECT_TRUE(corner);
        EXPECT_EQ(user_photons, 2 * static_cast<int>(trace.chains.size()));
        EXPECT_EQ(chain_photons + trace.cycle_photons, net.num_photons);
        EXPECT_GE(total_user_chains, 1);
    }
}

TEST(Protocol, LeftRightSourceMakesSameSideChain) {
    BravaisConfig cfg;
    cfg.rows = 3;
    cfg.cols = 2;
    cfg.source_menus[{0, 1}] = Menu::LeftRight; // its two left photons pair up
    const ProtocolNetwork net = build_network(cfg);
    bool same_side = false;
    for (const Chain& c : trace_chains(net).chains) {
        if (c.start_col == 0 && c.end_col == 0) {
            same_side = true;
            EXPECT_FALSE(c.connects_users);
            EXPECT_EQ(c.sources.size(), 1u);
            EXPECT_TRUE(c.terminals.empty());
            const std::set<int> rows = {c.start_row, c.end_row};
            EXPECT_EQ(rows, (std::set<int>{1, 2}));
        }
    }
    EXPECT_TRUE(same_side);
}

TEST(Protocol, ClosedLoopIsDetected) {
    // Two LeftRight sources feeding one TopBottom terminal and one edge
    // terminal close a four-photon loop that owns no user end.
    BravaisConfig cfg;
    cfg.rows = 3;
    cfg.cols = 1;
    cfg.source_menus[{0, 0}] = Menu::LeftRight;
    cfg.source_menus[{1, 0}] = Menu::LeftRight;
    cfg.terminal_menus[{1, 1}] = Menu::TopBottom;
    const ProtocolNetwork net = build_network(cfg);
    const TraceResult trace = trace_chains(net);
    EXPECT_GE(trace.num_cycles, 1);
    EXPECT_GE(trace.cycle_photons, 4);
    int chain_photons = 0;
    for (const Chain& c : trace.chains) chain_photons += static_cast<int>(c.photons.size());
    EXPECT_EQ(chain_photons + trace.cycle_photons, net.num_photons);
}

TEST(Protocol, FailureScenariosKillTheRightChains) {
    // Two crossing chains on the 5x4 grid share one terminal; knocking out
    // a private terminal and source of either one must kill exactly it.
    BravaisConfig cfg;
    cfg.rows = 5;
    cfg.cols = 4;
    const ProtocolNetwork net = build_network(cfg);
    const TraceResult trace = trace_chains(net);

    const Chain* up = nullptr;   // X row 1 climbing: ends row 2
    const Chain* down = nullptr; // X row 1 descending: ends row 4
    std::vector<NormalChain> norms;
    for (const Chain& c : trace.chains) norms.push_back(normalize(net, c));
    for (std::size_t i = 0; i < trace.chains.size(); ++i) {
        if (norms[i].x_row != 1) continue;
        if (norms[i].y_row == 2) up = &trace.chains[i];
        if (norms[i].y_row == 4) down = &trace.chains[i];
    }
    ASSERT_NE(up, nullptr);
    ASSERT_NE(down, nullptr);

    // Both pass through terminal (4,3).
    const int shared = net.terminal_id(4, 3);
    EXPECT_NE(std::find(up->terminals.begin(), up->terminals.end(), shared), up->terminals.end());
    EXPECT_NE(std::find(down->terminals.begin(), down->terminals.end(), shared),
              down->terminals.end());

    FailureSet hit_up;
    hit_up.terminals = {{2, 3}};
    hit_up.sources = {{2, 3}};
    EXPECT_FALSE(chain_survives(net, *up, hit_up));
    EXPECT_TRUE(chain_survives(net, *down, hit_up));

    FailureSet hit_down;
    hit_down.terminals = {{2, 1}};
    hit_down.sources = {{2, 1}};
    EXPECT_TRUE(chain_survives(net, *up, hit_down));
    EXPECT_FALSE(chain_survives(net, *down, hit_down));

    // The shared terminal kills both.
    FailureSet hit_shared;
    hit_shared.terminals = {{4, 3}};
    EXPECT_FALSE(chain_survives(net, *up, hit_shared));
    EXPECT_FALSE(chain_survives(net, *down, hit_shared));
}

TEST(Protocol, RoundSimulationIsDeterministicPerSeed) {
    BravaisConfig cfg;
    cfg.rows = 4;
    cfg.cols = 3;
    cfg.gamma = 0.8;
    cfg.alpha = 1.0 / 22.0;
    cfg.leg = 2.0;
    const ProtocolNetwork net = build_network(cfg);
    const TraceResult trace = trace_chains(net);

    const RoundOutcome a = simulate_round(net, trace, 42u, 7u);
    const RoundOutcome b = simulate_round(net, trace, 42u, 7u);
    ASSERT_EQ(a.chains.size(), b.chains.size());
    EXPECT_EQ(a.delivered, b.delivered);
    for (std::size_t i = 0; i < a.chains.size(); ++i) {
        EXPECT_EQ(a.chains[i].success, b.chains[i].success);
        EXPECT_EQ(a.chains[i].label, b.chains[i].label);
        EXPECT_EQ(a.chains[i].photons_lost, b.chains[i].photons_lost);
    }

    // Different rounds must decorrelate (equality of every field over many
    // rounds would be astronomically unlikely).
    int diff = 0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const RoundOutcome x = simulate_round(net, trace, 42u, t);
        const RoundOutcome y = simulate_round(net, trace, 43u, t);
        if (x.delivered != y.delivered) ++diff;
    }
    EXPECT_GT(diff, 0);
}

TEST(Protocol, SuccessfulChainsCarryCancellingCorrections) {
    BravaisConfig cfg;
    cfg.rows = 3;
    cfg.cols = 2;
    cfg.gamma = 0.9;
    const ProtocolNetwork net = build_network(cfg);
    const TraceResult trace = trace_chains(net);
    int successes = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const RoundOutcome out = simulate_round(net, trace, 5u, t);
        for (const ChainOutcome& co : out.chains) {
            if (!co.success) continue;
            ++successes;
            EXPECT_EQ(apply_correction(co.label, co.correction), (BellLabel{0, 0}));
        }
    }
    EXPECT_GT(successes, 0);
}

TEST(Protocol, YieldMatchesClosedFormQuickCheck) {
    BravaisConfig cfg;
    cfg.rows = 2;
    cfg.cols = 1;
    cfg.gamma = 0.7;
    cfg.alpha = 0.05;
    cfg.leg = 1.0;
    const ProtocolNetwork net = build_network(cfg);
    const TraceResult trace = trace_chains(net);
    const std::uint64_t rounds = 20000;
    const YieldEstimate est = estimate_yield(net, trace, rounds, 99u);
    const double expected = analytic_yield(cfg);
    EXPECT_NEAR(est.mean, expected, 4 * est.stderr_mean + 1e-9);
    EXPECT_GT(est.stderr_mean, 0.0);
    EXPECT_NEAR(analytic_yield_by_span(user_span(cfg), cfg.rows, cfg.cols, cfg.gamma, cfg.alpha,
                                       cfg.theta),
                expected, 1e-12);
}

TEST(Protocol, AnalyticYieldKnownValues) {
    BravaisConfig cfg;
    cfg.rows = 5;
    cfg.cols = 4;
    cfg.gamma = 1.0;
    cfg.alpha = 0.0;
    EXPECT_NEAR(analytic_yield(cfg), 8.0, 1e-12); // lossless ceiling 2(N-1)
    cfg.gamma = 0.5;
    EXPECT_NEAR(analytic_yield(cfg), 8.0 * 0.0625, 1e-12);
    cfg.alpha = 0.1;
    cfg.leg = 1.0;
    EXPECT_NEAR(analytic_yield(cfg), 8.0 * 0.0625 * std::exp(-1.0), 1e-12);
}

TEST(Protocol, ExportedGraphShape) {
    BravaisConfig cfg;
    cfg.rows = 3;
    cfg.cols = 2;
    const ProtocolNetwork net = build_network(cfg);
    const NetworkGraph g = export_network(net);
    // 3 rows x 4 terminal columns + 3 source columns x 2 source rows.
    EXPECT_EQ(g.nodes.size(), static_cast<std::size_t>(3 * 4 + 3 * 2));
    EXPECT_EQ(g.edges.size(), static_cast<std::size_t>(net.num_photons));
    int users = 0, terms = 0, sources = 0;
    for (const GraphNode& n : g.nodes) {
        if (n.role == NodeRole::UserLeft || n.role == NodeRole::UserRight) ++users;
        if (n.role == NodeRole::Terminal) ++terms;
        if (n.role == NodeRole::Source) ++sources;
    }
    EXPECT_EQ(users, 6);
    EXPECT_EQ(terms, 6);
    EXPECT_EQ(sources, 6);
    const std::string text = serialize_graph(g);
    EXPECT_EQ(serialize_graph(parse_graph(text)), text);
}

TEST(Protocol, ConfigValidation) {
    BravaisConfig cfg;
    cfg.rows = 1;
    EXPECT_THROW(build_network(cfg), std::invalid_argument);
    cfg.rows = 2;
    cfg.cols = 0;
    EXPECT_THROW(build_network(cfg), std::invalid_argument);
    cfg.cols = 1;
    cfg.gamma = 1.5;
    EXPECT_THROW(build_network(cfg), std::invalid_argument);
    cfg.gamma = 1.0;
    cfg.leg = -1;
    EXPECT_THROW(build_network(cfg), std::invalid_argument);
    EXPECT_THROW(menu_from_char('z'), std::invalid_argument);
    EXPECT_EQ(menu_from_char('a'), Menu::Opposite);
}

TEST(Protocol, ScenarioTextRoundTrips) {
    Scenario sc;
    sc.source_menus[{1, 0}] = Menu::TopBottom;
    sc.source_menus[{0, 2}] = Menu::LeftRight;
    sc.terminal_menus[{3, 1}] = Menu::Opposite;
    sc.failures.sources = {{2, 3}};
    sc.failures.terminals = {{0, 0}, {4, 1}};

    const std::string text = serialize_scenario(sc);
    const Scenario back = parse_scenario(text);
    EXPECT_EQ(back.source_menus, sc.source_menus);
    EXPECT_EQ(back.terminal_menus, sc.terminal_menus);
    EXPECT_EQ(back.failures.sources, sc.failures.sources);
    EXPECT_EQ(back.failures.terminals, sc.failures.terminals);
    EXPECT_EQ(serialize_scenario(back), text);
}

TEST(Protocol, ScenarioParserRejectsMalformedText) {
    EXPECT_THROW(parse_scenario("not-a-scenario\nend\n"), std::runtime_error);
    EXPECT_THROW(parse_scenario("entnet-scenario 1\n"), std::runtime_error);
    EXPECT_THROW(parse_scenario("entnet-scenario 1\nsource-menu 0 0 z\nend\n"),
                 std::runtime_error);
    EXPECT_THROW(parse_scenario("entnet-scenario 1\nfrobnicate 1 2\nend\n"),
                 std::runtime_error);
    EXPECT_THROW(parse_scenario("entnet-scenario 1\nfail-source 1\nend\n"),
                 std::runtime_error);
}

TEST(Protocol, ScenarioOverlayYieldsToExistingEntries) {
    Scenario sc;
    sc.source_menus[{1, 0}] = Menu::TopBottom;
    sc.source_menus[{1, 2}] = Menu::LeftRight;
    sc.failures.terminals = {{0, 0}};

    BravaisConfig cfg;
    cfg.rows = 4;
    cfg.cols = 2;
    cfg.source_menus[{1, 0}] = Menu::Opposite; // direct setting outranks the file
    FailureSet fail;
    fail.sources = {{0, 1}};
    apply_scenario(sc, cfg, fail);

    EXPECT_EQ(cfg.source_menus.at({1, 0}), Menu::Opposite);
    EXPECT_EQ(cfg.source_menus.at({1, 2}), Menu::LeftRight);
    ASSERT_EQ(fail.sources.size(), 1u);
    ASSERT_EQ(fail.terminals.size(), 1u);
    EXPECT_EQ(fail.terminals[0], (std::pair<int, int>{0, 0}));
}

TEST(Protocol, YieldSurfaceTableMatchesTheClosedForm) {
    const std::vector<double> spans = {0.0, 50.0, 150.0};
    const std::vector<int> rows_list = {2, 10};
    const double gamma = 0.9, alpha = 1.0 / 22.0, theta = std::numbers::pi / 4;
    const std::vector<YieldSurfaceRow> table =
        yield_surface(spans, rows_list, 2, gamma, alpha, theta);
    ASSERT_EQ(table.size(), 6u);
    for (const YieldSurfaceRow& row : table) {
        EXPECT_DOUBLE_EQ(row.yield, analytic_yield_by_span(row.span, row.rows, 2, gamma,
                                                           alpha, theta));
        if (row.span == 0.0) // lossless point: 2 (N-1) gamma^M survives
            EXPECT_DOUBLE_EQ(row.yield, 2.0 * (row.rows - 1) * gamma * gamma);
    }
    // More rows deliver proportionally more pairs at every distance.
    EXPECT_GT(table[3].yield, table[0].yield);
}
