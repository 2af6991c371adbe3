#pragma once

// Memory-free entanglement-distribution protocol on a rhombic grid of pair
// sources and measurement terminals.
//
// Layout (0-based indices everywhere):
//  * Terminal grid: columns 0..M+1 and rows 0..N-1.  Column 0 is the left
//    user (X), column M+1 the right user (Y); columns 1..M are measurement
//    terminals.  Terminal (tc, tr) sits at (2 l cos(theta) tc,
//    2 l sin(theta) tr).
//  * Sources: columns 0..M, rows 0..N-2; source (c, r) sits at
//    ((2c+1) l cos(theta), (2r+1) l sin(theta)) and fires one photon along
//    each diagonal leg of length l toward terminals (c, r), (c, r+1),
//    (c+1, r), (c+1, r+1).
//  * Every source groups its four photons into two entangled pairs and every
//    interior terminal groups its four arriving photons into two joint
//    measurements; the grouping menu is the same in both cases:
//      Opposite:  (lower-left, upper-right) + (upper-left, lower-right)
//      TopBottom: (upper-left, upper-right) + (lower-left, lower-right)
//      LeftRight: (upper-left, lower-left) + (upper-right, lower-right)
//    Terminals in the first and last rows only receive two photons and
//    always measure that pair.  With every node on Opposite the chains are
//    billiard diagonals that bounce off the top and bottom rows; menu
//    overrides on individual nodes reroute them.
//
// A chain that connects the users carries one Bell pair per round with
// probability gamma^(#measurements) * eta^(#photons), eta = exp(-alpha l);
// the accumulated Pauli frame is the XOR of all measurement outcomes.

#include "entnet/bell.hpp"
#include "entnet/channel.hpp"
#include "entnet/graph.hpp"
#include "entnet/rng.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace entnet {

enum class Menu : char { Opposite = 'a', TopBottom = 'b', LeftRight = 'c' };

inline Menu menu_from_char(char c) {
    switch (c) {
        case 'a': return Menu::Opposite;
        case 'b': return Menu::TopBottom;
        case 'c': return Menu::LeftRight;
    }
    throw std::invalid_argument(std::string("unknown grouping menu '") + c + "'");
}

inline char menu_char(Menu m) { return static_cast<char>(m); }

struct BravaisConfig {
    int rows = 2; // N: terminal rows, >= 2
    int cols = 1; // M: terminal columns between the users, >= 1
    double leg = 1.0;
    double theta = std::numbers::pi / 4;
    double alpha = 1.0 / 22.0;
    double gamma = 1.0;
    // Overrides keyed by (col, row); defaults are Menu::Opposite.
    std::map<std::pair<int, int>, Menu> source_menus;
    std::map<std::pair<int, int>, Menu> terminal_menus;
};

// Corner / port directions.  For a photon leaving a source toward corner d,
// the receiving terminal sees it arrive on the mirrored port.
enum Dir : int { LL = 0, UL = 1, LR = 2, UR = 3 };

inline int mirror_dir(int d) {
    switch (d) {
        case LL: return UR;
        case UL: return LR;
        case LR: return UL;
        case UR: return LL;
    }
    return -1;
}

inline int menu_partner(Menu m, int d) {
    switch (m) {
        case Menu::Opposite:
            return d == LL ? UR : d == UR ? LL : d == UL ? LR : UL;
        case Menu::TopBottom:
            return d == UL ? UR : d == UR ? UL : d == LL ? LR : LL;
        case Menu::LeftRight:
            return d == UL ? LL : d == LL ? UL : d == UR ? LR : UR;
    }
    return -1;
}

struct ProtocolNetwork {
    BravaisConfig cfg;
    int num_sources = 0;    // (M+1) * (N-1)
    int num_photons = 0;    // 4 per source
    double eta = 1;         // per-photon leg survival

    // Per photon: its source, the terminal-grid cell it lands on, the port
    // it arrives at, and the partner photon at its source.
    std::vector<int> photon_source;
    std::vector<int> photon_tcol, photon_trow, photon_port;
    std::vector<int> source_partner;
    // Partner photon at the receiving terminal; -1 for photons held by a
    // user (chain endpoints).
    std::vector<int> terminal_partner;

    int source_id(int c, int r) const { return r * (cfg.cols + 1) + c; }
    int source_col(int s) const { return s % (cfg.cols + 1); }
    int source_row(int s) const { return s / (cfg.cols + 1); }
    int terminal_id(int tc, int tr) const { return tr * (cfg.cols + 2) + tc; }
    bool is_user_col(int tc) const { return tc == 0 || tc == cfg.cols + 1; }
};

inline ProtocolNetwork build_network(const BravaisConfig& cfg) {
    if (cfg.rows < 2) throw std::invalid_argument("need at least two terminal rows");
    if (cfg.cols < 1) throw std::invalid_argument("need at least one terminal column");
    if (cfg.gamma < 0 || cfg.gamma > 1) throw std::invalid_argument("gamma must be in [0,1]");
    if (cfg.leg < 0 || cfg.alpha < 0) throw std::invalid_argument("negative length or loss rate");

    ProtocolNetwork net;
    net.cfg = cfg;
    const int M = cfg.cols, N = cfg.rows;
    net.num_sources = (M + 1) * (N - 1);
    net.num_photons = 4 * net.num_sources;
    net.eta = transmissivity(cfg.alpha, cfg.leg);

    net.photon_source.resize(static_cast<std::size_t>(net.num_photons));
    net.photon_tcol.resize(static_cast<std::size_t>(net.num_photons));
    net.photon_trow.resize(static_cast<std::size_t>(net.num_photons));
    net.photon_port.resize(static_cast<std::size_t>(net.num_photons));
    net.source_partner.resize(static_cast<std::size_t>(net.num_photons));
    net.terminal_partner.assign(static_cast<std::size_t>(net.num_photons), -1);

    auto menu_of = [](const std::map<std::pair<int, int>, Menu>& m, int c, int r) {
        const auto it = m.find({c, r});
        return it == m.end() ? Menu::Opposite : it->second;
    };

    for (int r = 0; r <= N - 2; ++r)
        for (int c = 0; c <= M; ++c) {
            const int s = net.source_id(c, r);
            const Menu m = menu_of(cfg.source_menus, c, r);
            for (int d = 0; d < 4; ++d) {
                const int pid = 4 * s + d;
                net.photon_source[static_cast<std::size_t>(pid)] = s;
                const int tc = (d == LR || d == UR) ? c + 1 : c;
                const int tr = (d == UL || d == UR) ? r + 1 : r;
                net.photon_tcol[static_cast<std::size_t>(pid)] = tc;
                net.photon_trow[static_cast<std::size_t>(pid)] = tr;
                net.photon_port[static_cast<std::size_t>(pid)] = mirror_dir(d);
                net.source_partner[static_cast<std::size_t>(pid)] = 4 * s + menu_partner(m, d);
            }
        }

    // Group photons per terminal and wire the measurement partners.
    for (int tr = 0; tr < N; ++tr)
        for (int tc = 1; tc <= M; ++tc) {
            int port_to_pid[4] = {-1, -1, -1, -1};
            // Which sources feed this terminal:
            //   UL <- (tc-1, tr) LR,  UR <- (tc, tr) LL,
            //   LL <- (tc-1, tr-1) UR, LR <- (tc, tr-1) UL.
            if (tr <= N - 2) {
                port_to_pid[UL] = 4 * net.source_id(tc - 1, tr) + LR;
                port_to_pid[UR] = 4 * net.source_id(tc, tr) + LL;
            }
            if (tr >= 1) {
                port_to_pid[LL] = 4 * net.source_id(tc - 1, tr - 1) + UR;
                port_to_pid[LR] = 4 * net.source_id(tc, tr - 1) + UL;
            }
            const bool interior = tr >= 1 && tr <= N - 2;
            const Menu m = interior ? menu_of(cfg.terminal_menus, tc, tr) : Menu::TopBottom;
            for (int d = 0; d < 4; ++d) {
                const int pid = port_to_pid[d];
                if (pid < 0) continue;
                int pd = menu_partner(m, d);
                if (port_to_pid[pd] < 0) {
                    // Edge rows hold only one pair: partner the other photon.
                    pd = d == UL ? UR : d == UR ? UL : d == LL ? LR : LL;
                }
                net.terminal_partner[static_cast<std::size_t>(pid)] = port_to_pid[pd];
            }
        }
    return net;
}

// ---------------------------------------------------------------------------
// Chain tracing.

struct Chain {
    int start_col = 0, start_row = 0; // terminal-grid coordinates of one end
    int end_col = 0, end_row = 0;
    std::vector<int> sources;   // path order
    std::vector<int> terminals; // measuring terminals (terminal_id), path order
    std::vector<int> photons;   // all member photons
    bool connects_users = false;   // X on one end, Y on the other
};

struct TraceResult {
    std::vector<Chain> chains;
    int num_cycles = 0;
    int cycle_photons = 0;
};

inline TraceResult trace_chains(const ProtocolNetwork& net) {
    TraceResult result;
    std::vector<char> visited(static_cast<std::size_t>(net.num_photons), 0);

    auto walk = [&](int start_pid) {
        Chain chain;
        chain.start_col = net.photon_tcol[static_cast<std::size_t>(start_pid)];
        chain.start_row = net.photon_trow[static_cast<std::size_t>(start_pid)];
        int p = start_pid;
        while (true) {
            visited[static_cast<std::size_t>(p)] = 1;
            chain.photons.push_back(p);
            chain.sources.push_back(net.photon_source[static_cast<std::size_t>(p)]);
            const int q = net.source_partner[static_cast<std::size_t>(p)];
            visited[static_cast<std::size_t>(q)] = 1;
            chain.photons.push_back(q);
            const int tp = net.terminal_partner[static_cast<std::size_t>(q)];
            if (tp < 0) {
                chain.end_col = net.photon_tcol[static_cast<std::size_t>(q)];
                chain.end_row = net.photon_trow[static_cast<std::size_t>(q)];
                break;
            }
            chain.terminals.push_back(net.terminal_id(net.photon_tcol[static_cast<std::size_t>(q)],
                                                      net.photon_trow[static_cast<std::size_t>(q)]));
            p = tp;
        }
        const int M = net.cfg.cols;
        const bool x_end = chain.start_col == 0 || chain.end_col == 0;
        const bool y_end = chain.start_col == M + 1 || chain.end_col == M + 1;
        chain.connects_users = x_end && y_end;
        return chain;
    };

    for (int pid = 0; pid < net.num_photons; ++pid) {
        if (visited[static_cast<std::size_t>(pid)]) continue;
        if (net.terminal_partner[static_cast<std::size_t>(pid)] >= 0) continue; // not a user-held photon
        result.chains.push_back(walk(pid));
    }
    // Anything left unvisited sits on a closed loop of swaps.
    for (int pid = 0; pid < net.num_photons; ++pid) {
        if (visited[static_cast<std::size_t>(pid)]) continue;
        ++result.num_cycles;
        int p = pid;
        while (!visited[static_cast<std::size_t>(p)]) {
            visited[static_cast<std::size_t>(p)] = 1;
            ++result.cycle_photons;
            const int q = net.source_partner[static_cast<std::size_t>(p)];
            if (!visited[static_cast<std::size_t>(q)]) {
                visited[static_cast<std::size_t>(q)] = 1;
                ++result.cycle_photons;
            }
            p = net.terminal_partner[static_cast<std::size_t>(q)];
        }
    }
    return result;
}

// Predicted billiard trajectory for the all-Opposite tiling: starting at X
// row j0 with initial vertical direction dir (+1 up, -1 down), the terminal
// row after k column steps is the triangle-wave fold of j0 + dir*k into
// [0, N-1].
inline int folded_row(int rows, int j0, int dir, int k) {
    const int period = 2 * (rows - 1);
    long long u = j0 + static_cast<long long>(dir) * k;
    long long m = ((u % period) + period) % period;
    return static_cast<int>(m <= rows - 1 ? m : period - m);
}

// ---------------------------------------------------------------------------
// Deterministic failure analysis: a chain dies when any of its sources or
// measuring terminals is removed.

struct FailureSet {
    std::vector<std::pair<int, int>> sources;   // (col, row)
    std::vector<std::pair<int, int>> terminals; // (col, row)
};

inline bool chain_survives(const ProtocolNetwork& net, const Chain& chain, const FailureSet& fail) {
    for (const auto& [c, r] : fail.sources) {
        const int sid = net.source_id(c, r);
        for (int s : chain.sources)
            if (s == sid) return false;
    }
    for (const auto& [c, r] : fail.terminals) {
        const int tid = net.terminal_id(c, r);
        for (int t : chain.terminals)
            if (t == tid) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Scenario files: menu overrides and node failures as a line-oriented text
// block in the same style as the graph format.  Round-trips exactly:
//
//   entnet-scenario 1
//   source-menu <col> <row> <a|b|c>
//   terminal-menu <col> <row> <a|b|c>
//   fail-source <col> <row>
//   fail-terminal <col> <row>
//   end
//
// Each directive line may repeat; order within a kind is preserved for the
// failure lists and canonical (sorted by coordinate) for the menu maps.

struct Scenario {
    std::map<std::pair<int, int>, Menu> source_menus;
    std::map<std::pair<int, int>, Menu> terminal_menus;
    FailureSet failures;
};

inline std::string serialize_scenario(const Scenario& sc) {
    std::string out = "entnet-scenario 1\n";
    for (const auto& [key, menu] : sc.source_menus)
        out += "source-menu " + std::to_string(key.first) + ' ' + std::to_string(key.second) +
               ' ' + menu_char(menu) + '\n';
    for (const auto& [key, menu] : sc.terminal_menus)
        out += "terminal-menu " + std::to_string(key.first) + ' ' + std::to_string(key.second) +
               ' ' + menu_char(menu) + '\n';
    for (const auto& [c, r] : sc.failures.sources)
        out += "fail-source " + std::to_string(c) + ' ' + std::to_string(r) + '\n';
    for (const auto& [c, r] : sc.failures.terminals)
        out += "fail-terminal " + std::to_string(c) + ' ' + std::to_string(r) + '\n';
    out += "end\n";
    return out;
}

inline Scenario parse_scenario(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) throw std::runtime_error("scenario text truncated");
        return line;
    };
    if (next_line() != "entnet-scenario 1") throw std::runtime_error("bad scenario header");

    Scenario sc;
    for (;;) {
        const std::string raw = next_line();
        if (raw == "end") break;
        const std::vector<std::string> f = split_fields(raw);
        if (f.empty()) continue;
        if (f[0] == "source-menu" || f[0] == "terminal-menu") {
            if (f.size() != 4 || f[3].size() != 1)
                throw std::runtime_error("bad menu line: '" + raw + "'");
            const std::pair<int, int> key{static_cast<int>(parse_int(f[1])),
                                          static_cast<int>(parse_int(f[2]))};
            auto& menus = f[0][0] == 's' ? sc.source_menus : sc.terminal_menus;
            try {
                menus[key] = menu_from_char(f[3][0]);
            } catch (const std::invalid_argument& e) {
                throw std::runtime_error(e.what());
            }
        } else if (f[0] == "fail-source" || f[0] == "fail-terminal") {
            if (f.size() != 3) throw std::runtime_error("bad failure line: '" + raw + "'");
            const std::pair<int, int> key{static_cast<int>(parse_int(f[1])),
                                          static_cast<int>(parse_int(f[2]))};
            auto& list = f[0][5] == 's' ? sc.failures.sources : sc.failures.terminals;
            list.push_back(key);
        } else {
            throw std::runtime_error("unknown scenario directive: '" + f[0] + "'");
        }
    }
    return sc;
}

// Overlay the scenario's menus onto a grid configuration and collect its
// failures; entries already present in cfg win, so flag-level overrides
// should be applied after this call (or simply assigned on top).
inline void apply_scenario(const Scenario& sc, BravaisConfig& cfg, FailureSet& fail) {
    for (const auto& [key, menu] : sc.source_menus) cfg.source_menus.emplace(key, menu);
    for (const auto& [key, menu] : sc.terminal_menus) cfg.terminal_menus.emplace(key, menu);
    fail.sources.insert(fail.sources.end(), sc.failures.sources.begin(),
                        sc.failures.sources.end());
    fail.terminals.insert(fail.terminals.end(), sc.failures.terminals.begin(),
                          sc.failures.terminals.end());
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
    atomic_write_text(path, serialize_scenario(sc));
}

inline Scenario load_scenario(const std::string& path) {
    return parse_scenario(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Round simulation.

struct ChainOutcome {
    bool success = false;
    BellLabel label;             // accumulated frame before correction
    PauliCorrection correction;  // XOR of all measurement outcomes
    int photons_lost = 0;
    int pairs_one_lost = 0;
    int pairs_both_lost = 0;
    int measurements_failed = 0; // measurements that had both photons but failed
};

struct RoundOutcome {
    std::vector<ChainOutcome> chains; // parallel to TraceResult::chains
    int delivered = 0;                // successful user-to-user chains
};

namespace detail {
constexpr std::uint64_t kPhotonStream = 0x70686f746f6e7331ull;
constexpr std::uint64_t kMeasureStream = 0x6d65617375726531ull;
constexpr std::uint64_t kOutcomeStream = 0x6f7574636f6d6531ull;
} // namespace detail

inline RoundOutcome simulate_round(const ProtocolNetwork& net, const TraceResult& trace,
                                   std::uint64_t seed, std::uint64_t round) {
    const std::uint64_t photon_key = derive_key(seed ^ detail::kPhotonStream, round);
    const std::uint64_t measure_key = derive_key(seed ^ detail::kMeasureStream, round);
    const std::uint64_t outcome_key = derive_key(seed ^ detail::kOutcomeStream, round);

    RoundOutcome out;
    out.chains.resize(trace.chains.size());
    for (std::size_t ci = 0; ci < trace.chains.size(); ++ci) {
        const Chain& chain = trace.chains[ci];
        ChainOutcome& co = out.chains[ci];

        bool all_photons = true;
        for (std::size_t k = 0; k + 1 < chain.photons.size(); k += 2) {
            const bool a1 = counter_uniform(photon_key, static_cast<std::uint64_t>(chain.photons[k])) < net.eta;
            const bool a2 = counter_uniform(photon_key, static_cast<std::uint64_t>(chain.photons[k + 1])) < net.eta;
            const int lost = (a1 ? 0 : 1) + (a2 ? 0 : 1);
            co.photons_lost += lost;
            if (lost == 1) ++co.pairs_one_lost;
            if (lost == 2) ++co.pairs_both_lost;
            if (lost) all_photons = false;
        }

        bool all_measured = true;
        std::vector<BellLabel> outcomes;
        outcomes.reserve(chain.terminals.size());
        for (std::size_t k = 0; k < chain.terminals.size(); ++k) {
            // One joint measurement per visited terminal; key it by the
            // photon entering that measurement so ids are stable.
            const std::uint64_t mid = static_cast<std::uint64_t>(chain.photons[2 * k + 1]);
            const bool ok = counter_uniform(measure_key, mid) < net.cfg.gamma;
            if (!ok) {
                all_measured = false;
                if (all_photons) ++co.measurements_failed;
            }
            const std::uint64_t bits = mix64(outcome_key + mid * kGolden);
            outcomes.push_back(BellLabel{static_cast<std::uint8_t>(bits & 1),
                                         static_cast<std::uint8_t>((bits >> 1) & 1)});
        }

        co.success = all_photons && all_measured;
        if (co.success) {
            BellLabel label{0, 0};
            for (const BellLabel& o : outcomes) label = swap_update(label, BellLabel{0, 0}, o);
            co.label = label;
            co.correction = chain_correction(outcomes);
            if (chain.connects_users) ++out.delivered;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Yield: expected user-to-user Bell pairs per round.

inline double analytic_yield(const BravaisConfig& cfg) {
    const int M = cfg.cols, N = cfg.rows;
    const double eta = transmissivity(cfg.alpha, cfg.leg);
    return 2.0 * (N - 1) * std::pow(cfg.gamma, M) * std::pow(eta, 2 * (M + 1));
}

// Same quantity parameterized by the user-to-user distance
// L = 2 l (M+1) cos(theta): the loss factor becomes exp(-alpha L / cos(theta)).
inline double analytic_yield_by_span(double span, int rows, int cols, double gamma,
                                     double alpha, double theta) {
    const double N = rows, M = cols;
    return 2.0 * (N - 1) * std::pow(gamma, M) *
           std::exp(-alpha * span / std::cos(theta));
}

inline double user_span(const BravaisConfig& cfg) {
    return 2.0 * cfg.leg * (cfg.cols + 1) * std::cos(cfg.theta);
}

// Plot-ready yield-versus-distance table: closed-form yield for every
// (span, rows) combination at fixed (cols, gamma, theta, alpha).
struct YieldSurfaceRow {
    double span = 0; // user-to-user distance in km
    int rows = 2;
    double yield = 0;
};

inline std::vector<YieldSurfaceRow> yield_surface(const std::vector<double>& spans,
                                                  const std::vector<int>& rows_list, int cols,
                                                  double gamma, double alpha, double theta) {
    std::vector<YieldSurfaceRow> out;
    out.reserve(spans.size() * rows_list.size());
    for (int rows : rows_list)
        for (double span : spans)
            out.push_back(
                YieldSurfaceRow{span, rows,
                                analytic_yield_by_span(span, rows, cols, gamma, alpha, theta)});
    return out;
}

struct YieldEstimate {
    double mean = 0;   // delivered pairs per round
    double stderr_mean = 0;
    std::uint64_t rounds = 0;
};

inline YieldEstimate estimate_yield(const ProtocolNetwork& net, const TraceResult& trace,
                                    std::uint64_t rounds, std::uint64_t seed) {
    double sum = 0, sum2 = 0;
    for (std::uint64_t t = 0; t < rounds; ++t) {
        const RoundOutcome out = simulate_round(net, trace, seed, t);
        sum += out.delivered;
        sum2 += static_cast<double>(out.delivered) * out.delivered;
    }
    YieldEstimate est;
    est.rounds = rounds;
    if (rounds > 0) {
        est.mean = sum / static_cast<double>(rounds);
        const double var = sum2 / static_cast<double>(rounds) - est.mean * est.mean;
        est.stderr_mean = std::sqrt(std::max(0.0, var) / static_cast<double>(rounds));
    }
    return est;
}

// Export the network for plotting / the graph text format.
inline NetworkGraph export_network(const ProtocolNetwork& net) {
    const BravaisConfig& cfg = net.cfg;
    const int M = cfg.cols, N = cfg.rows;
    const double cx = 2.0 * cfg.leg * std::cos(cfg.theta);
    const double cy = 2.0 * cfg.leg * std::sin(cfg.theta);

    NetworkGraph g;
    g.name = "protocol-grid";
    g.boundary = Boundary::Open;
    // Terminal grid nodes first (row-major, cols 0..M+1), then sources.
    for (int tr = 0; tr < N; ++tr)
        for (int tc = 0; tc <= M + 1; ++tc) {
            NodeRole role = NodeRole::Terminal;
            if (tc == 0) role = NodeRole::UserLeft;
            else if (tc == M + 1) role = NodeRole::UserRight;
            g.add_node(role, tr, tc, 0, cx * tc, cy * tr);
        }
    const int base = N * (M + 2);
    for (int r = 0; r <= N - 2; ++r)
        for (int c = 0; c <= M; ++c)
            g.add_node(NodeRole::Source, r, c, 1, cx * c + cx / 2, cy * r + cy / 2);

    for (int pid = 0; pid < net.num_photons; ++pid) {
        const int s = net.photon_source[static_cast<std::size_t>(pid)];
        const int term = net.photon_trow[static_cast<std::size_t>(pid)] * (M + 2) +
                         net.photon_tcol[static_cast<std::size_t>(pid)];
        g.add_edge(base + s, term, 0, cfg.leg);
    }
    return g;
}

} // namespace entnet
