// Command-line front end for the entanglement-network toolkit.
//
// Subcommands:
//   yield           closed-form (and optionally sampled) pair yield of the
//                   source-grid protocol
//   protocol        trace the chains of a configured grid and sample rounds
//   percolate       spanning-probability curve of a lattice patch
//   threshold       percolation threshold of a lattice (bond or site)
//   surface         critical-surface solvers for the exactly known lattices
//   robustness      loss/failure margins against the percolation thresholds
//   export-lattice  write a lattice patch or protocol grid as a graph file
//
// Results are tables rendered as CSV (default) or JSON (--format json),
// written to stdout or --output; every --output also gets a JSON run
// manifest written next to it.  Each artifact embeds the hash of the
// reproducible manifest core (tool, version, subcommand, seed, config) as a
// leading "# manifest ..." comment in CSV or a "manifest_hash" field in
// JSON; volatile fields (threads, wall time, output path) stay out of the
// hash so identical config + seed gives byte-identical artifacts at any
// pool size.  Numeric cells carry 17 significant digits, and trials are
// indexed by a counter-based generator, so numbers do not depend on
// --threads.
//
// Every subcommand also reads a flat key=value file via --config; flags on
// the command line override file values, and unknown keys are rejected.
// The ENTNET_OUTPUT_DIR environment variable redirects relative --output
// paths into a chosen directory.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure (I/O or
// numerics).

#include "entnet/channel.hpp"
#include "entnet/io.hpp"
#include "entnet/percolation.hpp"
#include "entnet/protocol.hpp"
#include "entnet/surface.hpp"
#include "entnet/tilings.hpp"
#include "entnet/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

using nlohmann::json;
using namespace entnet;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(std::min(hc, 256u));
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_tag(const std::string& bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

// Result rows kept structured so the same table renders as CSV or JSON.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}
    void row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

std::string table_csv(const Table& t) {
    CsvBuilder csv(t.columns);
    for (const auto& r : t.rows) csv.row(r);
    return csv.text();
}

// Cells that read back fully as numbers become JSON numbers (NaN and
// infinities render as null per JSON); everything else stays a string.
json typed_cell(const std::string& cell) {
    try {
        return json(parse_int(cell));
    } catch (const std::exception&) {
    }
    try {
        return json(parse_double(cell));
    } catch (const std::exception&) {
    }
    return json(cell);
}

json table_rows_json(const Table& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json obj;
        for (std::size_t i = 0; i < t.columns.size() && i < r.size(); ++i)
            obj[t.columns[i]] = typed_cell(r[i]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

// User-supplied values that fail to parse are configuration errors, not I/O
// errors, so rethrow accordingly.
template <typename Fn>
auto from_flag(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<double> double_list(const std::string& s) {
    return from_flag([&] {
        std::vector<double> out;
        for (const std::string& tok : split_on(s, ','))
            if (!tok.empty()) out.push_back(parse_double(tok));
        if (out.empty()) throw std::invalid_argument("empty list: '" + s + "'");
        return out;
    });
}

std::vector<int> int_list(const std::string& s) {
    return from_flag([&] {
        std::vector<int> out;
        for (const std::string& tok : split_on(s, ','))
            if (!tok.empty()) out.push_back(static_cast<int>(parse_int(tok)));
        if (out.empty()) throw std::invalid_argument("empty list: '" + s + "'");
        return out;
    });
}

std::string join_doubles(const std::vector<double>& v, char sep = ';') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += format_double(v[i]);
    }
    return out;
}

// "col,row" -> pair
std::pair<int, int> coord_flag(const std::string& s) {
    return from_flag([&]() -> std::pair<int, int> {
        const auto parts = split_on(s, ',');
        if (parts.size() != 2)
            throw std::invalid_argument("coordinate must look like col,row: '" + s + "'");
        return {static_cast<int>(parse_int(parts[0])), static_cast<int>(parse_int(parts[1]))};
    });
}

// "col,row=a|b|c" -> ((col,row), menu)
std::pair<std::pair<int, int>, Menu> menu_flag(const std::string& s) {
    return from_flag([&]() -> std::pair<std::pair<int, int>, Menu> {
        const auto parts = split_on(s, '=');
        if (parts.size() != 2 || parts[1].size() != 1)
            throw std::invalid_argument("menu override must look like col,row=a|b|c: '" + s + "'");
        return {coord_flag(parts[0]), menu_from_char(parts[1][0])};
    });
}

Boundary boundary_flag(const std::string& s) {
    return from_flag([&] { return boundary_from_name(s); });
}

PercolationKind kind_flag(const std::string& s) {
    if (s == "bond") return PercolationKind::Bond;
    if (s == "site") return PercolationKind::Site;
    throw std::invalid_argument("kind must be bond or site, got '" + s + "'");
}

const char* kind_name(PercolationKind k) {
    return k == PercolationKind::Bond ? "bond" : "site";
}

// ---------------------------------------------------------------------------
// Shared option blocks.

struct CommonOpts {
    std::string output;
    std::string format = "csv";
    std::uint64_t seed = 1;
    int threads = default_threads();
    std::string config_file;
};

void add_common(CLI::App* cmd, CommonOpts& c, bool with_format = true) {
    cmd->add_option("-o,--output", c.output, "write the result here (default: stdout)");
    if (with_format)
        cmd->add_option("--format", c.format, "result encoding")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    cmd->add_option("--seed", c.seed, "master seed for all sampling")
        ->capture_default_str();
    cmd->add_option("--threads", c.threads, "worker threads (never changes the numbers)")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    cmd->add_option("--config", c.config_file,
                    "flat key=value file with one experiment; command-line flags override "
                    "file keys");
}

// Applies a flat key=value config file to every option of `cmd` that was not
// given on the command line, so explicit flags always win.  Keys are option
// names without the leading dashes; blank lines and lines starting with '#'
// or ';' are skipped.  Unknown keys and unreadable values are reported with
// their line number.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");

    const auto fail = [&](int line, const std::string& what) {
        throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + what);
    };
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };

    std::set<CLI::Option*> from_file;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key=value, got '" + text + "'");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        if (key.empty()) fail(lineno, "empty key");
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front())
            value = value.substr(1, value.size() - 2);

        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt && key.size() == 1) opt = cmd->get_option_no_throw("-" + key);
        if (!opt) fail(lineno, "unknown key '" + key + "'");
        if (opt->count() > 0 && !from_file.count(opt)) continue; // flag overrides the file
        // Within the file a repeated scalar key means "last one wins"; options
        // that accept many values accumulate instead.
        if (from_file.count(opt) && opt->get_expected_max() == 1) opt->clear();
        from_file.insert(opt);
        opt->add_result(value);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            fail(lineno, "key '" + key + "': " + e.what());
        }
    }
}

// Relative output paths can be redirected wholesale via ENTNET_OUTPUT_DIR.
std::string resolve_output(const std::string& path) {
    if (path.empty()) return path;
    const char* dir = std::getenv("ENTNET_OUTPUT_DIR");
    if (!dir || !*dir || std::filesystem::path(path).is_absolute()) return path;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec); // write errors surface below
    return (std::filesystem::path(dir) / path).string();
}

// Hash of the reproducible part of the run description.  Worker count, wall
// time, and the output location are deliberately excluded: the same
// experiment must produce the same artifact bytes no matter where it is
// written or how many threads compute it.
std::string manifest_hash(const CommonOpts& c, const std::string& subcommand,
                          const json& config) {
    json core;
    core["tool"] = "entnet";
    core["version"] = kVersion;
    core["subcommand"] = subcommand;
    core["seed"] = c.seed;
    core["format"] = c.format;
    core["config"] = config;
    return hash_tag(core.dump());
}

// Write the payload (and a manifest when a path was given) or print it.
void deliver(const CommonOpts& c, const std::string& subcommand, const json& config,
             const json& summary, const std::string& payload, const std::string& hash,
             Clock::time_point start) {
    if (c.output.empty()) {
        std::fputs(payload.c_str(), stdout);
        return;
    }
    const std::string path = resolve_output(c.output);
    atomic_write_text(path, payload);
    json manifest;
    manifest["tool"] = "entnet";
    manifest["version"] = kVersion;
    manifest["subcommand"] = subcommand;
    manifest["manifest_hash"] = hash;
    manifest["seed"] = c.seed;
    manifest["threads"] = c.threads;
    manifest["format"] = c.format;
    manifest["config"] = config;
    if (!summary.is_null()) manifest["summary"] = summary;
    manifest["output"] = path;
    manifest["wall_seconds"] = elapsed_seconds(start);
    atomic_write_text(path + ".manifest.json", manifest.dump(2) + "\n");
}

// Render a result table in the requested encoding, embedding the manifest
// hash (CSV grows a leading comment line; JSON a top-level field).
void emit(const CommonOpts& c, const std::string& subcommand, const json& config,
          const json& summary, const Table& table, Clock::time_point start) {
    const std::string hash = manifest_hash(c, subcommand, config);
    std::string payload;
    if (c.format == "json") {
        json artifact;
        artifact["tool"] = "entnet";
        artifact["subcommand"] = subcommand;
        artifact["manifest_hash"] = hash;
        artifact["columns"] = table.columns;
        artifact["rows"] = table_rows_json(table);
        if (!summary.is_null()) artifact["summary"] = summary;
        payload = artifact.dump(2) + "\n";
    } else {
        payload = "# manifest " + hash + "\n" + table_csv(table);
    }
    deliver(c, subcommand, config, summary, payload, hash, start);
}

// Graph-format artifacts pass through untouched (that format has no comment
// syntax); the manifest hash lives only in the sidecar manifest.
void emit_graph(const CommonOpts& c, const std::string& subcommand, const json& config,
                const std::string& payload, Clock::time_point start) {
    deliver(c, subcommand, config, json(), payload, manifest_hash(c, subcommand, config),
            start);
}

struct GridOpts {
    int rows = 2;
    int cols = 1;
    double leg = 1.0;
    double theta = std::numbers::pi / 4;
    double alpha = 1.0 / 22.0;
    double gamma = 1.0;
    std::vector<std::string> source_menus, terminal_menus;
};

void add_grid(CLI::App* cmd, GridOpts& g) {
    cmd->add_option("--rows", g.rows, "terminal rows N (>= 2)")->capture_default_str();
    cmd->add_option("--cols", g.cols, "terminal columns M between the users (>= 1)")
        ->capture_default_str();
    cmd->add_option("--leg", g.leg, "source-to-node leg length in km")->capture_default_str();
    cmd->add_option("--theta", g.theta, "grid half-angle in radians")->capture_default_str();
    cmd->add_option("--alpha", g.alpha, "fiber loss rate per km")->capture_default_str();
    cmd->add_option("--gamma", g.gamma, "joint-measurement success probability")
        ->capture_default_str();
    cmd->add_option("--source-menu", g.source_menus,
                    "override one source's pairing, col,row=a|b|c (repeatable)");
    cmd->add_option("--terminal-menu", g.terminal_menus,
                    "override one terminal's pairing, col,row=a|b|c (repeatable)");
}

BravaisConfig to_config(const GridOpts& g) {
    BravaisConfig cfg;
    cfg.rows = g.rows;
    cfg.cols = g.cols;
    cfg.leg = g.leg;
    cfg.theta = g.theta;
    cfg.alpha = g.alpha;
    cfg.gamma = g.gamma;
    for (const std::string& s : g.source_menus) {
        const auto [key, menu] = menu_flag(s);
        cfg.source_menus[key] = menu;
    }
    for (const std::string& s : g.terminal_menus) {
        const auto [key, menu] = menu_flag(s);
        cfg.terminal_menus[key] = menu;
    }
    return cfg;
}

json grid_json(const GridOpts& g) {
    json j;
    j["rows"] = g.rows;
    j["cols"] = g.cols;
    j["leg"] = g.leg;
    j["theta"] = g.theta;
    j["alpha"] = g.alpha;
    j["gamma"] = g.gamma;
    j["source_menus"] = g.source_menus;
    j["terminal_menus"] = g.terminal_menus;
    return j;
}

// ---------------------------------------------------------------------------
// yield

struct YieldOpts {
    GridOpts grid;
    CommonOpts common;
    std::uint64_t rounds = 0;
    std::string rows_list, cols_list;
    std::string span_list;
    bool panels = false;
};

// One table row in the making: a fully specified grid configuration plus
// the user-to-user distance it realizes.
struct YieldCase {
    BravaisConfig cfg;
    double span = 0;
};

int run_yield(const YieldOpts& o) {
    const auto start = Clock::now();
    const std::vector<int> all_rows =
        o.rows_list.empty() ? std::vector<int>{o.grid.rows} : int_list(o.rows_list);
    const std::vector<int> all_cols =
        o.cols_list.empty() ? std::vector<int>{o.grid.cols} : int_list(o.cols_list);

    std::vector<YieldCase> cases;
    auto add_span_case = [&](double span, int N, int M, double gamma, double theta,
                             double alpha) {
        YieldCase yc;
        yc.cfg.rows = N;
        yc.cfg.cols = M;
        yc.cfg.gamma = gamma;
        yc.cfg.theta = theta;
        yc.cfg.alpha = alpha;
        yc.cfg.leg = span / (2.0 * (M + 1) * std::cos(theta));
        yc.span = span;
        cases.push_back(yc);
    };

    if (o.panels) {
        // The standard four-panel yield-versus-distance picture: diagonal
        // grids (theta = pi/4) at 1/22 per km, swept over distance for each
        // (gamma, M) panel.
        const std::pair<double, int> panels[] = {{0.5, 1}, {0.5, 2}, {0.9, 1}, {1.0, 2}};
        std::vector<double> spans;
        if (!o.span_list.empty()) {
            spans = double_list(o.span_list);
        } else {
            for (int i = 0; i <= 20; ++i) spans.push_back(10.0 * i);
        }
        const std::vector<int> panel_rows =
            o.rows_list.empty() ? std::vector<int>{2, 5, 10} : all_rows;
        for (const auto& [gamma, M] : panels)
            for (int N : panel_rows)
                for (double span : spans)
                    add_span_case(span, N, M, gamma, std::numbers::pi / 4, 1.0 / 22.0);
    } else if (!o.span_list.empty()) {
        for (double span : double_list(o.span_list))
            for (int N : all_rows)
                for (int M : all_cols)
                    add_span_case(span, N, M, o.grid.gamma, o.grid.theta, o.grid.alpha);
    } else {
        for (int N : all_rows)
            for (int M : all_cols) {
                YieldCase yc;
                yc.cfg = to_config(o.grid);
                yc.cfg.rows = N;
                yc.cfg.cols = M;
                yc.span = user_span(yc.cfg);
                cases.push_back(yc);
            }
    }

    Table table({"rows", "cols", "leg_km", "theta", "alpha_per_km", "gamma", "span_km",
                 "eta_leg", "yield_analytic", "repeaterless_bound", "yield_sampled",
                 "yield_stderr", "rounds"});
    for (const YieldCase& yc : cases) {
        const BravaisConfig& cfg = yc.cfg;
        const double analytic = analytic_yield(cfg);
        const double bound = repeaterless_bound(transmissivity(cfg.alpha, yc.span));
        double sampled = std::nan(""), err = std::nan("");
        if (o.rounds > 0) {
            const ProtocolNetwork net = build_network(cfg);
            const TraceResult trace = trace_chains(net);
            const YieldEstimate est = estimate_yield(net, trace, o.rounds, o.common.seed);
            sampled = est.mean;
            err = est.stderr_mean;
        }
        table.row({std::to_string(cfg.rows), std::to_string(cfg.cols), format_double(cfg.leg),
                   format_double(cfg.theta), format_double(cfg.alpha),
                   format_double(cfg.gamma), format_double(yc.span),
                   format_double(transmissivity(cfg.alpha, cfg.leg)), format_double(analytic),
                   format_double(bound), format_double(sampled), format_double(err),
                   std::to_string(o.rounds)});
    }

    json config = grid_json(o.grid);
    config["rows_list"] = o.rows_list;
    config["cols_list"] = o.cols_list;
    config["span_list"] = o.span_list;
    config["panels"] = o.panels;
    config["rounds"] = o.rounds;
    emit(o.common, "yield", config, json(), table, start);
    return 0;
}

// ---------------------------------------------------------------------------
// protocol

struct ProtocolOpts {
    GridOpts grid;
    CommonOpts common;
    std::uint64_t rounds = 0;
    std::vector<std::string> fail_sources, fail_terminals;
    std::string scenario;
    bool per_round = false;
};

int run_protocol(const ProtocolOpts& o) {
    const auto start = Clock::now();
    BravaisConfig cfg = to_config(o.grid);
    FailureSet fail;
    std::string scenario_content;
    if (!o.scenario.empty()) {
        // A broken scenario file is a configuration problem, not an I/O one.
        const Scenario sc = from_flag([&] { return load_scenario(o.scenario); });
        // Menus given as flags were already placed in cfg, so they win.
        apply_scenario(sc, cfg, fail);
        // The manifest records the scenario by content, not just by path, so
        // the run hash changes whenever the file does.
        scenario_content = serialize_scenario(sc);
    }
    for (const std::string& s : o.fail_sources) fail.sources.push_back(coord_flag(s));
    for (const std::string& s : o.fail_terminals) fail.terminals.push_back(coord_flag(s));

    const ProtocolNetwork net = build_network(cfg);
    const TraceResult trace = trace_chains(net);
    if (o.per_round && o.rounds == 0)
        throw std::invalid_argument("--per-round needs --rounds >= 1");

    std::uint64_t delivered_total = 0;
    Table table(o.per_round
                    ? std::vector<std::string>{"round", "chain", "success", "label_x",
                                               "label_z", "correction_x", "correction_z",
                                               "photons_lost", "pairs_one_lost",
                                               "pairs_both_lost", "measurements_failed"}
                    : std::vector<std::string>{"chain", "start_col", "start_row", "end_col",
                                               "end_row", "connects_users", "num_sources",
                                               "num_terminals", "survives_failures",
                                               "success_count", "rounds", "label_00",
                                               "label_01", "label_10", "label_11"});

    std::vector<std::uint64_t> successes(trace.chains.size(), 0);
    std::vector<std::array<std::uint64_t, 4>> labels(trace.chains.size(),
                                                     std::array<std::uint64_t, 4>{0, 0, 0, 0});
    for (std::uint64_t t = 0; t < o.rounds; ++t) {
        const RoundOutcome out = simulate_round(net, trace, o.common.seed, t);
        delivered_total += static_cast<std::uint64_t>(out.delivered);
        for (std::size_t i = 0; i < out.chains.size(); ++i) {
            const ChainOutcome& co = out.chains[i];
            if (co.success) {
                ++successes[i];
                ++labels[i][static_cast<std::size_t>(co.label.a * 2 + co.label.b)];
            }
            if (o.per_round)
                table.row({std::to_string(t), std::to_string(i), co.success ? "1" : "0",
                           std::to_string(co.label.a), std::to_string(co.label.b),
                           std::to_string(co.correction.x), std::to_string(co.correction.z),
                           std::to_string(co.photons_lost), std::to_string(co.pairs_one_lost),
                           std::to_string(co.pairs_both_lost),
                           std::to_string(co.measurements_failed)});
        }
    }

    if (!o.per_round) {
        for (std::size_t i = 0; i < trace.chains.size(); ++i) {
            const Chain& c = trace.chains[i];
            table.row({std::to_string(i), std::to_string(c.start_col),
                       std::to_string(c.start_row), std::to_string(c.end_col),
                       std::to_string(c.end_row), c.connects_users ? "1" : "0",
                       std::to_string(c.sources.size()), std::to_string(c.terminals.size()),
                       chain_survives(net, c, fail) ? "1" : "0", std::to_string(successes[i]),
                       std::to_string(o.rounds), std::to_string(labels[i][0]),
                       std::to_string(labels[i][1]), std::to_string(labels[i][2]),
                       std::to_string(labels[i][3])});
        }
    }

    json config = grid_json(o.grid);
    config["rounds"] = o.rounds;
    config["fail_sources"] = o.fail_sources;
    config["fail_terminals"] = o.fail_terminals;
    config["scenario"] = o.scenario;
    config["scenario_content"] = scenario_content;
    config["per_round"] = o.per_round;
    json summary;
    summary["num_chains"] = trace.chains.size();
    summary["num_cycles"] = trace.num_cycles;
    summary["cycle_photons"] = trace.cycle_photons;
    summary["delivered_total"] = delivered_total;
    if (o.rounds > 0)
        summary["delivered_mean"] =
            static_cast<double>(delivered_total) / static_cast<double>(o.rounds);
    emit(o.common, "protocol", config, summary, table, start);
    return 0;
}

// ---------------------------------------------------------------------------
// percolate

struct PercolateOpts {
    CommonOpts common;
    std::string lattice;
    int cols = 16, rows = 16;
    std::string sizes;
    std::string boundary = "periodic-horizontal";
    std::string kind = "bond";
    double p_min = 0.0, p_max = 1.0;
    int p_steps = 11;
    std::string p_list;
    std::uint64_t trials = 10000;
};

int run_percolate(const PercolateOpts& o) {
    const auto start = Clock::now();
    const PercolationKind kind = kind_flag(o.kind);
    const Boundary boundary = boundary_flag(o.boundary);
    const UnitCell cell = unit_cell(o.lattice);

    std::vector<double> probs;
    if (!o.p_list.empty()) {
        probs = double_list(o.p_list);
    } else {
        if (o.p_steps < 2) throw std::invalid_argument("--p-steps must be at least 2");
        for (int i = 0; i < o.p_steps; ++i)
            probs.push_back(o.p_min + (o.p_max - o.p_min) * i / (o.p_steps - 1));
    }
    for (double p : probs)
        if (p < 0 || p > 1)
            throw std::invalid_argument("probabilities must lie in [0, 1]");
    if (o.trials == 0) throw std::invalid_argument("--trials must be positive");

    Table table({"lattice", "kind", "cols", "rows", "boundary", "p", "rate", "sigma",
                 "trials"});
    const std::string name = canonical_tiling_name(o.lattice);
    if (!o.sizes.empty()) {
        // Curve family over square patches: the curves of successive sizes
        // steepen and cross near the threshold.
        const std::vector<int> sizes = int_list(o.sizes);
        for (const FamilyCurvePoint& pt :
             spanning_curve_family(cell, sizes, boundary, kind, probs, o.trials,
                                   o.common.seed, o.common.threads))
            table.row({name, kind_name(kind), std::to_string(pt.size),
                       std::to_string(pt.size), o.boundary, format_double(pt.p),
                       format_double(pt.rate), format_double(pt.sigma),
                       std::to_string(pt.trials)});
    } else {
        const LatticePatch patch = build_patch(cell, o.cols, o.rows, boundary);
        const PercolationSystem sys(patch);
        for (const CurvePoint& pt :
             spanning_curve(sys, kind, probs, o.trials, o.common.seed, o.common.threads))
            table.row({name, kind_name(kind), std::to_string(o.cols), std::to_string(o.rows),
                       o.boundary, format_double(pt.p), format_double(pt.rate),
                       format_double(pt.sigma), std::to_string(pt.trials)});
    }

    json config;
    config["lattice"] = name;
    config["kind"] = o.kind;
    config["cols"] = o.cols;
    config["rows"] = o.rows;
    config["sizes"] = o.sizes;
    config["boundary"] = o.boundary;
    config["trials"] = o.trials;
    config["probabilities"] = probs;
    emit(o.common, "percolate", config, json(), table, start);
    return 0;
}

// ---------------------------------------------------------------------------
// threshold

struct ThresholdOpts {
    CommonOpts common;
    std::string lattice;
    std::string kind = "bond";
    std::string sizes = "32,64,128";
    std::uint64_t coarse_trials = 2000;
    std::uint64_t refine_trials = 10000;
    int iterations = 12;
    std::string boundary = "periodic-horizontal";
};

int run_threshold(const ThresholdOpts& o) {
    const auto start = Clock::now();
    const PercolationKind kind = kind_flag(o.kind);
    const UnitCell cell = unit_cell(o.lattice);

    ThresholdSettings settings;
    settings.sizes = int_list(o.sizes);
    settings.coarse_trials = o.coarse_trials;
    settings.refine_trials = o.refine_trials;
    settings.coarse_iterations = o.iterations;
    settings.seed = o.common.seed;
    settings.boundary = boundary_flag(o.boundary);
    settings.threads = o.common.threads;
    const ThresholdEstimate est = estimate_threshold(cell, kind, settings);

    const std::string name = canonical_tiling_name(o.lattice);
    const ThresholdRow* ref = find_reference(name);
    const bool is_bond = kind == PercolationKind::Bond;
    const double reference =
        ref ? (is_bond ? ref->bond : ref->site) : std::nan("");
    const double eta_c = is_bond ? critical_transmissivity(est.value) : std::nan("");

    std::string per_size;
    for (std::size_t i = 0; i < est.per_size.size(); ++i) {
        if (i) per_size += ';';
        per_size += std::to_string(est.sizes[i]) + ":" + format_double(est.per_size[i]);
    }

    Table table({"lattice", "kind", "threshold", "uncertainty", "eta_critical", "reference",
                 "deviation", "per_size"});
    table.row({name, kind_name(kind), format_double(est.value),
               format_double(est.uncertainty), format_double(eta_c),
               format_double(reference), format_double(est.value - reference), per_size});

    json config;
    config["lattice"] = name;
    config["kind"] = o.kind;
    config["sizes"] = settings.sizes;
    config["coarse_trials"] = o.coarse_trials;
    config["refine_trials"] = o.refine_trials;
    config["iterations"] = o.iterations;
    config["boundary"] = o.boundary;
    json summary;
    summary["threshold"] = est.value;
    summary["uncertainty"] = est.uncertainty;
    summary["per_size"] = est.per_size;
    summary["per_size_sigma"] = est.per_size_sigma;
    emit(o.common, "threshold", config, summary, table, start);
    return 0;
}

// ---------------------------------------------------------------------------
// surface

struct SurfaceOpts {
    CommonOpts common;
    std::string lattice;
    std::string mode = "homogeneous";
    std::string weights;
    std::string lengths;
    std::string probs;
    int edge_class = 0;
    double alpha = 1.0 / 22.0;
};

int run_surface(const SurfaceOpts& o) {
    const auto start = Clock::now();
    const CriticalSurface s = surface_for(o.lattice);
    const std::string exact = s.exact ? "1" : "0";

    json config;
    config["lattice"] = s.lattice;
    config["exact"] = s.exact;
    config["mode"] = o.mode;
    config["alpha"] = o.alpha;

    if (o.mode == "homogeneous") {
        const double root = solve_homogeneous(s);
        const std::vector<double> probs(static_cast<std::size_t>(s.num_classes), root);
        Table table({"lattice", "exact", "mode", "num_classes", "root", "residual",
                     "eta_critical", "probabilities"});
        table.row({s.lattice, exact, o.mode, std::to_string(s.num_classes),
                   format_double(root), format_double(s.residual(probs)),
                   format_double(critical_transmissivity(root)), join_doubles(probs)});
        emit(o.common, "surface", config, json(), table, start);
    } else if (o.mode == "scaled") {
        if (o.weights.empty())
            throw std::invalid_argument("--ratios is required for mode scaled");
        const std::vector<double> t = double_list(o.weights);
        const double x = solve_scaled(s, t);
        std::vector<double> probs;
        for (double w : t) probs.push_back(std::pow(x, w));
        Table table({"lattice", "exact", "mode", "weights", "x_root", "residual",
                     "probabilities"});
        table.row({s.lattice, exact, o.mode, join_doubles(t), format_double(x),
                   format_double(s.residual(probs)), join_doubles(probs)});
        config["weights"] = t;
        emit(o.common, "surface", config, json(), table, start);
    } else if (o.mode == "lengths") {
        if (o.weights.empty())
            throw std::invalid_argument("--ratios is required for mode lengths");
        const std::vector<double> t = double_list(o.weights);
        const LengthProfile prof = from_flag([&] { return critical_lengths(s, t, o.alpha); });
        Table table({"lattice", "exact", "mode", "alpha_per_km", "x_root", "scale_km",
                     "residual", "lengths_km", "probabilities"});
        table.row({s.lattice, exact, o.mode, format_double(o.alpha), format_double(prof.x),
                   format_double(prof.scale), format_double(s.residual(prof.probabilities)),
                   join_doubles(prof.lengths), join_doubles(prof.probabilities)});
        config["weights"] = t;
        emit(o.common, "surface", config, json(), table, start);
    } else if (o.mode == "limit") {
        if (o.lengths.empty())
            throw std::invalid_argument("--lengths is required for mode limit");
        const std::vector<double> lengths = double_list(o.lengths);
        const ClassLengthLimit lim =
            from_flag([&] { return max_class_length(s, o.edge_class, lengths, o.alpha); });
        const char* status =
            lim.status == ClassLengthLimit::Status::Bounded     ? "bounded"
            : lim.status == ClassLengthLimit::Status::Unbounded ? "unbounded"
                                                                : "infeasible";
        Table table({"lattice", "exact", "mode", "edge_class", "status", "max_length_km",
                     "p_required"});
        const bool bounded = lim.status == ClassLengthLimit::Status::Bounded;
        table.row({s.lattice, exact, o.mode, std::to_string(o.edge_class), status,
                   format_double(bounded ? lim.max_length : std::nan("")),
                   format_double(bounded ? lim.p_required : std::nan(""))});
        config["lengths"] = lengths;
        config["edge_class"] = o.edge_class;
        emit(o.common, "surface", config, json(), table, start);
    } else if (o.mode == "evaluate") {
        if (o.probs.empty())
            throw std::invalid_argument("--probs is required for mode evaluate");
        const std::vector<double> p = double_list(o.probs);
        const double value = from_flag([&] { return s.evaluate(p); });
        Table table({"lattice", "exact", "mode", "probs", "value", "residual", "percolates"});
        table.row({s.lattice, exact, o.mode, join_doubles(p), format_double(value),
                   format_double(value - 1.0), value > 1.0 ? "1" : "0"});
        config["probs"] = p;
        emit(o.common, "surface", config, json(), table, start);
    } else {
        throw std::invalid_argument(
            "mode must be homogeneous, scaled, lengths, limit, or evaluate, got '" + o.mode +
            "'");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// robustness

struct RobustnessOpts {
    CommonOpts common;
    std::string lattice;
    double bond = std::nan("");
    double site = std::nan("");
    double eta = std::nan("");
    double edge_length = std::nan("");
    double alpha = 1.0 / 22.0;
    double q = 0.0;
    double r = 1.0;
    std::string eta_list;
};

int run_robustness(const RobustnessOpts& o) {
    const auto start = Clock::now();

    double bond = o.bond, site = o.site;
    std::string name = "custom";
    if (!o.lattice.empty()) {
        const ThresholdRow* ref = find_reference(o.lattice);
        if (!ref) throw std::invalid_argument("no reference thresholds for '" + o.lattice + "'");
        name = ref->name;
        if (std::isnan(bond)) bond = ref->bond;
        if (std::isnan(site)) site = ref->site;
    }
    if (std::isnan(bond))
        throw std::invalid_argument("need --lattice or an explicit --bond threshold");

    std::vector<double> etas;
    if (!o.eta_list.empty()) {
        etas = double_list(o.eta_list);
    } else if (!std::isnan(o.eta)) {
        etas.push_back(o.eta);
    } else if (!std::isnan(o.edge_length)) {
        // Midpoint sources: each photon crosses half the link.
        etas.push_back(transmissivity(o.alpha, o.edge_length / 2.0));
    } else {
        etas.push_back(1.0);
    }
    for (double e : etas)
        if (e < 0 || e > 1) throw std::invalid_argument("eta must lie in [0, 1]");
    if (o.q < 0 || o.q > 1) throw std::invalid_argument("q must lie in [0, 1]");
    if (o.r < 0 || o.r > 1) throw std::invalid_argument("r must lie in [0, 1]");

    Table table({"lattice", "bond_threshold", "site_threshold", "eta", "q", "r",
                 "link_probability", "bond_margin", "site_margin", "margin", "robust"});
    for (double e : etas) {
        const RobustnessReport rep = robustness(bond, site, RobustnessInput{e, o.q, o.r});
        table.row({name, format_double(bond), format_double(site), format_double(e),
                   format_double(o.q), format_double(o.r), format_double(rep.link_probability),
                   format_double(rep.bond_margin), format_double(rep.site_margin),
                   format_double(rep.margin), rep.robust ? "1" : "0"});
    }

    json config;
    config["lattice"] = name;
    config["bond_threshold"] = bond;
    config["site_threshold"] = site;
    config["q"] = o.q;
    config["r"] = o.r;
    config["etas"] = etas;
    emit(o.common, "robustness", config, json(), table, start);
    return 0;
}

// ---------------------------------------------------------------------------
// export-lattice

struct ExportOpts {
    CommonOpts common;
    std::string lattice;
    int cols = 8, rows = 8;
    std::string boundary = "open";
    double edge_length = 1.0;
    bool use_grid = false;
    // Grid-mode extras; --rows/--cols double as the terminal grid shape.
    double leg = 1.0;
    double theta = std::numbers::pi / 4;
    double alpha = 1.0 / 22.0;
    double gamma = 1.0;
    std::vector<std::string> source_menus, terminal_menus;
};

int run_export(const ExportOpts& o) {
    const auto start = Clock::now();
    if (o.common.output.empty())
        throw std::invalid_argument("export-lattice requires --output");

    json config;
    std::string payload;
    if (o.use_grid) {
        GridOpts g;
        g.rows = o.rows;
        g.cols = o.cols;
        g.leg = o.leg;
        g.theta = o.theta;
        g.alpha = o.alpha;
        g.gamma = o.gamma;
        g.source_menus = o.source_menus;
        g.terminal_menus = o.terminal_menus;
        const BravaisConfig cfg = to_config(g);
        const ProtocolNetwork net = build_network(cfg);
        payload = serialize_graph(export_network(net));
        config = grid_json(g);
        config["source"] = "protocol-grid";
    } else {
        if (o.lattice.empty())
            throw std::invalid_argument("need --lattice (or --grid for the protocol network)");
        const UnitCell cell = unit_cell(o.lattice);
        const LatticePatch patch =
            build_patch(cell, o.cols, o.rows, boundary_flag(o.boundary), o.edge_length);
        payload = serialize_graph(patch.graph);
        config["source"] = "lattice-patch";
        config["lattice"] = canonical_tiling_name(o.lattice);
        config["cols"] = o.cols;
        config["rows"] = o.rows;
        config["boundary"] = o.boundary;
        config["edge_length"] = o.edge_length;
    }

    emit_graph(o.common, "export-lattice", config, payload, start);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and analysis tools for entanglement-distribution networks"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    YieldOpts yield_opts;
    {
        CLI::App* cmd = app.add_subcommand(
            "yield", "Pair yield of the source-grid protocol (closed form and sampled)");
        add_grid(cmd, yield_opts.grid);
        add_common(cmd, yield_opts.common);
        cmd->add_option("--rounds", yield_opts.rounds,
                        "sampling rounds (0 = closed form only)")
            ->capture_default_str();
        cmd->add_option("--rows-list", yield_opts.rows_list,
                        "comma-separated row counts to sweep (overrides --rows)");
        cmd->add_option("--cols-list", yield_opts.cols_list,
                        "comma-separated column counts to sweep (overrides --cols)");
        cmd->add_option("--span-list", yield_opts.span_list,
                        "comma-separated end-to-end spans in km; the leg length is derived "
                        "from each span instead of --leg");
        cmd->add_flag("--panels", yield_opts.panels,
                      "emit the standard yield-versus-span panels (four gamma/repeater "
                      "settings, rows 2, 5, and 10)");
        cmd->callback([cmd, &yield_opts] {
            apply_config_file(cmd, yield_opts.common.config_file);
            run_yield(yield_opts);
        });
    }

    ProtocolOpts protocol_opts;
    {
        CLI::App* cmd = app.add_subcommand(
            "protocol", "Trace the measurement chains of a configured grid");
        add_grid(cmd, protocol_opts.grid);
        add_common(cmd, protocol_opts.common);
        cmd->add_option("--rounds", protocol_opts.rounds,
                        "sampling rounds (0 = trace only)")
            ->capture_default_str();
        cmd->add_option("--fail-source", protocol_opts.fail_sources,
                        "mark a source broken, col,row (repeatable)");
        cmd->add_option("--fail-terminal", protocol_opts.fail_terminals,
                        "mark a terminal broken, col,row (repeatable)");
        cmd->add_option("--scenario", protocol_opts.scenario,
                        "load menu overrides and failures from a scenario file "
                        "(command-line menus win on conflict)");
        cmd->add_flag("--per-round", protocol_opts.per_round,
                      "emit one row per round and chain instead of aggregate counts "
                      "(requires --rounds > 0)");
        cmd->callback([cmd, &protocol_opts] {
            apply_config_file(cmd, protocol_opts.common.config_file);
            run_protocol(protocol_opts);
        });
    }

    PercolateOpts percolate_opts;
    {
        CLI::App* cmd = app.add_subcommand(
            "percolate", "Spanning probability of a lattice patch over a probability grid");
        add_common(cmd, percolate_opts.common);
        cmd->add_option("--lattice", percolate_opts.lattice,
                        "lattice name (vertex configuration or alias)")
            ->required();
        cmd->add_option("--cols", percolate_opts.cols, "cells per row")->capture_default_str();
        cmd->add_option("--rows", percolate_opts.rows, "cell rows")->capture_default_str();
        cmd->add_option("--boundary", percolate_opts.boundary,
                        "open or periodic-horizontal")
            ->capture_default_str();
        cmd->add_option("--kind,--mode", percolate_opts.kind, "bond or site")
            ->capture_default_str();
        cmd->add_option("--sizes", percolate_opts.sizes,
                        "comma-separated square patch sizes; sweeps the whole family and "
                        "overrides --rows/--cols");
        cmd->add_option("--p-min", percolate_opts.p_min, "lowest probability")
            ->capture_default_str();
        cmd->add_option("--p-max", percolate_opts.p_max, "highest probability")
            ->capture_default_str();
        cmd->add_option("--p-steps", percolate_opts.p_steps, "number of grid points")
            ->capture_default_str();
        cmd->add_option("--p-list", percolate_opts.p_list,
                        "explicit comma-separated probabilities (overrides the grid)");
        cmd->add_option("--trials", percolate_opts.trials, "trials per point")
            ->capture_default_str();
        cmd->callback([cmd, &percolate_opts] {
            apply_config_file(cmd, percolate_opts.common.config_file);
            run_percolate(percolate_opts);
        });
    }

    ThresholdOpts threshold_opts;
    {
        CLI::App* cmd = app.add_subcommand(
            "threshold", "Percolation threshold by bisection and finite-size extrapolation");
        add_common(cmd, threshold_opts.common);
        cmd->add_option("--lattice", threshold_opts.lattice,
                        "lattice name (vertex configuration or alias)")
            ->required();
        cmd->add_option("--kind,--mode", threshold_opts.kind, "bond or site")
            ->capture_default_str();
        cmd->add_option("--sizes", threshold_opts.sizes,
                        "comma-separated system sizes (cells per side)")
            ->capture_default_str();
        cmd->add_option("--coarse-trials", threshold_opts.coarse_trials,
                        "trials per bisection step")
            ->capture_default_str();
        cmd->add_option("--refine-trials", threshold_opts.refine_trials,
                        "trials for the final interpolation")
            ->capture_default_str();
        cmd->add_option("--iterations", threshold_opts.iterations, "bisection steps")
            ->capture_default_str();
        cmd->add_option("--boundary", threshold_opts.boundary, "open or periodic-horizontal")
            ->capture_default_str();
        cmd->callback([cmd, &threshold_opts] {
            apply_config_file(cmd, threshold_opts.common.config_file);
            run_threshold(threshold_opts);
        });
    }

    SurfaceOpts surface_opts;
    {
        CLI::App* cmd = app.add_subcommand(
            "surface", "Critical-surface solvers for the exactly known lattices");
        add_common(cmd, surface_opts.common);
        cmd->add_option("--lattice", surface_opts.lattice,
                        "square, triangular, honeycomb, or bowtie")
            ->required();
        cmd->add_option("--mode", surface_opts.mode,
                        "homogeneous, scaled, lengths, limit, or evaluate")
            ->capture_default_str();
        cmd->add_option("--ratios,--weights", surface_opts.weights,
                        "relative edge lengths per class (scaled, lengths)");
        cmd->add_option("--lengths", surface_opts.lengths,
                        "edge lengths in km per class (limit)");
        cmd->add_option("--probs", surface_opts.probs,
                        "edge probabilities per class (evaluate)");
        cmd->add_option("--edge-class", surface_opts.edge_class,
                        "which class to stretch (limit)")
            ->capture_default_str();
        cmd->add_option("--alpha", surface_opts.alpha, "fiber loss rate per km")
            ->capture_default_str();
        cmd->callback([cmd, &surface_opts] {
            apply_config_file(cmd, surface_opts.common.config_file);
            run_surface(surface_opts);
        });
    }

    RobustnessOpts robustness_opts;
    {
        CLI::App* cmd = app.add_subcommand(
            "robustness", "Loss and failure margins against the percolation thresholds");
        add_common(cmd, robustness_opts.common);
        cmd->add_option("--lattice", robustness_opts.lattice,
                        "lattice whose reference thresholds to use");
        cmd->add_option("--bond", robustness_opts.bond, "bond threshold override");
        cmd->add_option("--site", robustness_opts.site, "site threshold override");
        cmd->add_option("--eta", robustness_opts.eta, "single-photon transmissivity");
        cmd->add_option("--edge-length", robustness_opts.edge_length,
                        "link length in km (each photon crosses half)");
        cmd->add_option("--alpha", robustness_opts.alpha, "fiber loss rate per km")
            ->capture_default_str();
        cmd->add_option("--q", robustness_opts.q, "extra heralded link failure probability")
            ->capture_default_str();
        cmd->add_option("--r", robustness_opts.r, "probability a node is operational")
            ->capture_default_str();
        cmd->add_option("--eta-list", robustness_opts.eta_list,
                        "comma-separated transmissivities to sweep");
        cmd->callback([cmd, &robustness_opts] {
            apply_config_file(cmd, robustness_opts.common.config_file);
            run_robustness(robustness_opts);
        });
    }

    ExportOpts export_opts;
    {
        CLI::App* cmd = app.add_subcommand(
            "export-lattice", "Write a lattice patch or protocol grid as a graph file");
        add_common(cmd, export_opts.common, /*with_format=*/false);
        cmd->add_option("--lattice", export_opts.lattice,
                        "lattice name (vertex configuration or alias)");
        cmd->add_option("--cols", export_opts.cols, "cells per row")->capture_default_str();
        cmd->add_option("--rows", export_opts.rows, "cell rows")->capture_default_str();
        cmd->add_option("--boundary", export_opts.boundary, "open or periodic-horizontal")
            ->capture_default_str();
        cmd->add_option("--edge-length", export_opts.edge_length, "edge length in km")
            ->capture_default_str();
        cmd->add_flag("--grid", export_opts.use_grid,
                      "export the protocol source grid instead of a lattice patch "
                      "(--rows/--cols become the terminal grid shape)");
        cmd->add_option("--leg", export_opts.leg, "grid mode: leg length in km")
            ->capture_default_str();
        cmd->add_option("--theta", export_opts.theta, "grid mode: half-angle in radians")
            ->capture_default_str();
        cmd->add_option("--alpha", export_opts.alpha, "grid mode: fiber loss rate per km")
            ->capture_default_str();
        cmd->add_option("--gamma", export_opts.gamma,
                        "grid mode: joint-measurement success probability")
            ->capture_default_str();
        cmd->add_option("--source-menu", export_opts.source_menus,
                        "grid mode: override one source's pairing, col,row=a|b|c (repeatable)");
        cmd->add_option("--terminal-menu", export_opts.terminal_menus,
                        "grid mode: override one terminal's pairing, col,row=a|b|c (repeatable)");
        cmd->callback([cmd, &export_opts] {
            apply_config_file(cmd, export_opts.common.config_file);
            run_export(export_opts);
        });
    }

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "entnet: %s\n", e.what());
        return 2;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "entnet: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "entnet: %s\n", e.what());
        return 3;
    }
}
