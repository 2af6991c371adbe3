#pragma once

// Bond / site percolation on lattice patches: spanning tests, threshold
// estimation, and the robustness criterion for lossy quantum networks.
//
// Sampling is counter-based: the uniform deciding edge e (or site s) of
// trial t under seed S is a pure function of (S, t, e).  Two consequences
// the rest of the toolkit relies on:
//  * results do not depend on how trials are distributed over worker
//    threads, so any pool size reproduces the same numbers byte for byte;
//  * the same trial re-run at a larger probability keeps every open element
//    open (monotone coupling), which makes bisection on p well behaved.
//
// Spanning means: the virtual node glued to the bottom cell row connects to
// the virtual node glued to the top cell row.  Horizontal wrap-around
// (periodic-horizontal patches) removes the side surfaces and speeds up
// convergence of the threshold with system size.

#include "entnet/rng.hpp"
#include "entnet/tilings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace entnet {

struct UnionFind {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> size;

    explicit UnionFind(std::size_t n = 0) { reset(n); }

    void reset(std::size_t n) {
        parent.resize(n);
        size.assign(n, 1);
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
    }

    std::int32_t find(std::int32_t x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }

    bool unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
        return true;
    }

    bool same(std::int32_t a, std::int32_t b) { return find(a) == find(b); }
};

// Flattened patch prepared for fast repeated trials.
class PercolationSystem {
  public:
    explicit PercolationSystem(const LatticePatch& patch) {
        n_ = static_cast<int>(patch.graph.nodes.size());
        num_classes_ = patch.num_classes;
        eu_.reserve(patch.graph.edges.size());
        ev_.reserve(patch.graph.edges.size());
        ecls_.reserve(patch.graph.edges.size());
        for (const GraphEdge& e : patch.graph.edges) {
            eu_.push_back(e.u);
            ev_.push_back(e.v);
            ecls_.push_back(e.cls);
        }
        bottom_ = patch.bottom;
        top_ = patch.top;
    }

    int num_sites() const { return n_; }
    int num_edges() const { return static_cast<int>(eu_.size()); }
    int num_classes() const { return num_classes_; }

    // One bond-percolation trial; edge e of class c is open iff
    // u(seed, trial, e) < p[c].
    bool bond_spans(const std::vector<double>& p, std::uint64_t seed, std::uint64_t trial) const {
        check_probs(p);
        UnionFind uf(static_cast<std::size_t>(n_) + 2);
        const std::int32_t vb = n_, vt = n_ + 1;
        const std::uint64_t key = derive_key(seed ^ kBondStream, trial);
        for (std::size_t e = 0; e < eu_.size(); ++e) {
            if (counter_uniform(key, e) < p[static_cast<std::size_t>(ecls_[e])])
                uf.unite(eu_[e], ev_[e]);
        }
        attach_boundaries(uf, vb, vt, nullptr);
        return uf.same(vb, vt);
    }

    bool bond_spans(double p, std::uint64_t seed, std::uint64_t trial) const {
        return bond_spans(std::vector<double>(static_cast<std::size_t>(num_classes_), p), seed, trial);
    }

    // One site-percolation trial; every site is open with probability r and
    // an edge conducts iff both endpoints are open.
    bool site_spans(double r, std::uint64_t seed, std::uint64_t trial) const {
        return joint_spans_impl(nullptr, r, seed, trial);
    }

    // Combined model: sites open with probability r AND edges open per class.
    bool joint_spans(const std::vector<double>& p, double r, std::uint64_t seed,
                     std::uint64_t trial) const {
        check_probs(p);
        return joint_spans_impl(&p, r, seed, trial);
    }

  private:
    static constexpr std::uint64_t kBondStream = 0x626f6e6473747231ull;
    static constexpr std::uint64_t kSiteStream = 0x7369746573747231ull;

    void check_probs(const std::vector<double>& p) const {
        if (static_cast<int>(p.size()) != num_classes_)
            throw std::invalid_argument("need one probability per edge class");
    }

    void attach_boundaries(UnionFind& uf, std::int32_t vb, std::int32_t vt,
                           const std::vector<char>* open_sites) const {
        for (int b : bottom_)
            if (!open_sites || (*open_sites)[static_cast<std::size_t>(b)]) uf.unite(vb, b);
        for (int t : top_)
            if (!open_sites || (*open_sites)[static_cast<std::size_t>(t)]) uf.unite(vt, t);
    }

    bool joint_spans_impl(const std::vector<double>* p, double r, std::uint64_t seed,
                          std::uint64_t trial) const {
        UnionFind uf(static_cast<std::size_t>(n_) + 2);
        const std::int32_t vb = n_, vt = n_ + 1;
        const std::uint64_t site_key = derive_key(seed ^ kSiteStream, trial);
        std::vector<char> open(static_cast<std::size_t>(n_));
        for (int s = 0; s < n_; ++s)
            open[static_cast<std::size_t>(s)] =
                counter_uniform(site_key, static_cast<std::uint64_t>(s)) < r;
        const std::uint64_t bond_key = derive_key(seed ^ kBondStream, trial);
        for (std::size_t e = 0; e < eu_.size(); ++e) {
            if (!open[static_cast<std::size_t>(eu_[e])] || !open[static_cast<std::size_t>(ev_[e])])
                continue;
            if (p && counter_uniform(bond_key, e) >= (*p)[static_cast<std::size_t>(ecls_[e])])
                continue;
            uf.unite(eu_[e], ev_[e]);
        }
        attach_boundaries(uf, vb, vt, &open);
        return uf.same(vb, vt);
    }

    int n_ = 0;
    int num_classes_ = 0;
    std::vector<std::int32_t> eu_, ev_, ecls_;
    std::vector<int> bottom_, top_;
};

// ---------------------------------------------------------------------------
// Trial batches.  Trials are indexed, so splitting them over threads cannot
// change any count.

enum class PercolationKind { Bond, Site };

namespace detail {

template <class TrialFn>
inline std::uint64_t count_true(std::uint64_t trials, int threads, TrialFn&& fn) {
    if (threads <= 1 || trials < 64) {
        std::uint64_t c = 0;
        for (std::uint64_t t = 0; t < trials; ++t) c += fn(t) ? 1 : 0;
        return c;
    }
    std::vector<std::uint64_t> partial(static_cast<std::size_t>(threads), 0);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            std::uint64_t c = 0;
            for (std::uint64_t t = static_cast<std::uint64_t>(w); t < trials;
                 t += static_cast<std::uint64_t>(threads))
                c += fn(t) ? 1 : 0;
            partial[static_cast<std::size_t>(w)] = c;
        });
    }
    for (auto& th : pool) th.join();
    std::uint64_t total = 0;
    for (std::uint64_t c : partial) total += c;
    return total;
}

} // namespace detail

// Fraction of trials that span at probability p.
inline double spanning_rate(const PercolationSystem& sys, PercolationKind kind, double p,
                            std::uint64_t trials, std::uint64_t seed, int threads = 1) {
    const std::uint64_t hits = detail::count_true(trials, threads, [&](std::uint64_t t) {
        return kind == PercolationKind::Bond ? sys.bond_spans(p, seed, t)
                                             : sys.site_spans(p, seed, t);
    });
    return static_cast<double>(hits) / static_cast<double>(trials);
}

struct CurvePoint {
    double p = 0;
    double rate = 0;
    std::uint64_t trials = 0;
    double sigma = 0; // binomial (Wald) standard error of the rate
};

inline double wald_sigma(double rate, std::uint64_t trials) {
    return trials == 0 ? 0.0
                       : std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

inline std::vector<CurvePoint> spanning_curve(const PercolationSystem& sys, PercolationKind kind,
                                              const std::vector<double>& probs,
                                              std::uint64_t trials, std::uint64_t seed,
                                              int threads = 1) {
    std::vector<CurvePoint> out;
    out.reserve(probs.size());
    for (double p : probs) {
        const double rate = spanning_rate(sys, kind, p, trials, seed, threads);
        out.push_back(CurvePoint{p, rate, trials, wald_sigma(rate, trials)});
    }
    return out;
}

// The same curve across several square patches (size x size cells); the
// crossing point of two sizes' curves brackets the threshold.  Each size
// draws from its own derived seed so adding sizes never perturbs the others.
struct FamilyCurvePoint {
    int size = 0;
    double p = 0;
    double rate = 0;
    std::uint64_t trials = 0;
    double sigma = 0;
};

inline std::vector<FamilyCurvePoint> spanning_curve_family(
    const UnitCell& cell, const std::vector<int>& sizes, Boundary boundary,
    PercolationKind kind, const std::vector<double>& probs, std::uint64_t trials,
    std::uint64_t seed, int threads = 1) {
    std::vector<FamilyCurvePoint> out;
    out.reserve(sizes.size() * probs.size());
    for (int L : sizes) {
        const LatticePatch patch = build_patch(cell, L, L, boundary, 1.0);
        const PercolationSystem sys(patch);
        const std::uint64_t size_seed = derive_key(seed, static_cast<std::uint64_t>(L));
        for (const CurvePoint& pt : spanning_curve(sys, kind, probs, trials, size_seed, threads))
            out.push_back(FamilyCurvePoint{L, pt.p, pt.rate, pt.trials, pt.sigma});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Threshold estimation: bisect each system size to the probability where
// half the trials span, then extrapolate the finite-size estimates linearly
// in 1/size to infinite size.

struct ThresholdSettings {
    std::vector<int> sizes = {32, 64, 128}; // cells per side
    std::uint64_t coarse_trials = 2000;
    std::uint64_t refine_trials = 10000;
    int coarse_iterations = 12;
    std::uint64_t seed = 1;
    Boundary boundary = Boundary::PeriodicHorizontal;
    int threads = 1;
};

struct ThresholdEstimate {
    double value = 0;       // extrapolated threshold
    double uncertainty = 0; // 1-sigma: crossing-point noise propagated through
                            // the extrapolation, plus the fit residual
    std::vector<int> sizes;
    std::vector<double> per_size;       // half-spanning probability at each size
    std::vector<double> per_size_sigma; // 1-sigma of each crossing point
};

namespace detail {

struct CrossingPoint {
    double p = 0;
    double sigma = 0;
};

inline CrossingPoint half_spanning_point(const PercolationSystem& sys, PercolationKind kind,
                                         const ThresholdSettings& s, std::uint64_t size_salt) {
    double lo = 0.0, hi = 1.0;
    const std::uint64_t seed = derive_key(s.seed, size_salt);
    for (int it = 0; it < s.coarse_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rate = spanning_rate(sys, kind, mid, s.coarse_trials, seed, s.threads);
        // Monotone coupling keeps the comparison consistent across steps.
        (rate < 0.5 ? lo : hi) = mid;
    }
    // Local refinement: measure the crossing on a short probe line and
    // interpolate R(p) = 1/2.  The quoted sigma combines the binomial noise
    // of the two probe rates (propagated through the interpolation) with the
    // residual width of the bisection bracket.
    const double mid = 0.5 * (lo + hi);
    const double bracket = 0.5 * (hi - lo);
    const double delta = std::max(2.0 * (hi - lo), 1e-4);
    const double pl = std::max(0.0, mid - delta);
    const double ph = std::min(1.0, mid + delta);
    const double rl = spanning_rate(sys, kind, pl, s.refine_trials, seed + 1, s.threads);
    const double rh = spanning_rate(sys, kind, ph, s.refine_trials, seed + 1, s.threads);
    if (rh <= rl) // flat within noise; keep the bisection point
        return CrossingPoint{mid, std::max(bracket, 1e-12)};
    const double w = ph - pl;
    const double d = rh - rl;
    const double frac = (0.5 - rl) / d;
    const double p = pl + std::clamp(frac, 0.0, 1.0) * w;
    const double vl = wald_sigma(rl, s.refine_trials);
    const double vh = wald_sigma(rh, s.refine_trials);
    const double stat = std::hypot((0.5 - rh) * vl, (0.5 - rl) * vh) * w / (d * d);
    return CrossingPoint{p, std::max(std::hypot(stat, bracket), 1e-12)};
}

} // namespace detail

inline ThresholdEstimate estimate_threshold(const UnitCell& cell, PercolationKind kind,
                                            const ThresholdSettings& settings) {
    if (settings.sizes.empty()) throw std::invalid_argument("need at least one system size");
    ThresholdEstimate est;
    est.sizes = settings.sizes;
    for (std::size_t i = 0; i < settings.sizes.size(); ++i) {
        const int L = settings.sizes[i];
        const LatticePatch patch = build_patch(cell, L, L, settings.boundary, 1.0);
        const PercolationSystem sys(patch);
        const detail::CrossingPoint cp =
            detail::half_spanning_point(sys, kind, settings, static_cast<std::uint64_t>(L));
        est.per_size.push_back(cp.p);
        est.per_size_sigma.push_back(cp.sigma);
    }
    if (est.per_size.size() == 1) {
        est.value = est.per_size[0];
        est.uncertainty = est.per_size_sigma[0];
        return est;
    }
    // Least-squares line p_c(L) = a + b / L; report the intercept.  Its
    // 1-sigma combines the crossing-point sigmas (propagated through the
    // intercept weights) with the scatter of the points about the line.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(est.per_size.size());
    for (std::size_t i = 0; i < est.per_size.size(); ++i) {
        const double x = 1.0 / settings.sizes[i];
        const double y = est.per_size[i];
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0) {
        est.value = sy / n;
        est.uncertainty = est.per_size_sigma[0];
        return est;
    }
    est.value = (sy * sxx - sx * sxy) / denom;
    const double slope = (n * sxy - sx * sy) / denom;
    double var = 0, ss_resid = 0;
    for (std::size_t i = 0; i < est.per_size.size(); ++i) {
        const double x = 1.0 / settings.sizes[i];
        const double weight = (sxx - sx * x) / denom;
        var += weight * weight * est.per_size_sigma[i] * est.per_size_sigma[i];
        const double r = est.per_size[i] - (est.value + slope * x);
        ss_resid += r * r;
    }
    const double dof = n - 2;
    const double resid = dof > 0 ? std::sqrt(ss_resid / dof) : 0.0;
    est.uncertainty = std::max(std::hypot(std::sqrt(var), resid), 1e-12);
    return est;
}

// ---------------------------------------------------------------------------
// Exact spanning probability by subset enumeration; oracle for small
// systems (the 2^E sum is exact, so Monte Carlo estimates must agree within
// statistical error).

inline double exact_bond_spanning_probability(const LatticePatch& patch,
                                              const std::vector<double>& p) {
    const int E = static_cast<int>(patch.graph.edges.size());
    if (E > 24) throw std::invalid_argument("exact enumeration limited to 24 edges");
    const int n = static_cast<int>(patch.graph.nodes.size());
    double total = 0;
    for (std::uint64_t mask = 0; mask < (1ull << E); ++mask) {
        double w = 1;
        UnionFind uf(static_cast<std::size_t>(n) + 2);
        const std::int32_t vb = n, vt = n + 1;
        for (int e = 0; e < E; ++e) {
            const GraphEdge& ge = patch.graph.edges[static_cast<std::size_t>(e)];
            const double pe = p[static_cast<std::size_t>(ge.cls)];
            if (mask & (1ull << e)) {
                w *= pe;
                uf.unite(ge.u, ge.v);
            } else {
                w *= 1 - pe;
            }
        }
        if (w == 0) continue;
        for (int b : patch.bottom) uf.unite(vb, b);
        for (int t : patch.top) uf.unite(vt, t);
        if (uf.same(vb, vt)) total += w;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Robustness of a lattice network against photon loss (eta per photon, so
// eta^2 per link), heralded link failure q, and node reliability r: the
// network stays long-range connected iff the surviving-link probability
// clears the bond threshold and the node reliability clears the site
// threshold.  The margin is the smaller of the two slacks.

struct RobustnessInput {
    double eta = 1; // single-photon transmissivity of each half-link
    double q = 0;   // extra independent link failure probability
    double r = 1;   // probability a node is operational
};

struct RobustnessReport {
    double link_probability = 0; // eta^2 (1 - q)
    double bond_margin = 0;      // link_probability - bond threshold
    double site_margin = 0;      // r - site threshold
    double margin = 0;           // min of the applicable margins
    bool robust = false;
};

inline RobustnessReport robustness(double bond_threshold, double site_threshold,
                                   const RobustnessInput& in) {
    RobustnessReport rep;
    rep.link_probability = in.eta * in.eta * (1.0 - in.q);
    rep.bond_margin = rep.link_probability - bond_threshold;
    rep.site_margin = in.r - site_threshold;
    const bool has_site = !std::isnan(site_threshold);
    rep.margin = has_site ? std::min(rep.bond_margin, rep.site_margin) : rep.bond_margin;
    rep.robust = rep.bond_margin >= 0 && (!has_site || rep.site_margin >= 0);
    return rep;
}

} // namespace entnet
