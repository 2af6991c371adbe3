#pragma once

// Inhomogeneous critical surfaces: for lattices with exactly known
// thresholds, the boundary of the percolating phase when each edge class i
// carries its own survival probability p_i is the zero set of a polynomial
// condition F(p) = 1, with F monotone nondecreasing in every p_i on [0,1]^k.
//
// Surfaces provided (class indexing matches the unit cells in tilings.hpp):
//   square:     F = p0 + p1
//   triangular: F = p0 + p1 + p2 - p0 p1 p2
//   honeycomb:  F = p0 p1 + p0 p2 + p1 p2 - p0 p1 p2
//   bow-tie:    F = p4 (1 - p0 p1)(1 - p3 p2')... expanded below; classes
//               0..3 are the four diagonals (0,1 one triangle, 2,3 the
//               other), class 4 the shared vertical.
//
// Setting every p_i = p recovers the homogeneous bond thresholds; setting
// p_i = x^{t_i} turns edge-length ratios t_i into a one-parameter family
// whose root gives the critical length scale of a lossy network, since a
// link of length t_i * l survives with exp(-alpha l)^{t_i}.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace entnet {

struct Monomial {
    double coeff = 1;
    std::vector<int> vars; // indices of the p's multiplied together
};

struct CriticalSurface {
    std::string lattice;
    int num_classes = 0;
    // Square, triangular, and honeycomb surfaces are exact results; the
    // bow-tie surface is a conjectured form, so downstream reports carry
    // this flag along.
    bool exact = false;
    std::vector<Monomial> terms;

    double evaluate(const std::vector<double>& p) const {
        if (static_cast<int>(p.size()) != num_classes)
            throw std::invalid_argument("need one probability per edge class");
        double f = 0;
        for (const Monomial& m : terms) {
            double t = m.coeff;
            for (int v : m.vars) t *= p[static_cast<std::size_t>(v)];
            f += t;
        }
        return f;
    }

    // Criticality condition is residual == 0; positive means percolating.
    double residual(const std::vector<double>& p) const { return evaluate(p) - 1.0; }
};

inline CriticalSurface square_surface() {
    CriticalSurface s;
    s.lattice = "4.4.4.4";
    s.num_classes = 2;
    s.exact = true;
    s.terms = {{1, {0}}, {1, {1}}};
    return s;
}

inline CriticalSurface triangular_surface() {
    CriticalSurface s;
    s.lattice = "3.3.3.3.3.3";
    s.num_classes = 3;
    s.exact = true;
    s.terms = {{1, {0}}, {1, {1}}, {1, {2}}, {-1, {0, 1, 2}}};
    return s;
}

inline CriticalSurface honeycomb_surface() {
    CriticalSurface s;
    s.lattice = "6.6.6";
    s.num_classes = 3;
    s.exact = true;
    s.terms = {{1, {0, 1}}, {1, {0, 2}}, {1, {1, 2}}, {-1, {0, 1, 2}}};
    return s;
}

// Bow-tie: vertical class 4 shared by two triangles with diagonal pairs
// (0,1) and (2,3):
//   F = p4 + sum of the six diagonal pair products
//         - the four diagonal triple products
//         - p0 p1 p4 - p2 p3 p4 + p0 p1 p2 p3 p4
// i.e. F = p4 (1 - p0 p1)(1 - p2 p3) + pairs - triples.
//
// Class-to-edge map: only the shared vertical edge is distinguished (it is
// class 4, matching the unit cell in tilings.hpp); F is symmetric under any
// relabeling of the four diagonals that keeps the per-triangle pairing, and
// also under swapping the two triangles, so the choice among the diagonals
// is immaterial.  This is the conjectured surface form (exact = false): its
// homogeneous root reproduces the cited 0.404518 threshold, but no proof of
// the full surface is known.
inline CriticalSurface bowtie_surface() {
    CriticalSurface s;
    s.lattice = "bowtie-1";
    s.num_classes = 5;
    s.exact = false;
    s.terms = {
        {1, {4}},
        {1, {0, 1}}, {1, {0, 2}}, {1, {0, 3}}, {1, {1, 2}}, {1, {1, 3}}, {1, {2, 3}},
        {-1, {0, 1, 2}}, {-1, {0, 1, 3}}, {-1, {0, 2, 3}}, {-1, {1, 2, 3}},
        {-1, {0, 1, 4}}, {-1, {2, 3, 4}},
        {1, {0, 1, 2, 3, 4}},
    };
    return s;
}

inline CriticalSurface surface_for(const std::string& lattice) {
    if (lattice == "square" || lattice == "4.4.4.4") return square_surface();
    if (lattice == "triangular" || lattice == "3.3.3.3.3.3") return triangular_surface();
    if (lattice == "honeycomb" || lattice == "hexagonal" || lattice == "6.6.6")
        return honeycomb_surface();
    if (lattice == "bowtie" || lattice == "bowtie-1" || lattice == "bowtie-I")
        return bowtie_surface();
    throw std::invalid_argument("no critical surface available for '" + lattice + "'");
}

inline bool has_surface(const std::string& lattice) {
    return lattice == "square" || lattice == "4.4.4.4" || lattice == "triangular" ||
           lattice == "3.3.3.3.3.3" || lattice == "honeycomb" || lattice == "hexagonal" ||
           lattice == "6.6.6" || lattice == "bowtie" || lattice == "bowtie-1" ||
           lattice == "bowtie-I";
}

// ---------------------------------------------------------------------------
// Solvers.  F is monotone along the rays used here and F(0) = 0 < 1 < F(1),
// so plain bisection is exact to double precision.

// Root of F(p, p, ..., p) = 1: the homogeneous bond threshold.
inline double solve_homogeneous(const CriticalSurface& s) {
    std::vector<double> p(static_cast<std::size_t>(s.num_classes));
    double lo = 0, hi = 1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        std::fill(p.begin(), p.end(), mid);
        (s.evaluate(p) < 1 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Root in x of F(x^{t_0}, ..., x^{t_{k-1}}) = 1 for nonnegative weights t_i
// (relative edge lengths).  Probabilities per class are x^{t_i} at the root.
inline double solve_scaled(const CriticalSurface& s, const std::vector<double>& t) {
    if (static_cast<int>(t.size()) != s.num_classes)
        throw std::invalid_argument("need one weight per edge class");
    for (double w : t)
        if (w < 0) throw std::invalid_argument("weights must be nonnegative");
    std::vector<double> p(static_cast<std::size_t>(s.num_classes));
    double lo = 0, hi = 1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::pow(mid, t[i]);
        (s.evaluate(p) < 1 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Critical length profile of a lossy network whose class-i links have
// length t_i * scale: links survive with exp(-alpha * length), so the
// critical scale solves F(exp(-alpha scale)^{t_i}) = 1.
struct LengthProfile {
    double x = 0;                     // per-unit-length survival at criticality
    double scale = 0;                 // critical length multiplier (km)
    std::vector<double> lengths;      // per-class critical lengths t_i * scale
    std::vector<double> probabilities; // per-class survival x^{t_i}
};

inline LengthProfile critical_lengths(const CriticalSurface& s, const std::vector<double>& t,
                                      double alpha) {
    if (alpha < 0) throw std::invalid_argument("alpha must be nonnegative");
    LengthProfile prof;
    prof.x = solve_scaled(s, t);
    // Lossless fibers never push the network subcritical: the critical
    // scale is unbounded, reported as +infinity.
    prof.scale = alpha == 0 ? std::numeric_limits<double>::infinity()
                            : -std::log(prof.x) / alpha;
    for (double w : t) {
        prof.lengths.push_back(w == 0 ? 0.0 : w * prof.scale);
        prof.probabilities.push_back(std::pow(prof.x, w));
    }
    return prof;
}

// How long can the links of one class get while the others keep the given
// lengths?  Solve F = 1 for that class's survival probability alone.
struct ClassLengthLimit {
    enum class Status { Bounded, Unbounded, Infeasible };
    Status status = Status::Bounded;
    double max_length = 0;  // km; meaningful only when Bounded
    double p_required = 0;  // survival probability at the limit
};

inline ClassLengthLimit max_class_length(const CriticalSurface& s, int cls,
                                         const std::vector<double>& lengths, double alpha) {
    if (cls < 0 || cls >= s.num_classes) throw std::invalid_argument("class out of range");
    if (static_cast<int>(lengths.size()) != s.num_classes)
        throw std::invalid_argument("need one length per edge class");
    if (alpha <= 0) throw std::invalid_argument("alpha must be positive");

    std::vector<double> p(static_cast<std::size_t>(s.num_classes));
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = std::exp(-alpha * lengths[i]);

    ClassLengthLimit lim;
    p[static_cast<std::size_t>(cls)] = 0;
    if (s.evaluate(p) >= 1) {
        // The rest of the network already percolates on its own.
        lim.status = ClassLengthLimit::Status::Unbounded;
        return lim;
    }
    p[static_cast<std::size_t>(cls)] = 1;
    if (s.evaluate(p) < 1) {
        lim.status = ClassLengthLimit::Status::Infeasible;
        return lim;
    }
    double lo = 0, hi = 1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        p[static_cast<std::size_t>(cls)] = mid;
        (s.evaluate(p) < 1 ? lo : hi) = mid;
    }
    lim.p_required = 0.5 * (lo + hi);
    lim.max_length = -std::log(lim.p_required) / alpha;
    return lim;
}

} // namespace entnet
