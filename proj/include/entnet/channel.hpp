#pragma once

// Photon-loss model for fiber links.
//
// A photon traversing length L of fiber survives with probability
// eta = exp(-alpha * L).  The default attenuation constant corresponds to
// 0.2 dB/km fiber (1/alpha = 22 km).  A pair source sits at the midpoint of
// the link it serves, so each photon travels half the endpoint-to-endpoint
// span and the pair as a whole survives with exp(-alpha * span).

#include <cmath>

namespace entnet {

struct FiberParams {
    double alpha_per_km = 1.0 / 22.0;
};

inline double transmissivity(double alpha_per_km, double length_km) {
    return std::exp(-alpha_per_km * length_km);
}

// Probability that both photons of a midpoint-source pair arrive, as a
// function of the distance between the pair's two endpoints.
inline double pair_survival(double alpha_per_km, double span_km) {
    return std::exp(-alpha_per_km * span_km);
}

// Capacity of direct transmission over a pure-loss channel of transmissivity
// eta, in ebits per use: -log2(1 - eta).  Repeater schemes are measured
// against this bound.
inline double repeaterless_bound(double eta) {
    return -std::log2(1.0 - eta);
}

// Arrival outcome probabilities for one pair when each photon independently
// survives with probability eta.
struct PairArrival {
    double both = 0;     // eta^2
    double one_lost = 0; // 2 eta (1 - eta)
    double both_lost = 0;
};

inline PairArrival pair_arrival(double eta) {
    PairArrival p;
    p.both = eta * eta;
    p.one_lost = 2.0 * eta * (1.0 - eta);
    p.both_lost = (1.0 - eta) * (1.0 - eta);
    return p;
}

// Weights of the failure components conditioned on the pair NOT arriving
// intact: each single-photon-lost term carries eta/(1+eta) and the
// both-lost term (1-eta)/(1+eta); the two single-loss terms together give
// 2 eta/(1+eta).
struct ConditionalLoss {
    double one_lost_each = 0; // eta/(1+eta), two such terms
    double both_lost = 0;     // (1-eta)/(1+eta)
};

inline ConditionalLoss conditional_loss(double eta) {
    ConditionalLoss c;
    c.one_lost_each = eta / (1.0 + eta);
    c.both_lost = (1.0 - eta) / (1.0 + eta);
    return c;
}

} // namespace entnet
