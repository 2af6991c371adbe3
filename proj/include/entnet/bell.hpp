#pragma once

// Bell-pair bookkeeping for polarization qubits.
//
// Labels: the four Bell states are indexed by two bits (a, b) via
//     |B(a,b)> = (X^a Z^b  ⊗  1) |psi+>,        |psi+> = (|HV> + |VH>)/√2,
// so (0,0) is |psi+> itself.  A Bell measurement between two pairs labelled
// (a1,b1) and (a2,b2) that reports outcome (a3,b3) leaves the end qubits in
// the state labelled (a1^a2^a3, b1^b2^b3); each of the four outcomes is
// equally likely.  The XOR rule is what the simulator uses per swap; the
// dense linear-algebra path below recomputes the same physics from explicit
// amplitudes and serves as the oracle the tests check the rule against.

#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace entnet {

struct BellLabel {
    std::uint8_t a = 0; // X power
    std::uint8_t b = 0; // Z power
    friend bool operator==(const BellLabel&, const BellLabel&) = default;
};

inline BellLabel swap_update(BellLabel left, BellLabel right, BellLabel outcome) {
    return BellLabel{static_cast<std::uint8_t>(left.a ^ right.a ^ outcome.a),
                     static_cast<std::uint8_t>(left.b ^ right.b ^ outcome.b)};
}

// Frame correction that maps |B(a,b)> back to |psi+>: apply Z^z X^x to one
// qubit of the pair (global phase irrelevant).
struct PauliCorrection {
    std::uint8_t x = 0;
    std::uint8_t z = 0;
    friend bool operator==(const PauliCorrection&, const PauliCorrection&) = default;
};

// Fold the measurement outcomes of a repeater chain whose sources all emit
// |psi+>: the residual label is the component-wise XOR.
inline PauliCorrection chain_correction(const std::vector<BellLabel>& outcomes) {
    PauliCorrection c;
    for (const BellLabel& o : outcomes) {
        c.x ^= o.a;
        c.z ^= o.b;
    }
    return c;
}

inline BellLabel apply_correction(BellLabel label, PauliCorrection c) {
    return BellLabel{static_cast<std::uint8_t>(label.a ^ c.x),
                     static_cast<std::uint8_t>(label.b ^ c.z)};
}

// ---------------------------------------------------------------------------
// Dense amplitudes.  Basis order for a pair: HH, HV, VH, VV with H=0, V=1;
// the first letter is the qubit the label Paulis act on.

using cplx = std::complex<double>;

struct DenseTwoQubitState {
    std::array<cplx, 4> amp{};

    double norm2() const {
        double s = 0;
        for (const cplx& c : amp) s += std::norm(c);
        return s;
    }
};

// |<phi|psi>|^2 normalized by both norms: 1 means equal up to global phase.
inline double fidelity(const DenseTwoQubitState& phi, const DenseTwoQubitState& psi) {
    cplx ov = 0;
    for (int i = 0; i < 4; ++i) ov += std::conj(phi.amp[i]) * psi.amp[i];
    const double denom = phi.norm2() * psi.norm2();
    return denom > 0 ? std::norm(ov) / denom : 0.0;
}

inline DenseTwoQubitState bell_state(BellLabel l) {
    const double r = 1.0 / std::sqrt(2.0);
    DenseTwoQubitState s;
    s.amp[1] = r; // |HV>
    s.amp[2] = r; // |VH>
    // Z^b then X^a on the first qubit.
    if (l.b) {
        for (int i = 0; i < 4; ++i)
            if (i & 2) s.amp[i] = -s.amp[i]; // first qubit V picks up -1
    }
    if (l.a) {
        std::swap(s.amp[0], s.amp[2]);
        std::swap(s.amp[1], s.amp[3]);
    }
    return s;
}

// Apply Z^z X^x to the first qubit of a pair (the frame correction).
inline DenseTwoQubitState apply_correction(const DenseTwoQubitState& in, PauliCorrection c) {
    DenseTwoQubitState s = in;
    if (c.x) {
        std::swap(s.amp[0], s.amp[2]);
        std::swap(s.amp[1], s.amp[3]);
    }
    if (c.z) {
        for (int i = 0; i < 4; ++i)
            if (i & 2) s.amp[i] = -s.amp[i];
    }
    return s;
}

struct BellMeasurementResult {
    double probability = 0;       // chance of the requested outcome (1/4 ideally)
    DenseTwoQubitState post;      // normalized state of the two end qubits
    BellLabel label;              // closest Bell label of `post`
    double label_fidelity = 0;    // fidelity against that label's state
};

// Oracle path: sixteen four-qubit amplitudes, explicit projection.  Build
// |B(l1)> on qubits (1,2) and |B(l2)> on qubits (3,4), project qubits (2,3)
// onto <B(outcome)|, and read off the state of qubits (1,4).  Index order is
// q1*8 + q2*4 + q3*2 + q4.
inline BellMeasurementResult bell_oracle(BellLabel l1, BellLabel l2, BellLabel outcome) {
    const DenseTwoQubitState s1 = bell_state(l1);
    const DenseTwoQubitState s2 = bell_state(l2);
    std::array<cplx, 16> joint{};
    for (int q1 = 0; q1 < 2; ++q1)
        for (int q2 = 0; q2 < 2; ++q2)
            for (int q3 = 0; q3 < 2; ++q3)
                for (int q4 = 0; q4 < 2; ++q4)
                    joint[q1 * 8 + q2 * 4 + q3 * 2 + q4] =
                        s1.amp[q1 * 2 + q2] * s2.amp[q3 * 2 + q4];

    const DenseTwoQubitState proj = bell_state(outcome);
    BellMeasurementResult r;
    DenseTwoQubitState post; // unnormalized
    for (int q1 = 0; q1 < 2; ++q1)
        for (int q4 = 0; q4 < 2; ++q4) {
            cplx acc = 0;
            for (int q2 = 0; q2 < 2; ++q2)
                for (int q3 = 0; q3 < 2; ++q3)
                    acc += std::conj(proj.amp[q2 * 2 + q3]) *
                           joint[q1 * 8 + q2 * 4 + q3 * 2 + q4];
            post.amp[q1 * 2 + q4] = acc;
        }

    r.probability = post.norm2();
    if (r.probability > 0) {
        const double inv = 1.0 / std::sqrt(r.probability);
        for (cplx& c : post.amp) c *= inv;
    }
    r.post = post;

    // Identify the closest Bell label.
    r.label_fidelity = -1;
    for (std::uint8_t a = 0; a < 2; ++a)
        for (std::uint8_t b = 0; b < 2; ++b) {
            const BellLabel cand{a, b};
            const double f = fidelity(bell_state(cand), post);
            if (f > r.label_fidelity) {
                r.label_fidelity = f;
                r.label = cand;
            }
        }
    return r;
}

} // namespace entnet
