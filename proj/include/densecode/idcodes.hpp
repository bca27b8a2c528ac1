#pragma once

#include "densecode/protocol.hpp"
#include "densecode/states.hpp"

#include <vector>

namespace densecode::idcodes {

// Random-isometry identification code: encoder traces the a-factor out of
// V phi V^+, decoder is the support projector of the encoded net point
// nearest to the queried state (or of the queried state itself when the net
// is empty, the exact-decoder anchor).
struct QuantumIdCode {
    int d = 0;
    int a = 0;
    int d_C = 0;
    Matrix V;  // (d * a) x d_C isometry, d-factor first in row-major order
    std::vector<PureState> net;
    double lambda_target = 0.0;
    Seed seed;
};

QuantumIdCode build_id_code(int d, int a, int d_C, Seed seed, double lambda_target = 0.0);

// epsilon(phi) = Tr_a(V phi V^+), a state on C^d.
DensityOperator encode_state(const QuantumIdCode& code, const PureState& phi);

// V|phi> on dims (d, a): the canonical purification of epsilon(phi).
PureState encoded_purification(const QuantumIdCode& code, const PureState& phi);

// D_psi = support projector of the encoded decoder point for psi.
ComplexOperator decoder_projector(const QuantumIdCode& code, const PureState& psi);

// |Tr(phi psi) - Tr(epsilon(phi) D_psi)|
double id_error(const QuantumIdCode& code, const PureState& phi, const PureState& psi);

struct IdErrorEstimate {
    int pairs = 0;
    double max_error = 0.0;
    double mean_error = 0.0;
};

// Monte Carlo estimate over Haar pairs (phi, psi) on C^d_C.
IdErrorEstimate estimate_id_error(const QuantumIdCode& code, int pairs, Seed seed);

struct IdSdcResult {
    double preparation_fidelity = 0.0;  // |<Phi'|V phi>|^2
    double id_error_direct = 0.0;       // with epsilon(phi) itself
    double id_error_prepared = 0.0;     // with the protocol-prepared state
    double triangle_bound = 0.0;        // direct + 2 sqrt(1 - preparation fidelity)
    double lambda_measured = 0.0;       // largest eigenvalue of epsilon(phi)
    bool lambda_gate_relaxed = false;   // measured exceeded the plan's 1/a target
    ResourceLedger ledger;
};

// Prepares the purification of epsilon(phi) through the superdense-coding
// protocol (a-factor in the A1 role, d-factor in the S role) and reports the
// end-to-end identification error against psi.
//
// The plan carries lambda_max = 1/a for the resource accounting; measured
// spectra of epsilon(phi) sit above 1/a at small d, so the run admits the
// state with a relaxed gate and records that it did.
IdSdcResult id_code_via_sdc(const QuantumIdCode& code, const PureState& phi, const PureState& psi,
                            const ProtocolPlan& plan, const CouplingUnitary& coupling);

}  // namespace densecode::idcodes
