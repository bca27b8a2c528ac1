#pragma once

#include "densecode/linalg.hpp"
#include "densecode/random.hpp"
#include "densecode/states.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace densecode {

struct ResourceLedger {
    double qubits = 0.0;
    double ebits = 0.0;
    double cbits = 0.0;
};

// Derived parameter set of one protocol instance. All logs base 2.
//
// leading_qubits / leading_ebits are the half-sum/half-difference terms
// (log d_S +/- log lambda_max)/2. The integer dims d_A2, d_B are the
// smallest integers whose logs reach those targets, with d_B bumped until
// d_A2 * d_B >= d_S. padded_d_A2 / padded_d_B are the (much larger) dims
// that satisfy the covering-net feasibility inequality on d_S at this
// kappa; they are carried as metadata, never simulated.
struct ProtocolPlan {
    int d_S = 0;
    double lambda_max = 1.0;
    double kappa = 1.0;

    double epsilon = 0.0;       // kappa^2 / (2 ln 2)
    double alpha = 0.0;         // epsilon / 4
    double beta = 0.0;          // = alpha
    double gamma = 0.0;         // alpha^2 / (4 log d_B)
    double delta_fannes = 0.0;  // gamma * log d_B

    int d_A1prime = 1;          // floor(1 / lambda_max)
    std::int64_t d_A2 = 1;
    std::int64_t d_B = 1;
    bool dims_overridden = false;

    double leading_qubits = 0.0;
    double leading_ebits = 0.0;
    double qubits = 0.0;        // log2 d_A2
    double ebits = 0.0;         // log2 d_B
    double overhead_bits = 0.0; // qubits + ebits - log2 d_S, >= 0

    double beta_at_dims = 0.0;  // d_B / (2 ln 2 d_A1prime d_A2) for the integer dims
    double log_net_size = 0.0;  // 2 d_A1prime d_S log2(5 / gamma)

    std::int64_t padded_d_A2 = 0;
    std::int64_t padded_d_B = 0;
    bool desk_dims_feasible = false;

    ResourceLedger ledger() const { return ResourceLedger{qubits, ebits, 0.0}; }
};

ProtocolPlan plan_resources(int d_S, double lambda_max, double kappa);

// Same derivation with explicitly chosen integer dims (experiments sweep
// these); requires d_A2 * d_B >= d_S.
ProtocolPlan plan_with_dims(int d_S, double lambda_max, double kappa, std::int64_t d_A2, std::int64_t d_B);

std::string format_plan_table(const std::vector<ProtocolPlan>& plans);

struct CouplingUnitary {
    ComplexOperator U;            // on dims (d_A2, d_B)
    double probe_min_entropy = 0.0;
    int candidates = 0;
    int probes = 0;
    Seed seed;
    int chosen_index = 0;
};

// Samples `candidates` Haar unitaries on A2 (x) B and scores each by the
// minimum, over `probes` rank-d_A1prime maximally-mixed-on-support probe
// states embedded in S, of S(Tr_A2 U psi_S U^+). Returns the argmax-of-min
// candidate; ties break toward the lower candidate index. The probe set is
// shared across candidates, candidates evaluate in parallel on their own
// streams, and the result never depends on the job count.
CouplingUnitary search_coupling_unitary(const ProtocolPlan& plan, int candidates, int probes, Seed seed,
                                        int jobs = 1);

// The identity on A2 (x) B packaged as a coupling, scored on the same probes.
CouplingUnitary identity_coupling(const ProtocolPlan& plan, int probes, Seed seed);

struct EncodeResult {
    Matrix isometry;            // (d_A1 * d_A2) x d_B, V^+ V = I
    HilbertSpace domain;        // (d_B)
    HilbertSpace codomain;      // (d_A1, d_A2)
    double predicted_overlap = 0.0;   // squared overlap equals F(psi'_B, I/d_B)
    double input_lambda_max = 0.0;
    PureState psi_prime;        // (1_A1 (x) U) applied to the embedded input
};

// Local isometry V with (V (x) 1_B) |Phi_dB> equal to the closest maximally
// entangled purification of psi' across the (A1 A2 | B) cut.
//
// lambda_gate overrides the lambda_max admission threshold (plan.lambda_max
// by default); resource accounting is untouched by the override.
EncodeResult encode(const PureState& psi, const CouplingUnitary& coupling, const ProtocolPlan& plan,
                    std::optional<double> lambda_gate = std::nullopt);

struct ProtocolTranscript {
    ProtocolPlan plan;
    std::vector<int> input_dims;
    double input_lambda_max = 0.0;

    double predicted_overlap = 0.0;
    double s_psi_prime_b = 0.0;              // S(psi'_B) in bits
    double trace_dist_to_uniform = 0.0;      // ||psi'_B - I/d_B||_1
    double pinsker_rhs = 0.0;                // sqrt(2 ln 2 (log d_B - S(psi'_B)))
    double fidelity_pre_projection = 0.0;    // |<psi_hat|(1 (x) U^+)|Phi_psi>|^2
    double projection_leakage = 0.0;         // norm lost to the projection onto S
    double fidelity_achieved = 0.0;

    ResourceLedger ledger;
    bool teleported = false;

    PureState output;                        // renormalized state on (d_A1, d_S)
};

// Full simulation of the four protocol steps: share Phi_dB, apply V_psi,
// move A2, apply U^+, project onto the embedded S and renormalize.
ProtocolTranscript run_protocol(const PureState& psi, const CouplingUnitary& coupling,
                                const ProtocolPlan& plan,
                                std::optional<double> lambda_gate = std::nullopt);

// Teleport the qubit channel: cbits = 2Q, ebits = Q + E, qubits = 0.
// Teleportation is simulated as exact, so fidelity fields are unchanged.
ProtocolTranscript to_remote_state_preparation(const ProtocolTranscript& transcript);

struct ProtocolExperimentConfig {
    int d_S = 8;
    double lambda_max = 0.5;
    double kappa = 0.2;
    int d_A1 = 0;  // 0: max(ceil(1/lambda_max), ceil(d_B / d_A2))
    std::optional<std::int64_t> d_A2;
    std::optional<std::int64_t> d_B;
    int candidates = 20;
    int probes = 100;
    int trials = 100;
    Seed seed;
    int jobs = 1;
    // optional extra d_B sweep over the same inputs; d_A2 follows each point
    // at the plan's leading-order ratio d_A2 = lambda_max * d_B
    std::vector<std::int64_t> sweep_d_B;
};

struct ProtocolTrialRecord {
    double lambda_max_measured = 0.0;
    double predicted_overlap = 0.0;
    double s_psi_prime_b = 0.0;
    double trace_dist_to_uniform = 0.0;
    double pinsker_rhs = 0.0;
    double projection_leakage = 0.0;
    double fidelity = 0.0;
};

struct ProtocolSweepPoint {
    std::int64_t d_B = 0;
    double mean_fidelity = 0.0;
    double min_fidelity = 0.0;
};

struct ProtocolExperimentReport {
    ProtocolExperimentConfig config;
    ProtocolPlan plan;
    double probe_min_entropy = 0.0;
    int chosen_candidate = 0;
    std::vector<ProtocolTrialRecord> trials;
    double mean_fidelity = 0.0;
    double min_fidelity = 0.0;
    double max_pinsker_violation = 0.0;  // max over trials of lhs - rhs
    std::vector<ProtocolSweepPoint> sweep;
};

// Plan, search the coupling, then run `trials` fresh bounded-Schmidt inputs.
ProtocolExperimentReport run_protocol_experiment(const ProtocolExperimentConfig& config);

}  // namespace densecode
