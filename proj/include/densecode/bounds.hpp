#pragma once

#include "densecode/states.hpp"

#include <vector>

namespace densecode::bounds {

// eta(t) = -t log2 t on [0, 1], with eta(0) = 0 by continuity.
double eta(double t);

struct BoundInputs {
    int d_S = 2;
    double lambda_max = 1.0;
    double fidelity = 1.0;  // must be >= 1/2

    void validate() const;
};

// Remote state preparation cbit lower bound:
//   raw     = log d_S + log lambda_max + log F - 2
//   sharper = log(F * floor(d_S / a)),  a = ceil(1 / lambda_max)
// Values are clamped at 0 and flagged vacuous when clamping bites.
struct CbitBound {
    double value;
    double raw;
    double sharper;
    double sharper_raw;
    bool vacuous;
};

CbitBound rsp_cbit_lower_bound(const BoundInputs& in);

// RSP ebit lower bound: log d_S - 18 sqrt(1-F) log d_S - 2 eta(2 sqrt(1-F)).
// The eta term is evaluated as the raw formula -t log t; for F < 3/4 its
// argument exceeds 1, where the 18 sqrt(1-F) term already drives the raw
// value negative and the clamp absorbs everything.
struct EbitBound {
    double value;
    double raw;
    bool vacuous;
};

EbitBound rsp_ebit_lower_bound(const BoundInputs& in);

// Superdense-coding qubit lower bound and the qubit+ebit sum bound.
struct QubitBound {
    double value;      // max(0, (log d_S + log lambda_max + log F)/2 - 1)
    double raw;
    double sum_value;  // max(0, ebit-style sum bound)
    double sum_raw;
    bool vacuous;
    bool sum_vacuous;
};

QubitBound sdc_qubit_lower_bound(const BoundInputs& in);

// gamma log2 d + eta(gamma); valid for trace-norm distance gamma <= 1/4.
double fannes_bound(double trace_distance, int d);

// log2 of the covering-net size bound (5/gamma)^(2 d_A1prime d_S).
double net_size_bound(double gamma, int d_A1prime, int d_S);

struct CausalityReport {
    int d_S = 0;
    int a = 0;          // ceil(1 / lambda_max)
    int messages = 0;   // floor(d_S / a)
    std::vector<double> decode_probabilities;
    double mean_decode_probability = 0.0;
    double guessing_baseline = 0.0;             // 1 / messages
    double implied_cbit_lower_bound = 0.0;      // log2(mean * messages), clamped at 0
};

// Block-state experiment behind the causality argument: message i maps to
// the block state sigma_i = (1/a) sum over its a basis vectors; the decoder
// measures the block projector Pi_i. Reports Tr(rho_i Pi_intended) per
// prepared state.
CausalityReport causality_block_experiment(int d_S, double lambda_max,
                                           const std::vector<DensityOperator>& prepared_states,
                                           const std::vector<int>& intended_index);

// The block state sigma_i (1-based message index), and its purification on
// dims (a, d_S); both are handy for feeding the experiment from a protocol.
DensityOperator causality_block_state(int d_S, double lambda_max, int message);
PureState causality_block_purification(int d_S, double lambda_max, int message);

}  // namespace densecode::bounds
