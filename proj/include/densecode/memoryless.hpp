#pragma once

#include "densecode/protocol.hpp"
#include "densecode/states.hpp"

#include <vector>

namespace densecode::memoryless {

// Exact enumeration refuses above this many basis strings.
constexpr std::int64_t kEnumerationCap = 1'000'000;

// Memoryless source: state i on dims (d_A1, d_S) emitted with probability
// probs[i].
struct SourceEnsemble {
    std::vector<PureState> states;
    std::vector<double> probs;

    SourceEnsemble(std::vector<PureState> s, std::vector<double> p);

    int m() const { return static_cast<int>(states.size()); }
    int d_A1() const { return states.front().space().dim(0); }
    int d_S() const { return states.front().space().dim(1); }

    // average S-side state sum_i p_i Tr_A1 phi_i
    DensityOperator average_source_state() const;
};

struct TypicalParams {
    int n = 1;
    double delta = 0.0;
    double epsilon = 0.0;

    // delta = m sqrt(2 d_S / epsilon), the retention-guarantee choice
    static TypicalParams from_epsilon(const SourceEnsemble& ens, int n, double epsilon);
};

// All strings x^n with |N(x|x^n) - n q_x| <= delta sqrt(n) sqrt(q_x (1-q_x))
// for every letter x, in lexicographic order. Exact enumeration, desk scale.
std::vector<std::vector<int>> typical_sequences(const std::vector<double>& q, int n, double delta);

bool is_typical(const std::vector<double>& q, const std::vector<int>& string, double delta);

// Projector onto the typical eigenvalue strings of rho^(x)n. Eigenvalues
// equal within 1e-10 are merged into one spectral letter first.
ComplexOperator typical_projector(const DensityOperator& rho, int n, double delta);

// Blockwise typical projector on the position sets I_i = {j : i_j = i},
// built per source letter from phi_i's S-reduction.
ComplexOperator conditional_typical_projector(const SourceEnsemble& ens,
                                              const std::vector<int>& index_string, double delta);

struct BlockState {
    std::vector<int> index_string;
    PureState sigma;             // on dims (d_A1^n as one factor, d_S x n)
    double retained_weight = 0.0;  // squared norm before renormalization
};

// Applies the conditional-typical then typical projector to the S side of
// the block state phi_{i^n} and renormalizes.
BlockState truncated_block_state(const SourceEnsemble& ens, const std::vector<int>& index_string,
                                 const TypicalParams& params);

struct RatePair {
    double qubit_rate = 0.0;  // (S - S_bar) / 2
    double ebit_rate = 0.0;   // (S + S_bar) / 2
    double source_entropy = 0.0;        // S(E_S)
    double mean_state_entropy = 0.0;    // S_bar(E_S)
};

RatePair rate_pair(const SourceEnsemble& ens);

struct BlockProtocolConfig {
    double kappa = 0.2;
    int candidates = 8;
    int probes = 32;
    int jobs = 1;
    // 0 = exhaustive enumeration of all m^n strings, weighted by p;
    // otherwise that many strings sampled from p^n
    int trials = 0;
};

struct BlockRecord {
    std::vector<int> index_string;
    double probability = 0.0;
    bool typical = false;
    double retained_weight = 0.0;
    double lambda_max = 0.0;
    double trace_distance = 0.0;   // ||phi - sigma||_1
    double fidelity = 0.0;         // 0 for atypical blocks
};

struct MemorylessReport {
    TypicalParams params;
    int m = 0;
    int d_S = 0;
    double c_constant = 0.0;  // log2 d_S, the declared typicality constant

    std::int64_t typical_rank = 0;             // rank of the typical projector
    double log_rank_bound = 0.0;               // n S + c delta sqrt(n)
    double lambda_max_plan = 0.0;              // max measured over typical blocks
    double lambda_max_bound = 0.0;             // 2^(-n S_bar + c delta sqrt(n)) / (1 - eps)
    double operator_inequality_margin = 0.0;   // bound - (1-eps) * max lambda, >= 0 when the bound holds

    ProtocolPlan plan;
    RatePair rates;

    std::vector<BlockRecord> blocks;           // sorted by index string
    double atypical_mass = 0.0;
    double atypical_mass_bound = 0.0;          // m / delta^2
    double mean_fidelity = 0.0;                // weighted by p, atypical count as 0
    double min_retained_weight = 1.0;          // over typical blocks
    double max_trace_distance = 0.0;           // over typical blocks
};

// End-to-end block runs: truncate every (enumerated or sampled) block,
// compress onto the typical support, and feed the universal protocol with
// d_S = rank and lambda_max = the measured maximum over blocks.
MemorylessReport run_block_protocol(const SourceEnsemble& ens, const TypicalParams& params,
                                    const BlockProtocolConfig& config, Seed seed);

}  // namespace densecode::memoryless
