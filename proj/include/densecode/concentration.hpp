#pragma once

#include "densecode/linalg.hpp"
#include "densecode/random.hpp"

#include <vector>

namespace densecode::concentration {

// (8 pi^2 ln 2)^(-1), the constant in the tail-bound exponent
double exponent_constant();

// beta = d_B / (r * d_A * ln 2)
double beta_term(int r, int d_A, int d_B);

// Tail probability bound for Pr(S(Tr_A U phi U^+) < log d_B - alpha - beta),
// with exponentials base 2. The general-r bound circulates in two exponent
// conventions differing by a factor 4; both are exposed and reports say
// which one they quote. rank_one_form is the r = 1 bound
// 2^(-(d_A d_B - 1) alpha^2 C / (log d_B)^2) (NaN when r > 1).
struct TailBound {
    double statement_form;
    double derivation_form;
    double rank_one_form;
};

TailBound tail_bound(int r, int d_A, int d_B, double alpha);

struct ConcentrationConfig {
    int r = 1;
    int d_A = 0;
    int d_B = 0;
    double alpha = 0.0;
    int trials = 1;
    Seed seed;
    int jobs = 1;
};

struct ConcentrationReport {
    ConcentrationConfig config;
    std::vector<double> deficits;  // sorted ascending
    double beta = 0.0;
    double threshold = 0.0;        // alpha + beta
    double mean_deficit = 0.0;
    int violation_count = 0;       // deficits exceeding the threshold
    TailBound bound{};
    // histogram of deficits in 0.01-bit bins: (bin start, count), sorted
    std::vector<std::pair<double, int>> histogram;
};

// Per trial: conjugate the fixed rank-r state (projector onto the first r
// basis vectors over r) by a Haar unitary on d_A * d_B, trace out A, record
// log d_B - S. Only the first r columns of the unitary enter the conjugated
// state, so the trial draws exactly those columns.
ConcentrationReport sample_entropy_deficits(const ConcentrationConfig& config);

// Draws a Haar purification of a rank-r state on `space`, builds the cyclic
// shift on its eigenvectors, and returns the Frobenius norm of
// Pi/r - (1/r) sum_k sigma^k tau sigma^(-k). Degenerate spectra retry with
// a fresh stream.
double cyclic_decomposition_check(int r, const HilbertSpace& space, Seed seed);

}  // namespace densecode::concentration
