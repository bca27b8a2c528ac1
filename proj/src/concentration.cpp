#include "densecode/concentration.hpp"

#include "densecode/parallel.hpp"
#include "densecode/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace densecode::concentration {

double exponent_constant() {
    return 1.0 / (8.0 * std::numbers::pi * std::numbers::pi * std::numbers::ln2);
}

double beta_term(int r, int d_A, int d_B) {
    if (r < 1 || d_A < 1 || d_B < 1) {
        throw std::invalid_argument("beta_term: arguments must be >= 1");
    }
    return static_cast<double>(d_B) / (std::numbers::ln2 * static_cast<double>(r) * static_cast<double>(d_A));
}

TailBound tail_bound(int r, int d_A, int d_B, double alpha) {
    if (r < 1 || d_A < 1 || d_B < 1) {
        throw std::invalid_argument("tail_bound: dimensions must be >= 1");
    }
    if (alpha <= 0.0) {
        throw std::invalid_argument("tail_bound: alpha must be positive");
    }
    const double c = exponent_constant();
    const double log_db = std::log2(static_cast<double>(d_B));
    const double log_db_sq = log_db * log_db;
    const double dims = static_cast<double>(r) * d_A * d_B;

    TailBound out;
    out.statement_form = 12.0 * r * std::exp2(-dims * alpha * alpha * c / log_db_sq);
    out.derivation_form = 12.0 * r * std::exp2(-dims * alpha * alpha * c / (4.0 * log_db_sq));
    out.rank_one_form = std::numeric_limits<double>::quiet_NaN();
    if (r == 1) {
        const double n = static_cast<double>(d_A) * d_B - 1.0;
        out.rank_one_form = std::exp2(-n * alpha * alpha * c / log_db_sq);
    }
    return out;
}

ConcentrationReport sample_entropy_deficits(const ConcentrationConfig& config) {
    if (config.d_B < 3 || config.d_B > config.d_A) {
        throw std::invalid_argument("sample_entropy_deficits: need 3 <= d_B <= d_A");
    }
    if (config.r < 1 || config.trials < 1) {
        throw std::invalid_argument("sample_entropy_deficits: r and trials must be >= 1");
    }
    const std::int64_t total = static_cast<std::int64_t>(config.d_A) * config.d_B;
    if (config.r > total) {
        throw std::invalid_argument("sample_entropy_deficits: r exceeds d_A * d_B");
    }

    const double log_db = std::log2(static_cast<double>(config.d_B));
    std::vector<double> deficits(static_cast<std::size_t>(config.trials), 0.0);

    parallel_for(config.trials, config.jobs, [&](int t) {
        const Seed trial_seed = config.seed.with_stream(config.seed.stream + static_cast<std::uint64_t>(t));
        const Matrix isometry = haar_isometry(static_cast<int>(total), config.r, trial_seed);
        Matrix state = (isometry * isometry.adjoint()) / static_cast<double>(config.r);
        ComplexOperator full(HilbertSpace({config.d_A, config.d_B}), std::move(state));
        ComplexOperator reduced = partial_trace(full, {1});
        Matrix sym = (reduced.mat + Matrix(reduced.mat.adjoint())) / 2.0;
        DensityOperator rho(ComplexOperator(reduced.space, std::move(sym)));
        deficits[static_cast<std::size_t>(t)] = log_db - von_neumann_entropy(rho);
    });

    ConcentrationReport report;
    report.config = config;
    report.beta = beta_term(config.r, config.d_A, config.d_B);
    report.threshold = config.alpha + report.beta;
    report.bound = tail_bound(config.r, config.d_A, config.d_B, config.alpha);

    double sum = 0.0;
    int violations = 0;
    for (double d : deficits) {
        sum += d;
        if (d > report.threshold) ++violations;
    }
    report.mean_deficit = sum / static_cast<double>(config.trials);
    report.violation_count = violations;

    std::sort(deficits.begin(), deficits.end());
    report.deficits = std::move(deficits);

    std::map<std::int64_t, int> bins;
    for (double d : report.deficits) {
        bins[static_cast<std::int64_t>(std::floor(d / 0.01))] += 1;
    }
    for (const auto& [bin, count] : bins) {
        report.histogram.emplace_back(static_cast<double>(bin) * 0.01, count);
    }
    return report;
}

double cyclic_decomposition_check(int r, const HilbertSpace& space, Seed seed) {
    if (r < 1 || r > space.total_dim()) {
        throw std::invalid_argument("cyclic_decomposition_check: need 1 <= r <= dim(AB)");
    }

    const std::int64_t d = space.total_dim();
    constexpr int kMaxAttempts = 16;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const Seed attempt_seed = seed.with_stream(seed.stream + static_cast<std::uint64_t>(attempt));

        std::vector<int> dims = space.dims();
        dims.push_back(r);
        PureState tau = haar_state(HilbertSpace(dims), attempt_seed);

        std::vector<int> ab_indices(space.dims().size());
        for (std::size_t k = 0; k < ab_indices.size(); ++k) ab_indices[k] = static_cast<int>(k);
        DensityOperator tau_ab = reduced_density(tau, ab_indices);

        Eigen::SelfAdjointEigenSolver<Matrix> solver(tau_ab.matrix());
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("cyclic_decomposition_check: eigendecomposition failed");
        }
        // eigenvalues ascending; the support is the top r of them
        bool degenerate = false;
        for (std::int64_t i = d - r; i < d; ++i) {
            const double gap = (i == 0) ? solver.eigenvalues()(i)
                                        : solver.eigenvalues()(i) - solver.eigenvalues()(i - 1);
            if (gap < 1e-12 || solver.eigenvalues()(i) < 1e-12) {
                degenerate = true;
                break;
            }
        }
        if (degenerate) continue;  // measure-zero event; fresh stream

        Matrix eigvecs(d, r);
        for (int j = 0; j < r; ++j) {
            eigvecs.col(j) = solver.eigenvectors().col(d - r + j);
        }

        Matrix projector = eigvecs * eigvecs.adjoint();
        Matrix shift = Matrix::Identity(d, d) - projector;
        for (int j = 0; j < r; ++j) {
            shift += eigvecs.col((j + 1) % r) * eigvecs.col(j).adjoint();
        }

        Matrix accum = Matrix::Zero(d, d);
        Matrix rotated = tau_ab.matrix();
        for (int k = 0; k < r; ++k) {
            accum += rotated;
            rotated = shift * rotated * shift.adjoint();
        }
        accum /= static_cast<double>(r);

        return (projector / static_cast<double>(r) - accum).norm();
    }
    throw std::runtime_error("cyclic_decomposition_check: repeated degenerate spectra");
}

}  // namespace densecode::concentration
