#include "densecode/memoryless.hpp"

#include "densecode/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

namespace densecode::memoryless {

namespace {

std::int64_t checked_power(std::int64_t base, int n, const char* what) {
    std::int64_t out = 1;
    for (int k = 0; k < n; ++k) {
        out *= base;
        if (out > kEnumerationCap) {
            throw std::length_error(std::string(what) + ": enumeration cap exceeded");
        }
    }
    return out;
}

// distinct spectral letters of rho, descending eigenvalue, zero cluster
// included; q = total weight, projector rank = multiplicity
struct SpectralLetters {
    std::vector<double> q;
    std::vector<Matrix> eigvec_blocks;  // d x mult, orthonormal columns
};

SpectralLetters spectral_letters(const DensityOperator& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix());
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectral_letters: eigendecomposition failed");
    }
    const std::int64_t d = rho.space().total_dim();

    // ascending from the solver; walk from the top, clustering within 1e-10
    SpectralLetters out;
    std::int64_t i = d - 1;
    while (i >= 0) {
        std::int64_t j = i;
        while (j - 1 >= 0 && std::abs(solver.eigenvalues()(j - 1) - solver.eigenvalues()(i)) < 1e-10) --j;
        const std::int64_t mult = i - j + 1;
        Matrix block(d, mult);
        double weight = 0.0;
        for (std::int64_t c = 0; c < mult; ++c) {
            block.col(c) = solver.eigenvectors().col(j + c);
            weight += std::max(0.0, solver.eigenvalues()(j + c));
        }
        out.q.push_back(weight);
        out.eigvec_blocks.push_back(std::move(block));
        i = j - 1;
    }
    return out;
}

Vector kron_columns(const std::vector<const Matrix*>& blocks, const std::vector<std::int64_t>& cols) {
    Vector acc = Vector::Ones(1);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto col = blocks[k]->col(cols[k]);
        Vector next(acc.size() * col.size());
        for (Eigen::Index a = 0; a < acc.size(); ++a) {
            next.segment(a * col.size(), col.size()) = acc(a) * col;
        }
        acc = std::move(next);
    }
    return acc;
}

// orthonormal basis of the typical subspace, one column per (typical string,
// per-position eigenvector choice), string-major order
Matrix typical_basis(const SpectralLetters& letters, int n, double delta, std::int64_t d_S) {
    const auto strings = typical_sequences(letters.q, n, delta);
    const std::int64_t dim = checked_power(d_S, n, "typical_basis");

    std::vector<Vector> columns;
    for (const auto& s : strings) {
        std::vector<const Matrix*> blocks;
        std::vector<std::int64_t> counts;
        for (int j : s) {
            blocks.push_back(&letters.eigvec_blocks[static_cast<std::size_t>(j)]);
            counts.push_back(letters.eigvec_blocks[static_cast<std::size_t>(j)].cols());
        }
        std::vector<std::int64_t> choice(s.size(), 0);
        while (true) {
            columns.push_back(kron_columns(blocks, choice));
            int k = static_cast<int>(choice.size()) - 1;
            while (k >= 0) {
                if (++choice[static_cast<std::size_t>(k)] < counts[static_cast<std::size_t>(k)]) break;
                choice[static_cast<std::size_t>(k)] = 0;
                --k;
            }
            if (k < 0) break;
        }
    }

    Matrix basis(dim, static_cast<std::int64_t>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        basis.col(static_cast<std::int64_t>(c)) = columns[c];
    }
    return basis;
}

// block state phi_{i^n} on dims (d_A1 repeated n, d_S repeated n)
ComplexVector block_product_state(const SourceEnsemble& ens, const std::vector<int>& s) {
    const int n = static_cast<int>(s.size());
    const std::int64_t d_A1 = ens.d_A1();
    const std::int64_t d_S = ens.d_S();
    checked_power(d_A1 * d_S, n, "block_product_state");
    const std::int64_t da = checked_power(d_A1, n, "block_product_state");
    const std::int64_t ds = checked_power(d_S, n, "block_product_state");

    Vector out(da * ds);
    std::vector<std::int64_t> adig(static_cast<std::size_t>(n)), sdig(static_cast<std::size_t>(n));
    for (std::int64_t a = 0; a < da; ++a) {
        std::int64_t rem = a;
        for (int k = n - 1; k >= 0; --k) {
            adig[static_cast<std::size_t>(k)] = rem % d_A1;
            rem /= d_A1;
        }
        for (std::int64_t sc = 0; sc < ds; ++sc) {
            rem = sc;
            for (int k = n - 1; k >= 0; --k) {
                sdig[static_cast<std::size_t>(k)] = rem % d_S;
                rem /= d_S;
            }
            Complex amp = 1.0;
            for (int k = 0; k < n; ++k) {
                amp *= ens.states[static_cast<std::size_t>(s[static_cast<std::size_t>(k)])].amplitudes()(
                    adig[static_cast<std::size_t>(k)] * d_S + sdig[static_cast<std::size_t>(k)]);
            }
            out(a * ds + sc) = amp;
        }
    }

    std::vector<int> dims;
    for (int k = 0; k < n; ++k) dims.push_back(static_cast<int>(d_A1));
    for (int k = 0; k < n; ++k) dims.push_back(static_cast<int>(d_S));
    return ComplexVector(HilbertSpace(dims), std::move(out));
}

std::vector<int> s_block_targets(int n) {
    std::vector<int> targets;
    for (int k = 0; k < n; ++k) targets.push_back(n + k);
    return targets;
}

}  // namespace

SourceEnsemble::SourceEnsemble(std::vector<PureState> s, std::vector<double> p)
    : states(std::move(s)), probs(std::move(p)) {
    if (states.empty() || states.size() != probs.size()) {
        throw std::invalid_argument("SourceEnsemble: need matching nonempty states and probabilities");
    }
    double sum = 0.0;
    for (double x : probs) {
        if (x < 0.0) throw std::invalid_argument("SourceEnsemble: negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        throw std::invalid_argument("SourceEnsemble: probabilities must sum to 1");
    }
    const HilbertSpace& space = states.front().space();
    if (space.subsystem_count() != 2) {
        throw std::invalid_argument("SourceEnsemble: states must live on dims (d_A1, d_S)");
    }
    for (const auto& st : states) {
        if (st.space() != space) {
            throw std::invalid_argument("SourceEnsemble: states live on different spaces");
        }
    }
}

DensityOperator SourceEnsemble::average_source_state() const {
    Matrix acc = Matrix::Zero(d_S(), d_S());
    for (std::size_t i = 0; i < states.size(); ++i) {
        acc += probs[i] * reduced_density(states[i], {1}).matrix();
    }
    acc = (acc + Matrix(acc.adjoint())) / 2.0;
    return DensityOperator(ComplexOperator(HilbertSpace({d_S()}), std::move(acc)));
}

TypicalParams TypicalParams::from_epsilon(const SourceEnsemble& ens, int n, double epsilon) {
    if (epsilon <= 0.0 || epsilon >= 1.0) {
        throw std::invalid_argument("TypicalParams: epsilon must lie in (0, 1)");
    }
    TypicalParams out;
    out.n = n;
    out.epsilon = epsilon;
    out.delta = ens.m() * std::sqrt(2.0 * ens.d_S() / epsilon);
    return out;
}

bool is_typical(const std::vector<double>& q, const std::vector<int>& string, double delta) {
    const int n = static_cast<int>(string.size());
    std::vector<int> counts(q.size(), 0);
    for (int x : string) {
        if (x < 0 || x >= static_cast<int>(q.size())) {
            throw std::invalid_argument("is_typical: letter out of range");
        }
        counts[static_cast<std::size_t>(x)] += 1;
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    for (std::size_t x = 0; x < q.size(); ++x) {
        const double spread = std::sqrt(std::max(0.0, q[x] * (1.0 - q[x])));
        const double dev = std::abs(counts[x] - n * q[x]);
        if (dev > delta * root_n * spread + 1e-9) return false;
    }
    return true;
}

std::vector<std::vector<int>> typical_sequences(const std::vector<double>& q, int n, double delta) {
    if (n < 1) throw std::invalid_argument("typical_sequences: n must be >= 1");
    if (q.empty()) throw std::invalid_argument("typical_sequences: empty alphabet");
    double sum = 0.0;
    for (double x : q) {
        if (x < 0.0) throw std::invalid_argument("typical_sequences: negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("typical_sequences: distribution must sum to 1");
    }
    checked_power(static_cast<std::int64_t>(q.size()), n, "typical_sequences");

    std::vector<std::vector<int>> out;
    std::vector<int> current(static_cast<std::size_t>(n), 0);
    while (true) {
        if (is_typical(q, current, delta)) out.push_back(current);
        int k = n - 1;
        while (k >= 0) {
            if (++current[static_cast<std::size_t>(k)] < static_cast<int>(q.size())) break;
            current[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return out;
}

ComplexOperator typical_projector(const DensityOperator& rho, int n, double delta) {
    const std::int64_t d = rho.space().total_dim();
    checked_power(d, n, "typical_projector");

    const SpectralLetters letters = spectral_letters(rho);
    const Matrix basis = typical_basis(letters, n, delta, d);

    std::vector<int> dims(static_cast<std::size_t>(n), static_cast<int>(d));
    Matrix proj = basis * basis.adjoint();
    return ComplexOperator(HilbertSpace(dims), std::move(proj));
}

ComplexOperator conditional_typical_projector(const SourceEnsemble& ens,
                                              const std::vector<int>& index_string, double delta) {
    const int n = static_cast<int>(index_string.size());
    if (n < 1) throw std::invalid_argument("conditional_typical_projector: empty index string");
    checked_power(ens.d_S(), n, "conditional_typical_projector");

    // positions grouped by source letter, ascending
    std::map<int, std::vector<int>> positions;
    for (int k = 0; k < n; ++k) {
        const int letter = index_string[static_cast<std::size_t>(k)];
        if (letter < 0 || letter >= ens.m()) {
            throw std::invalid_argument("conditional_typical_projector: index out of range");
        }
        positions[letter].push_back(k);
    }

    Matrix grouped = Matrix::Ones(1, 1);
    std::vector<int> grouped_positions;
    for (const auto& [letter, where] : positions) {
        DensityOperator phi_s = reduced_density(ens.states[static_cast<std::size_t>(letter)], {1});
        ComplexOperator local = typical_projector(phi_s, static_cast<int>(where.size()), delta);
        Matrix next(grouped.rows() * local.mat.rows(), grouped.cols() * local.mat.cols());
        for (Eigen::Index i = 0; i < grouped.rows(); ++i) {
            for (Eigen::Index j = 0; j < grouped.cols(); ++j) {
                next.block(i * local.mat.rows(), j * local.mat.cols(), local.mat.rows(), local.mat.cols()) =
                    grouped(i, j) * local.mat;
            }
        }
        grouped = std::move(next);
        grouped_positions.insert(grouped_positions.end(), where.begin(), where.end());
    }

    std::vector<int> dims(static_cast<std::size_t>(n), ens.d_S());
    ComplexOperator grouped_op(HilbertSpace(dims), std::move(grouped));

    // grouped slot g holds actual position grouped_positions[g]; send it back
    std::vector<int> perm(static_cast<std::size_t>(n), 0);
    for (int g = 0; g < n; ++g) {
        perm[static_cast<std::size_t>(grouped_positions[static_cast<std::size_t>(g)])] = g;
    }
    return permute_subsystems(grouped_op, perm);
}

BlockState truncated_block_state(const SourceEnsemble& ens, const std::vector<int>& index_string,
                                 const TypicalParams& params) {
    const int n = static_cast<int>(index_string.size());
    ComplexVector phi = block_product_state(ens, index_string);

    const ComplexOperator cond = conditional_typical_projector(ens, index_string, params.delta);
    const ComplexOperator typ = typical_projector(ens.average_source_state(), n, params.delta);

    ComplexVector truncated = apply_on_subsystems(phi, cond.mat, s_block_targets(n));
    truncated = apply_on_subsystems(truncated, typ.mat, s_block_targets(n));

    const double weight = truncated.vec.squaredNorm();
    if (weight <= 1e-12) {
        throw std::runtime_error("truncated_block_state: truncation annihilated the block state");
    }
    Vector v = truncated.vec / std::sqrt(weight);
    return BlockState{index_string, PureState(ComplexVector(truncated.space, std::move(v))), weight};
}

RatePair rate_pair(const SourceEnsemble& ens) {
    const double s_total = von_neumann_entropy(ens.average_source_state());
    double s_bar = 0.0;
    for (std::size_t i = 0; i < ens.states.size(); ++i) {
        s_bar += ens.probs[i] * von_neumann_entropy(reduced_density(ens.states[i], {1}));
    }
    return RatePair{0.5 * (s_total - s_bar), 0.5 * (s_total + s_bar), s_total, s_bar};
}

MemorylessReport run_block_protocol(const SourceEnsemble& ens, const TypicalParams& params,
                                    const BlockProtocolConfig& config, Seed seed) {
    const int n = params.n;
    const int m = ens.m();
    const std::int64_t d_s_block = checked_power(ens.d_S(), n, "run_block_protocol");
    checked_power(static_cast<std::int64_t>(ens.d_A1()) * ens.d_S(), n, "run_block_protocol");

    MemorylessReport report;
    report.params = params;
    report.m = m;
    report.d_S = ens.d_S();
    report.c_constant = std::log2(static_cast<double>(ens.d_S()));
    report.rates = rate_pair(ens);

    const DensityOperator rho = ens.average_source_state();
    const SpectralLetters letters = spectral_letters(rho);
    const Matrix basis = typical_basis(letters, n, params.delta, ens.d_S());
    const std::int64_t rank = basis.cols();
    report.typical_rank = rank;
    const double root_n = std::sqrt(static_cast<double>(n));
    report.log_rank_bound = n * report.rates.source_entropy + report.c_constant * params.delta * root_n;
    report.lambda_max_bound =
        std::exp2(-n * report.rates.mean_state_entropy + report.c_constant * params.delta * root_n) /
        (1.0 - params.epsilon);

    // the index strings to run: exhaustive with exact weights, or sampled
    std::vector<std::pair<std::vector<int>, double>> work;
    if (config.trials <= 0) {
        std::vector<int> current(static_cast<std::size_t>(n), 0);
        checked_power(m, n, "run_block_protocol");
        while (true) {
            double p = 1.0;
            for (int x : current) p *= ens.probs[static_cast<std::size_t>(x)];
            work.emplace_back(current, p);
            int k = n - 1;
            while (k >= 0) {
                if (++current[static_cast<std::size_t>(k)] < m) break;
                current[static_cast<std::size_t>(k)] = 0;
                --k;
            }
            if (k < 0) break;
        }
    } else {
        Prng rng(seed.with_stream(seed.stream + 31ULL));
        const double w = 1.0 / static_cast<double>(config.trials);
        for (int t = 0; t < config.trials; ++t) {
            std::vector<int> s(static_cast<std::size_t>(n), 0);
            for (int k = 0; k < n; ++k) {
                double u = rng.next_unit();
                int letter = 0;
                while (letter + 1 < m && u > ens.probs[static_cast<std::size_t>(letter)]) {
                    u -= ens.probs[static_cast<std::size_t>(letter)];
                    ++letter;
                }
                s[static_cast<std::size_t>(k)] = letter;
            }
            work.emplace_back(std::move(s), w);
        }
        std::sort(work.begin(), work.end());
    }

    // first pass: truncate typical blocks, measure lambda
    struct Prepared {
        BlockState block;
        double trace_distance;
        double lambda;
    };
    std::vector<std::optional<Prepared>> prepared(work.size());
    std::vector<int> s_targets = s_block_targets(n);
    double lambda_plan = 0.0;
    for (std::size_t w = 0; w < work.size(); ++w) {
        const auto& [str, prob] = work[w];
        if (!is_typical(ens.probs, str, params.delta)) continue;
        BlockState block = truncated_block_state(ens, str, params);

        const ComplexVector phi = block_product_state(ens, str);
        const Complex overlap = phi.vec.dot(block.sigma.amplitudes());
        const double tdist = 2.0 * std::sqrt(std::max(0.0, 1.0 - std::norm(overlap)));

        const double lambda = reduced_density(block.sigma, s_targets).spectrum()(0);
        lambda_plan = std::max(lambda_plan, lambda);
        prepared[w] = Prepared{std::move(block), tdist, lambda};
    }

    lambda_plan = std::min(1.0, lambda_plan + 1e-12);
    if (lambda_plan <= 0.0) lambda_plan = 1.0;  // no typical block at all
    report.lambda_max_plan = lambda_plan;
    report.operator_inequality_margin = report.lambda_max_bound - lambda_plan;

    ProtocolPlan plan = plan_resources(static_cast<int>(rank),
                                       std::max(lambda_plan, 1.0 / static_cast<double>(rank)), config.kappa);
    report.plan = plan;
    CouplingUnitary coupling = search_coupling_unitary(plan, config.candidates, config.probes,
                                                       seed.with_stream(seed.stream + 7001ULL), config.jobs);

    const std::int64_t d_a_block = checked_power(ens.d_A1(), n, "run_block_protocol");

    report.blocks.resize(work.size());
    std::vector<double> fidelities(work.size(), 0.0);
    parallel_for(static_cast<int>(work.size()), config.jobs, [&](int w) {
        const auto& [str, prob] = work[static_cast<std::size_t>(w)];
        BlockRecord rec;
        rec.index_string = str;
        rec.probability = prob;
        rec.typical = prepared[static_cast<std::size_t>(w)].has_value();
        if (rec.typical) {
            const Prepared& pre = *prepared[static_cast<std::size_t>(w)];
            rec.retained_weight = pre.block.retained_weight;
            rec.lambda_max = pre.lambda;
            rec.trace_distance = pre.trace_distance;

            // compress the S block onto the typical support
            Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amp(
                pre.block.sigma.amplitudes().data(), d_a_block, d_s_block);
            Matrix compressed = amp * basis.conjugate();
            Vector flat(d_a_block * rank);
            for (std::int64_t r = 0; r < d_a_block; ++r) {
                flat.segment(r * rank, rank) = compressed.row(r).transpose();
            }
            flat /= flat.norm();
            PureState input(
                ComplexVector(HilbertSpace({static_cast<int>(d_a_block), static_cast<int>(rank)}), std::move(flat)));

            ProtocolTranscript tr = run_protocol(input, coupling, plan);
            rec.fidelity = tr.fidelity_achieved;
        }
        fidelities[static_cast<std::size_t>(w)] = rec.typical ? rec.fidelity : 0.0;
        report.blocks[static_cast<std::size_t>(w)] = std::move(rec);
    });

    double mass = 0.0, mean_f = 0.0;
    for (std::size_t w = 0; w < work.size(); ++w) {
        const auto& rec = report.blocks[w];
        if (!rec.typical) {
            mass += rec.probability;
        } else {
            report.min_retained_weight = std::min(report.min_retained_weight, rec.retained_weight);
            report.max_trace_distance = std::max(report.max_trace_distance, rec.trace_distance);
        }
        mean_f += rec.probability * fidelities[w];
    }
    report.atypical_mass = mass;
    report.atypical_mass_bound = m / (params.delta * params.delta);
    report.mean_fidelity = mean_f;
    return report;
}

}  // namespace densecode::memoryless
