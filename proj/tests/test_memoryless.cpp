#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "densecode/memoryless.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace densecode;
namespace ml = densecode::memoryless;

namespace {

PureState basis_state(const HilbertSpace& space, std::int64_t k) {
    Vector v = Vector::Zero(space.total_dim());
    v(k) = 1.0;
    return PureState(ComplexVector(space, std::move(v)));
}

// |0>_A1 |0>_S and |0>_A1 |1>_S, equal weights
ml::SourceEnsemble classical_bits() {
    HilbertSpace space({1, 2});
    return ml::SourceEnsemble({basis_state(space, 0), basis_state(space, 1)}, {0.5, 0.5});
}

// |00> and the Bell state on (2, 2), equal weights
ml::SourceEnsemble product_bell() {
    HilbertSpace space({2, 2});
    return ml::SourceEnsemble({basis_state(space, 0), maximally_entangled(2)}, {0.5, 0.5});
}

// exhaustive oracle for the typical-count condition
int count_typical(const std::vector<double>& q, int n, double delta) {
    int total = 0;
    std::vector<int> current(static_cast<std::size_t>(n), 0);
    while (true) {
        std::vector<int> counts(q.size(), 0);
        for (int x : current) counts[static_cast<std::size_t>(x)] += 1;
        bool ok = true;
        for (std::size_t x = 0; x < q.size(); ++x) {
            const double spread = std::sqrt(q[x] * (1.0 - q[x]));
            if (std::abs(counts[x] - n * q[x]) > delta * std::sqrt(static_cast<double>(n)) * spread + 1e-9) {
                ok = false;
                break;
            }
        }
        if (ok) ++total;
        int k = n - 1;
        while (k >= 0) {
            if (++current[static_cast<std::size_t>(k)] < static_cast<int>(q.size())) break;
            current[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return total;
}

}  // namespace

TEST_CASE("typical sequences with a vacuous width keep everything") {
    auto all = ml::typical_sequences({0.5, 0.5}, 3, 1e6);
    CHECK(all.size() == 8);
}

TEST_CASE("a deterministic distribution admits only the constant string") {
    auto seqs = ml::typical_sequences({1.0, 0.0}, 4, 2.0);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0] == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("fair-coin typical count at n = 4, delta = 1") {
    auto seqs = ml::typical_sequences({0.5, 0.5}, 4, 1.0);
    CHECK(seqs.size() == 14);
    CHECK(static_cast<int>(seqs.size()) == count_typical({0.5, 0.5}, 4, 1.0));
}

TEST_CASE("typical sequences refuse oversized enumerations") {
    std::vector<double> q(10, 0.1);
    CHECK_THROWS_AS(ml::typical_sequences(q, 7, 1.0), std::length_error);
}

TEST_CASE("typical projector of a pure state is its n-fold power") {
    Vector v = oracle::random_unit_vector(2, {200, 0});
    Matrix rho = v * v.adjoint();
    rho = (rho + Matrix(rho.adjoint())) / 2.0;
    DensityOperator pure(ComplexOperator(HilbertSpace({2}), std::move(rho)));
    auto proj = ml::typical_projector(pure, 3, 1.0);
    CHECK(std::abs(proj.mat.trace().real() - 1.0) < 1e-9);

    Matrix expect = oracle::kron(oracle::kron(pure.matrix(), pure.matrix()), pure.matrix());
    CHECK((proj.mat - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("typical projector with vacuous width is the identity") {
    Matrix rho(2, 2);
    rho << 0.75, 0, 0, 0.25;
    DensityOperator d(ComplexOperator(HilbertSpace({2}), std::move(rho)));
    auto proj = ml::typical_projector(d, 3, 1e6);
    CHECK((proj.mat - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("typical projector rank matches the enumeration oracle") {
    Matrix rho(2, 2);
    rho << 0.75, 0, 0, 0.25;
    DensityOperator d(ComplexOperator(HilbertSpace({2}), std::move(rho)));
    auto proj = ml::typical_projector(d, 4, 1.0);
    // eigenvalue letters (3/4, 1/4): only N(3/4) = 3 passes both constraints
    CHECK(count_typical({0.75, 0.25}, 4, 1.0) == 4);
    CHECK(std::abs(proj.mat.trace().real() - 4.0) < 1e-9);

    // commutes with rho^(x)n
    Matrix rho_n = oracle::kron(oracle::kron(oracle::kron(d.matrix(), d.matrix()), d.matrix()), d.matrix());
    CHECK((proj.mat * rho_n - rho_n * proj.mat).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((proj.mat * proj.mat - proj.mat).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((proj.mat - proj.mat.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("conditional typical projector at n = 1 is the plain typical projector") {
    auto ens = product_bell();
    auto cond = ml::conditional_typical_projector(ens, {1}, 1.5);
    auto plain = ml::typical_projector(reduced_density(ens.states[1], {1}), 1, 1.5);
    CHECK((cond.mat - plain.mat).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("conditional typical projector of product sources is rank one") {
    auto ens = classical_bits();
    auto cond = ml::conditional_typical_projector(ens, {0, 1, 0}, 2.0);
    CHECK(std::abs(cond.mat.trace().real() - 1.0) < 1e-9);
    // the retained basis string is |0>|1>|0>
    Vector probe = Vector::Zero(8);
    probe(2) = 1.0;  // binary 010
    CHECK(std::abs((probe.adjoint() * cond.mat * probe)(0).real() - 1.0) < 1e-9);
}

TEST_CASE("interleaved blocks equal the permutation-conjugated grouped form") {
    auto ens = product_bell();
    const std::vector<int> istring{0, 1, 0, 1};
    const double delta = 1.2;
    auto cond = ml::conditional_typical_projector(ens, istring, delta);

    // oracle: grouped projector T_0 (x) T_1 on positions (0,2 | 1,3),
    // conjugated by the explicit basis-relabeling permutation matrix
    auto t0 = ml::typical_projector(reduced_density(ens.states[0], {1}), 2, delta);
    auto t1 = ml::typical_projector(reduced_density(ens.states[1], {1}), 2, delta);
    Matrix grouped = oracle::kron(t0.mat, t1.mat);

    const std::vector<int> grouped_positions{0, 2, 1, 3};  // slot -> actual position
    Matrix perm = Matrix::Zero(16, 16);
    for (int idx = 0; idx < 16; ++idx) {
        // digits of the grouped index, mapped into actual positions
        int digits[4];
        int rem = idx;
        for (int k = 3; k >= 0; --k) {
            digits[k] = rem % 2;
            rem /= 2;
        }
        int actual = 0;
        for (int k = 0; k < 4; ++k) {
            actual |= digits[k] << (3 - grouped_positions[static_cast<std::size_t>(k)]);
        }
        perm(actual, idx) = 1.0;
    }
    Matrix expect = perm * grouped * perm.adjoint();
    CHECK((cond.mat - expect).cwiseAbs().maxCoeff() < 1e-9);

    CHECK((cond.mat * cond.mat - cond.mat).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((cond.mat - cond.mat.adjoint()).cwiseAbs().maxCoeff() < 1e-10);

    // commutes with the block source state on S
    Matrix phi_s = Matrix::Identity(1, 1);
    for (int i : istring) {
        phi_s = oracle::kron(phi_s, reduced_density(ens.states[static_cast<std::size_t>(i)], {1}).matrix());
    }
    CHECK((cond.mat * phi_s - phi_s * cond.mat).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("vacuous truncation returns the block state itself") {
    auto ens = product_bell();
    ml::TypicalParams params{3, 1e6, 0.1};
    auto block = ml::truncated_block_state(ens, {0, 1, 1}, params);
    CHECK(block.retained_weight == doctest::Approx(1.0).epsilon(1e-10));

    // |00> (x) Bell (x) Bell in the (a-block, s-block) arrangement: amplitude
    // of the all-zero basis index is 1 * (1/sqrt 2)^2
    CHECK(std::abs(block.sigma.amplitudes()(0) - Complex(0.5, 0.0)) < 1e-10);
}

TEST_CASE("binomial-tail truncation weight on a partially entangled source") {
    Vector v = Vector::Zero(4);
    v(0) = std::sqrt(0.8);
    v(3) = std::sqrt(0.2);
    ml::SourceEnsemble ens({PureState(ComplexVector(HilbertSpace({2, 2}), std::move(v)))}, {1.0});

    // letters (0.8, 0.2), n = 4, delta = 1: N(0.8-letter) in {3, 4} passes,
    // so the retained weight is the binomial tail 0.8^4 + 4 * 0.8^3 * 0.2
    ml::TypicalParams params{4, 1.0, 0.1};
    auto block = ml::truncated_block_state(ens, {0, 0, 0, 0}, params);
    const double expect = std::pow(0.8, 4) + 4.0 * std::pow(0.8, 3) * 0.2;
    CHECK(block.retained_weight == doctest::Approx(expect).epsilon(1e-9));

    // the truncation is a projector hit on a pure state, so the overlap with
    // the original block state is exactly the retained weight
    ml::TypicalParams vac{4, 1e9, 0.1};
    auto phi = ml::truncated_block_state(ens, {0, 0, 0, 0}, vac);
    CHECK(std::norm(phi.sigma.amplitudes().dot(block.sigma.amplitudes())) ==
          doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("retention and trace-distance guarantees at the designed delta") {
    for (auto ens : {product_bell(), classical_bits()}) {
        const double epsilon = 0.1;
        for (int n : {4, 6}) {
            auto params = ml::TypicalParams::from_epsilon(ens, n, epsilon);
            CHECK(params.delta == doctest::Approx(ens.m() * std::sqrt(2.0 * ens.d_S() / epsilon)).epsilon(1e-12));

            std::vector<int> current(static_cast<std::size_t>(n), 0);
            while (true) {
                if (ml::is_typical(ens.probs, current, params.delta)) {
                    auto block = ml::truncated_block_state(ens, current, params);
                    CHECK(block.retained_weight >= 1.0 - epsilon);

                    // pure-state trace distance ||phi - sigma||_1 against the
                    // gentle-measurement guarantee
                    ml::TypicalParams vac{n, 1e9, epsilon};
                    const ComplexVector phi = ml::truncated_block_state(ens, current, vac).sigma.vector();
                    const double overlap = std::norm(phi.vec.dot(block.sigma.amplitudes()));
                    const double tdist = 2.0 * std::sqrt(std::max(0.0, 1.0 - overlap));
                    CHECK(tdist <= std::sqrt(8.0 * epsilon) + 2.0 * epsilon + 1e-9);
                }
                int k = n - 1;
                while (k >= 0) {
                    if (++current[static_cast<std::size_t>(k)] < ens.m()) break;
                    current[static_cast<std::size_t>(k)] = 0;
                    --k;
                }
                if (k < 0) break;
            }
        }
    }
}

TEST_CASE("truncation reports degenerate annihilation") {
    auto ens = product_bell();
    // delta = 0 forces exact letter counts, impossible for the Bell factor
    ml::TypicalParams params{2, 0.0, 0.1};
    CHECK_THROWS_AS(ml::truncated_block_state(ens, {1, 1}, params), std::runtime_error);
}

TEST_CASE("rate pair anchors") {
    HilbertSpace product_space({1, 2});
    ml::SourceEnsemble single({basis_state(product_space, 0)}, {1.0});
    auto r0 = ml::rate_pair(single);
    CHECK(r0.qubit_rate == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r0.ebit_rate == doctest::Approx(0.0).epsilon(1e-12));

    auto bits = ml::rate_pair(classical_bits());
    CHECK(bits.qubit_rate == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(bits.ebit_rate == doctest::Approx(0.5).epsilon(1e-9));

    ml::SourceEnsemble bell({maximally_entangled(2)}, {1.0});
    auto rb = ml::rate_pair(bell);
    CHECK(rb.qubit_rate == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rb.ebit_rate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rate pair identities are exact") {
    for (auto ens : {product_bell(), classical_bits()}) {
        auto r = ml::rate_pair(ens);
        CHECK(r.qubit_rate + r.ebit_rate == doctest::Approx(r.source_entropy).epsilon(1e-9));
        CHECK(r.qubit_rate - r.ebit_rate == doctest::Approx(-r.mean_state_entropy).epsilon(1e-9));
    }
}

TEST_CASE("block protocol at n = 1 with vacuous width is the universal protocol") {
    auto ens = product_bell();
    ml::TypicalParams params{1, 1e9, 0.1};
    ml::BlockProtocolConfig cfg;
    cfg.kappa = 0.2;
    cfg.candidates = 4;
    cfg.probes = 16;
    auto report = ml::run_block_protocol(ens, params, cfg, {201, 0});

    REQUIRE(report.blocks.size() == 2);
    CHECK(report.typical_rank == 2);
    for (const auto& b : report.blocks) {
        CHECK(b.typical);
        CHECK(b.retained_weight == doctest::Approx(1.0).epsilon(1e-10));
    }

    // replicate the run: same plan and coupling stream, raw ensemble states
    // compressed into the eigenbasis of rho
    auto plan = plan_resources(2, report.lambda_max_plan, cfg.kappa);
    auto coupling = search_coupling_unitary(plan, cfg.candidates, cfg.probes, Seed{201, 7001ULL});
    REQUIRE(plan.d_A2 == report.plan.d_A2);
    REQUIRE(plan.d_B == report.plan.d_B);

    // typical basis = eigenvectors by descending eigenvalue (the solver
    // reports ascending)
    const auto letters_basis = [&] {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(ens.average_source_state().matrix());
        Matrix cols(2, 2);
        cols.col(0) = solver.eigenvectors().col(1);
        cols.col(1) = solver.eigenvectors().col(0);
        return cols;
    }();
    for (std::size_t i = 0; i < 2; ++i) {
        const PureState& raw = ens.states[report.blocks[i].index_string[0] == 0 ? 0 : 1];
        Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amp(
            raw.amplitudes().data(), 2, 2);
        Matrix compressed = amp * letters_basis.conjugate();
        Vector flat(4);
        flat << compressed(0, 0), compressed(0, 1), compressed(1, 0), compressed(1, 1);
        flat /= flat.norm();
        PureState input(ComplexVector(HilbertSpace({2, 2}), std::move(flat)));
        auto direct = run_protocol(input, coupling, plan);
        CHECK(report.blocks[i].fidelity == doctest::Approx(direct.fidelity_achieved).epsilon(1e-12));
    }
    CHECK(report.atypical_mass == doctest::Approx(0.0));
    CHECK(report.mean_fidelity > 0.0);
}

TEST_CASE("block protocol accounting at m = 2, n = 4 and 6") {
    auto ens = product_bell();
    for (int n : {4, 6}) {
        auto params = ml::TypicalParams::from_epsilon(ens, n, 0.1);
        ml::BlockProtocolConfig cfg;
        cfg.kappa = 0.2;
        cfg.candidates = 4;
        cfg.probes = 12;
        cfg.jobs = 4;
        auto report = ml::run_block_protocol(ens, params, cfg, {202, static_cast<std::uint64_t>(n)});

        CHECK(report.atypical_mass <= report.atypical_mass_bound + 1e-12);
        CHECK(report.min_retained_weight >= 1.0 - params.epsilon);
        CHECK(report.max_trace_distance <= std::sqrt(8.0 * params.epsilon) + 2.0 * params.epsilon + 1e-9);

        // Eq.-style bounds with c = log2 d_S (vacuously wide at this scale,
        // asserted as recorded)
        CHECK(std::log2(static_cast<double>(report.typical_rank)) <= report.log_rank_bound + 1e-9);
        CHECK((1.0 - params.epsilon) * report.lambda_max_plan <=
              (1.0 - params.epsilon) * report.lambda_max_bound + 1e-12);
        CHECK(report.operator_inequality_margin >= 0.0);

        double mass_check = 0.0;
        for (const auto& b : report.blocks) {
            if (!b.typical) mass_check += b.probability;
            if (b.typical) {
                CHECK(b.lambda_max <= report.lambda_max_plan + 1e-12);
                CHECK(b.fidelity >= 0.0);
            }
        }
        CHECK(mass_check == doctest::Approx(report.atypical_mass).epsilon(1e-12));
    }
}

TEST_CASE("atypical blocks are reported as failures when delta is tight") {
    auto ens = classical_bits();
    ml::TypicalParams params{4, 0.5, 0.1};
    ml::BlockProtocolConfig cfg;
    cfg.kappa = 0.2;
    cfg.candidates = 2;
    cfg.probes = 8;
    auto report = ml::run_block_protocol(ens, params, cfg, {203, 0});

    // |N0 - 2| <= 0.5 keeps only balanced strings: 6 of 16
    int typical_count = 0;
    for (const auto& b : report.blocks) {
        if (b.typical) {
            ++typical_count;
        } else {
            CHECK(b.fidelity == 0.0);
        }
    }
    CHECK(typical_count == 6);
    CHECK(report.atypical_mass == doctest::Approx(10.0 / 16.0).epsilon(1e-12));
    CHECK(report.atypical_mass <= report.atypical_mass_bound);
}

TEST_CASE("a pure Bell source runs the block protocol without communication") {
    ml::SourceEnsemble bell({maximally_entangled(2)}, {1.0});
    auto params = ml::TypicalParams::from_epsilon(bell, 4, 0.1);
    ml::BlockProtocolConfig cfg;
    cfg.kappa = 0.2;
    cfg.candidates = 2;
    cfg.probes = 8;
    auto report = ml::run_block_protocol(bell, params, cfg, {205, 0});

    // Bell^(x)4 reduces to I/16: lambda = 1/rank forces d_A2 = 1, and the
    // maximally entangled anchor prepares exactly
    CHECK(report.typical_rank == 16);
    CHECK(report.plan.d_A2 == 1);
    CHECK(report.plan.qubits == doctest::Approx(0.0));
    CHECK(report.mean_fidelity >= 1.0 - 1e-9);
}

TEST_CASE("parameter validation for typicality and block runs") {
    auto ens = product_bell();
    CHECK_THROWS_AS(ml::TypicalParams::from_epsilon(ens, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ml::TypicalParams::from_epsilon(ens, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ml::typical_sequences({0.6, 0.6}, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ml::typical_sequences({1.2, -0.2}, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ml::typical_sequences({0.5, 0.5}, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ml::conditional_typical_projector(ens, {0, 2}, 1.0), std::invalid_argument);
}

TEST_CASE("sampled block runs draw from p^n with uniform weights") {
    auto ens = product_bell();
    auto params = ml::TypicalParams::from_epsilon(ens, 4, 0.1);
    ml::BlockProtocolConfig cfg;
    cfg.kappa = 0.2;
    cfg.candidates = 2;
    cfg.probes = 8;
    cfg.trials = 10;
    auto report = ml::run_block_protocol(ens, params, cfg, {204, 0});

    REQUIRE(report.blocks.size() == 10);
    double mass = 0.0;
    for (std::size_t i = 0; i < report.blocks.size(); ++i) {
        CHECK(report.blocks[i].probability == doctest::Approx(0.1).epsilon(1e-12));
        mass += report.blocks[i].probability;
        if (i) CHECK(report.blocks[i].index_string >= report.blocks[i - 1].index_string);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    auto again = ml::run_block_protocol(ens, params, cfg, {204, 0});
    CHECK(again.mean_fidelity == report.mean_fidelity);
}

TEST_CASE("ensemble validation") {
    HilbertSpace space({1, 2});
    CHECK_THROWS_AS(ml::SourceEnsemble({basis_state(space, 0)}, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(ml::SourceEnsemble({basis_state(space, 0)}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(ml::SourceEnsemble({}, {}), std::invalid_argument);
}
