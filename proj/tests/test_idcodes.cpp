#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "densecode/idcodes.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace densecode;
namespace idc = densecode::idcodes;

TEST_CASE("a = 1 codes encode unitarily and identify exactly") {
    auto code = idc::build_id_code(8, 1, 4, {300, 0});
    for (int t = 0; t < 100; ++t) {
        PureState phi = haar_state(HilbertSpace({4}), {301, 2ULL * static_cast<std::uint64_t>(t)});
        PureState psi = haar_state(HilbertSpace({4}), {301, 2ULL * static_cast<std::uint64_t>(t) + 1});
        CHECK(idc::id_error(code, phi, psi) < 1e-9);
    }
    // the encoding is pure for every input
    PureState probe = haar_state(HilbertSpace({4}), {302, 0});
    auto encoded = idc::encode_state(code, probe);
    CHECK(encoded.spectrum()(0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("code isometries satisfy V^+ V = I") {
    auto code = idc::build_id_code(16, 2, 3, {303, 7});
    CHECK((code.V.adjoint() * code.V - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("encoded states keep unit trace and bounded rank") {
    auto code = idc::build_id_code(16, 2, 3, {303, 0});
    for (int t = 0; t < 20; ++t) {
        PureState phi = haar_state(HilbertSpace({3}), {304, static_cast<std::uint64_t>(t)});
        auto encoded = idc::encode_state(code, phi);
        CHECK(std::abs(encoded.matrix().trace().real() - 1.0) < 1e-10);

        // Schmidt-rank oracle: the purification across (d | a) has at most
        // a = 2 nonzero coefficients
        auto schmidt = schmidt_decompose(idc::encoded_purification(code, phi), {0});
        int nonzero = 0;
        for (Eigen::Index i = 0; i < schmidt.coefficients.size(); ++i) {
            if (schmidt.coefficients(i) > 1e-9) ++nonzero;
        }
        CHECK(nonzero <= 2);
    }
}

TEST_CASE("decoder projectors are projectors of rank at most a") {
    auto code = idc::build_id_code(16, 2, 3, {305, 0});
    for (int t = 0; t < 10; ++t) {
        PureState psi = haar_state(HilbertSpace({3}), {306, static_cast<std::uint64_t>(t)});
        auto d_psi = idc::decoder_projector(code, psi);
        CHECK((d_psi.mat * d_psi.mat - d_psi.mat).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((d_psi.mat - d_psi.mat.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(d_psi.mat.trace().real() <= 2.0 + 1e-9);

        // the decoder retains its own net point completely
        auto encoded = idc::encode_state(code, psi);
        CHECK((encoded.matrix() * d_psi.mat).trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("nearest-net decoding picks the closest stored probe") {
    auto code = idc::build_id_code(8, 2, 2, {307, 0});
    PureState a = haar_state(HilbertSpace({2}), {307, 1});
    PureState b = haar_state(HilbertSpace({2}), {307, 2});
    code.net = {a, b};
    auto d_a = idc::decoder_projector(code, a);
    auto exact_a = support_projector(idc::encode_state(code, a).op(), 1e-9);
    CHECK((d_a.mat - exact_a.mat).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sampled-pair error estimates stay bounded and deterministic") {
    auto code = idc::build_id_code(16, 2, 3, {308, 0});
    auto est1 = idc::estimate_id_error(code, 200, {309, 0});
    auto est2 = idc::estimate_id_error(code, 200, {309, 0});
    CHECK(est1.max_error == est2.max_error);
    CHECK(est1.mean_error == est2.mean_error);
    CHECK(est1.max_error < 1.0);
    CHECK(est1.mean_error <= est1.max_error);
    CHECK(est1.pairs == 200);
}

TEST_CASE("ledger arithmetic for codes driven through the protocol") {
    // lambda_max = 1/a turns the plan's leading terms into
    // (log d -/+ log a) / 2
    for (int a : {2, 4}) {
        auto plan = plan_resources(16, 1.0 / a, 0.2);
        CHECK(plan.leading_qubits == doctest::Approx(0.5 * (4.0 - std::log2(a))).epsilon(1e-12));
        CHECK(plan.leading_ebits == doctest::Approx(0.5 * (4.0 + std::log2(a))).epsilon(1e-12));
    }
    // growing a trades qubits for ebits
    CHECK(plan_resources(16, 0.25, 0.2).leading_qubits < plan_resources(16, 0.5, 0.2).leading_qubits);
    CHECK(plan_resources(16, 0.25, 0.2).leading_ebits > plan_resources(16, 0.5, 0.2).leading_ebits);
}

TEST_CASE("exact-preparation limit reproduces the direct error") {
    auto code = idc::build_id_code(16, 2, 3, {310, 0});
    PureState phi = haar_state(HilbertSpace({3}), {310, 1});
    PureState psi = haar_state(HilbertSpace({3}), {310, 2});

    // skip the protocol: Bob's share of V|phi> is epsilon(phi) exactly
    const double direct = idc::id_error(code, phi, psi);
    auto encoded = idc::encode_state(code, phi);
    auto d_psi = idc::decoder_projector(code, psi);
    const double via_reduction =
        std::abs(std::norm(phi.amplitudes().dot(psi.amplitudes())) -
                 (encoded.matrix() * d_psi.mat).trace().real());
    CHECK(via_reduction == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("protocol-prepared codes respect the triangle bound") {
    auto code = idc::build_id_code(16, 4, 2, {311, 0});
    auto plan = plan_resources(16, 0.25, 0.2);
    auto coupling = search_coupling_unitary(plan, 4, 16, {311, 1});
    for (int t = 0; t < 8; ++t) {
        PureState phi = haar_state(HilbertSpace({2}), {312, 2ULL * static_cast<std::uint64_t>(t)});
        PureState psi = haar_state(HilbertSpace({2}), {312, 2ULL * static_cast<std::uint64_t>(t) + 1});
        auto result = idc::id_code_via_sdc(code, phi, psi, plan, coupling);
        CHECK(result.id_error_prepared <= result.triangle_bound + 1e-9);
        CHECK(result.preparation_fidelity > 0.0);
        CHECK(result.ledger.qubits == doctest::Approx(plan.qubits));
        CHECK(result.ledger.ebits == doctest::Approx(plan.ebits));
    }
}

TEST_CASE("a-side unitaries cannot move the d-side support") {
    for (int t = 0; t < 20; ++t) {
        // rank-a maximally entangled state across (a | d) with a < d
        const int a = 2, d = 6;
        const Matrix w = haar_isometry(d, a, {313, static_cast<std::uint64_t>(t)});
        Vector v = Vector::Zero(a * d);
        for (int j = 0; j < a; ++j) {
            for (int k = 0; k < d; ++k) {
                v(static_cast<std::int64_t>(j) * d + k) = w(k, j) / std::sqrt(static_cast<double>(a));
            }
        }
        PureState phi(ComplexVector(HilbertSpace({a, d}), std::move(v)));

        auto before = support_projector(reduced_density(phi, {1}).op(), 1e-9);
        const Matrix u = haar_unitary(a, {314, static_cast<std::uint64_t>(t)}).mat;
        ComplexVector rotated = apply_on_subsystems(phi.vector(), u, {0});
        auto after = support_projector(reduced_density(PureState(std::move(rotated)), {1}).op(), 1e-9);
        CHECK((before.mat - after.mat).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("code construction validates dimensions") {
    CHECK_THROWS_AS(idc::build_id_code(4, 2, 9, {315, 0}), std::invalid_argument);
    CHECK_THROWS_AS(idc::build_id_code(0, 2, 1, {315, 1}), std::invalid_argument);

    auto code = idc::build_id_code(8, 2, 2, {315, 2});
    CHECK_THROWS_AS(idc::estimate_id_error(code, 0, {315, 3}), std::invalid_argument);
    PureState wrong = haar_state(HilbertSpace({3}), {315, 4});
    CHECK_THROWS_AS(idc::encode_state(code, wrong), std::invalid_argument);

    // the plan must target the code's output dimension
    auto plan = plan_resources(16, 0.5, 0.2);
    auto coupling = identity_coupling(plan, 1, {315, 5});
    PureState phi = haar_state(HilbertSpace({2}), {315, 6});
    CHECK_THROWS_AS(idc::id_code_via_sdc(code, phi, phi, plan, coupling), std::invalid_argument);
}
