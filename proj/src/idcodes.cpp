#include "densecode/idcodes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace densecode::idcodes {

namespace {

PureState net_point(const QuantumIdCode& code, const PureState& psi) {
    if (code.net.empty()) return psi;
    std::size_t best = 0;
    double best_overlap = -1.0;
    for (std::size_t i = 0; i < code.net.size(); ++i) {
        const double overlap = std::norm(code.net[i].amplitudes().dot(psi.amplitudes()));
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = i;
        }
    }
    return code.net[best];
}

}  // namespace

QuantumIdCode build_id_code(int d, int a, int d_C, Seed seed, double lambda_target) {
    if (d < 1 || a < 1 || d_C < 1) {
        throw std::invalid_argument("build_id_code: dimensions must be >= 1");
    }
    if (static_cast<std::int64_t>(d) * a < d_C) {
        throw std::invalid_argument("build_id_code: d_C exceeds d * a");
    }
    QuantumIdCode code;
    code.d = d;
    code.a = a;
    code.d_C = d_C;
    code.V = haar_isometry(d * a, d_C, seed);
    code.lambda_target = lambda_target;
    code.seed = seed;
    return code;
}

PureState encoded_purification(const QuantumIdCode& code, const PureState& phi) {
    if (phi.space().total_dim() != code.d_C) {
        throw std::invalid_argument("encoded_purification: state dimension must be d_C");
    }
    Vector v = code.V * phi.amplitudes();
    v /= v.norm();
    return PureState(ComplexVector(HilbertSpace({code.d, code.a}), std::move(v)));
}

DensityOperator encode_state(const QuantumIdCode& code, const PureState& phi) {
    return reduced_density(encoded_purification(code, phi), {0});
}

ComplexOperator decoder_projector(const QuantumIdCode& code, const PureState& psi) {
    const DensityOperator encoded = encode_state(code, net_point(code, psi));
    return support_projector(encoded.op(), 1e-9);
}

double id_error(const QuantumIdCode& code, const PureState& phi, const PureState& psi) {
    const double target = std::norm(phi.amplitudes().dot(psi.amplitudes()));
    const DensityOperator encoded = encode_state(code, phi);
    const ComplexOperator d_psi = decoder_projector(code, psi);
    const double observed = (encoded.matrix() * d_psi.mat).trace().real();
    return std::abs(target - observed);
}

IdErrorEstimate estimate_id_error(const QuantumIdCode& code, int pairs, Seed seed) {
    if (pairs < 1) throw std::invalid_argument("estimate_id_error: pairs must be >= 1");
    IdErrorEstimate out;
    out.pairs = pairs;
    double sum = 0.0;
    for (int t = 0; t < pairs; ++t) {
        const PureState phi =
            haar_state(HilbertSpace({code.d_C}), seed.with_stream(seed.stream + 2ULL * static_cast<std::uint64_t>(t)));
        const PureState psi = haar_state(HilbertSpace({code.d_C}),
                                         seed.with_stream(seed.stream + 2ULL * static_cast<std::uint64_t>(t) + 1ULL));
        const double err = id_error(code, phi, psi);
        out.max_error = std::max(out.max_error, err);
        sum += err;
    }
    out.mean_error = sum / static_cast<double>(pairs);
    return out;
}

IdSdcResult id_code_via_sdc(const QuantumIdCode& code, const PureState& phi, const PureState& psi,
                            const ProtocolPlan& plan, const CouplingUnitary& coupling) {
    if (plan.d_S != code.d) {
        throw std::invalid_argument("id_code_via_sdc: plan.d_S must equal the code's d");
    }

    // V|phi> on dims (d, a); the protocol wants (A1 = a, S = d)
    const PureState purification = encoded_purification(code, phi);
    ComplexVector swapped = permute_subsystems(purification.vector(), {1, 0});
    PureState target(std::move(swapped));

    const double lambda_measured = reduced_density(target, {1}).spectrum()(0);
    const bool relaxed = lambda_measured > plan.lambda_max + 1e-9;

    ProtocolTranscript transcript = run_protocol(target, coupling, plan, relaxed ? std::optional<double>(1.0) : std::nullopt);

    // Bob's share of the prepared purification approximates epsilon(phi)
    DensityOperator prepared = reduced_density(transcript.output, {1});

    const double direct = id_error(code, phi, psi);
    const ComplexOperator d_psi = decoder_projector(code, psi);
    const double target_value = std::norm(phi.amplitudes().dot(psi.amplitudes()));
    const double prepared_value = (prepared.matrix() * d_psi.mat).trace().real();

    IdSdcResult out;
    out.preparation_fidelity = transcript.fidelity_achieved;
    out.id_error_direct = direct;
    out.id_error_prepared = std::abs(target_value - prepared_value);
    out.triangle_bound = direct + 2.0 * std::sqrt(std::max(0.0, 1.0 - transcript.fidelity_achieved));
    out.lambda_measured = lambda_measured;
    out.lambda_gate_relaxed = relaxed;
    out.ledger = transcript.ledger;
    return out;
}

}  // namespace densecode::idcodes
