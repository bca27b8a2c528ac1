#include "densecode/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace densecode::bounds {

namespace {

double raw_eta(double t) {
    return (t > 0.0) ? -t * std::log2(t) : 0.0;
}

int block_size(double lambda_max) {
    return static_cast<int>(std::ceil(1.0 / lambda_max - 1e-9));
}

}  // namespace

double eta(double t) {
    if (t < 0.0 || t > 1.0) {
        throw std::invalid_argument("eta: argument must lie in [0, 1]");
    }
    return raw_eta(t);
}

void BoundInputs::validate() const {
    if (d_S < 1) throw std::invalid_argument("BoundInputs: d_S must be >= 1");
    if (fidelity < 0.5 - 1e-12 || fidelity > 1.0 + 1e-12) {
        throw std::invalid_argument("BoundInputs: fidelity must lie in [1/2, 1]");
    }
    if (lambda_max > 1.0 + 1e-12 || lambda_max < 1.0 / static_cast<double>(d_S) - 1e-12) {
        throw std::invalid_argument("BoundInputs: need 1/d_S <= lambda_max <= 1");
    }
}

CbitBound rsp_cbit_lower_bound(const BoundInputs& in) {
    in.validate();
    const double log_ds = std::log2(static_cast<double>(in.d_S));
    const double raw = log_ds + std::log2(in.lambda_max) + std::log2(in.fidelity) - 2.0;

    const int a = block_size(in.lambda_max);
    const int messages = in.d_S / a;
    const double sharper_raw = std::log2(in.fidelity * static_cast<double>(messages));

    CbitBound out;
    out.raw = raw;
    out.value = std::max(0.0, raw);
    out.sharper_raw = sharper_raw;
    out.sharper = std::max(0.0, sharper_raw);
    out.vacuous = raw < 0.0;
    return out;
}

EbitBound rsp_ebit_lower_bound(const BoundInputs& in) {
    in.validate();
    const double log_ds = std::log2(static_cast<double>(in.d_S));
    const double root = std::sqrt(std::max(0.0, 1.0 - in.fidelity));
    const double raw = log_ds - 18.0 * root * log_ds - 2.0 * raw_eta(2.0 * root);

    EbitBound out;
    out.raw = raw;
    out.value = std::max(0.0, raw);
    out.vacuous = raw < 0.0;
    return out;
}

QubitBound sdc_qubit_lower_bound(const BoundInputs& in) {
    in.validate();
    const double log_ds = std::log2(static_cast<double>(in.d_S));
    const double raw = 0.5 * log_ds + 0.5 * std::log2(in.lambda_max) + 0.5 * std::log2(in.fidelity) - 1.0;
    const EbitBound sum = rsp_ebit_lower_bound(in);

    QubitBound out;
    out.raw = raw;
    out.value = std::max(0.0, raw);
    out.vacuous = raw < 0.0;
    out.sum_raw = sum.raw;
    out.sum_value = sum.value;
    out.sum_vacuous = sum.vacuous;
    return out;
}

double fannes_bound(double trace_distance, int d) {
    if (d < 1) throw std::invalid_argument("fannes_bound: d must be >= 1");
    if (trace_distance < 0.0 || trace_distance > 0.25) {
        throw std::invalid_argument("fannes_bound: valid for trace distances in [0, 1/4] only");
    }
    return trace_distance * std::log2(static_cast<double>(d)) + raw_eta(trace_distance);
}

double net_size_bound(double gamma, int d_A1prime, int d_S) {
    if (gamma <= 0.0 || gamma > 5.0) {
        throw std::invalid_argument("net_size_bound: need 0 < gamma <= 5");
    }
    if (d_A1prime < 1 || d_S < 1) {
        throw std::invalid_argument("net_size_bound: dimensions must be >= 1");
    }
    return 2.0 * static_cast<double>(d_A1prime) * static_cast<double>(d_S) * std::log2(5.0 / gamma);
}

DensityOperator causality_block_state(int d_S, double lambda_max, int message) {
    const int a = block_size(lambda_max);
    const int messages = d_S / a;
    if (message < 1 || message > messages) {
        throw std::invalid_argument("causality_block_state: message index out of range");
    }
    Matrix m = Matrix::Zero(d_S, d_S);
    for (int k = a * (message - 1); k < a * message; ++k) {
        m(k, k) = 1.0 / static_cast<double>(a);
    }
    return DensityOperator(ComplexOperator(HilbertSpace({d_S}), std::move(m)));
}

PureState causality_block_purification(int d_S, double lambda_max, int message) {
    const int a = block_size(lambda_max);
    const int messages = d_S / a;
    if (message < 1 || message > messages) {
        throw std::invalid_argument("causality_block_purification: message index out of range");
    }
    Vector v = Vector::Zero(static_cast<std::int64_t>(a) * d_S);
    const double amp = 1.0 / std::sqrt(static_cast<double>(a));
    for (int j = 0; j < a; ++j) {
        v(static_cast<std::int64_t>(j) * d_S + a * (message - 1) + j) = amp;
    }
    return PureState(ComplexVector(HilbertSpace({a, d_S}), std::move(v)));
}

CausalityReport causality_block_experiment(int d_S, double lambda_max,
                                           const std::vector<DensityOperator>& prepared_states,
                                           const std::vector<int>& intended_index) {
    if (d_S < 1) throw std::invalid_argument("causality_block_experiment: d_S must be >= 1");
    if (prepared_states.size() != intended_index.size()) {
        throw std::invalid_argument("causality_block_experiment: states and indices differ in length");
    }
    const int a = block_size(lambda_max);
    const int messages = d_S / a;
    if (messages < 1) {
        throw std::invalid_argument("causality_block_experiment: floor(d_S / a) must be >= 1");
    }

    CausalityReport report;
    report.d_S = d_S;
    report.a = a;
    report.messages = messages;
    report.guessing_baseline = 1.0 / static_cast<double>(messages);

    double sum = 0.0;
    for (std::size_t t = 0; t < prepared_states.size(); ++t) {
        const int i = intended_index[t];
        if (i < 1 || i > messages) {
            throw std::invalid_argument("causality_block_experiment: intended index out of range");
        }
        if (prepared_states[t].space().total_dim() != d_S) {
            throw std::invalid_argument("causality_block_experiment: prepared state has wrong dimension");
        }
        double p = 0.0;
        for (int k = a * (i - 1); k < a * i; ++k) {
            p += prepared_states[t].matrix()(k, k).real();
        }
        report.decode_probabilities.push_back(p);
        sum += p;
    }
    if (!report.decode_probabilities.empty()) {
        report.mean_decode_probability = sum / static_cast<double>(report.decode_probabilities.size());
    }
    report.implied_cbit_lower_bound =
        std::max(0.0, std::log2(std::max(1e-300, report.mean_decode_probability * messages)));
    return report;
}

}  // namespace densecode::bounds
