#include "densecode/report.hpp"

#include <cmath>

namespace densecode {

namespace {

Json finite_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

}  // namespace

Json report_header(const std::string& experiment) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["library_version"] = kLibraryVersion;
    j["experiment"] = experiment;
    return j;
}

Json to_json(const Seed& seed) {
    return Json{{"seed", seed.seed}, {"stream", seed.stream}};
}

Json to_json(const ResourceLedger& ledger) {
    return Json{{"qubits", ledger.qubits}, {"ebits", ledger.ebits}, {"cbits", ledger.cbits}};
}

Json to_json(const ProtocolPlan& plan) {
    Json j;
    j["d_S"] = plan.d_S;
    j["lambda_max"] = plan.lambda_max;
    j["kappa"] = plan.kappa;
    j["epsilon"] = plan.epsilon;
    j["alpha"] = plan.alpha;
    j["beta"] = plan.beta;
    j["gamma"] = plan.gamma;
    j["delta_fannes"] = plan.delta_fannes;
    j["d_A1prime"] = plan.d_A1prime;
    j["d_A2"] = plan.d_A2;
    j["d_B"] = plan.d_B;
    j["dims_overridden"] = plan.dims_overridden;
    j["leading_qubits"] = plan.leading_qubits;
    j["leading_ebits"] = plan.leading_ebits;
    j["qubits"] = plan.qubits;
    j["ebits"] = plan.ebits;
    j["overhead_bits"] = plan.overhead_bits;
    j["beta_at_dims"] = plan.beta_at_dims;
    j["log_net_size"] = plan.log_net_size;
    j["padded_d_A2"] = plan.padded_d_A2;
    j["padded_d_B"] = plan.padded_d_B;
    j["desk_dims_feasible"] = plan.desk_dims_feasible;
    j["s_embedding"] = "first d_S computational basis vectors of A2 (x) B, row-major";
    return j;
}

Json to_json(const ProtocolTranscript& transcript) {
    Json j;
    j["plan"] = to_json(transcript.plan);
    j["input_dims"] = transcript.input_dims;
    j["input_lambda_max"] = transcript.input_lambda_max;
    j["predicted_overlap"] = transcript.predicted_overlap;
    j["s_psi_prime_b"] = transcript.s_psi_prime_b;
    j["trace_dist_to_uniform"] = transcript.trace_dist_to_uniform;
    j["pinsker_rhs"] = transcript.pinsker_rhs;
    j["fidelity_pre_projection"] = transcript.fidelity_pre_projection;
    j["projection_leakage"] = transcript.projection_leakage;
    j["fidelity_achieved"] = transcript.fidelity_achieved;
    j["ledger"] = to_json(transcript.ledger);
    j["teleported"] = transcript.teleported;
    return j;
}

Json to_json(const concentration::ConcentrationReport& report) {
    Json j = report_header("concentration");
    j["config"] = Json{{"r", report.config.r},
                       {"d_A", report.config.d_A},
                       {"d_B", report.config.d_B},
                       {"alpha", report.config.alpha},
                       {"trials", report.config.trials},
                       {"seed", to_json(report.config.seed)}};
    j["beta"] = report.beta;
    j["threshold"] = report.threshold;
    j["mean_deficit"] = report.mean_deficit;
    j["violation_count"] = report.violation_count;
    j["tail_bound"] = Json{{"statement_form", report.bound.statement_form},
                           {"derivation_form", report.bound.derivation_form},
                           {"rank_one_form", finite_or_null(report.bound.rank_one_form)},
                           {"quoted", "statement_form"}};
    j["deficits"] = report.deficits;
    Json hist = Json::array();
    for (const auto& [bin, count] : report.histogram) {
        hist.push_back(Json{{"bin_start", bin}, {"count", count}});
    }
    j["histogram_bin_width"] = 0.01;
    j["histogram"] = hist;
    return j;
}

Json to_json(const ProtocolExperimentReport& report) {
    Json j = report_header("protocol");
    j["config"] = Json{{"d_S", report.config.d_S},
                       {"lambda_max", report.config.lambda_max},
                       {"kappa", report.config.kappa},
                       {"d_A1", report.config.d_A1},
                       {"d_A2", report.config.d_A2 ? Json(*report.config.d_A2) : Json(nullptr)},
                       {"d_B", report.config.d_B ? Json(*report.config.d_B) : Json(nullptr)},
                       {"candidates", report.config.candidates},
                       {"probes", report.config.probes},
                       {"trials", report.config.trials},
                       {"seed", to_json(report.config.seed)},
                       {"input_sampler", "haar-schmidt-waterfill"}};
    j["plan"] = to_json(report.plan);
    j["probe_min_entropy"] = report.probe_min_entropy;
    j["chosen_candidate"] = report.chosen_candidate;
    j["mean_fidelity"] = report.mean_fidelity;
    j["min_fidelity"] = report.min_fidelity;
    j["max_pinsker_violation"] = report.max_pinsker_violation;
    j["ledger"] = to_json(ResourceLedger{report.plan.qubits, report.plan.ebits, 0.0});
    Json trials = Json::array();
    for (const auto& t : report.trials) {
        trials.push_back(Json{{"lambda_max_measured", t.lambda_max_measured},
                              {"predicted_overlap", t.predicted_overlap},
                              {"s_psi_prime_b", t.s_psi_prime_b},
                              {"trace_dist_to_uniform", t.trace_dist_to_uniform},
                              {"pinsker_rhs", t.pinsker_rhs},
                              {"projection_leakage", t.projection_leakage},
                              {"fidelity", t.fidelity}});
    }
    j["trials_detail"] = trials;
    Json sweep = Json::array();
    for (const auto& p : report.sweep) {
        sweep.push_back(Json{{"d_B", p.d_B}, {"mean_fidelity", p.mean_fidelity}, {"min_fidelity", p.min_fidelity}});
    }
    j["sweep_d_B"] = sweep;
    return j;
}

Json to_json(const bounds::CausalityReport& report) {
    Json j = report_header("causality");
    j["d_S"] = report.d_S;
    j["a"] = report.a;
    j["messages"] = report.messages;
    j["decode_probabilities"] = report.decode_probabilities;
    j["mean_decode_probability"] = report.mean_decode_probability;
    j["guessing_baseline"] = report.guessing_baseline;
    j["implied_cbit_lower_bound"] = report.implied_cbit_lower_bound;
    return j;
}

Json to_json(const memoryless::MemorylessReport& report) {
    Json j = report_header("memoryless");
    j["n"] = report.params.n;
    j["delta"] = report.params.delta;
    j["epsilon"] = report.params.epsilon;
    j["m"] = report.m;
    j["d_S"] = report.d_S;
    j["c_constant"] = report.c_constant;
    j["typical_rank"] = report.typical_rank;
    j["log_rank_bound"] = report.log_rank_bound;
    j["lambda_max_plan"] = report.lambda_max_plan;
    j["lambda_max_bound"] = report.lambda_max_bound;
    j["operator_inequality_margin"] = report.operator_inequality_margin;
    j["plan"] = to_json(report.plan);
    j["rates"] = Json{{"qubit_rate", report.rates.qubit_rate},
                      {"ebit_rate", report.rates.ebit_rate},
                      {"source_entropy", report.rates.source_entropy},
                      {"mean_state_entropy", report.rates.mean_state_entropy}};
    j["atypical_mass"] = report.atypical_mass;
    j["atypical_mass_bound"] = report.atypical_mass_bound;
    j["atypical_fidelity_convention"] = "zero";
    j["mean_fidelity"] = report.mean_fidelity;
    j["min_retained_weight"] = report.min_retained_weight;
    j["max_trace_distance"] = report.max_trace_distance;
    const Json ledger = to_json(report.plan.ledger());
    Json blocks = Json::array();
    for (const auto& b : report.blocks) {
        blocks.push_back(Json{{"index_string", b.index_string},
                              {"probability", b.probability},
                              {"typical", b.typical},
                              {"retained_weight", b.retained_weight},
                              {"lambda_max", b.lambda_max},
                              {"trace_distance", b.trace_distance},
                              {"rank", b.typical ? Json(report.typical_rank) : Json(nullptr)},
                              {"fidelity", b.fidelity},
                              {"resources", b.typical ? ledger : Json(nullptr)}});
    }
    j["blocks"] = blocks;
    return j;
}

Json to_json(const idcodes::IdErrorEstimate& estimate) {
    return Json{{"pairs", estimate.pairs}, {"max_error", estimate.max_error}, {"mean_error", estimate.mean_error}};
}

Json to_json(const idcodes::IdSdcResult& result) {
    return Json{{"preparation_fidelity", result.preparation_fidelity},
                {"id_error_direct", result.id_error_direct},
                {"id_error_prepared", result.id_error_prepared},
                {"triangle_bound", result.triangle_bound},
                {"lambda_measured", result.lambda_measured},
                {"lambda_gate_relaxed", result.lambda_gate_relaxed},
                {"ledger", to_json(result.ledger)}};
}

std::string serialize_report(const Json& report) {
    return report.dump(2) + "\n";
}

}  // namespace densecode
