// densecode: experiment driver for the superdense-coding library.
//
// Subcommands: concentration | protocol | memoryless | idcode | bounds.
// Reports are deterministic functions of (config, seed): no timestamps, no
// machine identifiers, and the job count never changes report bytes.

#include "densecode/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using densecode::Json;

void emit(const Json& report, const std::string& out_path) {
    const std::string body = densecode::serialize_report(report);
    if (out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + out_path);
        f << body;
        std::cout << "wrote " << out_path << "\n";
    }
}

void emit_text(const std::string& body, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + out_path);
        f << body;
        std::cout << "wrote " << out_path << "\n";
    }
}

int fail(const std::string& type, const std::string& message, int code) {
    Json j;
    j["error"] = Json{{"type", type}, {"message", message}};
    std::cerr << j.dump() << "\n";
    return code;
}

struct CommonArgs {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    int jobs = 1;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
    cmd->add_option("--seed", args->seed, "base RNG seed");
    cmd->add_option("--stream", args->stream, "base RNG stream id");
    cmd->add_option("--jobs", args->jobs, "worker threads (never changes report contents)");
    cmd->add_option("--out", args->out, "output path (stdout when omitted)");
}

densecode::memoryless::SourceEnsemble named_ensemble(const std::string& name) {
    using densecode::ComplexVector;
    using densecode::HilbertSpace;
    using densecode::PureState;
    using densecode::Vector;

    auto basis_state = [](const HilbertSpace& space, std::int64_t k) {
        Vector v = Vector::Zero(space.total_dim());
        v(k) = 1.0;
        return PureState(ComplexVector(space, std::move(v)));
    };

    if (name == "classical-bits") {
        HilbertSpace space({1, 2});
        return densecode::memoryless::SourceEnsemble({basis_state(space, 0), basis_state(space, 1)}, {0.5, 0.5});
    }
    if (name == "bell") {
        return densecode::memoryless::SourceEnsemble({densecode::maximally_entangled(2)}, {1.0});
    }
    if (name == "product-bell") {
        HilbertSpace space({2, 2});
        return densecode::memoryless::SourceEnsemble(
            {basis_state(space, 0), densecode::maximally_entangled(2)}, {0.5, 0.5});
    }
    throw std::invalid_argument("unknown ensemble: " + name +
                                " (expected classical-bits | bell | product-bell)");
}

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"densecode: one-shot superdense coding experiments"};
    app.require_subcommand(1);
    // config files carry one [subcommand] section each; the flag goes before
    // the subcommand, and command-line flags win over file values
    app.set_config("--config");

    // concentration
    auto* conc = app.add_subcommand("concentration", "entropy-deficit concentration sampling");
    conc->configurable();
    CommonArgs conc_common;
    densecode::concentration::ConcentrationConfig conc_cfg;
    conc->add_option("--r", conc_cfg.r, "rank of the conjugated state");
    conc->add_option("--d-a", conc_cfg.d_A, "traced-out dimension")->required();
    conc->add_option("--d-b", conc_cfg.d_B, "kept dimension")->required();
    conc->add_option("--alpha", conc_cfg.alpha, "deficit threshold offset")->required();
    conc->add_option("--trials", conc_cfg.trials, "number of trials");
    add_common(conc, &conc_common);

    // protocol
    auto* prot = app.add_subcommand("protocol", "universal protocol runs on bounded-Schmidt inputs");
    prot->configurable();
    CommonArgs prot_common;
    densecode::ProtocolExperimentConfig prot_cfg;
    std::int64_t prot_d_a2 = 0, prot_d_b = 0;
    bool plan_only = false;
    std::vector<std::int64_t> sweep_d_b;
    prot->add_option("--d-s", prot_cfg.d_S, "input S dimension")->required();
    prot->add_option("--lambda-max", prot_cfg.lambda_max, "largest allowed Schmidt eigenvalue")->required();
    prot->add_option("--kappa", prot_cfg.kappa, "target infidelity parameter")->required();
    prot->add_option("--d-a1", prot_cfg.d_A1, "input A1 dimension (0 = derive)");
    prot->add_option("--d-a2", prot_d_a2, "override the transmitted dimension");
    prot->add_option("--d-b", prot_d_b, "override the shared-entanglement dimension");
    prot->add_option("--candidates", prot_cfg.candidates, "coupling-unitary candidates");
    prot->add_option("--probes", prot_cfg.probes, "probe states per candidate");
    prot->add_option("--trials", prot_cfg.trials, "fresh input states");
    prot->add_option("--sweep-d-b", sweep_d_b, "extra d_B values to sweep (d_A2 follows at the plan ratio)");
    prot->add_flag("--plan-only", plan_only, "print the resource plan table and exit");
    add_common(prot, &prot_common);

    // memoryless
    auto* mem = app.add_subcommand("memoryless", "typical-subspace block protocol");
    mem->configurable();
    CommonArgs mem_common;
    std::string mem_ensemble = "product-bell";
    int mem_n = 4;
    double mem_epsilon = 0.1;
    double mem_delta = 0.0;
    densecode::memoryless::BlockProtocolConfig mem_cfg;
    mem->add_option("--ensemble", mem_ensemble, "classical-bits | bell | product-bell");
    mem->add_option("--n", mem_n, "block length")->required();
    mem->add_option("--epsilon", mem_epsilon, "retention parameter");
    mem->add_option("--delta", mem_delta, "typicality width override (0 = m sqrt(2 d_S / epsilon))");
    mem->add_option("--kappa", mem_cfg.kappa, "protocol kappa");
    mem->add_option("--candidates", mem_cfg.candidates, "coupling-unitary candidates");
    mem->add_option("--probes", mem_cfg.probes, "probe states per candidate");
    mem->add_option("--trials", mem_cfg.trials, "sampled blocks (0 = exhaustive)");
    add_common(mem, &mem_common);

    // idcode
    auto* idc = app.add_subcommand("idcode", "random-isometry identification codes");
    idc->configurable();
    CommonArgs idc_common;
    int id_d = 16, id_a = 2, id_dc = 3, id_pairs = 200, id_sdc_trials = 0;
    double id_kappa = 0.2;
    int id_candidates = 8, id_probes = 32;
    idc->add_option("--d", id_d, "code output dimension")->required();
    idc->add_option("--a", id_a, "traced-out dimension")->required();
    idc->add_option("--d-c", id_dc, "message space dimension")->required();
    idc->add_option("--pairs,--trials", id_pairs, "sampled (phi, psi) pairs");
    idc->add_option("--sdc-trials", id_sdc_trials, "end-to-end protocol preparations");
    idc->add_option("--kappa", id_kappa, "protocol kappa for preparations");
    idc->add_option("--candidates", id_candidates, "coupling-unitary candidates");
    idc->add_option("--probes", id_probes, "probe states per candidate");
    add_common(idc, &idc_common);

    // bounds
    auto* bnd = app.add_subcommand("bounds", "CSV sweep of the optimality bounds");
    bnd->configurable();
    CommonArgs bnd_common;
    std::vector<int> bnd_d_s;
    std::vector<double> bnd_lambda, bnd_f;
    bnd->add_option("--d-s", bnd_d_s, "d_S grid values");
    bnd->add_option("--lambda-max", bnd_lambda, "lambda_max grid values");
    bnd->add_option("--f", bnd_f, "fidelity grid values");
    add_common(bnd, &bnd_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (conc->parsed()) {
            conc_cfg.seed = densecode::Seed{conc_common.seed, conc_common.stream};
            conc_cfg.jobs = conc_common.jobs;
            auto report = densecode::concentration::sample_entropy_deficits(conc_cfg);
            emit(densecode::to_json(report), conc_common.out);
        } else if (prot->parsed()) {
            prot_cfg.seed = densecode::Seed{prot_common.seed, prot_common.stream};
            prot_cfg.jobs = prot_common.jobs;
            if ((prot_d_a2 > 0) != (prot_d_b > 0)) {
                throw std::invalid_argument("--d-a2 and --d-b must be given together");
            }
            if (prot_d_a2 > 0) prot_cfg.d_A2 = prot_d_a2;
            if (prot_d_b > 0) prot_cfg.d_B = prot_d_b;
            prot_cfg.sweep_d_B = sweep_d_b;
            if (plan_only) {
                auto plan = (prot_cfg.d_A2 && prot_cfg.d_B)
                                ? densecode::plan_with_dims(prot_cfg.d_S, prot_cfg.lambda_max, prot_cfg.kappa,
                                                            *prot_cfg.d_A2, *prot_cfg.d_B)
                                : densecode::plan_resources(prot_cfg.d_S, prot_cfg.lambda_max, prot_cfg.kappa);
                emit_text(densecode::format_plan_table({plan}), prot_common.out);
            } else {
                auto report = densecode::run_protocol_experiment(prot_cfg);
                emit(densecode::to_json(report), prot_common.out);
            }
        } else if (mem->parsed()) {
            auto ens = named_ensemble(mem_ensemble);
            auto params = densecode::memoryless::TypicalParams::from_epsilon(ens, mem_n, mem_epsilon);
            if (mem_delta > 0.0) params.delta = mem_delta;
            mem_cfg.jobs = mem_common.jobs;
            auto report = densecode::memoryless::run_block_protocol(
                ens, params, mem_cfg, densecode::Seed{mem_common.seed, mem_common.stream});
            Json j = densecode::to_json(report);
            j["ensemble"] = mem_ensemble;
            j["seed"] = densecode::to_json(densecode::Seed{mem_common.seed, mem_common.stream});
            emit(j, mem_common.out);
        } else if (idc->parsed()) {
            const densecode::Seed seed{idc_common.seed, idc_common.stream};
            auto code = densecode::idcodes::build_id_code(id_d, id_a, id_dc, seed);
            auto estimate = densecode::idcodes::estimate_id_error(code, id_pairs,
                                                                  seed.with_stream(seed.stream + 1000003ULL));
            Json j = densecode::report_header("idcode");
            j["d"] = id_d;
            j["a"] = id_a;
            j["d_C"] = id_dc;
            j["seed"] = densecode::to_json(seed);
            j["max_error"] = estimate.max_error;
            j["mean_error"] = estimate.mean_error;
            j["pairs"] = estimate.pairs;
            j["lambda_target"] = code.lambda_target;
            j["d_C_reference_formula"] = "floor(c(lambda) d^2 / (log2 d)^4), c(lambda) unspecified";
            j["net_granularity_reference"] = "lambda / 16";

            if (id_sdc_trials > 0) {
                auto plan = densecode::plan_resources(id_d, 1.0 / static_cast<double>(id_a), id_kappa);
                auto coupling = densecode::search_coupling_unitary(plan, id_candidates, id_probes,
                                                                   seed.with_stream(seed.stream + 2000003ULL));
                Json runs = Json::array();
                for (int t = 0; t < id_sdc_trials; ++t) {
                    auto phi = densecode::haar_state(densecode::HilbertSpace({id_dc}),
                                                     seed.with_stream(seed.stream + 3000017ULL + 2ULL * t));
                    auto psi = densecode::haar_state(densecode::HilbertSpace({id_dc}),
                                                     seed.with_stream(seed.stream + 3000017ULL + 2ULL * t + 1ULL));
                    auto result = densecode::idcodes::id_code_via_sdc(code, phi, psi, plan, coupling);
                    runs.push_back(densecode::to_json(result));
                }
                j["plan"] = densecode::to_json(plan);
                j["ledger"] = densecode::to_json(plan.ledger());
                j["sdc_runs"] = runs;
            }
            emit(j, idc_common.out);
        } else if (bnd->parsed()) {
            std::ostringstream csv;
            csv << "d_S,lambda_max,F,cbit_bound,cbit_sharper,ebit_bound,qubit_bound,sum_bound,"
                   "cbit_vacuous,ebit_vacuous,qubit_vacuous,error\n";
            for (int d_s : bnd_d_s) {
                for (double lm : bnd_lambda) {
                    for (double f : bnd_f) {
                        csv << d_s << ',' << format_double(lm) << ',' << format_double(f) << ',';
                        try {
                            densecode::bounds::BoundInputs in{d_s, lm, f};
                            auto cb = densecode::bounds::rsp_cbit_lower_bound(in);
                            auto eb = densecode::bounds::rsp_ebit_lower_bound(in);
                            auto qb = densecode::bounds::sdc_qubit_lower_bound(in);
                            csv << format_double(cb.value) << ',' << format_double(cb.sharper) << ','
                                << format_double(eb.value) << ',' << format_double(qb.value) << ','
                                << format_double(qb.sum_value) << ',' << (cb.vacuous ? 1 : 0) << ','
                                << (eb.vacuous ? 1 : 0) << ',' << (qb.vacuous ? 1 : 0) << ",\n";
                        } catch (const std::exception& e) {
                            csv << ",,,,,,,," << '"' << e.what() << '"' << "\n";
                        }
                    }
                }
            }
            emit_text(csv.str(), bnd_common.out);
        }
    } catch (const std::invalid_argument& e) {
        return fail("validation", e.what(), 1);
    } catch (const std::length_error& e) {
        return fail("capacity", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 1);
    }
    return 0;
}
