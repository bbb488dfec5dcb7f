#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dioph/constructions.hpp"
#include "dioph/errors.hpp"
#include "dioph/json_io.hpp"

using namespace dioph;

namespace {

std::vector<WeightFunction> parse_weights(const std::string& spec, std::size_t d, long n) {
    if (spec == "ones") return std::vector<WeightFunction>(d, WeightFunction::ones(n));
    std::vector<WeightFunction> fs;
    std::stringstream ss(spec);
    std::string path;
    while (std::getline(ss, path, ',')) fs.push_back(weight_from_json(load_json_file(path)));
    if (fs.size() != d) throw Error("need " + std::to_string(d) + " weight files");
    for (const auto& f : fs)
        if (static_cast<long>(f.n_max) != n) throw Error("weight N does not match --N");
    return fs;
}

// The Q-linear independence of {1} and the constants is a declared contract;
// a cheap LLL probe warns when it looks violated.
void warn_if_dependent(const BasisPtr& basis) {
    if (auto rel = find_integer_relation(*basis)) {
        std::cerr << "warning: declared constants admit a small integer relation (";
        for (std::size_t i = 0; i < rel->size(); ++i)
            std::cerr << (*rel)[i] << (i + 1 < rel->size() ? " " : "");
        std::cerr << "); results assume independence" << std::endl;
    }
}

LinearSystem load_system(const std::string& path) {
    LinearSystem sys = system_from_json(load_json_file(path));
    warn_if_dependent(sys.basis());
    return sys;
}

void write_or_print(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content << std::endl;
    } else {
        std::ofstream out(out_path);
        out << content;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diophantine inequality counting, Gowers norms, and classification"};
    app.require_subcommand(1);

    // classify
    std::string classify_system;
    auto* classify = app.add_subcommand("classify", "classify a linear system");
    classify->add_option("system", classify_system, "system JSON file")->required();

    // gowers
    std::string gowers_input;
    std::size_t gowers_degree = 2;
    bool gowers_cyclic_flag = false;
    auto* gowers = app.add_subcommand("gowers", "Gowers norm of a weight function");
    gowers->add_option("--input", gowers_input, "weight JSON file")->required();
    gowers->add_option("--degree", gowers_degree, "norm degree");
    gowers->add_flag("--cyclic", gowers_cyclic_flag, "cyclic norm instead of interval");

    // count
    std::string count_system, count_fs = "ones", count_g = "box";
    long count_n = 100;
    std::vector<double> count_eps = {0.5};
    double count_sigma = 0.1;
    bool count_brute_flag = false;
    auto* count = app.add_subcommand("count", "weighted solution count");
    count->add_option("--system", count_system)->required();
    count->add_option("--N", count_n)->required();
    count->add_option("--eps", count_eps, "image half-widths (scalar or per row)");
    count->add_option("--G", count_g, "image cutoff kind: box | tent");
    count->add_option("--sigma", count_sigma, "tent ramp parameter");
    count->add_option("--fs", count_fs, "'ones' or comma-separated weight files");
    count->add_flag("--brute", count_brute_flag, "force the brute oracle path");

    // reduce
    std::string reduce_system;
    double reduce_eps = 0.5;
    auto* reduce_cmd = app.add_subcommand("reduce", "dimension reduction bundle");
    reduce_cmd->add_option("--system", reduce_system)->required();
    reduce_cmd->add_option("--eps", reduce_eps);

    // verify-reduction
    std::string verify_system;
    double verify_eps = 0.5;
    long verify_n = 50;
    auto* verify = app.add_subcommand("verify-reduction", "decomposition identity check");
    verify->add_option("--system", verify_system)->required();
    verify->add_option("--eps", verify_eps);
    verify->add_option("--N", verify_n);

    // normal-form
    std::string nf_forms;
    double nf_c1 = 0.05;
    int nf_extend = -1;
    auto* nf = app.add_subcommand("normal-form", "Cauchy-Schwarz complexity / extension");
    nf->add_option("--forms", nf_forms)->required();
    nf->add_option("--c1", nf_c1);
    nf->add_option("--extend", nf_extend, "build the extension for this form index");

    // approx
    std::string approx_system;
    double approx_tau1 = 0.25, approx_tau2 = 0.25, approx_delta = 1e-4;
    bool approx_probe = false;
    std::vector<double> approx_grid;
    auto* approx = app.add_subcommand("approx", "approximation function bounds");
    approx->add_option("--system", approx_system)->required();
    approx->add_option("--tau1", approx_tau1);
    approx->add_option("--tau2", approx_tau2);
    approx->add_option("--delta", approx_delta);
    approx->add_flag("--probe", approx_probe, "decay table instead of a single query");
    approx->add_option("--tau2-grid", approx_grid);

    // construct
    std::string construct_system, construct_case = "auto", construct_out;
    long construct_n = 10000;
    double construct_p = -1.0;
    std::size_t construct_trials = 50;
    std::uint64_t construct_seed = 7;
    auto* construct = app.add_subcommand("construct", "adversarial construction verdict");
    construct->add_option("--system", construct_system)->required();
    construct->add_option("--N", construct_n);
    construct->add_option("--case", construct_case, "auto (case picked from b1, b2)");
    construct->add_option("--p", construct_p);
    construct->add_option("--seed", construct_seed);
    construct->add_option("--trials", construct_trials);
    construct->add_option("--out", construct_out, "also write the verdict CSV here");

    // experiment
    std::string exp_config, exp_out;
    auto* experiment = app.add_subcommand("experiment", "config-driven experiment run");
    experiment->add_option("--config", exp_config)->required();
    experiment->add_option("--out", exp_out, "output directory for CSV files");

    // sieve
    std::size_t sieve_n = 1000000;
    auto* sieve_cmd = app.add_subcommand("sieve", "Mobius/Liouville sieve summary");
    sieve_cmd->add_option("--n", sieve_n);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classify) {
            LinearSystem sys = load_system(classify_system);
            std::cout << classification_to_json(sys.classify()).dump(2) << std::endl;
        } else if (*gowers) {
            WeightFunction f = weight_from_json(load_json_file(gowers_input));
            if (gowers_cyclic_flag) {
                double v = gowers_cyclic(f.values, gowers_degree);
                std::cout << Json{{"degree", gowers_degree}, {"norm_value", v}}.dump(2)
                          << std::endl;
            } else {
                std::cout << gowers_report_to_json(gowers_interval(f, gowers_degree)).dump(2)
                          << std::endl;
            }
        } else if (*count) {
            LinearSystem sys = load_system(count_system);
            CutoffSpec cutoff;
            std::vector<double> eps = count_eps;
            if (eps.size() == 1) eps.assign(sys.m(), eps[0]);
            if (count_g == "tent")
                cutoff.image = ImageCutoff::lipschitz_tent(sys.m(), eps[0], count_sigma);
            else
                cutoff.image = ImageCutoff::box_vector(eps);
            auto fs = parse_weights(count_fs, sys.d(), count_n);
            CountResult res = count_brute_flag ? count_brute(sys, count_n, cutoff, fs)
                                               : count_fast(sys, count_n, cutoff, fs);
            std::cout << count_result_to_json(res).dump(2) << std::endl;
        } else if (*reduce_cmd) {
            LinearSystem sys = load_system(reduce_system);
            ReductionBundle bundle = reduce(sys, reduce_eps);
            std::cout << bundle_to_json(bundle).dump(2) << std::endl;
        } else if (*verify) {
            LinearSystem sys = load_system(verify_system);
            ReductionBundle bundle = reduce(sys, verify_eps);
            std::vector<WeightFunction> fs(sys.d(), WeightFunction::ones(verify_n));
            DecompositionCheck check = verify_decomposition(sys, bundle, verify_n, fs);
            std::cout << Json{{"lhs", check.lhs},
                              {"rhs", check.rhs},
                              {"max_abs_diff", check.max_abs_diff}}
                             .dump(2)
                      << std::endl;
        } else if (*nf) {
            FormSystem psi = forms_from_json(load_json_file(nf_forms));
            ComplexityReport rep = cs_complexity(psi, nf_c1);
            Json j;
            j["finite"] = rep.finite();
            if (rep.finite()) j["s"] = rep.s;
            j["exhaustive"] = rep.exhaustive;
            if (nf_extend >= 0) {
                if (!rep.finite()) throw Error("infinite complexity; no extension");
                NormalFormExtension ext =
                    extend_normal_form(psi, static_cast<std::size_t>(nf_extend),
                                       rep.best_partition[static_cast<std::size_t>(nf_extend)]);
                j["extension"] = Json{{"target", ext.target_index},
                                      {"s", ext.s},
                                      {"shift_vectors", ext.shift_vectors},
                                      {"extended_rows", ext.extended.forms},
                                      {"witness", ext.witness.witness}};
            }
            std::cout << j.dump(2) << std::endl;
        } else if (*approx) {
            LinearSystem sys = load_system(approx_system);
            if (approx_probe) {
                std::vector<double> grid =
                    approx_grid.empty() ? std::vector<double>{0.5, 0.25, 0.1, 0.05}
                                        : approx_grid;
                DecayProbe probe = algebraic_decay_probe(sys, approx_tau1, grid);
                std::string csv = "tau2,lower,upper,witness_k\n";
                char buf[128];
                for (const auto& row : probe.table) {
                    long k = row.witness_k.empty() ? 0 : row.witness_k[0];
                    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%ld\n", row.tau2,
                                  row.lower, row.upper, k);
                    csv += buf;
                }
                std::cout << csv;
                std::cerr << "fitted_exponent=" << probe.fitted_exponent << std::endl;
            } else {
                ApproxQuery q;
                q.tau1 = approx_tau1;
                q.tau2 = approx_tau2;
                q.delta = approx_delta;
                std::cout << approx_result_to_json(approx_query(sys, q)).dump(2) << std::endl;
            }
        } else if (*construct) {
            LinearSystem sys = load_system(construct_system);
            ConverseParams params;
            params.p = construct_p;
            params.trials = construct_trials;
            params.seed = construct_seed;
            params.detect_threshold = 0.3;
            ConverseReport rep = converse_verdict(sys, construct_n, params);
            Json j{{"case", rep.case_id},
                   {"eta", rep.eta},
                   {"t_ones", rep.t_ones},
                   {"rho", rep.rho},
                   {"rho_stderr", rep.rho_stderr},
                   {"t_gap", rep.t_gap},
                   {"t_gap_stderr", rep.t_gap_stderr},
                   {"gap_threshold", rep.gap_threshold},
                   {"norm_threshold", rep.norm_threshold},
                   {"gap_ok", rep.gap_ok},
                   {"norm_ok", rep.norm_ok},
                   {"p", rep.p},
                   {"delta", rep.delta},
                   {"trials", rep.trials},
                   {"note", rep.note}};
            std::cout << j.dump(2) << std::endl;
            if (!construct_out.empty()) {
                std::string csv = "case,eta,rho,t_gap,gap_threshold,norm_threshold\n";
                char buf[160];
                std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                              rep.case_id, rep.eta, rep.rho, rep.t_gap, rep.gap_threshold,
                              rep.norm_threshold);
                csv += buf;
                write_or_print(construct_out, csv);
            }
        } else if (*experiment) {
            ExperimentConfig cfg = experiment_config_from_json(load_json_file(exp_config));
            ExperimentOutcome outcome = run_experiment(cfg);
            std::string path = exp_out.empty() ? "" : exp_out + "/" + cfg.kind + ".csv";
            write_or_print(path, outcome.table.to_csv());
            std::cerr << outcome.summary << std::endl;
            if (!outcome.assertions_passed) {
                std::cerr << "in-config assertions FAILED" << std::endl;
                return 1;
            }
        } else if (*sieve_cmd) {
            SieveTable table = sieve(sieve_n);
            long long mertens = 0;
            std::size_t squarefree = 0;
            for (std::size_t n = 1; n <= table.n_max; ++n) {
                mertens += table.mu[n];
                if (table.mu[n] != 0) ++squarefree;
            }
            std::cout << Json{{"n_max", table.n_max},
                              {"mertens", mertens},
                              {"squarefree_density",
                               static_cast<double>(squarefree) /
                                   static_cast<double>(table.n_max)}}
                             .dump(2)
                      << std::endl;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
