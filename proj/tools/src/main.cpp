// pnt: fit polynomial normal-transformation models, solve equivalent normal correlations and
// generate correlated vectors.
//
// Exit codes: 0 success, 1 fixture check failed or internal error, 2 infeasible correlation,
// 3 conditioning or numerical failure, 4 I/O or schema error.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pnt/errors.hpp"

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitConditioning = 3;
constexpr int kExitInput = 4;

void add_fit_flags(CLI::App& cmd, pnt::cli::FitSettings& fit, std::string& method, std::vector<int>& nodes,
                   std::filesystem::path& node_list) {
    cmd.add_option("--method", method, "pwm or percentile")->check(CLI::IsMember({"pwm", "percentile"}));
    cmd.add_option("--degree", fit.degree, "Polynomial degree")->check(CLI::Range(0, pnt::kMaxDegree));
    cmd.add_option("--alpha", fit.plan.alpha, "Tail probability of the percentile node plan");
    cmd.add_option("--nodes", nodes, "Percentile node counts low,mid,high")->delimiter(',')->expected(3);
    cmd.add_option("--node-list", node_list, "File of explicit percentile probabilities");
    cmd.add_flag("--allow-high-degree", fit.allow_high_degree, "Permit PWM degrees above the soft caps");
}

void apply_fit_flags(pnt::cli::FitSettings& fit, const std::string& method, const std::vector<int>& nodes) {
    if (!method.empty()) fit.method = pnt::cli::parse_method(method);
    if (!nodes.empty()) fit.plan.counts = {nodes[0], nodes[1], nodes[2]};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polynomial normal transformation: fit, rho, gen, validate"};
    app.require_subcommand(1);

    pnt::cli::FitArgs fit_args;
    std::string fit_method;
    std::vector<int> fit_nodes;
    auto* fit = app.add_subcommand("fit", "Fit a polynomial model to a distribution, a sample or every marginal of a spec");
    fit->add_option("--dist", fit_args.dist, "Distribution as family:params, e.g. beta:2,2");
    fit->add_option("--sample", fit_args.sample, "CSV file with a sample");
    fit->add_option("--column", fit_args.column, "Sample column name or zero-based index");
    fit->add_option("--spec", fit_args.spec, "CorrelationSpec JSON; fits every marginal");
    add_fit_flags(*fit, fit_args.fit, fit_method, fit_nodes, fit_args.node_list);
    fit->add_option("--out", fit_args.out, "Model JSON file (directory with --spec); stdout when omitted");
    fit->add_option("--report", fit_args.report, "Fit report JSON file, '-' for stdout");

    pnt::cli::RhoArgs rho_args;
    auto* rho = app.add_subcommand("rho", "Solve the normal-space correlation for a pair or a whole spec");
    rho->add_option("--model1", rho_args.model1, "First model JSON");
    rho->add_option("--model2", rho_args.model2, "Second model JSON");
    rho->add_option("--rho-x", rho_args.rho_x, "Target correlation(s)")->delimiter(',');
    rho->add_flag("--matrix", rho_args.matrix, "Solve the full matrix of --spec");
    rho->add_option("--spec", rho_args.spec, "CorrelationSpec JSON");
    rho->add_flag("--nearest-pd", rho_args.nearest_pd, "Repair a non positive definite Rz");
    rho->add_option("--out", rho_args.out, "Report JSON file; stdout when omitted");

    pnt::cli::GenArgs gen_args;
    std::size_t gen_count = 0;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "Generate correlated vectors from a spec");
    gen->add_option("--spec", gen_args.spec, "CorrelationSpec JSON")->required();
    auto* count_opt = gen->add_option("--count", gen_count, "Number of vectors (overrides the spec)");
    auto* seed_opt = gen->add_option("--seed", gen_seed, "Seed (overrides the spec)");
    gen->add_option("--out", gen_args.out, "Samples CSV; overrides the spec, '-' for stdout");
    gen->add_option("--report", gen_args.report, "Report JSON with sample moments and correlations");
    gen->add_flag("--nearest-pd", gen_args.nearest_pd, "Repair a non positive definite Rz");
    gen->add_option("--threads", gen_args.threads, "Worker threads, 0 = hardware (output is identical)");

    pnt::cli::ValidateArgs val_args;
    pnt::cli::FitSettings val_fit;
    std::string val_method;
    std::vector<int> val_nodes;
    std::filesystem::path val_node_list;
    auto* validate = app.add_subcommand("validate", "Quantile error of a model against its target, or run a fixture");
    validate->add_option("--fixture", val_args.fixture, "Fixture name or path");
    validate->add_option("--fixture-dir", val_args.fixture_dir, "Fixture directory");
    validate->add_option("--model", val_args.model, "Model JSON");
    validate->add_option("--dist", val_args.dist, "Target distribution as family:params");
    add_fit_flags(*validate, val_fit, val_method, val_nodes, val_node_list);
    validate->add_option("--range", val_args.range, "Probit range lo,hi")->delimiter(',')->expected(2);
    validate->add_option("--grid", val_args.grid, "Number of evenly spaced probabilities")->check(CLI::Range(2, 100000000));
    validate->add_option("--out", val_args.out, "Per-point CSV (p, x_p, x_p_star, eps_percent), '-' for stdout");
    validate->add_option("--report", val_args.report, "FitReport JSON file; stdout when omitted");
    validate->add_option("--histogram", val_args.histogram, "Density comparison CSV");
    validate->add_option("--bins", val_args.bins, "Histogram bins")->check(CLI::PositiveNumber);
    validate->add_option("--draws", val_args.draws, "Histogram draws")->check(CLI::PositiveNumber);
    validate->add_option("--seed", val_args.seed, "Histogram seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*fit) {
            apply_fit_flags(fit_args.fit, fit_method, fit_nodes);
            return pnt::cli::cmd_fit(fit_args);
        }
        if (*rho) return pnt::cli::cmd_rho(rho_args);
        if (*gen) {
            if (*count_opt) gen_args.count = gen_count;
            if (*seed_opt) gen_args.seed = gen_seed;
            return pnt::cli::cmd_gen(gen_args);
        }
        if (!val_method.empty() || *validate->get_option("--degree")) {
            apply_fit_flags(val_fit, val_method, val_nodes);
            if (!val_node_list.empty()) val_fit.plan.explicit_nodes = pnt::cli::read_node_list(val_node_list);
            val_args.fit = val_fit;
        }
        return pnt::cli::cmd_validate(val_args);
    } catch (const pnt::cli::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const pnt::InfeasibleCorrelationError& e) {
        std::cerr << "infeasible correlation: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const pnt::NotPositiveDefiniteError& e) {
        std::cerr << "infeasible correlation: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const pnt::ConditioningError& e) {
        std::cerr << "conditioning failure: " << e.what() << '\n';
        return kExitConditioning;
    } catch (const pnt::SingularMatrixError& e) {
        std::cerr << "conditioning failure: " << e.what() << '\n';
        return kExitConditioning;
    } catch (const pnt::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const pnt::UnsupportedMomentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const pnt::InsufficientSampleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const pnt::Error& e) {
        // Integration, bracketing, overflow, degenerate and consistency failures.
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitConditioning;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
