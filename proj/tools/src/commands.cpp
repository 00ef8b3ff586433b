#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "pnt/correlation.hpp"
#include "pnt/errors.hpp"
#include "pnt/fit_percentile.hpp"
#include "pnt/fit_pwm.hpp"
#include "pnt/model_io.hpp"
#include "pnt/numerics.hpp"
#include "pnt/sampler.hpp"

namespace pnt::cli {

using nlohmann::json;

namespace {

// Models evaluated over the probability interval they were fitted on, or this default.
constexpr ProbitRange kDefaultRange{0.001, 0.999};

json report_header(const char* command) { return {{"schema_version", kSchemaVersion}, {"command", command}}; }

ProbitRange assessment_range(const PolynomialModel& m) { return m.probit_range().value_or(kDefaultRange); }

// A decreasing stretch inside the fitted probit range fails validation; one only in the tails
// (out to the truncation window) is a warning.
bool check_monotonicity(const PolynomialModel& model, json& report) {
    const auto range = assessment_range(model);
    const double z_lo = normal_quantile(range.lo);
    const double z_hi = normal_quantile(range.hi);
    const auto inside = monotonicity_check(model, z_lo, z_hi);
    const auto tails = monotonicity_check(model, -kNormalTruncation, kNormalTruncation);
    std::vector<double> tail_z;
    for (double z : tails.violation_z)
        if (z < z_lo || z > z_hi) tail_z.push_back(z);
    auto extent = [](const std::vector<double>& z) {
        json j = {{"count", z.size()}};
        if (!z.empty()) j["z_extent"] = {z.front(), z.back()};
        return j;
    };
    report["monotonicity"] = {{"z_range", {z_lo, z_hi}},
                              {"monotone", inside.monotone},
                              {"violations", extent(inside.violation_z)},
                              {"tail_violations", extent(tail_z)}};
    if (!inside.monotone)
        std::cerr << "error: model decreases inside its fitted range, first at z = " << inside.violation_z.front()
                  << '\n';
    else if (!tail_z.empty())
        std::cerr << "warning: model decreases outside its fitted range, first at z = " << tail_z.front() << '\n';
    return inside.monotone;
}

PolynomialModel fit_distribution(const TargetDistribution& d, const FitSettings& fit, json* report) {
    if (fit.method == Method::Percentile) {
        const auto r = fit_percentile(d, fit.degree, fit.plan);
        if (report) {
            (*report)["method"] = "percentile";
            (*report)["degree"] = fit.degree;
            (*report)["node_count"] = r.report.node_count;
            (*report)["max_abs_residual"] = r.report.max_abs_residual;
            (*report)["rms_residual"] = r.report.rms_residual;
        }
        return r.model;
    }
    PwmFitOptions options;
    options.allow_high_degree = fit.allow_high_degree;
    const auto r = fit_pwm(pwm_from_distribution(d, fit.degree), normal_pwm_matrix(fit.degree, {}, 0), options);
    if (report) {
        (*report)["method"] = "pwm";
        (*report)["degree"] = fit.degree;
        (*report)["conditioning"] = {{"determinant", r.conditioning.determinant},
                                     {"pivot_ratio", r.conditioning.pivot_ratio},
                                     {"pivots", r.conditioning.pivots},
                                     {"residual", r.conditioning.residual}};
    }
    return r.model;
}

PolynomialModel fit_sample(const std::vector<double>& x, const FitSettings& fit, json* report) {
    if (fit.method != Method::Pwm) throw InputError("sample input supports only the pwm fit method");
    PwmFitOptions options;
    options.allow_high_degree = fit.allow_high_degree;
    const auto r = fit_pwm(pwm_from_sample(x, fit.degree), normal_pwm_matrix(fit.degree, {}, 0), options);
    if (report) {
        (*report)["method"] = "pwm";
        (*report)["degree"] = fit.degree;
        (*report)["sample_size"] = x.size();
        (*report)["conditioning"] = {{"determinant", r.conditioning.determinant},
                                     {"pivot_ratio", r.conditioning.pivot_ratio},
                                     {"pivots", r.conditioning.pivots},
                                     {"residual", r.conditioning.residual}};
    }
    return r.model;
}

std::vector<PolynomialModel> realize_all(const CorrelationSpec& spec, json* reports) {
    std::vector<PolynomialModel> models;
    for (const auto& m : spec.marginals) {
        json r;
        models.push_back(realize_marginal(m, &r));
        if (reports) reports->push_back(std::move(r));
    }
    return models;
}

BuildRzOptions rz_options(const CorrelationSpec& spec, bool nearest_pd) {
    BuildRzOptions options;
    options.nearest_pd = nearest_pd || spec.nearest_pd;
    if (spec.target_moments)
        for (const auto& m : spec.marginals)
            options.moment_overrides.push_back(m.distribution ? std::optional<Moments>(moments(*m.distribution))
                                                              : std::nullopt);
    return options;
}

// Same choice of moments as build_rz makes for marginal i.
Moments moments_of(const BuildRzOptions& options, const std::vector<PolynomialModel>& models, std::size_t i) {
    if (!options.moment_overrides.empty() && options.moment_overrides[i]) return *options.moment_overrides[i];
    const auto mm = model_moments(models[i]);
    return {mm.mean, mm.stddev};
}

std::vector<std::string> labels_of(const CorrelationSpec& spec) {
    std::vector<std::string> out;
    for (const auto& m : spec.marginals) out.push_back(m.label);
    return out;
}

std::string samples_csv(const std::vector<std::string>& labels, const Matrix& x) {
    std::string out;
    out.reserve(x.rows() * x.cols() * 24 + 64);
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (j) out += ',';
        out += labels[j];
    }
    out += '\n';
    char buf[32];
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (j) out += ',';
            const int n = std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
            out.append(buf, static_cast<std::size_t>(n));
        }
        out += '\n';
    }
    return out;
}

std::string points_csv(const FitReport& r) {
    std::string out = "p,x_p,x_p_star,eps_percent\n";
    for (const auto& pt : r.points) {
        out += format_exact(pt.p) + ',' + format_exact(pt.x_p) + ',' + format_exact(pt.x_p_star) + ',';
        out += pt.skipped ? std::string() : format_exact(pt.eps_percent);
        out += '\n';
    }
    return out;
}

std::string histogram_csv(const DensityTable& t) {
    std::string out = "lo,hi,count,empirical,expected,analytic\n";
    for (const auto& b : t.bins) {
        const double empirical = static_cast<double>(b.count) / (static_cast<double>(t.draws) * (b.hi - b.lo));
        out += format_exact(b.lo) + ',' + format_exact(b.hi) + ',' + std::to_string(b.count) + ',' +
               format_exact(empirical) + ',' + format_exact(b.expected) + ',' + format_exact(b.analytic) + '\n';
    }
    return out;
}

}  // namespace

json model_json(const PolynomialModel& m) { return json::parse(model_to_json(m)); }

json fit_report_json(const FitReport& r) {
    return {{"probit_range", {r.probit_range.lo, r.probit_range.hi}},
            {"grid_size", r.grid_size},
            {"eps_avg", r.eps_avg},
            {"eps_min", r.eps_min},
            {"eps_max", r.eps_max},
            {"skipped_points", r.skipped_points}};
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_json(const json& j, const std::filesystem::path& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-")
        std::cout << text << std::flush;
    else
        write_file(path, text);
}

PolynomialModel realize_marginal(const MarginalSpec& m, json* report) {
    json r = {{"label", m.label}};
    PolynomialModel model({0.0});
    switch (m.kind) {
        case MarginalSpec::Kind::Model:
            r["source"] = "model";
            model = *m.model;
            break;
        case MarginalSpec::Kind::Distribution:
            r["source"] = "distribution";
            r["distribution"] = m.distribution->label();
            model = fit_distribution(*m.distribution, m.fit, &r);
            if (report)
                r["fit_report"] = fit_report_json(epsilon_report(model, *m.distribution, assessment_range(model)));
            break;
        case MarginalSpec::Kind::Sample:
            r["source"] = "sample";
            r["sample"] = m.sample_path.string();
            model = fit_sample(read_sample_column(m.sample_path, m.sample_column), m.fit, &r);
            break;
    }
    r["model"] = model_json(model);
    if (report) *report = std::move(r);
    return model;
}

int cmd_fit(const FitArgs& args) {
    const int inputs = int(!args.dist.empty()) + int(!args.sample.empty()) + int(!args.spec.empty());
    if (inputs != 1) throw InputError("fit: give exactly one of --dist, --sample or --spec");

    if (!args.spec.empty()) {
        if (args.out.empty()) throw InputError("fit --spec: --out must name a directory for the model files");
        const auto spec = load_spec(args.spec);
        json report = report_header("fit");
        json marginals = json::array();
        const auto models = realize_all(spec, &marginals);
        std::filesystem::create_directories(args.out);
        for (std::size_t i = 0; i < models.size(); ++i) {
            const auto file = args.out / (spec.marginals[i].label + ".json");
            write_file(file, model_to_json(models[i]) + "\n");
            marginals[i]["model_file"] = file.string();
        }
        report["marginals"] = std::move(marginals);
        emit_json(report, args.report);
        return 0;
    }

    FitSettings fit = args.fit;
    if (!args.node_list.empty()) fit.plan.explicit_nodes = read_node_list(args.node_list);
    try {
        fit.plan.validate();
    } catch (const DomainError& e) {
        throw InputError(std::string("--alpha/--nodes/--node-list: ") + e.what());
    }

    MarginalSpec m;
    m.label = "x";
    m.fit = fit;
    if (!args.dist.empty()) {
        try {
            m.distribution = parse_distribution(args.dist);
        } catch (const DomainError& e) {
            throw InputError(std::string("--dist: ") + e.what());
        }
    } else {
        m.kind = MarginalSpec::Kind::Sample;
        m.sample_path = args.sample;
        m.sample_column = args.column;
    }
    json details;
    const auto model = realize_marginal(m, &details);
    details.erase("label");
    const std::string text = model_to_json(model) + "\n";
    if (args.out.empty())
        std::cout << text << std::flush;
    else
        write_file(args.out, text);
    if (!args.report.empty()) {
        json report = report_header("fit");
        report.update(details);
        emit_json(report, args.report);
    }
    return 0;
}

int cmd_rho(const RhoArgs& args) {
    if (args.matrix) {
        if (args.spec.empty()) throw InputError("rho --matrix: --spec is required");
        const auto spec = load_spec(args.spec);
        if (!spec.has_correlation) throw InputError(args.spec.string() + ": correlation: required key is missing");
        const auto models = realize_all(spec, nullptr);
        const auto options = rz_options(spec, args.nearest_pd);
        json pairs = json::array();
        for (std::size_t i = 0; i < models.size(); ++i)
            for (std::size_t j = i + 1; j < models.size(); ++j) {
                const auto rp = build_rho_polynomial(models[i], models[j], moments_of(options, models, i),
                                                     moments_of(options, models, j));
                const auto b = rho_x_bounds(rp);
                pairs.push_back({{"i", spec.marginals[i].label},
                                 {"j", spec.marginals[j].label},
                                 {"rho_x", spec.rx(i, j)},
                                 {"bounds", {b.lower, b.upper}}});
            }
        const auto eq = build_rz(models, spec.rx, options);
        json report = report_header("rho");
        report["labels"] = labels_of(spec);
        report["rx"] = matrix_json(spec.rx);
        report["rz"] = matrix_json(eq.rz);
        report["cholesky"] = matrix_json(eq.l);
        report["repaired"] = eq.repaired;
        report["pairs"] = std::move(pairs);
        emit_json(report, args.out);
        return 0;
    }

    if (args.model1.empty() || args.model2.empty()) throw InputError("rho: --model1 and --model2 are required");
    if (args.rho_x.empty()) throw InputError("rho: at least one --rho-x value is required");
    auto load = [](const std::filesystem::path& p) {
        try {
            return model_from_json(read_file(p));
        } catch (const DomainError& e) {
            throw InputError(p.string() + ": " + e.what());
        }
    };
    const auto rp = build_rho_polynomial(load(args.model1), load(args.model2));
    const auto bounds = rho_x_bounds(rp);
    json solutions = json::array();
    for (double rx : args.rho_x) solutions.push_back({{"rho_x", rx}, {"rho_z", solve_rho_z(rp, rx)}});
    json report = report_header("rho");
    report["bounds"] = {bounds.lower, bounds.upper};
    report["g"] = {{"b", rp.b}, {"mu1", rp.mu1}, {"mu2", rp.mu2}, {"sigma1", rp.sigma1}, {"sigma2", rp.sigma2}};
    report["solutions"] = std::move(solutions);
    emit_json(report, args.out);
    return 0;
}

int cmd_gen(const GenArgs& args) {
    if (args.spec.empty()) throw InputError("gen: --spec is required");
    auto spec = load_spec(args.spec);
    if (args.count) {
        if (*args.count == 0) throw InputError("--count: must be at least 1");
        spec.count = *args.count;
    }
    if (args.seed) spec.seed = *args.seed;
    const auto out = args.out.empty() ? spec.samples_path : args.out;
    const auto report_path = args.report.empty() ? spec.report_path : args.report;

    auto models = realize_all(spec, nullptr);
    auto eq = build_rz(models, spec.rx, rz_options(spec, args.nearest_pd));
    const bool repaired = eq.repaired;
    const VectorModel vm(std::move(models), spec.rx, std::move(eq.rz), std::move(eq.l));
    const auto x = generate(vm, spec.count, {spec.seed, spec.stream}, args.threads);
    const auto labels = labels_of(spec);
    const std::string csv = samples_csv(labels, x);
    if (out.empty() || out == "-")
        std::cout << csv << std::flush;
    else
        write_file(out, csv);

    if (!report_path.empty()) {
        json report = report_header("gen");
        report["count"] = spec.count;
        report["seed"] = spec.seed;
        report["stream"] = spec.stream;
        report["labels"] = labels;
        json models = json::array();
        for (const auto& m : vm.models()) models.push_back(model_json(m));
        report["models"] = std::move(models);
        report["rx"] = matrix_json(vm.rx());
        report["rz"] = matrix_json(vm.rz());
        report["repaired"] = repaired;
        json sample = json::object();
        if (spec.count >= 2) {
            json mean = json::array();
            json stddev = json::array();
            for (const auto& c : column_summary(x)) {
                mean.push_back(c.mean);
                stddev.push_back(c.stddev);
            }
            sample["mean"] = std::move(mean);
            sample["stddev"] = std::move(stddev);
            sample["correlation"] = matrix_json(sample_correlation(x));
        }
        report["sample"] = std::move(sample);
        emit_json(report, report_path);
    }
    return 0;
}

int cmd_validate(const ValidateArgs& args) {
    if (!args.fixture.empty()) return run_fixture(args.fixture, args.fixture_dir, args.report);
    if (args.dist.empty()) throw InputError("validate: --dist (or --fixture) is required");
    TargetDistribution d = [&] {
        try {
            return parse_distribution(args.dist);
        } catch (const DomainError& e) {
            throw InputError(std::string("--dist: ") + e.what());
        }
    }();
    PolynomialModel model({0.0});
    if (!args.model.empty()) {
        try {
            model = model_from_json(read_file(args.model));
        } catch (const DomainError& e) {
            throw InputError(args.model.string() + ": " + e.what());
        }
    } else if (args.fit) {
        model = fit_distribution(d, *args.fit, nullptr);
    } else {
        throw InputError("validate: give --model, or --method/--degree to fit one");
    }
    ProbitRange range = assessment_range(model);
    if (!args.range.empty()) {
        if (args.range.size() != 2) throw InputError("--range: expected lo,hi");
        range = {args.range[0], args.range[1]};
    }
    FitReport r;
    try {
        r = epsilon_report(model, d, range, args.grid);
    } catch (const DomainError& e) {
        throw InputError(std::string("--range/--grid: ") + e.what());
    }
    json report = report_header("validate");
    report["distribution"] = d.label();
    report["model"] = model_json(model);
    report["fit_report"] = fit_report_json(r);
    const bool monotone = check_monotonicity(model, report);
    if (!args.histogram.empty()) {
        const auto t = density_compare(model, d, args.bins, args.draws, args.seed);
        write_file(args.histogram, histogram_csv(t));
        report["histogram"] = {{"bins", t.bins.size()}, {"draws", t.draws}, {"seed", args.seed}, {"max_gap", t.max_gap}};
    }
    const bool points_to_stdout = args.out == "-";
    if (points_to_stdout)
        std::cout << points_csv(r) << std::flush;
    else if (!args.out.empty())
        write_file(args.out, points_csv(r));
    // One stream per stdout: with the points there, the report needs an explicit --report.
    if (!points_to_stdout || !args.report.empty()) emit_json(report, args.report);
    return monotone ? 0 : 1;
}

}  // namespace pnt::cli
