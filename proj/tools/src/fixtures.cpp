// Fixture runner: each fixture file states an input, a computation and the bounds its
// results must meet. Kinds: determinants, fit, model, rho, gen.

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "commands.hpp"
#include "pnt/correlation.hpp"
#include "pnt/fit_pwm.hpp"
#include "pnt/model_io.hpp"
#include "pnt/sampler.hpp"

#ifndef PNT_DEFAULT_FIXTURE_DIR
#define PNT_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace pnt::cli {

using nlohmann::json;

namespace {

class Checks {
public:
    void add(const std::string& name, double value, double bound, bool pass) {
        checks_.push_back({{"name", name}, {"value", value}, {"bound", bound}, {"pass", pass}});
        pass_ = pass_ && pass;
    }
    void at_most(const std::string& name, double value, double bound) { add(name, value, bound, value <= bound); }

    bool pass() const noexcept { return pass_; }
    json take() { return std::move(checks_); }

private:
    json checks_ = json::array();
    bool pass_ = true;
};

std::filesystem::path locate(const std::string& name, const std::filesystem::path& dir) {
    const std::filesystem::path direct(name);
    if (direct.extension() == ".json" && std::filesystem::exists(direct)) return direct;
    std::filesystem::path base = dir;
    if (base.empty()) {
        const char* env = std::getenv("PNT_FIXTURE_DIR");
        base = env && *env ? env : PNT_DEFAULT_FIXTURE_DIR;
    }
    const auto file = base / (name + ".json");
    if (std::filesystem::exists(file)) return file;
    std::string known;
    if (std::filesystem::is_directory(base))
        for (const auto& e : std::filesystem::directory_iterator(base))
            if (e.path().extension() == ".json") known += (known.empty() ? "" : ", ") + e.path().stem().string();
    throw InputError("--fixture: no fixture '" + name + "' in " + base.string() +
                     (known.empty() ? "" : " (available: " + known + ")"));
}

void check_model(const Node& expect, const PolynomialModel& model, const TargetDistribution& d, Checks& checks,
                 json& report) {
    expect.expect_object({"coeffs", "coeff_tol", "range", "grid", "eps_max", "eps_avg"});
    if (auto c = expect.find("coeffs")) {
        const auto want = c->numbers();
        if (static_cast<int>(want.size()) != model.degree() + 1)
            c->fail("expected " + std::to_string(model.degree() + 1) + " coefficients");
        const double tol = expect.at("coeff_tol").number();
        double worst = 0.0;
        for (std::size_t k = 0; k < want.size(); ++k)
            worst = std::max(worst, std::abs(model.coeff(static_cast<int>(k)) - want[k]));
        checks.at_most("max_abs_coefficient_deviation", worst, tol);
    }
    if (expect.has("eps_max") || expect.has("eps_avg")) {
        const auto range = expect.at("range").numbers();
        if (range.size() != 2) expect.at("range").fail("expected [lo, hi]");
        const std::size_t grid = expect.has("grid") ? expect.at("grid").unsigned_integer() : 10000;
        const auto r = epsilon_report(model, d, {range[0], range[1]}, grid);
        report["fit_report"] = fit_report_json(r);
        if (auto m = expect.find("eps_max")) checks.at_most("eps_max_percent", r.eps_max, m->number());
        if (auto a = expect.find("eps_avg")) checks.at_most("eps_avg_percent", r.eps_avg, a->number());
    }
}

void run_determinants(const Node& root, Checks& checks) {
    const Node cases = root.at("cases");
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const Node c = cases.at(i);
        c.expect_object({"n", "det", "rel_tol", "factor"});
        const int n = static_cast<int>(c.at("n").integer());
        const double want = c.at("det").number();
        const double got = normal_pwm_matrix(n).det;
        const std::string name = "det_n" + std::to_string(n);
        if (auto t = c.find("rel_tol")) {
            checks.at_most(name + "_relative_error", std::abs(got - want) / std::abs(want), t->number());
        } else {
            const double f = c.at("factor").number();
            const double ratio = got / want;
            checks.add(name + "_ratio", ratio, f, ratio <= f && ratio >= 1.0 / f);
        }
    }
}

void run_rho(const Node& root, const std::filesystem::path& base, Checks& checks) {
    const auto m1 = parse_model_node(root.at("model1"), base);
    const auto m2 = parse_model_node(root.at("model2"), base);
    const auto rp = build_rho_polynomial(m1, m2);
    const Node cases = root.at("cases");
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const Node c = cases.at(i);
        c.expect_object({"rho_x", "rho_z", "tol"});
        const double rx = c.at("rho_x").number();
        const double got = solve_rho_z(rp, rx);
        checks.at_most("rho_z_error_at_rho_x_" + format_exact(rx), std::abs(got - c.at("rho_z").number()),
                       c.at("tol").number());
    }
}

void run_gen(const Node& root, const std::filesystem::path& base, Checks& checks, json& report) {
    const auto spec = parse_spec(root.at("spec"), base);
    const Node expect = root.at("expect");
    expect.expect_object({"rz", "rz_tol", "sample_tol"});
    std::vector<PolynomialModel> models;
    for (const auto& m : spec.marginals) models.push_back(realize_marginal(m));
    BuildRzOptions options;
    options.nearest_pd = spec.nearest_pd;
    const auto vm = make_vector_model(models, spec.rx, options);
    const std::size_t dim = vm.dim();
    if (auto rz = expect.find("rz")) {
        const Matrix want = parse_matrix_node(*rz, dim);
        const double tol = expect.at("rz_tol").number();
        double worst = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) worst = std::max(worst, std::abs(vm.rz()(i, j) - want(i, j)));
        checks.at_most("max_rz_deviation", worst, tol);
    }
    report["rz"] = matrix_json(vm.rz());
    if (auto t = expect.find("sample_tol")) {
        const auto x = generate(vm, spec.count, {spec.seed, spec.stream}, 0);
        const auto r = sample_correlation(x);
        double worst = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) worst = std::max(worst, std::abs(r(i, j) - spec.rx(i, j)));
        report["sample_correlation"] = matrix_json(r);
        checks.at_most("max_sample_correlation_deviation", worst, t->number());
    }
}

}  // namespace

int run_fixture(const std::string& name, const std::filesystem::path& dir, const std::filesystem::path& report_path) {
    const auto file = locate(name, dir);
    const json doc = read_json_file(file);
    const Node root(doc, file.filename().string());
    root.expect_object({"description", "kind", "distribution", "fit", "model", "model1", "model2", "cases", "spec",
                        "expect"});
    const auto base = file.parent_path();
    const std::string kind = root.at("kind").string();

    json report = {{"schema_version", kSchemaVersion}, {"command", "validate"}, {"fixture", file.stem().string()}};
    if (auto d = root.find("description")) report["description"] = d->string();
    Checks checks;
    if (kind == "determinants") {
        run_determinants(root, checks);
    } else if (kind == "fit" || kind == "model") {
        const auto d = parse_distribution_node(root.at("distribution"));
        PolynomialModel model({0.0});
        if (kind == "fit") {
            MarginalSpec m;
            m.label = "x";
            m.distribution = d;
            m.fit = parse_fit_node(root.at("fit"), {});
            model = realize_marginal(m);
        } else {
            model = parse_model_node(root.at("model"), base);
        }
        report["distribution"] = d.label();
        report["model"] = model_json(model);
        check_model(root.at("expect"), model, d, checks, report);
    } else if (kind == "rho") {
        run_rho(root, base, checks);
    } else if (kind == "gen") {
        run_gen(root, base, checks, report);
    } else {
        root.at("kind").fail("unknown fixture kind '" + kind + "' (expected determinants, fit, model, rho or gen)");
    }
    report["pass"] = checks.pass();
    report["checks"] = checks.take();
    emit_json(report, report_path);
    return report["pass"].get<bool>() ? 0 : 1;
}

}  // namespace pnt::cli
