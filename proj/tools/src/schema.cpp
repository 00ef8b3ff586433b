#include "schema.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pnt/errors.hpp"
#include "pnt/model_io.hpp"

namespace pnt::cli {

using nlohmann::json;

namespace {

const char* type_name(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return "null";
        case json::value_t::object: return "an object";
        case json::value_t::array: return "an array";
        case json::value_t::string: return "a string";
        case json::value_t::boolean: return "a boolean";
        case json::value_t::discarded: return "an invalid value";
        default: return "a number";
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void Node::fail(const std::string& message) const { throw InputError(path_ + ": " + message); }

std::string Node::child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

void Node::expect_object(std::initializer_list<const char*> allowed) const {
    if (!value_->is_object()) fail(std::string("expected an object, found ") + type_name(*value_));
    for (const auto& [key, _] : value_->items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            std::string list;
            for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
            throw InputError(child_path(key) + ": unknown key (allowed: " + list + ")");
        }
    }
}

bool Node::has(const char* key) const { return value_->is_object() && value_->contains(key); }

Node Node::at(const char* key) const {
    if (!has(key)) throw InputError(child_path(key) + ": required key is missing");
    return {(*value_)[key], child_path(key)};
}

std::optional<Node> Node::find(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Node((*value_)[key], child_path(key));
}

Node Node::at(std::size_t index) const {
    if (!value_->is_array()) fail(std::string("expected an array, found ") + type_name(*value_));
    if (index >= value_->size()) fail("index " + std::to_string(index) + " is out of range");
    return {(*value_)[index], path_ + "[" + std::to_string(index) + "]"};
}

std::size_t Node::size() const {
    if (!value_->is_array()) fail(std::string("expected an array, found ") + type_name(*value_));
    return value_->size();
}

double Node::number() const {
    double v = 0.0;
    if (value_->is_number()) {
        v = value_->get<double>();
    } else if (value_->is_string()) {
        try {
            v = parse_exact(value_->get<std::string>());
        } catch (const DomainError& e) {
            fail(e.what());
        }
    } else {
        fail(std::string("expected a number, found ") + type_name(*value_));
    }
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
}

std::int64_t Node::integer() const {
    if (value_->is_number_integer()) return value_->get<std::int64_t>();
    if (value_->is_number_float()) {
        const double v = value_->get<double>();
        if (v == std::floor(v) && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    }
    fail(std::string("expected an integer, found ") + type_name(*value_));
}

std::uint64_t Node::unsigned_integer() const {
    if (value_->is_number_unsigned()) return value_->get<std::uint64_t>();
    if (value_->is_string()) {
        const auto s = value_->get<std::string>();
        if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) && s.size() <= 20) {
            try {
                return std::stoull(s);
            } catch (const std::exception&) {
            }
        }
    }
    const auto v = integer();
    if (v < 0) fail("expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

std::string Node::string() const {
    if (!value_->is_string()) fail(std::string("expected a string, found ") + type_name(*value_));
    return value_->get<std::string>();
}

bool Node::boolean() const {
    if (!value_->is_boolean()) fail(std::string("expected a boolean, found ") + type_name(*value_));
    return value_->get<bool>();
}

std::vector<double> Node::numbers() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
    return out;
}

Method parse_method(const std::string& s) {
    if (s == "pwm") return Method::Pwm;
    if (s == "percentile") return Method::Percentile;
    throw InputError("unknown fit method '" + s + "' (expected pwm or percentile)");
}

TargetDistribution parse_distribution_node(const Node& node) {
    try {
        if (node.json().is_string()) return parse_distribution(node.string());
        node.expect_object({"family", "params", "quantile_table"});
        const Family family = parse_family(node.at("family").string());
        if (family == Family::Custom) {
            const Node table = node.at("quantile_table");
            std::vector<QuantilePoint> points;
            for (std::size_t i = 0; i < table.size(); ++i) {
                const Node row = table.at(i);
                if (row.size() != 2) row.fail("expected [p, x]");
                points.push_back({row.at(std::size_t{0}).number(), row.at(std::size_t{1}).number()});
            }
            return TargetDistribution::from_quantile_table(std::move(points));
        }
        if (node.has("quantile_table")) node.at("quantile_table").fail("only valid for the custom family");
        return TargetDistribution(family, node.at("params").numbers());
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        node.fail(e.what());
    }
}

PolynomialModel parse_model_node(const Node& node, const std::filesystem::path& base_dir) {
    try {
        if (node.json().is_string()) {
            const auto path = resolve(base_dir, node.string());
            try {
                return model_from_json(read_file(path));
            } catch (const DomainError& e) {
                throw InputError(path.string() + ": " + e.what());
            }
        }
        node.expect_object({"degree", "coeffs", "fit_method", "probit_range", "source"});
        return model_from_json(node.json().dump());
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        node.fail(e.what());
    }
}

FitSettings parse_fit_node(const Node& node, FitSettings fit) {
    node.expect_object({"method", "degree", "alpha", "nodes", "node_list", "allow_high_degree"});
    if (auto m = node.find("method")) {
        try {
            fit.method = parse_method(m->string());
        } catch (const InputError& e) {
            m->fail(e.what());
        }
    }
    if (auto d = node.find("degree")) {
        const auto v = d->integer();
        if (v < 0 || v > kMaxDegree) d->fail("degree must lie in [0, " + std::to_string(kMaxDegree) + "]");
        fit.degree = static_cast<int>(v);
    }
    if (auto a = node.find("alpha")) fit.plan.alpha = a->number();
    if (auto n = node.find("nodes")) {
        if (n->size() != 3) n->fail("expected [low, mid, high] node counts");
        fit.plan.counts = {static_cast<int>(n->at(std::size_t{0}).integer()), static_cast<int>(n->at(std::size_t{1}).integer()),
                           static_cast<int>(n->at(std::size_t{2}).integer())};
    }
    if (auto l = node.find("node_list")) fit.plan.explicit_nodes = l->numbers();
    if (auto h = node.find("allow_high_degree")) fit.allow_high_degree = h->boolean();
    try {
        fit.plan.validate();
    } catch (const DomainError& e) {
        node.fail(e.what());
    }
    return fit;
}

Matrix parse_matrix_node(const Node& node, std::size_t m) {
    Matrix r(m, m);
    const std::size_t n = node.size();
    const bool nested = n > 0 && node.json()[0].is_array();
    if (nested) {
        if (n != m) node.fail("expected " + std::to_string(m) + " rows to match the marginals, found " + std::to_string(n));
        for (std::size_t i = 0; i < m; ++i) {
            const Node row = node.at(i);
            if (row.size() != m) row.fail("expected " + std::to_string(m) + " entries");
            for (std::size_t j = 0; j < m; ++j) r(i, j) = row.at(j).number();
        }
    } else {
        if (n != m * m)
            node.fail("expected " + std::to_string(m * m) + " row-major entries for " + std::to_string(m) +
                      " marginals, found " + std::to_string(n));
        for (std::size_t k = 0; k < n; ++k) r(k / m, k % m) = node.at(k).number();
    }
    return r;
}

namespace {

void check_correlation_matrix(const Node& node, const Matrix& r) {
    const std::size_t m = r.rows();
    for (std::size_t i = 0; i < m; ++i) {
        if (r(i, i) != 1.0) node.fail("diagonal entry (" + std::to_string(i) + ", " + std::to_string(i) + ") must be 1");
        for (std::size_t j = 0; j < m; ++j) {
            const std::string at = "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
            if (std::abs(r(i, j)) > 1.0) node.fail("entry " + at + " lies outside [-1, 1]");
            if (r(i, j) != r(j, i)) node.fail("matrix is not symmetric at " + at);
        }
    }
}

MarginalSpec parse_marginal(const Node& node, const std::filesystem::path& base_dir, const FitSettings& fit) {
    node.expect_object({"label", "distribution", "model", "sample", "column", "fit"});
    MarginalSpec out;
    out.label = node.at("label").string();
    if (out.label.empty()) node.at("label").fail("label must not be empty");
    if (out.label.find_first_of(",\"\n\r") != std::string::npos)
        node.at("label").fail("label must not contain commas, quotes or line breaks");
    const int sources = int(node.has("distribution")) + int(node.has("model")) + int(node.has("sample"));
    if (sources != 1) node.fail("exactly one of 'distribution', 'model' or 'sample' is required");
    out.fit = fit;
    if (auto f = node.find("fit")) out.fit = parse_fit_node(*f, fit);
    if (node.has("column") && !node.has("sample")) node.at("column").fail("only valid together with 'sample'");
    if (auto d = node.find("distribution")) {
        out.kind = MarginalSpec::Kind::Distribution;
        out.distribution = parse_distribution_node(*d);
    } else if (auto m = node.find("model")) {
        out.kind = MarginalSpec::Kind::Model;
        out.model = parse_model_node(*m, base_dir);
    } else {
        out.kind = MarginalSpec::Kind::Sample;
        out.sample_path = resolve(base_dir, node.at("sample").string());
        if (auto c = node.find("column"))
            out.sample_column = c->json().is_number_integer() ? std::to_string(c->integer()) : c->string();
        if (out.fit.method != Method::Pwm) node.fail("sample marginals support only the pwm fit method");
    }
    return out;
}

}  // namespace

CorrelationSpec parse_spec(const Node& root, const std::filesystem::path& base_dir) {
    root.expect_object({"schema_version", "marginals", "fit", "correlation", "generation", "output"});
    if (auto v = root.find("schema_version"))
        if (v->integer() != 1) v->fail("unsupported schema version (expected 1)");

    CorrelationSpec spec;
    FitSettings fit;
    if (auto f = root.find("fit")) fit = parse_fit_node(*f, fit);

    const Node marginals = root.at("marginals");
    if (marginals.size() == 0) marginals.fail("at least one marginal is required");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < marginals.size(); ++i) {
        const Node m = marginals.at(i);
        spec.marginals.push_back(parse_marginal(m, base_dir, fit));
        if (!labels.insert(spec.marginals.back().label).second)
            m.at("label").fail("duplicate label '" + spec.marginals.back().label + "'");
    }
    const std::size_t dim = spec.marginals.size();

    spec.rx = Matrix::identity(dim);
    if (auto c = root.find("correlation")) {
        spec.has_correlation = true;
        if (c->json().is_object()) {
            c->expect_object({"matrix", "moments", "nearest_pd"});
            const Node matrix = c->at("matrix");
            spec.rx = parse_matrix_node(matrix, dim);
            check_correlation_matrix(matrix, spec.rx);
            if (auto mo = c->find("moments")) {
                const auto s = mo->string();
                if (s != "model" && s != "target") mo->fail("expected 'model' or 'target'");
                spec.target_moments = s == "target";
            }
            if (auto n = c->find("nearest_pd")) spec.nearest_pd = n->boolean();
        } else {
            spec.rx = parse_matrix_node(*c, dim);
            check_correlation_matrix(*c, spec.rx);
        }
    }

    if (auto g = root.find("generation")) {
        g->expect_object({"count", "seed", "stream"});
        if (auto n = g->find("count")) {
            spec.count = n->unsigned_integer();
            if (spec.count == 0) n->fail("count must be at least 1");
        }
        if (auto s = g->find("seed")) spec.seed = s->unsigned_integer();
        if (auto s = g->find("stream")) {
            const auto v = s->unsigned_integer();
            if (v > 0xffffffffu) s->fail("stream must fit in 32 bits");
            spec.stream = static_cast<std::uint32_t>(v);
        }
    }
    if (auto o = root.find("output")) {
        o->expect_object({"samples", "report"});
        if (auto s = o->find("samples")) spec.samples_path = resolve(base_dir, s->string());
        if (auto r = o->find("report")) spec.report_path = resolve(base_dir, r->string());
    }
    return spec;
}

CorrelationSpec load_spec(const std::filesystem::path& file) {
    const json root = read_json_file(file);
    return parse_spec(Node(root, ""), file.parent_path());
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError(file.string() + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& file) {
    const std::string text = read_file(file);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(file.string() + ": invalid JSON: " + e.what());
    }
}

void write_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(file.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw InputError(file.string() + ": write failed");
}

std::vector<double> read_node_list(const std::filesystem::path& file) {
    std::vector<double> out;
    std::istringstream in(read_file(file));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (const auto& field : split(line, ',')) {
            const auto t = trim(field);
            if (t.empty()) continue;
            try {
                out.push_back(parse_exact(t));
            } catch (const DomainError& e) {
                throw InputError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    if (out.empty()) throw InputError(file.string() + ": no probabilities found");
    return out;
}

std::vector<double> read_sample_column(const std::filesystem::path& file, const std::string& column) {
    std::istringstream in(read_file(file));
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> index;
    std::size_t width = 0;
    std::vector<double> out;
    auto pick = [&](const std::vector<std::string>& fields) -> std::size_t {
        if (column.empty()) {
            if (fields.size() != 1)
                throw InputError(file.string() + ": " + std::to_string(fields.size()) +
                                 " columns found; name one with 'column'");
            return 0;
        }
        if (std::all_of(column.begin(), column.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            const std::size_t k = std::stoul(column);
            if (k >= fields.size()) throw InputError(file.string() + ": column index " + column + " is out of range");
            return k;
        }
        throw InputError(file.string() + ": column '" + column + "' not found in the header");
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        for (auto& f : fields) f = trim(f);
        if (!index) {
            width = fields.size();
            bool numeric = true;
            for (const auto& f : fields) {
                try {
                    parse_exact(f);
                } catch (const DomainError&) {
                    numeric = false;
                }
            }
            if (!numeric) {
                const auto it = std::find(fields.begin(), fields.end(), column);
                if (!column.empty() && it != fields.end())
                    index = static_cast<std::size_t>(it - fields.begin());
                else
                    index = pick(fields);
                continue;
            }
            index = pick(fields);
        }
        if (fields.size() != width)
            throw InputError(file.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                             " fields");
        try {
            out.push_back(parse_exact(fields[*index]));
        } catch (const DomainError& e) {
            throw InputError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (out.empty()) throw InputError(file.string() + ": no data rows");
    return out;
}

}  // namespace pnt::cli
