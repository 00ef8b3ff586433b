#include "pnt/model_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnt/errors.hpp"

namespace pnt {

using nlohmann::json;

std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_exact(std::string_view s) {
    const std::string str(s);
    char* end = nullptr;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || std::isspace(static_cast<unsigned char>(str.front())) || end != str.c_str() + str.size() ||
        !std::isfinite(v))
        throw DomainError("not a finite decimal number: '" + str + "'");
    return v;
}

namespace {

double number_from(const json& j, const char* key) {
    if (j.is_string()) return parse_exact(j.get<std::string>());
    if (j.is_number()) return j.get<double>();
    throw DomainError(std::string("model JSON: '") + key + "' entries must be numbers or decimal strings");
}

}  // namespace

std::string model_to_json(const PolynomialModel& m, int indent) {
    json j;
    j["degree"] = m.degree();
    json coeffs = json::array();
    for (double a : m.coeffs()) coeffs.push_back(format_exact(a));
    j["coeffs"] = std::move(coeffs);
    j["fit_method"] = std::string(fit_method_name(m.fit_method()));
    if (m.probit_range())
        j["probit_range"] = json::array({format_exact(m.probit_range()->lo), format_exact(m.probit_range()->hi)});
    else
        j["probit_range"] = nullptr;
    j["source"] = m.source();
    return j.dump(indent);
}

PolynomialModel model_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("model JSON: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("model JSON: expected an object");
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw DomainError("model JSON: missing 'coeffs' array");
    std::vector<double> coeffs;
    for (const auto& c : j["coeffs"]) coeffs.push_back(number_from(c, "coeffs"));
    if (j.contains("degree")) {
        if (!j["degree"].is_number_integer()) throw DomainError("model JSON: 'degree' must be an integer");
        if (j["degree"].get<long>() + 1 != static_cast<long>(coeffs.size()))
            throw DomainError("model JSON: 'degree' does not match the number of coefficients");
    }
    FitMethod method = FitMethod::Exact;
    if (j.contains("fit_method")) {
        if (!j["fit_method"].is_string()) throw DomainError("model JSON: 'fit_method' must be a string");
        method = parse_fit_method(j["fit_method"].get<std::string>());
    }
    std::optional<ProbitRange> range;
    if (j.contains("probit_range") && !j["probit_range"].is_null()) {
        const auto& r = j["probit_range"];
        if (!r.is_array() || r.size() != 2) throw DomainError("model JSON: 'probit_range' must be [lo, hi]");
        range = ProbitRange{number_from(r[0], "probit_range"), number_from(r[1], "probit_range")};
    }
    std::string source;
    if (j.contains("source") && j["source"].is_string()) source = j["source"].get<std::string>();
    return PolynomialModel(std::move(coeffs), method, range, std::move(source));
}

}  // namespace pnt
