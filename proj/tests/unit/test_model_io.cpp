#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "oracles.hpp"
#include "pnt/errors.hpp"
#include "pnt/model_io.hpp"
#include "reference_models.hpp"

using pnt::FitMethod;
using pnt::PolynomialModel;

TEST_CASE("format_exact and parse_exact round-trip every double") {
    pnt::oracle::SplitMix rng(9);
    for (int i = 0; i < 20000; ++i) {
        const double v = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
        REQUIRE(pnt::parse_exact(pnt::format_exact(v)) == v);
    }
    for (double v : {0.0, -0.0, 1.0, 0.1, std::numeric_limits<double>::min(), std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::denorm_min(), -1.0 / 3.0})
        CHECK(pnt::parse_exact(pnt::format_exact(v)) == v);
    CHECK(std::signbit(pnt::parse_exact(pnt::format_exact(-0.0))));
    CHECK(pnt::format_exact(0.1) == "0.10000000000000001");
    CHECK(pnt::format_exact(1.0) == "1");
}

TEST_CASE("parse_exact rejects partial and non-finite input") {
    for (const char* bad : {"", " 1", "1 ", "1.0x", "abc", "inf", "nan", "1e400", "--1"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(pnt::parse_exact(bad), pnt::DomainError);
    }
    CHECK(pnt::parse_exact("-2.5e-3") == -2.5e-3);
}

TEST_CASE("model JSON round trip is exact") {
    const PolynomialModel pct(pnt::reference::kLognormalPct11, FitMethod::Percentile,
                              pnt::ProbitRange{0.001, 0.999}, "lognormal:0,1");
    const PolynomialModel pwm(pnt::reference::kBeta22Pwm11, FitMethod::Pwm, std::nullopt, "beta:2,2");
    for (const auto& m : {pct, pwm}) {
        const std::string text = pnt::model_to_json(m);
        const auto back = pnt::model_from_json(text);
        CHECK(back == m);
        CHECK(pnt::model_to_json(back) == text);
        CHECK(pnt::model_to_json(back, -1) == pnt::model_to_json(m, -1));
    }
    const auto j = nlohmann::json::parse(pnt::model_to_json(pwm));
    CHECK(j["degree"] == 11);
    CHECK(j["coeffs"].size() == 12);
    CHECK(j["coeffs"][0].is_string());
    CHECK(j["fit_method"] == "pwm");
    CHECK(j["probit_range"].is_null());
    CHECK(j["source"] == "beta:2,2");
    CHECK(nlohmann::json::parse(pnt::model_to_json(pct))["probit_range"][1] == "0.999");
}

TEST_CASE("model JSON accepts plain numbers and optional keys") {
    const auto m = pnt::model_from_json(R"({"coeffs": [1, "0.5", -0.25]})");
    CHECK(m.degree() == 2);
    CHECK(m.coeff(1) == 0.5);
    CHECK(m.coeff(2) == -0.25);
    CHECK(m.fit_method() == FitMethod::Exact);
    CHECK_FALSE(m.probit_range().has_value());
    CHECK(m.source().empty());
    const auto r = pnt::model_from_json(R"({"coeffs": [0, 1], "probit_range": [0.01, "0.99"], "fit_method": "percentile"})");
    REQUIRE(r.probit_range().has_value());
    CHECK(r.probit_range()->hi == 0.99);
}

TEST_CASE("model JSON schema errors") {
    for (const char* bad : {
             "not json",
             "[1, 2]",
             R"({"degree": 1})",
             R"({"coeffs": "1,2"})",
             R"({"coeffs": []})",
             R"({"coeffs": [1, true]})",
             R"({"coeffs": [1, "x"]})",
             R"({"coeffs": [1, 2], "degree": 2})",
             R"({"coeffs": [1, 2], "degree": 1.5})",
             R"({"coeffs": [1, 2], "fit_method": "magic"})",
             R"({"coeffs": [1, 2], "fit_method": 3})",
             R"({"coeffs": [1, 2], "probit_range": [0.1]})",
             R"({"coeffs": [1, 2], "probit_range": [0.9, 0.1]})",
         }) {
        CAPTURE(bad);
        CHECK_THROWS_AS(pnt::model_from_json(bad), pnt::DomainError);
    }
}
