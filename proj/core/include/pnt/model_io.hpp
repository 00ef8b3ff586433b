#pragma once

#include <string>
#include <string_view>

#include "pnt/poly_model.hpp"

namespace pnt {

/// JSON form of a model:
///   {"degree": n, "coeffs": ["<17 significant digits>", ...], "fit_method": "pwm",
///    "probit_range": ["lo", "hi"] | null, "source": "..."}
/// Coefficients are decimal strings so the round trip is exact.
std::string model_to_json(const PolynomialModel& m, int indent = 2);

/// Accepts coefficients as strings or plain numbers. Throws DomainError on schema problems.
PolynomialModel model_from_json(std::string_view text);

/// %.17g: 17 significant digits, enough for every double to round-trip.
std::string format_exact(double v);

/// Strict decimal parse; throws DomainError unless the whole string is a finite number
/// with no surrounding whitespace.
double parse_exact(std::string_view s);

}  // namespace pnt
