#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnt/diagnostics.hpp"
#include "schema.hpp"

namespace pnt::cli {

/// Version of every JSON report written by the tool.
inline constexpr int kSchemaVersion = 1;

struct FitArgs {
    std::string dist;
    std::filesystem::path sample;
    std::string column;
    std::filesystem::path spec;
    FitSettings fit;
    std::filesystem::path node_list;
    std::filesystem::path out;
    std::filesystem::path report;
};

struct RhoArgs {
    std::filesystem::path model1;
    std::filesystem::path model2;
    std::vector<double> rho_x;
    bool matrix = false;
    std::filesystem::path spec;
    bool nearest_pd = false;
    std::filesystem::path out;
};

struct GenArgs {
    std::filesystem::path spec;
    std::optional<std::size_t> count;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out;
    std::filesystem::path report;
    bool nearest_pd = false;
    unsigned threads = 0;
};

struct ValidateArgs {
    std::string fixture;
    std::filesystem::path fixture_dir;
    std::filesystem::path model;
    std::string dist;
    std::optional<FitSettings> fit;
    std::vector<double> range;
    std::size_t grid = 10000;
    std::filesystem::path out;
    std::filesystem::path report;
    std::filesystem::path histogram;
    std::size_t bins = 50;
    std::size_t draws = 1000000;
    std::uint64_t seed = 0;
};

/// Each returns the process exit code; library and input errors propagate as exceptions.
int cmd_fit(const FitArgs& args);
int cmd_rho(const RhoArgs& args);
int cmd_gen(const GenArgs& args);
int cmd_validate(const ValidateArgs& args);

/// Fits (or loads) one marginal. `report` receives the fit details.
PolynomialModel realize_marginal(const MarginalSpec& m, nlohmann::json* report = nullptr);

nlohmann::json model_json(const PolynomialModel& m);
nlohmann::json fit_report_json(const FitReport& r);
nlohmann::json matrix_json(const Matrix& m);

/// Writes pretty JSON to `path`, or to stdout when the path is empty or "-".
void emit_json(const nlohmann::json& j, const std::filesystem::path& path);

/// Runs the named fixture (file name without .json, or a path) and prints its report.
/// Returns 0 when every check passes and 1 otherwise.
int run_fixture(const std::string& name, const std::filesystem::path& dir, const std::filesystem::path& report);

}  // namespace pnt::cli
