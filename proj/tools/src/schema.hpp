#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnt/distributions.hpp"
#include "pnt/fit_percentile.hpp"
#include "pnt/linalg.hpp"
#include "pnt/poly_model.hpp"

namespace pnt::cli {

/// Bad input file, unreadable path or schema violation. Maps to exit code 4.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A JSON value together with its location, for error messages such as
/// "marginals[1].fit.degree: expected an integer".
class Node {
public:
    Node(const nlohmann::json& value, std::string path) : value_(&value), path_(std::move(path)) {}

    const nlohmann::json& json() const noexcept { return *value_; }
    const std::string& path() const noexcept { return path_; }

    [[noreturn]] void fail(const std::string& message) const;

    /// Requires an object and rejects keys outside `allowed`.
    void expect_object(std::initializer_list<const char*> allowed) const;
    bool has(const char* key) const;
    Node at(const char* key) const;
    std::optional<Node> find(const char* key) const;
    Node at(std::size_t index) const;
    std::size_t size() const;

    /// A JSON number or a decimal string.
    double number() const;
    std::int64_t integer() const;
    std::uint64_t unsigned_integer() const;
    std::string string() const;
    bool boolean() const;
    std::vector<double> numbers() const;

private:
    std::string child_path(const std::string& key) const;

    const nlohmann::json* value_;
    std::string path_;
};

enum class Method { Pwm, Percentile };

Method parse_method(const std::string& s);

struct FitSettings {
    Method method = Method::Pwm;
    int degree = 5;
    NodePlan plan;
    bool allow_high_degree = false;
};

struct MarginalSpec {
    enum class Kind { Distribution, Model, Sample };

    std::string label;
    Kind kind = Kind::Distribution;
    std::optional<TargetDistribution> distribution;
    std::optional<PolynomialModel> model;
    std::filesystem::path sample_path;
    /// Column header or zero-based index; empty selects the only column.
    std::string sample_column;
    FitSettings fit;
};

struct CorrelationSpec {
    std::vector<MarginalSpec> marginals;
    bool has_correlation = false;
    /// Identity when the spec has no correlation section.
    Matrix rx;
    /// Use target-distribution moments instead of model-implied ones when turning
    /// product moments into correlations.
    bool target_moments = false;
    bool nearest_pd = false;
    std::size_t count = 1000;
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;
    std::filesystem::path samples_path;
    std::filesystem::path report_path;
};

/// Parses a CorrelationSpec; relative paths resolve against `base_dir`.
CorrelationSpec parse_spec(const Node& root, const std::filesystem::path& base_dir);
CorrelationSpec load_spec(const std::filesystem::path& file);

/// "family:params" string or {"family", "params", "quantile_table"} object.
TargetDistribution parse_distribution_node(const Node& node);
/// Model file path (relative to base_dir) or an inline model object.
PolynomialModel parse_model_node(const Node& node, const std::filesystem::path& base_dir);
FitSettings parse_fit_node(const Node& node, FitSettings defaults);
/// Row-major m*m array, flat or nested.
Matrix parse_matrix_node(const Node& node, std::size_t m);

std::string read_file(const std::filesystem::path& file);
nlohmann::json read_json_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, const std::string& content);

/// Probabilities from a file: one per line or comma separated.
std::vector<double> read_node_list(const std::filesystem::path& file);

/// One numeric column of a CSV file. A first row that does not parse as numbers is a header.
std::vector<double> read_sample_column(const std::filesystem::path& file, const std::string& column);

}  // namespace pnt::cli
