#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plab/corrfun.hpp"

namespace plab {

/// What an experiment runs for each parameter point.
///   series      one-sided window on a uniform grid of the given step
///   log-image   stationary dual sampled at ln(1 + k dt)
///   two-sided   pinned kernel on (-T^alpha, T)
///   bracket     block rate bracket on a finite-range family
///   polyroots   random polynomials, horizon = degree
///   verify      correlation inequality certificates (params carry "relation")
struct ExperimentConfig
{
    std::string experiment;
    std::string method = "series";
    std::string kernel;
    std::vector<ParamMap> points;
    double step = 0.05;
    double alpha = 1.0;
    int k = 2;
    std::vector<double> steps;
    /// Explicit ladder, or empty with ladder_rule = "hypothesis-window".
    std::vector<double> horizons;
    std::string ladder_rule;
    double level = 0.0;
    bool strict = false;
    std::size_t n_paths = 100000;
    unsigned workers = 1;
    std::uint64_t seed = 1;
    std::string fit_model = "exponential";
    std::optional<double> min_horizon;
    /// Atlas curve compared against each estimate, and extra overlay curves.
    std::string compare;
    std::vector<std::string> overlays;
    std::string out_dir = "out";

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Names accepted by builtin_config.
const std::vector<std::string>& builtin_names();
ExperimentConfig builtin_config(const std::string& name);

struct OutputFile
{
    std::string path;  // relative to the output directory
    std::string sha256;
    std::size_t bytes = 0;
};

struct ResultManifest
{
    nlohmann::json config;
    std::string tool_version;
    std::string status = "ok";  // ok | failed
    std::string failed_stage;
    std::vector<OutputFile> outputs;
    std::vector<std::string> warnings;
    /// Rows of estimates.csv, also kept here for reports.
    nlohmann::json results = nlohmann::json::array();
    double wall_seconds = 0.0;
    bool violation = false;

    nlohmann::json to_json() const;
    static ResultManifest from_json(const nlohmann::json& j);
};

/// A stage failed; the partial manifest has already been written.
class ExperimentError : public std::runtime_error
{
public:
    ExperimentError(std::string stage, const std::string& what, ResultManifest partial)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), partial_(std::move(partial))
    {
    }
    const std::string& stage() const noexcept { return stage_; }
    const ResultManifest& partial() const noexcept { return partial_; }

private:
    std::string stage_;
    ResultManifest partial_;
};

/// Simulate, estimate, fit and compare; writes data files, plot.gp and
/// manifest.json into config.out_dir. Data files carry no timestamps.
ResultManifest run_experiment(const ExperimentConfig& config);

struct ReportRow
{
    std::string experiment;
    std::string point;
    double estimate = 0.0;
    double se = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<bool> inside;
    std::string flags;
    std::string source_hash;
};

/// One row per (experiment, parameter point). Manifests must share the
/// result kind (estimates vs certificates); otherwise a DomainError names the mismatch.
std::vector<ReportRow> emit_report(const std::vector<ResultManifest>& manifests);
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

std::string sha256_hex(const std::string& bytes);
ResultManifest load_manifest(const std::filesystem::path& dir);

}  // namespace plab
