// plab: run experiments, certify relations, print atlas curves, merge reports.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "plab/errors.hpp"
#include "plab/exponents.hpp"
#include "plab/experiment.hpp"
#include "plab/parallel.hpp"
#include "plab/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kViolation = 2;

plab::ExperimentConfig load_config(const std::string& what)
{
    const auto& names = plab::builtin_names();
    if (std::find(names.begin(), names.end(), what) != names.end())
        return plab::builtin_config(what);
    std::ifstream f(what);
    if (!f)
        throw plab::DomainError("'" + what + "' is neither a built-in experiment nor a readable config file");
    nlohmann::json j;
    try
    {
        f >> j;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw plab::DomainError(what + ": " + e.what());
    }
    return plab::ExperimentConfig::from_json(j);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Persistence exponent laboratory"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a built-in experiment or a JSON config");
    std::string target;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_paths;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    run->add_option("experiment", target, "Built-in name or config.json")->required();
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--budget", n_paths, "Paths per estimate")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "Output directory");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "Certify a correlation inequality");
    int relation = 0;
    double step = 0.005;
    std::vector<std::string> params;
    verify->add_option("--relation", relation, "Relation number (7, 9, 10, 13, 14, 24)")->required();
    verify->add_option("--step", step, "Grid step")->check(CLI::PositiveNumber);
    verify->add_option("--param", params, "Parameter as name=value (p for 13/14, H for 24)");

    auto* atlas = app.add_subcommand("atlas", "Print a bounds curve as CSV");
    std::vector<std::string> curves;
    double grid = 0.01;
    std::optional<double> alpha;
    atlas->add_option("--curve", curves, "Curve name")->required();
    atlas->add_option("--grid", grid, "Spacing of the H grid on (0, 1)")->check(CLI::Range(1e-4, 0.5));
    atlas->add_option("--alpha", alpha, "alpha for prop5");

    auto* report = app.add_subcommand("report", "Summary table from result directories");
    std::vector<std::string> dirs;
    std::optional<std::string> report_out;
    report->add_option("dirs", dirs, "Result directories or manifest files");
    report->add_option("--out", report_out, "Write the CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            auto config = load_config(target);
            if (seed)
                config.seed = *seed;
            if (n_paths)
                config.n_paths = *n_paths;
            if (out)
                config.out_dir = *out;
            if (workers)
                config.workers = *workers;
            const auto m = plab::run_experiment(config);
            plab::write_report_csv(std::cout, plab::emit_report({m}));
            std::cerr << "wrote " << m.outputs.size() << " files to " << config.out_dir << " in " << std::fixed
                      << std::setprecision(1) << m.wall_seconds << " s\n";
            for (const auto& w : m.warnings)
                std::cerr << "warning: " << w << '\n';
            return m.violation ? kViolation : kOk;
        }
        if (*verify)
        {
            plab::ParamMap pm;
            for (const auto& p : params)
            {
                const auto eq = p.find('=');
                if (eq == std::string::npos)
                    throw plab::DomainError("parameter '" + p + "' is not name=value");
                pm[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
            }
            const auto r = plab::verify_relation(relation, pm, plab::VerifyOptions{step, plab::default_workers()});
            std::cout << std::setw(2) << plab::to_json(r) << '\n';
            return (r.verdict == plab::Verdict::Violated || !r.agree) ? kViolation : kOk;
        }
        if (*atlas)
        {
            std::vector<double> hs;
            for (int k = 1; k * grid < 1.0 - 1e-12; ++k)
                hs.push_back(k * grid);
            plab::write_atlas_csv(std::cout, curves, hs, alpha);
            return kOk;
        }
        if (*report)
        {
            std::vector<plab::ResultManifest> ms;
            for (const auto& d : dirs)
                ms.push_back(plab::load_manifest(d));
            const auto rows = plab::emit_report(ms);
            if (report_out)
            {
                std::ofstream f(*report_out);
                plab::write_report_csv(f, rows);
            }
            else
                plab::write_report_csv(std::cout, rows);
            return kOk;
        }
    }
    catch (const plab::ExperimentError& e)
    {
        std::cerr << "error in stage " << e.what() << '\n';
        return kError;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kOk;
}
