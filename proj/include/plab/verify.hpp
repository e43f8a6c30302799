#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plab/corrfun.hpp"

namespace plab {

struct Interval
{
    double lo = 0.0;
    double hi = 1.0;
};

/// Open box in 1 or 2 dimensions.
struct Rectangle
{
    std::vector<Interval> sides;

    std::size_t dims() const noexcept { return sides.size(); }
    bool contains(const std::vector<double>& point) const;
    bool within(const Rectangle& outer) const;
};

enum class SignClaim
{
    Nonpositive,
    Nonnegative,
};

enum class Verdict
{
    CertifiedHeuristic,
    Violated,
    Inconclusive,
    NotApplicable,
};

std::string_view to_string(SignClaim c) noexcept;
std::string_view to_string(Verdict v) noexcept;

/// Ids: rel7-psi, rel9-psi, rel10-psi (point (x, alpha)); rel13-psi (x; p);
/// phi-a (x; a); rel24-phi, rel24-smallt, rel24-bigt (t; H).
struct TestFunctionId
{
    std::string id;
    ParamMap params;
};

const std::vector<std::string>& testfn_ids();

/// Domain rectangle of the id (throws DomainError for unknown ids or bad params).
Rectangle testfn_domain(const TestFunctionId& id);

/// rel13-psi claims <= 0 for p <= 1 and >= 0 otherwise; rel10 and rel24 pieces claim >= 0.
SignClaim testfn_claim(const TestFunctionId& id);

double eval_testfn(const TestFunctionId& id, const std::vector<double>& point);

struct CertifyOptions
{
    /// Excluded strip along every side of the rectangle.
    double boundary_layer = 1e-6;
    /// Cells within this distance of a side may stay uncertified if every
    /// evaluation there has the claimed sign; defaults to one grid step.
    std::optional<double> edge_band;
    /// Halvings of a cell whose local bound fails.
    int max_depth = 4;
    /// Multiplier on the finite-difference slope.
    double safety = 2.0;
    double tolerance = 1e-12;
    unsigned workers = 1;
    std::optional<SignClaim> claim;
};

struct GridCertificate
{
    std::string relation;
    ParamMap params;
    Rectangle rectangle;
    double step = 0.0;
    SignClaim claim = SignClaim::Nonpositive;
    /// Worst grid value in the original sign (max for <= 0 claims, min for >= 0).
    double worst_value = 0.0;
    std::vector<double> worst_point;
    /// Largest finite-difference gradient norm over the 4x refined subsample.
    double derivative_margin = 0.0;
    /// Worst certified cell bound, sign-normalized so that certified means < 0.
    double cell_bound = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::size_t n_points = 0;
    std::size_t excluded = 0;
    std::size_t cells = 0;
    std::size_t refined_cells = 0;
    std::size_t edge_cells = 0;
    std::size_t unresolved_cells = 0;
    std::vector<std::vector<double>> excluded_points;  // first few only
};

using ScalarField = std::function<double(const std::vector<double>&)>;

/// Grid sweep of f over the rectangle with a per-cell derivative margin.
///
/// Each grid cell is sampled on a 4x refined subgrid; it is certified when its
/// worst sample plus safety * slope * (half the subgrid diagonal) stays on the
/// claimed side. Failing cells are halved up to max_depth times.
GridCertificate certify_sign(const ScalarField& f, const Rectangle& rectangle, double step, SignClaim claim,
                             const CertifyOptions& options = {});

GridCertificate certify_nonpositive(const TestFunctionId& id, const Rectangle& rectangle, double step,
                                    const CertifyOptions& options = {});

/// Certificates for steps 0.02, 0.01, 0.005, 0.0025 (nested grids).
std::vector<GridCertificate> refinement_ladder(const TestFunctionId& id, const Rectangle& rectangle,
                                               const std::vector<double>& steps = {0.02, 0.01, 0.005, 0.0025},
                                               const CertifyOptions& options = {});

/// Worst values along a nested ladder never improve as the grid refines.
bool ladder_stable(const std::vector<GridCertificate>& ladder);

struct DirectCheck
{
    bool holds = false;
    /// Largest violation of the ordering (<= 0 when it holds) and where.
    double worst_gap = 0.0;
    double worst_t = 0.0;
    double worst_H = 0.0;
    std::size_t n_points = 0;
    std::string inequality;
};

struct RelationReport
{
    int relation = 0;
    ParamMap params;
    Verdict verdict = Verdict::Inconclusive;
    bool agree = true;
    std::string note;
    std::vector<GridCertificate> certificates;
    DirectCheck direct;
};

struct VerifyOptions
{
    double step = 0.005;
    unsigned workers = 1;
};

/// Relations 7, 9, 10, 13, 14, 24. Params: p for 13/14, H for 24. Out-of-domain
/// parameters give a not-applicable report.
RelationReport verify_relation(int relation, const ParamMap& params = {}, const VerifyOptions& options = {});

nlohmann::json to_json(const GridCertificate& cert);
nlohmann::json to_json(const RelationReport& report);

}  // namespace plab
