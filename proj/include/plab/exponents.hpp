#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plab/persistence.hpp"

namespace plab {

enum class FitModel
{
    PowerLaw,     // -ln p = theta ln T + c
    Exponential,  // -ln p = theta T + c
    Eq12,         // -ln p = theta T - alpha ln T - ln C
};

std::string_view to_string(FitModel m) noexcept;

struct FitOptions
{
    /// Window of horizons used; defaults follow the model (T >= 16, or T >= 5 for duals).
    std::optional<double> min_horizon;
    double max_horizon = std::numeric_limits<double>::infinity();
    /// Eq12 only: fix alpha instead of fitting it.
    std::optional<double> pinned_alpha;
};

struct ExponentFit
{
    FitModel model = FitModel::PowerLaw;
    double theta_hat = 0.0;
    double se = 0.0;
    std::optional<double> alpha_hat;
    std::optional<double> alpha_se;
    std::optional<double> lnC_hat;
    /// Standardized residuals (y - fit) / sd(y) in window order.
    std::vector<double> residuals;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::size_t n_points = 0;
    double chi2 = 0.0;
    int dof = 0;
    /// Whether the series shared paths (nested common random numbers).
    bool shared_paths = false;
};

/// Weighted least squares of -ln p on ln T with weights 1 / se(ln p)^2.
/// Standard errors use the nested-event covariance when all estimates come
/// from the same paths: Cov(ln p_i, ln p_j) = (1 - p_i) / (n p_i) for T_i <= T_j.
ExponentFit fit_powerlaw(const std::vector<SurvivalEstimate>& series, const FitOptions& options = {});

/// Same machinery in T~ with model Exponential or Eq12.
ExponentFit fit_dual_exponential(const std::vector<SurvivalEstimate>& series, FitModel model = FitModel::Exponential,
                                 const FitOptions& options = {});

nlohmann::json to_json(const ExponentFit& fit);

/// Intercept of a weighted straight-line fit of y against x^power.
struct Extrapolation
{
    double value = 0.0;
    double se = 0.0;
    double slope = 0.0;
    double power = 1.0;
    double chi2 = 0.0;
};

Extrapolation extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::vector<double>& se, double power);

/// Weighted isotonic (non-decreasing in the given order) regression.
std::vector<double> monotone_fit(const std::vector<double>& y, const std::vector<double>& se);

struct Bracket
{
    double lower = 0.0;
    double upper = 0.0;
    double lower_se = 0.0;
    double upper_se = 0.0;
    int k = 1;
    double T0 = 0.0;
    double level = 0.0;
    /// Survival on (0, k T0) at each grid step, and the step -> 0 value.
    std::vector<double> steps;
    std::vector<SurvivalEstimate> estimates;
    double p = 0.0;
    double p_se = 0.0;
    /// Extrapolation variable is step^power; 0 means the finest step was used as is.
    double power = 0.0;
};

/// Bracket (1 + 1/k)^-1 theta(a, k T0) <= theta(a) <= theta(a, k T0) with
/// theta(a, k T0) = -ln P(x(t) <= a, 0 < t < k T0) / (k T0). With several
/// grid steps the probability is extrapolated linearly in step^H, the
/// roughness order of the discrete-monitoring bias.
Bracket lishao_bracket(const CorrelationFamily& family, int k, double level, const std::vector<double>& steps,
                       const McBudget& budget, const RngStreamSpec& stream);

/// Rate bracket from a known survival probability on (0, k T0).
Bracket bracket_from_probability(double p, double p_se, int k, double T0);

struct ShiftCheck
{
    bool holds = false;
    double margin = 0.0;  // bound - |sqrt(theta_af) - sqrt(theta_a)|
};

/// |sqrt(theta_af) - sqrt(theta_a)| <= f_norm / sqrt(2 |Delta|).
ShiftCheck shift_bound_check(double theta_a, double theta_af, double f_norm, double interval_length);

struct MedianMax
{
    double m_hat = 0.0;
    double bound = 0.0;
    bool holds = false;
    std::size_t n_paths = 0;
    double step = 0.0;
};

/// Monte Carlo median of max S_H over [0, 1] against 5.36 / sqrt(H).
MedianMax median_max_bound(double hurst, const McBudget& budget, const RngStreamSpec& stream,
                           double step = 1.0 / 512);

struct AtlasValue
{
    std::string name;
    double H = 0.0;
    std::optional<double> alpha;
    bool applicable = false;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> exact;
    bool lower_strict = false;
    std::string note;

    bool contains(double theta, double slack = 0.0) const;
};

/// Names: hypothesis, hypothesis-two-sided, prop1b, prop1c, prop1, prop2,
/// eq2, eq2-two-sided, eq3, eq5, eq20, eq21, prop4, prop5 (needs alpha).
AtlasValue bounds_atlas(const std::string& name, double H, std::optional<double> alpha = std::nullopt);

const std::vector<std::string>& atlas_names();

/// CSV rows curve,H,alpha,lower,upper,exact,applicable over the given H grid.
void write_atlas_csv(std::ostream& out, const std::vector<std::string>& names, const std::vector<double>& hs,
                     std::optional<double> alpha = std::nullopt);

}  // namespace plab
