#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "plab/sampler.hpp"

namespace plab {

enum class Comparison
{
    StrictBelow,
    NonstrictBelow,
};

/// Event {x(t) < level} or {x(t) <= level} for every monitored grid time.
///
/// A time is monitored when it lies in [window_lo, window_hi] and
/// |t| >= exclude_radius (the latter removes (-r, r) for generalized duals).
/// An optional profile f makes the barrier level + f(t).
struct BarrierSpec
{
    double level = 0.0;
    Comparison comparison = Comparison::NonstrictBelow;
    double window_lo = -std::numeric_limits<double>::infinity();
    double window_hi = std::numeric_limits<double>::infinity();
    double exclude_radius = 0.0;
    std::function<double(double)> profile;

    bool monitors(double t) const noexcept
    {
        return t >= window_lo && t <= window_hi && std::abs(t) >= exclude_radius;
    }
    double threshold(double t) const { return profile ? level + profile(t) : level; }
    bool holds(double x, double threshold) const noexcept
    {
        return comparison == Comparison::StrictBelow ? x < threshold : x <= threshold;
    }
    bool holds(double x) const noexcept { return holds(x, level); }
    void validate() const;
};

struct SurvivalEstimate
{
    double horizon = 0.0;
    double step = 0.0;
    std::size_t n_paths = 0;
    std::size_t survivors = 0;
    double p_hat = 0.0;
    double se = 0.0;
    /// ln p_hat and its delta-method standard error; NaN when p_hat = 0.
    double log_p = 0.0;
    double log_p_se = 0.0;
    /// One-sided 95% upper confidence bound, reported when p_hat = 0.
    double upper_bound = 0.0;
    /// "low-count" when fewer than 10 paths survive.
    std::vector<std::string> flags;
    Provenance provenance;

    bool flagged(std::string_view f) const;
};

SurvivalEstimate make_estimate(std::size_t survivors, std::size_t n_paths, double horizon = 0.0, double step = 0.0);

/// Fraction of paths in the batch that satisfy the barrier on every monitored point.
SurvivalEstimate survival_probability(const PathBatch& batch, const BarrierSpec& barrier);

/// Sampling times in generation order, with horizons realized as prefixes.
///
/// Horizon k consists of the first prefix[k] times. Paths are generated one
/// coordinate at a time and abandoned at their first barrier violation, so
/// every horizon shares the same paths and estimates are exactly monotone.
struct SurvivalPlan
{
    Factor factor;
    std::vector<double> times;
    std::vector<double> horizons;
    std::vector<std::size_t> prefix;
    double step = 0.0;
    std::string kernel_id;
};

/// Plan over arbitrary times: each time enters at horizon entry[i]; times are
/// ordered by entry (ties by |t|). Brownian kernels use the exact increment
/// factor, everything else a dense Cholesky factor.
SurvivalPlan nested_plan(const KernelSpec& spec, std::vector<double> times, const std::vector<double>& entry,
                         std::vector<double> horizons, double step, const JitterPolicy& jitter = {});

/// Window (0, T) sampled at start + k step (start = 0 for stationary
/// families, = step for pinned kernels).
SurvivalPlan one_sided_plan(const KernelSpec& spec, double step, std::vector<double> horizons,
                            const JitterPolicy& jitter = {});

/// Window (0, T~) sampled at s_k = ln(1 + k dt), the Lamperti image of a
/// uniform grid of step dt on (1, e^T~). The spacing shrinks along the window,
/// so the grid bias in the decay rate vanishes as T~ grows.
SurvivalPlan log_image_plan(const KernelSpec& spec, double dt, std::vector<double> horizons,
                            const JitterPolicy& jitter = {});

/// Window (-T^alpha, T) for pinned kernels, multiples of step, origin excluded.
SurvivalPlan two_sided_plan(const KernelSpec& spec, double step, double alpha, std::vector<double> horizons,
                            const JitterPolicy& jitter = {});

struct McBudget
{
    std::size_t n_paths = 100000;
    unsigned workers = 1;
    std::uint64_t first_path = 0;
};

/// counts[i] = paths whose first violation is at sampling index i;
/// counts[n] = paths that never violate.
std::vector<std::size_t> exit_histogram(const SurvivalPlan& plan, const BarrierSpec& barrier, const McBudget& budget,
                                        const RngStreamSpec& stream);

std::vector<SurvivalEstimate> run_survival(const SurvivalPlan& plan, const BarrierSpec& barrier,
                                           const McBudget& budget, const RngStreamSpec& stream);

/// One-sided survival series over a horizon ladder with common random numbers.
std::vector<SurvivalEstimate> survival_series(const KernelSpec& spec, const BarrierSpec& barrier,
                                              const std::vector<double>& ladder, double step,
                                              const McBudget& budget, const RngStreamSpec& stream);

/// Shortest round-trip decimal form; "nan" for NaN.
std::string fmt(double v);

/// CSV with columns family,params,T,step,n_paths,p_hat,se,log_p,log_p_se,flags.
void write_series_csv(std::ostream& out, const std::string& family, const std::string& params,
                      const std::vector<SurvivalEstimate>& series, bool header = true);

struct ArgmaxOptions
{
    /// Treat the pinned origin (value 0) as a candidate maximum.
    bool include_origin = true;
    /// center_prob estimates P(|t*| <= center_radius).
    double center_radius = 0.5;
    std::size_t bins = 64;
};

struct ArgmaxDistribution
{
    double t_minus = 0.0;  // window is (-t_minus, t_plus)
    double t_plus = 0.0;
    std::vector<double> histogram;  // normalized positions, sums to 1
    std::vector<double> positions;  // sorted normalized positions (t* + t_minus) / (t_minus + t_plus)
    double center_prob = 0.0;
    double center_se = 0.0;

    /// Empirical distribution function of the normalized position.
    double F_star(double u) const;
    /// Fraction of positions in [u - eps, u + eps] divided by 2 eps.
    double density(double u, double eps) const;
};

ArgmaxDistribution argmax_statistics(const PathBatch& batch, const ArgmaxOptions& options = {});

enum class DiscreteCase
{
    IidNegative,
    CommonShift,
    Khanin,
};

/// P(xi_k < 0, k <= N) = 2^-N; P(xi_k - eta <= 0, k <= N) = 1/(N+1);
/// last case: P(xi_{-k} - sqrt2 < xi_0 < xi_k + sqrt2, k = 1..N) by quadrature.
double discrete_limit_prob(int n, DiscreteCase which);

}  // namespace plab
