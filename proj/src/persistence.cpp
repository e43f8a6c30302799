#include "plab/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "plab/errors.hpp"
#include "plab/parallel.hpp"

namespace plab {

void BarrierSpec::validate() const
{
    if (!std::isfinite(level))
        throw DomainError("BarrierSpec: level must be finite");
    if (!(window_lo <= window_hi))
        throw DomainError("BarrierSpec: empty time window");
    if (!(exclude_radius >= 0.0))
        throw DomainError("BarrierSpec: exclusion radius must be nonnegative");
}

bool SurvivalEstimate::flagged(std::string_view f) const
{
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

SurvivalEstimate make_estimate(std::size_t survivors, std::size_t n_paths, double horizon, double step)
{
    if (n_paths == 0)
        throw DomainError("make_estimate: no paths");
    SurvivalEstimate e;
    e.horizon = horizon;
    e.step = step;
    e.n_paths = n_paths;
    e.survivors = survivors;
    const double n = static_cast<double>(n_paths);
    e.p_hat = static_cast<double>(survivors) / n;
    e.se = std::sqrt(e.p_hat * (1.0 - e.p_hat) / n);
    if (survivors == 0)
    {
        e.log_p = std::numeric_limits<double>::quiet_NaN();
        e.log_p_se = std::numeric_limits<double>::quiet_NaN();
        e.upper_bound = -std::expm1(std::log(0.05) / n);
    }
    else
    {
        e.log_p = std::log(e.p_hat);
        e.log_p_se = std::sqrt((1.0 - e.p_hat) / (n * e.p_hat));
        e.upper_bound = e.p_hat;
    }
    if (survivors < 10)
        e.flags.push_back("low-count");
    return e;
}

SurvivalEstimate survival_probability(const PathBatch& batch, const BarrierSpec& barrier)
{
    barrier.validate();
    std::vector<Eigen::Index> cols;
    std::vector<double> thr;
    for (std::size_t j = 0; j < batch.grid.size(); ++j)
        if (barrier.monitors(batch.grid[j]))
        {
            cols.push_back(static_cast<Eigen::Index>(j));
            thr.push_back(barrier.threshold(batch.grid[j]));
        }
    if (cols.empty())
        throw DomainError("survival_probability: barrier window contains no grid point");
    std::size_t survivors = 0;
    for (Eigen::Index r = 0; r < batch.values.rows(); ++r)
    {
        bool ok = true;
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (!barrier.holds(batch.values(r, cols[c]), thr[c]))
            {
                ok = false;
                break;
            }
        survivors += ok;
    }
    const auto pts = batch.grid.points();
    auto e = make_estimate(survivors, batch.n_paths(), pts[static_cast<std::size_t>(cols.back())],
                           batch.grid.step());
    e.provenance = batch.provenance;
    return e;
}

namespace {

bool is_brownian(const KernelSpec& spec)
{
    const auto* k = spec.kernel();
    return k != nullptr && k->kind() == KernelKind::FBM && k->hurst() == 0.5;
}

void check_ladder(const std::vector<double>& horizons)
{
    if (horizons.empty())
        throw DomainError("survival plan: empty horizon ladder");
    for (std::size_t k = 0; k < horizons.size(); ++k)
    {
        if (!(horizons[k] > 0.0) || !std::isfinite(horizons[k]))
            throw DomainError("survival plan: horizons must be positive and finite");
        if (k > 0 && !(horizons[k] > horizons[k - 1]))
            throw DomainError("survival plan: horizon ladder must be increasing");
    }
}

}  // namespace

SurvivalPlan nested_plan(const KernelSpec& spec, std::vector<double> times, const std::vector<double>& entry,
                         std::vector<double> horizons, double step, const JitterPolicy& jitter)
{
    if (times.size() != entry.size())
        throw DomainError("nested_plan: times and entry horizons differ in length");
    check_ladder(horizons);
    const double last = horizons.back() * (1.0 + 1e-12) + 1e-12;

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (entry[i] <= last)
            idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (entry[a] != entry[b])
            return entry[a] < entry[b];
        return std::abs(times[a]) < std::abs(times[b]);
    });
    std::vector<double> ordered(idx.size()), ordered_entry(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
    {
        ordered[i] = times[idx[i]];
        ordered_entry[i] = entry[idx[i]];
    }

    std::vector<std::size_t> prefix;
    for (double h : horizons)
    {
        const double cut = h * (1.0 + 1e-12) + 1e-12;
        const auto n = static_cast<std::size_t>(
            std::upper_bound(ordered_entry.begin(), ordered_entry.end(), cut) - ordered_entry.begin());
        if (n == 0)
            throw DomainError("nested_plan: a horizon contains no sampling time");
        prefix.push_back(n);
    }

    Factor factor = is_brownian(spec) ? Factor(IncrementFactor::brownian(ordered))
                                      : Factor(factorize_spd(build_covariance(spec, ordered), jitter));
    return SurvivalPlan{std::move(factor), std::move(ordered), std::move(horizons), std::move(prefix), step,
                        spec.id()};
}

SurvivalPlan one_sided_plan(const KernelSpec& spec, double step, std::vector<double> horizons,
                            const JitterPolicy& jitter)
{
    if (!(step > 0.0))
        throw DomainError("one_sided_plan: step must be positive");
    check_ladder(horizons);
    const auto k_max = static_cast<std::size_t>(std::floor(horizons.back() / step + 1e-9));
    const std::size_t k0 = spec.stationary() ? 0 : 1;
    std::vector<double> times;
    for (std::size_t k = k0; k <= k_max; ++k)
        times.push_back(static_cast<double>(k) * step);
    auto entry = times;
    return nested_plan(spec, std::move(times), entry, std::move(horizons), step, jitter);
}

SurvivalPlan log_image_plan(const KernelSpec& spec, double dt, std::vector<double> horizons,
                            const JitterPolicy& jitter)
{
    if (!spec.stationary())
        throw DomainError("log_image_plan: requires a stationary family");
    if (!(dt > 0.0))
        throw DomainError("log_image_plan: step must be positive");
    check_ladder(horizons);
    const double t_max = std::exp(horizons.back());
    const auto k_max = static_cast<std::size_t>(std::floor((t_max - 1.0) / dt * (1.0 + 1e-12) + 1e-9));
    std::vector<double> times;
    for (std::size_t k = 0; k <= k_max; ++k)
        times.push_back(std::log1p(static_cast<double>(k) * dt));
    auto entry = times;
    return nested_plan(spec, std::move(times), entry, std::move(horizons), dt, jitter);
}

SurvivalPlan two_sided_plan(const KernelSpec& spec, double step, double alpha, std::vector<double> horizons,
                            const JitterPolicy& jitter)
{
    if (spec.stationary())
        throw DomainError("two_sided_plan: requires a kernel pinned at the origin");
    if (!(step > 0.0) || !(alpha > 0.0))
        throw DomainError("two_sided_plan: step and alpha must be positive");
    check_ladder(horizons);
    const double t_max = horizons.back();
    const auto k_pos = static_cast<long long>(std::floor(t_max / step + 1e-9));
    const auto k_neg = static_cast<long long>(std::floor(std::pow(t_max, alpha) / step + 1e-9));
    std::vector<double> times, entry;
    for (long long k = -k_neg; k <= k_pos; ++k)
    {
        if (k == 0)
            continue;
        const double t = static_cast<double>(k) * step;
        times.push_back(t);
        entry.push_back(t > 0.0 ? t : std::pow(-t, 1.0 / alpha));
    }
    return nested_plan(spec, std::move(times), entry, std::move(horizons), step, jitter);
}

std::vector<std::size_t> exit_histogram(const SurvivalPlan& plan, const BarrierSpec& barrier, const McBudget& budget,
                                        const RngStreamSpec& stream)
{
    barrier.validate();
    if (budget.n_paths == 0)
        throw DomainError("exit_histogram: n_paths must be at least 1");
    const std::size_t n = plan.times.size();
    std::vector<char> monitored(n);
    std::vector<double> thr(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        monitored[i] = barrier.monitors(plan.times[i]);
        thr[i] = barrier.threshold(plan.times[i]);
    }

    constexpr std::size_t kBlock = 4096;
    const std::size_t n_blocks = (budget.n_paths + kBlock - 1) / kBlock;
    std::vector<std::vector<std::size_t>> partial(n_blocks);
    parallel_for(n_blocks, budget.workers, [&](std::size_t b) {
        std::vector<std::size_t> counts(n + 1, 0);
        std::vector<double> z(n), x(n);
        const std::size_t end = std::min(budget.n_paths, (b + 1) * kBlock);
        for (std::size_t p = b * kBlock; p < end; ++p)
        {
            NormalSource normals(stream, budget.first_path + p);
            std::size_t exit = n;
            plan.factor.stream(normals, z.data(), x.data(), [&](std::size_t i, double v) {
                if (monitored[i] && !barrier.holds(v, thr[i]))
                {
                    exit = i;
                    return false;
                }
                return true;
            });
            ++counts[exit];
        }
        partial[b] = std::move(counts);
    });
    std::vector<std::size_t> total(n + 1, 0);
    for (const auto& c : partial)
        for (std::size_t i = 0; i <= n; ++i)
            total[i] += c[i];
    return total;
}

std::vector<SurvivalEstimate> run_survival(const SurvivalPlan& plan, const BarrierSpec& barrier,
                                           const McBudget& budget, const RngStreamSpec& stream)
{
    const auto hist = exit_histogram(plan, barrier, budget, stream);
    // survivors of a prefix of length m: paths whose first exit index is >= m
    std::vector<std::size_t> tail(hist.size() + 1, 0);
    for (std::size_t i = hist.size(); i-- > 0;)
        tail[i] = tail[i + 1] + hist[i];
    std::vector<SurvivalEstimate> out;
    for (std::size_t k = 0; k < plan.horizons.size(); ++k)
    {
        auto e = make_estimate(tail[plan.prefix[k]], budget.n_paths, plan.horizons[k], plan.step);
        e.provenance = Provenance{plan.kernel_id, stream.master_seed, stream.stream_id, budget.first_path};
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SurvivalEstimate> survival_series(const KernelSpec& spec, const BarrierSpec& barrier,
                                              const std::vector<double>& ladder, double step,
                                              const McBudget& budget, const RngStreamSpec& stream)
{
    return run_survival(one_sided_plan(spec, step, ladder), barrier, budget, stream);
}

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_series_csv(std::ostream& out, const std::string& family, const std::string& params,
                      const std::vector<SurvivalEstimate>& series, bool header)
{
    if (header)
        out << "family,params,T,step,n_paths,p_hat,se,log_p,log_p_se,flags\n";
    for (const auto& e : series)
    {
        std::string flags;
        for (const auto& f : e.flags)
            flags += (flags.empty() ? "" : ";") + f;
        out << family << ',' << params << ',' << fmt(e.horizon) << ',' << fmt(e.step) << ',' << e.n_paths << ','
            << fmt(e.p_hat) << ',' << fmt(e.se) << ',' << fmt(e.log_p) << ',' << fmt(e.log_p_se) << ',' << flags
            << '\n';
    }
}

double ArgmaxDistribution::F_star(double u) const
{
    return static_cast<double>(std::upper_bound(positions.begin(), positions.end(), u) - positions.begin())
           / static_cast<double>(positions.size());
}

double ArgmaxDistribution::density(double u, double eps) const
{
    const auto lo = std::lower_bound(positions.begin(), positions.end(), u - eps);
    const auto hi = std::upper_bound(positions.begin(), positions.end(), u + eps);
    return static_cast<double>(hi - lo) / static_cast<double>(positions.size()) / (2.0 * eps);
}

ArgmaxDistribution argmax_statistics(const PathBatch& batch, const ArgmaxOptions& options)
{
    if (batch.n_paths() == 0 || options.bins == 0)
        throw DomainError("argmax_statistics: empty batch or zero bins");
    const auto pts = batch.grid.points();
    ArgmaxDistribution d;
    d.t_minus = std::max(0.0, -pts.front());
    d.t_plus = std::max(0.0, pts.back());
    const double len = d.t_minus + d.t_plus;
    if (!(len > 0.0))
        throw DomainError("argmax_statistics: degenerate window");
    // index of the first positive time: where the origin sits in time order
    const std::size_t origin_at =
        static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), 0.0) - pts.begin());

    d.histogram.assign(options.bins, 0.0);
    d.positions.reserve(batch.n_paths());
    std::size_t center = 0;
    for (Eigen::Index r = 0; r < batch.values.rows(); ++r)
    {
        double best = -std::numeric_limits<double>::infinity();
        double t_star = 0.0;
        for (std::size_t j = 0; j <= pts.size(); ++j)
        {
            if (j == origin_at && options.include_origin && 0.0 > best)
            {
                best = 0.0;
                t_star = 0.0;
            }
            if (j == pts.size())
                break;
            const double v = batch.values(r, static_cast<Eigen::Index>(j));
            if (v > best)
            {
                best = v;
                t_star = pts[j];
            }
        }
        const double u = (t_star + d.t_minus) / len;
        d.positions.push_back(u);
        auto bin = static_cast<std::size_t>(u * static_cast<double>(options.bins));
        d.histogram[std::min(bin, options.bins - 1)] += 1.0;
        center += std::abs(t_star) <= options.center_radius;
    }
    std::sort(d.positions.begin(), d.positions.end());
    const double n = static_cast<double>(batch.n_paths());
    for (auto& h : d.histogram)
        h /= n;
    d.center_prob = static_cast<double>(center) / n;
    d.center_se = std::sqrt(d.center_prob * (1.0 - d.center_prob) / n);
    return d;
}

double discrete_limit_prob(int n, DiscreteCase which)
{
    if (n < 1)
        throw DomainError("discrete_limit_prob: N must be at least 1");
    switch (which)
    {
    case DiscreteCase::IidNegative: return std::ldexp(1.0, -n);
    case DiscreteCase::CommonShift: return 1.0 / (n + 1.0);
    case DiscreteCase::Khanin: break;
    }
    const double r2 = std::sqrt(2.0);
    auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    auto f = [&](double x) {
        const double dens = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        return dens * std::pow(cdf(r2 - x) * cdf(r2 + x), n);
    };
    // the standard normal density is below 1e-31 outside [-12, 12]
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -12.0, 12.0, 25, 1e-14, &err);
}

}  // namespace plab
