#include "plab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "plab/errors.hpp"
#include "plab/parallel.hpp"

namespace plab {

std::string_view to_string(FitModel m) noexcept
{
    switch (m)
    {
    case FitModel::PowerLaw: return "power-law-in-T";
    case FitModel::Exponential: return "exponential-in-T~";
    case FitModel::Eq12: return "eq12-with-prefactor";
    }
    return "?";
}

namespace {

bool same_paths(const std::vector<const SurvivalEstimate*>& pts)
{
    const auto& a = *pts.front();
    if (a.provenance.kernel_id.empty())
        return false;
    for (const auto* e : pts)
        if (e->n_paths != a.n_paths || e->provenance.kernel_id != a.provenance.kernel_id
            || e->provenance.master_seed != a.provenance.master_seed
            || e->provenance.stream_id != a.provenance.stream_id
            || e->provenance.first_path != a.provenance.first_path)
            return false;
    return true;
}

struct Wls
{
    Eigen::VectorXd beta;
    Eigen::MatrixXd cov;
    Eigen::VectorXd resid;
    double chi2 = 0.0;
};

// Weighted least squares with weights 1/v and sandwich covariance for the
// true error covariance sigma.
Wls weighted_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& v,
                 const Eigen::MatrixXd& sigma)
{
    const Eigen::VectorXd w = v.cwiseInverse();
    const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
    const Eigen::MatrixXd normal = xtw * x;

    // conditioning of the column-scaled normal matrix
    const Eigen::VectorXd d = normal.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = d.asDiagonal() * normal * d.asDiagonal();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(scaled).eigenvalues();
    if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff()))
        throw ConditioningError("fit: collinear design, widen the horizon ladder", ev.minCoeff());

    const Eigen::MatrixXd a = normal.inverse();
    Wls r;
    r.beta = a * (xtw * y);
    r.cov = a * xtw * sigma * xtw.transpose() * a;
    r.resid = y - x * r.beta;
    r.chi2 = r.resid.dot(sigma.ldlt().solve(r.resid));
    return r;
}

ExponentFit fit_series(const std::vector<SurvivalEstimate>& series, FitModel model, const FitOptions& options)
{
    const double lo = options.min_horizon.value_or(model == FitModel::PowerLaw ? 16.0 : 5.0);
    std::vector<const SurvivalEstimate*> pts;
    for (const auto& e : series)
        if (e.horizon >= lo && e.horizon <= options.max_horizon)
            pts.push_back(&e);
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->horizon < b->horizon; });
    for (const auto* e : pts)
        if (!(e->p_hat > 0.0))
            throw FitError("fit: unusable point, p_hat = 0 at horizon " + fmt(e->horizon));

    const bool free_alpha = model == FitModel::Eq12 && !options.pinned_alpha;
    const int n_par = free_alpha ? 3 : 2;
    const std::size_t need = model == FitModel::Eq12 ? 4 : 3;
    if (pts.size() < need)
        throw FitError("fit: need at least " + std::to_string(need) + " horizons in the window, have "
                       + std::to_string(pts.size()));

    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd x(n, n_par);
    Eigen::VectorXd y(n), v(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto& e = *pts[static_cast<std::size_t>(i)];
        const double t = e.horizon;
        y(i) = -std::log(e.p_hat);
        v(i) = std::max(e.log_p_se * e.log_p_se, 1e-30);
        x(i, 0) = model == FitModel::PowerLaw ? std::log(t) : t;
        if (free_alpha)
        {
            x(i, 1) = -std::log(t);
            x(i, 2) = 1.0;
        }
        else
        {
            x(i, 1) = 1.0;
            if (model == FitModel::Eq12)
                y(i) += *options.pinned_alpha * std::log(t);
        }
    }

    ExponentFit f;
    f.model = model;
    f.shared_paths = same_paths(pts);
    Eigen::MatrixXd sigma = v.asDiagonal();
    if (f.shared_paths)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                sigma(i, j) = v(std::min(i, j));

    const auto r = weighted_fit(x, y, v, sigma);
    f.theta_hat = r.beta(0);
    f.se = std::sqrt(std::max(r.cov(0, 0), 0.0));
    if (model == FitModel::Eq12)
    {
        if (free_alpha)
        {
            f.alpha_hat = r.beta(1);
            f.alpha_se = std::sqrt(std::max(r.cov(1, 1), 0.0));
            f.lnC_hat = -r.beta(2);
        }
        else
        {
            f.alpha_hat = *options.pinned_alpha;
            f.lnC_hat = -r.beta(1);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        f.residuals.push_back(r.resid(i) / std::sqrt(v(i)));
    f.window_lo = pts.front()->horizon;
    f.window_hi = pts.back()->horizon;
    f.n_points = pts.size();
    f.chi2 = r.chi2;
    f.dof = static_cast<int>(n) - n_par;
    return f;
}

}  // namespace

ExponentFit fit_powerlaw(const std::vector<SurvivalEstimate>& series, const FitOptions& options)
{
    return fit_series(series, FitModel::PowerLaw, options);
}

ExponentFit fit_dual_exponential(const std::vector<SurvivalEstimate>& series, FitModel model,
                                 const FitOptions& options)
{
    if (model == FitModel::PowerLaw)
        throw DomainError("fit_dual_exponential: model must be Exponential or Eq12");
    return fit_series(series, model, options);
}

nlohmann::json to_json(const ExponentFit& fit)
{
    nlohmann::json j{
        {"model", std::string(to_string(fit.model))},
        {"theta_hat", fit.theta_hat},
        {"se", fit.se},
        {"window", {fit.window_lo, fit.window_hi}},
        {"n_points", fit.n_points},
        {"chi2", fit.chi2},
        {"dof", fit.dof},
        {"shared_paths", fit.shared_paths},
    };
    if (fit.alpha_hat)
        j["alpha_hat"] = *fit.alpha_hat;
    if (fit.alpha_se)
        j["alpha_se"] = *fit.alpha_se;
    if (fit.lnC_hat)
        j["lnC_hat"] = *fit.lnC_hat;
    return j;
}

Extrapolation extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::vector<double>& se, double power)
{
    if (x.size() != y.size() || x.size() != se.size() || x.size() < 2)
        throw FitError("extrapolate_to_zero: need at least two matching points");
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n), v(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto k = static_cast<std::size_t>(i);
        a(i, 0) = 1.0;
        a(i, 1) = std::pow(x[k], power);
        b(i) = y[k];
        v(i) = std::max(se[k] * se[k], 1e-300);
    }
    const auto r = weighted_fit(a, b, v, v.asDiagonal());
    Extrapolation e;
    e.value = r.beta(0);
    e.slope = r.beta(1);
    e.se = std::sqrt(std::max(r.cov(0, 0), 0.0));
    e.power = power;
    e.chi2 = r.chi2;
    return e;
}

std::vector<double> monotone_fit(const std::vector<double>& y, const std::vector<double>& se)
{
    // pool adjacent violators
    struct Block
    {
        double mean, weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < y.size(); ++i)
    {
        blocks.push_back({y[i], 1.0 / std::max(se[i] * se[i], 1e-300), 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean)
        {
            const Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            a.mean = (a.mean * a.weight + b.mean * b.weight) / (a.weight + b.weight);
            a.weight += b.weight;
            a.count += b.count;
        }
    }
    std::vector<double> out;
    for (const auto& b : blocks)
        out.insert(out.end(), b.count, b.mean);
    return out;
}

Bracket bracket_from_probability(double p, double p_se, int k, double T0)
{
    if (!(p > 0.0 && p < 1.0))
        throw BudgetError("bracket: probability must lie in (0, 1)");
    if (k < 1 || !(T0 > 0.0))
        throw DomainError("bracket: need k >= 1 and T0 > 0");
    Bracket b;
    b.k = k;
    b.T0 = T0;
    b.p = p;
    b.p_se = p_se;
    const double len = k * T0;
    b.upper = -std::log(p) / len;
    b.upper_se = p_se / (p * len);
    const double shrink = 1.0 / (1.0 + 1.0 / k);
    b.lower = shrink * b.upper;
    b.lower_se = shrink * b.upper_se;
    return b;
}

Bracket lishao_bracket(const CorrelationFamily& family, int k, double level, const std::vector<double>& steps,
                       const McBudget& budget, const RngStreamSpec& stream)
{
    const double t0 = family.range();
    if (!std::isfinite(t0))
        throw DomainError("lishao_bracket: family must have a finite correlation range");
    if (k < 1 || steps.empty())
        throw DomainError("lishao_bracket: need k >= 1 and at least one grid step");
    const KernelSpec spec(family);
    const BarrierSpec barrier{level, Comparison::NonstrictBelow};
    std::vector<SurvivalEstimate> est;
    std::vector<double> p, se;
    for (std::size_t i = 0; i < steps.size(); ++i)
    {
        const auto plan = one_sided_plan(spec, steps[i], {k * t0});
        const RngStreamSpec s{stream.master_seed, stream.stream_id + i};
        auto e = run_survival(plan, barrier, budget, s).front();
        if (e.survivors == 0)
            throw BudgetError("lishao_bracket: no surviving path at step " + fmt(steps[i]));
        p.push_back(e.p_hat);
        se.push_back(e.se);
        est.push_back(std::move(e));
    }
    double p0 = p.front(), p0_se = se.front(), power = 0.0;
    if (steps.size() >= 2)
    {
        power = family.hurst();
        const auto ex = extrapolate_to_zero(steps, p, se, power);
        p0 = ex.value;
        p0_se = ex.se;
    }
    else
        p0 = p.front();
    auto b = bracket_from_probability(p0, p0_se, k, t0);
    b.level = level;
    b.steps = steps;
    b.estimates = std::move(est);
    b.power = power;
    return b;
}

ShiftCheck shift_bound_check(double theta_a, double theta_af, double f_norm, double interval_length)
{
    if (!(theta_a >= 0.0) || !(theta_af >= 0.0) || !(f_norm >= 0.0) || !(interval_length > 0.0)
        || !std::isfinite(theta_a) || !std::isfinite(theta_af) || !std::isfinite(f_norm)
        || !std::isfinite(interval_length))
        throw DomainError("shift_bound_check: inputs must be finite, rates and norm nonnegative");
    const double gap = std::abs(std::sqrt(theta_af) - std::sqrt(theta_a));
    const double bound = f_norm / std::sqrt(2.0 * interval_length);
    return {gap <= bound, bound - gap};
}

MedianMax median_max_bound(double hurst, const McBudget& budget, const RngStreamSpec& stream, double step)
{
    const auto family = CorrelationFamily::frac_slepian(hurst);
    if (!(step > 0.0 && step <= 1.0 / 512 + 1e-15))
        throw DomainError("median_max_bound: grid step must be at most 1/512");
    const auto n = static_cast<std::size_t>(std::llround(1.0 / step)) + 1;
    const auto grid = Grid::uniform(0.0, 1.0 / static_cast<double>(n - 1), n);
    const Factor factor(factorize_spd(build_covariance(KernelSpec(family), grid)));

    std::vector<double> maxima(budget.n_paths);
    constexpr std::size_t kBlock = 1024;
    const std::size_t n_blocks = (budget.n_paths + kBlock - 1) / kBlock;
    parallel_for(n_blocks, budget.workers, [&](std::size_t b) {
        std::vector<double> z(n), x(n);
        const std::size_t end = std::min(budget.n_paths, (b + 1) * kBlock);
        for (std::size_t p = b * kBlock; p < end; ++p)
        {
            NormalSource normals(stream, budget.first_path + p);
            double m = -std::numeric_limits<double>::infinity();
            factor.stream(normals, z.data(), x.data(), [&](std::size_t, double v) {
                m = std::max(m, v);
                return true;
            });
            maxima[p] = m;
        }
    });
    MedianMax r;
    const auto mid = maxima.begin() + static_cast<std::ptrdiff_t>(maxima.size() / 2);
    std::nth_element(maxima.begin(), mid, maxima.end());
    r.m_hat = *mid;
    if (maxima.size() % 2 == 0)
        r.m_hat = 0.5 * (r.m_hat + *std::max_element(maxima.begin(), mid));
    r.bound = 5.36 / std::sqrt(hurst);
    r.holds = r.m_hat < r.bound;
    r.n_paths = budget.n_paths;
    r.step = grid.step();
    return r;
}

bool AtlasValue::contains(double theta, double slack) const
{
    if (!applicable)
        return false;
    if (exact)
        return std::abs(theta - *exact) <= slack;
    if (lower && theta < *lower - slack)
        return false;
    if (upper && theta > *upper + slack)
        return false;
    return true;
}

const std::vector<std::string>& atlas_names()
{
    static const std::vector<std::string> names{"hypothesis", "hypothesis-two-sided", "prop1b", "prop1c", "prop1",
                                                "prop2",      "eq2",                  "eq2-two-sided", "eq3",
                                                "eq5",        "eq20",                 "eq21",   "prop4",  "prop5"};
    return names;
}

AtlasValue bounds_atlas(const std::string& name, double H, std::optional<double> alpha)
{
    AtlasValue a;
    a.name = name;
    a.H = H;
    a.alpha = alpha;
    const bool hurst_ok = H > 0.0 && H < 1.0;
    const double hb = 1.0 - H;
    const double m = std::min(H, hb);
    auto na = [&](std::string why) {
        a.applicable = false;
        a.note = std::move(why);
        return a;
    };

    if (name == "prop2")
    {
        a.applicable = true;
        a.lower = 1.0 / (4.0 * std::sqrt(3.0));
        a.upper = 0.25;
        return a;
    }
    if (name == "eq3")
    {
        a.applicable = true;
        a.exact = 0.25;
        return a;
    }
    if (!hurst_ok)
        return na("H outside (0, 1)");

    if (name == "hypothesis")
        a.exact = H * hb;
    else if (name == "hypothesis-two-sided")
        a.exact = hb;
    else if (name == "prop1b")
    {
        a.lower = 0.5 * m;
        a.upper = hb;
    }
    else if (name == "prop1c")
        a.upper = std::sqrt((1.0 - m * m) / 12.0);
    else if (name == "prop1")
    {
        a.lower = 0.5 * m;
        a.upper = std::min(hb, std::sqrt((1.0 - m * m) / 12.0));
    }
    else if (name == "eq2")
        a.exact = hb;
    else if (name == "eq2-two-sided")
        a.exact = 1.0;
    else if (name == "eq5")
    {
        a.upper = hb;
        a.note = "lower bound involves an unspecified constant; not evaluable";
    }
    else if (name == "eq20")
    {
        if (H > 0.5)
            return na("fractional Slepian process requires H <= 1/2");
        a.upper = 49.0 / (H * H);
        if (H <= std::exp(-2.0) / 2.0)
            a.lower = hb / H * std::log(1.0 / (2.0 * H));
        else
            a.note = "lower bound only for H <= e^-2/2";
    }
    else if (name == "eq21")
    {
        if (H >= 0.5)
            return na("odd-part bounds require H < 1/2");
        a.lower = std::min(hb * hb / H, hb * std::pow(2.0, 1.0 / (2.0 * H) - 1.0));
        if (H > 0.1549)
            a.upper = hb * hb / H;
        else
        {
            a.upper = 0.5 * std::pow(7.0 / H, 2.0);
            a.note = "upper bound from the Slepian comparison";
        }
    }
    else if (name == "prop4")
    {
        if (H > 0.5)
        {
            a.lower = hb;
            a.lower_strict = true;
            a.upper = 2.0 * hb;
        }
        else if (H == 0.5)
            a.exact = 1.0;
        else if (H <= 0.25)
        {
            a.lower = hb * std::min(1.0 / H - 1.0, std::pow(2.0, 1.0 / (2.0 * H) - 1.0));
            a.note = "lower exponent";
        }
        else
        {
            a.lower = 2.0 * hb;
            a.note = "lower exponent";
        }
    }
    else if (name == "prop5")
    {
        if (!alpha)
            return na("alpha required");
        if (!(*alpha >= 0.0 && *alpha <= 1.0))
            return na("alpha outside [0, 1]");
        a.exact = *alpha * H + hb;
    }
    else
        throw DomainError("bounds_atlas: unknown curve '" + name + "'");
    a.applicable = true;
    return a;
}

void write_atlas_csv(std::ostream& out, const std::vector<std::string>& names, const std::vector<double>& hs,
                     std::optional<double> alpha)
{
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    out << "curve,H,alpha,lower,upper,exact,applicable\n";
    for (const auto& name : names)
        for (double h : hs)
        {
            const auto a = bounds_atlas(name, h, alpha);
            out << name << ',' << fmt(h) << ',' << opt(alpha) << ',' << opt(a.lower) << ',' << opt(a.upper) << ','
                << opt(a.exact) << ',' << (a.applicable ? 1 : 0) << '\n';
        }
}

}  // namespace plab
