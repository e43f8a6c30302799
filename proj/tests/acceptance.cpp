// Acceptance runner: one criterion per invocation (--criterion N) or all of them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <CLI11.hpp>

#include "plab/exponents.hpp"
#include "plab/parallel.hpp"
#include "plab/polyroots.hpp"
#include "plab/verify.hpp"

using namespace plab;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

unsigned g_workers = 1;

std::string num(double v, int digits = 4)
{
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

McBudget budget(std::size_t n) { return McBudget{n, g_workers, 0}; }

double ols_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

constexpr double kHalfSlepian = 1.0 / 6.0 - (2.0 + 1.7320508075688772) / (8.0 * M_PI);

Bracket half_slepian_bracket(std::uint64_t stream_id)
{
    return lishao_bracket(CorrelationFamily::frac_slepian(0.5), 2, 0.0, {1.0 / 64, 1.0 / 128, 1.0 / 256},
                          budget(2000000), RngStreamSpec{20260101, stream_id});
}

Outcome c1_closed_form()
{
    // Window (0, 2) = (0, k T0) with k = 2.
    const auto b = half_slepian_bracket(10);
    const auto& steps = b.steps;
    std::vector<double> p, se;
    std::string per_step;
    for (std::size_t i = 0; i < steps.size(); ++i)
    {
        p.push_back(b.estimates[i].p_hat);
        se.push_back(b.estimates[i].se);
        per_step += " p(" + num(steps[i]) + ")=" + num(p[i], 5) + "+-" + num(se[i], 2);
    }
    const auto lin = extrapolate_to_zero(steps, p, se, 1.0);
    const auto root = extrapolate_to_zero(steps, p, se, 0.5);
    const double rel = lin.value / kHalfSlepian - 1.0;

    // Fixed-step estimates against the best non-decreasing-in-step sequence.
    std::vector<double> ys(p.rbegin(), p.rend()), ss(se.rbegin(), se.rend());
    const auto mono = monotone_fit(ys, ss);
    bool monotone_ok = true;
    for (std::size_t i = 0; i < ys.size(); ++i)
        monotone_ok = monotone_ok && std::abs(ys[i] - mono[i]) <= 3.0 * ss[i];

    Outcome o;
    o.pass = std::abs(rel) <= 0.10 && monotone_ok;
    o.detail = "linear-in-step p0=" + num(lin.value, 5) + "+-" + num(lin.se, 2) + " vs " + num(kHalfSlepian, 6) + " (rel "
               + num(100 * rel, 3) + "%, limit 10%); monotone=" + (monotone_ok ? "yes" : "no") + ";" + per_step
               + "; sqrt(step) extrapolation p0=" + num(root.value, 5) + " (rel "
               + num(100 * (root.value / kHalfSlepian - 1), 3) + "%, not gated)";
    return o;
}

Outcome c2_ibm_dual()
{
    std::vector<double> ladder;
    for (int t = 5; t <= 25; ++t)
        ladder.push_back(t);
    const auto s = survival_series(KernelSpec(CorrelationFamily::dual_ibm_scaled(1.0)), BarrierSpec{}, ladder, 0.05,
                                   budget(10000000), RngStreamSpec{20260102, 0});
    const auto f = fit_dual_exponential(s, FitModel::Exponential);
    Outcome o;
    o.pass = std::abs(f.theta_hat - 0.25) <= 0.03;
    o.detail = "theta~=" + num(f.theta_hat, 5) + "+-" + num(f.se, 2) + " (target 0.25+-0.03, 1e7 paths, T~ "
               + num(f.window_lo) + ".." + num(f.window_hi) + ", p(25)=" + num(s.back().p_hat, 3) + ")";
    return o;
}

Outcome c3_fbm()
{
    Outcome o;
    o.pass = true;
    std::vector<double> ladder;
    for (double t = 16.0; t <= 4096.0 * (1 + 1e-12); t *= std::sqrt(2.0))
        ladder.push_back(std::log(t));
    for (double h : {0.25, 0.5, 0.75})
    {
        const auto plan = log_image_plan(KernelSpec(CorrelationFamily::dual_fbm(h)), 1.0, ladder);
        const std::size_t n = h < 0.5 ? 1000000 : 200000;
        const auto s = run_survival(plan, BarrierSpec{}, budget(n), RngStreamSpec{20260103, std::uint64_t(100 * h)});
        const auto f = fit_dual_exponential(s, FitModel::Exponential);
        const bool ok = std::abs(f.theta_hat - (1 - h)) <= 0.05;
        o.pass = o.pass && ok;
        o.detail += "H=" + num(h) + ": theta~=" + num(f.theta_hat, 4) + "+-" + num(f.se, 2) + " (target "
                    + num(1 - h) + ") " + (ok ? "ok" : "FAIL") + "; ";
    }
    // Brownian one-sided law on the primal side; the level is lowered by
    // beta sqrt(h), beta = -zeta(1/2)/sqrt(2 pi), so discrete monitoring
    // estimates the continuous-time probability.
    const double h = 1.0 / 1024;
    const double shift = 0.5825971579390106 * std::sqrt(h);
    const auto plan = one_sided_plan(KernelSpec(NonstationaryKernel(KernelKind::FBM, 0.5)), h, {64.0, 256.0});
    const auto s = run_survival(plan, BarrierSpec{1.0 - shift, Comparison::StrictBelow}, budget(100000),
                                RngStreamSpec{20260103, 7});
    for (const auto& e : s)
    {
        const double exact = 2 * normal_cdf(1 / std::sqrt(e.horizon)) - 1;
        const double z = (e.p_hat - exact) / e.se;
        const bool ok = std::abs(z) <= 3.0;
        o.pass = o.pass && ok;
        o.detail += "BM T=" + num(e.horizon) + ": p=" + num(e.p_hat, 5) + " exact=" + num(exact, 5) + " z=" + num(z, 3)
                    + (ok ? " ok" : " FAIL") + "; ";
    }
    return o;
}

Outcome c4_ifbm_sweep()
{
    Outcome o;
    o.pass = true;
    std::string pattern;
    for (int i = 1; i <= 9; ++i)
    {
        const double h = 0.1 * i;
        const double target = h * (1 - h);
        // Window ln(1/eps) <= T~ H(1-H) <= ln(10/eps), eps = 0.01.
        const double lo = std::log(100.0) / target;
        const double hi = std::log(1000.0) / target;
        std::vector<double> ladder;
        for (int k = 0; k <= 12; ++k)
            ladder.push_back(std::round((lo + (hi - lo) * k / 12.0) * 20.0) / 20.0);
        const auto s = survival_series(KernelSpec(CorrelationFamily::dual_ifbm(h)), BarrierSpec{}, ladder, 0.05,
                                       budget(1000000), RngStreamSpec{20260104, std::uint64_t(i)});
        FitOptions fo;
        fo.min_horizon = ladder.front();
        const auto f = fit_dual_exponential(s, FitModel::Exponential, fo);
        const auto band = bounds_atlas("prop1", h);
        // The band collapses to a point at H = 0.5, so membership allows 2 sigma.
        const bool in_band = band.contains(f.theta_hat, 2 * f.se);
        const bool near = std::abs(f.theta_hat - target) <= 0.05;
        o.pass = o.pass && in_band && near;
        o.detail += "H=" + num(h, 2) + ": " + num(f.theta_hat, 4) + "+-" + num(f.se, 2) + " [" + num(*band.lower, 3)
                    + "," + num(*band.upper, 3) + "] H(1-H)=" + num(target, 3) + ((in_band && near) ? " ok" : " FAIL")
                    + "; ";
        pattern += f.theta_hat < target ? "-" : "+";
    }
    o.detail += "sign pattern vs parabola (not gated): " + pattern;
    return o;
}

Outcome c5_bracket()
{
    const auto b = half_slepian_bracket(20);
    const double oracle_upper = -std::log(kHalfSlepian) / 2.0;
    const double err = b.upper - oracle_upper;
    Outcome o;
    o.pass = std::abs(err) <= 0.02 && std::abs(b.lower - 1.336) <= 0.02 && std::abs(b.upper - 2.004) <= 0.02;
    o.detail = "bracket [" + num(b.lower, 5) + ", " + num(b.upper, 5) + "] upper se " + num(b.upper_se, 2)
               + "; oracle upper " + num(oracle_upper, 5) + " (error " + num(err, 3) + ", limit 0.02); step^" + num(b.power)
               + " extrapolated p0=" + num(b.p, 5) + "+-" + num(b.p_se, 2);
    return o;
}

Outcome c6_certificates()
{
    struct Case
    {
        int relation;
        ParamMap params;
        Verdict want;
    };
    const std::vector<Case> cases = {
        {7, {}, Verdict::CertifiedHeuristic},
        {9, {}, Verdict::CertifiedHeuristic},
        {10, {}, Verdict::CertifiedHeuristic},
        {13, {{"p", 1.0}}, Verdict::CertifiedHeuristic},
        {14, {{"p", std::sqrt(3.0)}}, Verdict::CertifiedHeuristic},
        {14, {{"p", 2.0}}, Verdict::CertifiedHeuristic},
        {24, {{"H", 0.01}}, Verdict::CertifiedHeuristic},
        {24, {{"H", 0.03}}, Verdict::CertifiedHeuristic},
        {24, {{"H", 0.06}}, Verdict::CertifiedHeuristic},
        {24, {{"H", 0.4}}, Verdict::NotApplicable},
    };
    Outcome o;
    o.pass = true;
    VerifyOptions vo;
    vo.step = 0.005;
    vo.workers = g_workers;
    for (const auto& c : cases)
    {
        const auto r = verify_relation(c.relation, c.params, vo);
        const bool ok = r.verdict == c.want && r.agree;
        o.pass = o.pass && ok;
        std::string ps;
        for (const auto& [k, v] : c.params)
            ps += k + "=" + num(v, 4);
        o.detail += "rel" + std::to_string(c.relation) + (ps.empty() ? "" : "(" + ps + ")") + ":"
                    + std::string(to_string(r.verdict)) + (ok ? "" : " FAIL") + "; ";
    }
    return o;
}

Outcome c7_laplace()
{
    std::vector<double> ladder;
    for (int t = 5; t <= 25; ++t)
        ladder.push_back(t);
    const auto s = survival_series(KernelSpec(CorrelationFamily::laplace_dual()), BarrierSpec{}, ladder, 0.05,
                                   budget(1000000), RngStreamSpec{20260107, 0});
    const auto f = fit_dual_exponential(s, FitModel::Exponential);
    const double four = 4 * f.theta_hat;
    const double four_se = 4 * f.se;
    const bool in = four >= 1 / std::sqrt(3.0) - 2 * four_se && four <= 1 + 2 * four_se;

    std::vector<SurvivalEstimate> poly;
    for (int deg : {8, 16, 32, 64, 128})
    {
        auto r = random_poly_no_zero_prob(deg / 2, budget(100000), RngStreamSpec{20260107, std::uint64_t(deg)});
        r.estimate.horizon = deg;
        poly.push_back(r.estimate);
    }
    FitOptions po;
    po.min_horizon = 8.0;
    const auto g = fit_powerlaw(poly, po);
    const bool slope_ok = g.theta_hat >= 0.6 && g.theta_hat <= 0.9;
    Outcome o;
    o.pass = in && slope_ok;
    o.detail = "4theta~_L=" + num(four, 4) + "+-" + num(four_se, 2) + " in [0.5774, 1] with 2 sigma: "
               + (in ? "yes" : "no") + "; random polynomial slope=" + num(g.theta_hat, 4) + "+-" + num(g.se, 2)
               + " in [0.6, 0.9]: " + (slope_ok ? "yes" : "no") + "; p(128)=" + num(poly.back().p_hat, 3);
    return o;
}

Outcome c8_prop5()
{
    std::vector<double> ladder;
    for (double t = 64; t <= 4096; t *= 2)
        ladder.push_back(t);
    const auto plan = two_sided_plan(KernelSpec(NonstationaryKernel(KernelKind::FBM, 0.5)), 0.25, 0.5, ladder);
    const auto s = run_survival(plan, BarrierSpec{1.0, Comparison::StrictBelow}, budget(1000000),
                                RngStreamSpec{20260108, 0});
    FitOptions fo;
    fo.min_horizon = 64.0;
    const auto f = fit_powerlaw(s, fo);
    const double target = *bounds_atlas("prop5", 0.5, 0.5).exact;
    const bool fit_ok = std::abs(f.theta_hat - target) <= 0.07;

    const std::size_t n = 100000;
    const auto grid = Grid::uniform(1.0 / 1024, 1.0 / 1024, 1024);
    const std::vector<double> times(grid.points().begin(), grid.points().end());
    const auto batch = sample_paths(Factor(IncrementFactor::brownian(times)), grid, n, RngStreamSpec{20260108, 1},
                                    g_workers);
    const auto d = argmax_statistics(batch);
    std::vector<double> lx, ly;
    for (int i = 0; i < 10; ++i)
    {
        const double x = 0.01 * std::pow(10.0, i / 9.0);
        lx.push_back(std::log(x));
        ly.push_back(std::log(d.F_star(x)));
    }
    const double slope = ols_slope(lx, ly);
    const bool slope_ok = std::abs(slope - 0.5) <= 0.1;
    Outcome o;
    o.pass = fit_ok && slope_ok;
    o.detail = "theta=" + num(f.theta_hat, 4) + "+-" + num(f.se, 2) + " vs " + num(target) + "+-0.07: "
               + (fit_ok ? "ok" : "FAIL") + "; argmax log F*/log x slope=" + num(slope, 4) + " vs 0.5+-0.1: "
               + (slope_ok ? "ok" : "FAIL");
    return o;
}

Outcome c9_chi()
{
    Outcome o;
    o.pass = true;
    struct Run
    {
        double h;
        double step;
        double t_max;
        std::size_t n;
    };
    for (const Run r : {Run{0.75, 0.25, 256, 200000}, Run{0.25, 0.25, 128, 1000000}})
    {
        std::vector<double> ladder;
        for (double t = 4; t <= r.t_max; t *= 2)
            ladder.push_back(t);
        const auto plan = two_sided_plan(KernelSpec(NonstationaryKernel(KernelKind::Chi, r.h)), r.step, 1.0, ladder);
        const auto s = run_survival(plan, BarrierSpec{1.0, Comparison::StrictBelow}, budget(r.n),
                                    RngStreamSpec{20260109, std::uint64_t(100 * r.h)});
        const auto f = fit_powerlaw(s);
        const double hb = 1 - r.h;
        bool ok;
        if (r.h > 0.5)
        {
            const double ratio = f.theta_hat / hb;
            const double rse = f.se / hb;
            ok = ratio > 1 - 2 * rse && ratio <= 2 + 2 * rse;
            o.detail += "H=0.75: rate/(1-H)=" + num(ratio, 4) + "+-" + num(rse, 2) + " in (1,2]: ";
        }
        else
        {
            ok = f.theta_hat >= 2 * hb - 2 * f.se;
            o.detail += "H=0.25: rate=" + num(f.theta_hat, 4) + "+-" + num(f.se, 2) + " >= 2(1-H)=" + num(2 * hb) + ": ";
        }
        o.detail += std::string(ok ? "ok" : "FAIL") + " (T " + num(f.window_lo) + ".." + num(f.window_hi) + "); ";
        o.pass = o.pass && ok;
    }
    return o;
}

PathBatch gaussian_batch(const Eigen::MatrixXd& cov, std::size_t n, std::uint64_t id, unsigned workers)
{
    std::vector<double> pts;
    for (Eigen::Index i = 0; i < cov.rows(); ++i)
        pts.push_back(double(i + 1));
    return sample_paths(Factor(factorize_spd(cov)), Grid::custom(pts), n, RngStreamSpec{20260110, id}, workers);
}

Outcome c10_properties()
{
    Outcome o;
    o.pass = true;
    auto note = [&](const std::string& what, bool ok, const std::string& extra = "") {
        o.pass = o.pass && ok;
        o.detail += what + (extra.empty() ? "" : " " + extra) + (ok ? " ok; " : " FAIL; ");
    };

    // Covariance fidelity on 64-point grids.
    {
        const std::size_t n = 200000;
        const std::vector<std::pair<KernelSpec, Grid>> cases = {
            {CorrelationFamily::dual_fbm(0.3), Grid::uniform(0.0, 0.25, 64)},
            {CorrelationFamily::dual_ifbm(0.3), Grid::uniform(0.0, 0.25, 64)},
            {CorrelationFamily::dual_ibm_scaled(1.0), Grid::uniform(0.0, 0.25, 64)},
            {CorrelationFamily::laplace_dual(), Grid::uniform(0.0, 0.25, 64)},
            {CorrelationFamily::frac_slepian(0.25), Grid::uniform(0.0, 0.05, 64)},
            {CorrelationFamily::odd_fbm_dual(0.3), Grid::uniform(0.0, 0.25, 64)},
            {NonstationaryKernel(KernelKind::FBM, 0.3), Grid::uniform(0.25, 0.25, 64)},
            {NonstationaryKernel(KernelKind::Chi, 0.75), Grid::two_sided_uniform(-8.0, 8.0, 0.25)},
            {NonstationaryKernel(KernelKind::IFBMDirect, 0.3), Grid::uniform(0.25, 0.25, 64)},
        };
        double worst = 0.0;
        std::string worst_id;
        for (std::size_t c = 0; c < cases.size(); ++c)
        {
            const auto& [spec, grid] = cases[c];
            const auto m = build_covariance(spec, grid);
            const auto batch = sample_paths(Factor(factorize_spd(m)), grid, n, RngStreamSpec{20260110, 100 + c},
                                            g_workers);
            const Eigen::MatrixXd x = batch.values;
            const Eigen::MatrixXd emp = (x.transpose() * x) / double(n);
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j <= i; ++j)
                {
                    const double sd = std::sqrt((m(i, i) * m(j, j) + m(i, j) * m(i, j)) / double(n));
                    const double z = std::abs(emp(i, j) - m(i, j)) / sd;
                    if (z > worst)
                    {
                        worst = z;
                        worst_id = spec.id();
                    }
                }
        }
        note("covariance fidelity", worst <= 6.0, "max|z|=" + num(worst, 3) + " (" + worst_id + ")");
    }

    // Determinism across worker counts.
    {
        const KernelSpec spec(CorrelationFamily::dual_ifbm(0.3));
        const RngStreamSpec st{20260110, 200};
        const auto a = survival_series(spec, BarrierSpec{}, {2.0, 4.0, 8.0}, 0.05, McBudget{50000, 1, 0}, st);
        const auto b = survival_series(spec, BarrierSpec{}, {2.0, 4.0, 8.0}, 0.05, McBudget{50000, 8, 0}, st);
        bool same = true;
        for (std::size_t k = 0; k < a.size(); ++k)
            same = same && a[k].survivors == b[k].survivors && a[k].p_hat == b[k].p_hat;
        const auto grid = Grid::uniform(0.0, 0.25, 32);
        const Factor f(factorize_spd(build_covariance(spec, grid)));
        const auto p1 = sample_paths(f, grid, 20000, st, 1);
        const auto p8 = sample_paths(f, grid, 20000, st, 8);
        same = same && p1.values == p8.values;
        note("1 vs 8 workers bit-identical", same);
    }

    // Discrete oracles.
    {
        const std::size_t n = 1000000;
        const int N = 5;
        const auto iid = survival_probability(gaussian_batch(Eigen::MatrixXd::Identity(N, N), n, 300, g_workers),
                                              BarrierSpec{0.0, Comparison::StrictBelow});
        const double p1 = discrete_limit_prob(N, DiscreteCase::IidNegative);
        note("2^-N", std::abs(iid.p_hat - p1) <= 3 * std::sqrt(p1 * (1 - p1) / n),
             "N=5 p=" + num(iid.p_hat, 5) + " exact " + num(p1, 5));
        const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(N, N) + Eigen::MatrixXd::Ones(N, N);
        const auto sh = survival_probability(gaussian_batch(cov, n, 301, g_workers),
                                             BarrierSpec{0.0, Comparison::NonstrictBelow});
        const double p2 = discrete_limit_prob(N, DiscreteCase::CommonShift);
        note("1/(N+1)", std::abs(sh.p_hat - p2) <= 3 * std::sqrt(p2 * (1 - p2) / n),
             "N=5 p=" + num(sh.p_hat, 5) + " exact " + num(p2, 5));
        const double r2 = std::sqrt(2.0);
        for (int m : {1, 5, 10})
        {
            const double q = discrete_limit_prob(m, DiscreteCase::Khanin);
            std::size_t hits = 0;
            for (std::size_t path = 0; path < n; ++path)
            {
                NormalSource z(RngStreamSpec{20260110, 400 + std::uint64_t(m)}, path);
                const double x0 = z();
                bool ok = true;
                for (int k = 0; k < m && ok; ++k)
                {
                    const double minus = z(), plus = z();
                    ok = minus - r2 < x0 && x0 < plus + r2;
                }
                hits += ok;
            }
            const double pm = double(hits) / double(n);
            note("three-point quadrature vs MC", std::abs(pm - q) <= 3 * std::sqrt(q * (1 - q) / n),
                 "N=" + std::to_string(m) + " quad=" + num(q, 6) + " mc=" + num(pm, 6));
        }
    }

    // Planted exponents.
    {
        auto planted = [](double t, double p, double se) {
            SurvivalEstimate e;
            e.horizon = t;
            e.p_hat = p;
            e.log_p = std::log(p);
            e.log_p_se = se;
            e.n_paths = 1000000;
            return e;
        };
        std::vector<SurvivalEstimate> pw, ex, e12;
        for (double t : {16.0, 32.0, 64.0, 128.0, 256.0})
            pw.push_back(planted(t, 3.0 * std::pow(t, -0.37), 0.01));
        for (double t = 5; t <= 25; t += 1)
        {
            ex.push_back(planted(t, 0.7 * std::exp(-0.21 * t), 0.01));
            e12.push_back(planted(t, 2.0 * std::pow(t, 0.3) * std::exp(-0.2 * t), 0.01 + 0.001 * t));
        }
        const double d1 = std::abs(fit_powerlaw(pw).theta_hat - 0.37);
        const double d2 = std::abs(fit_dual_exponential(ex).theta_hat - 0.21);
        const auto f3 = fit_dual_exponential(e12, FitModel::Eq12);
        const double d3 = std::max(std::abs(f3.theta_hat - 0.2), std::abs(*f3.alpha_hat - 0.3));
        const double worst = std::max({d1, d2, d3});
        note("planted fits", worst <= 1e-12, "max error " + num(worst, 2));
    }

    // Quadrature identity for the Slepian shift function.
    {
        boost::math::quadrature::tanh_sinh<double> ts(15);
        double worst = 0.0;
        for (double h : {0.05, 0.25, 0.5})
            for (double t : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0})
            {
                auto k = [&](double s) { return 1.0 - std::pow(std::abs(t - s), 2.0 * h); };
                double q = 0.0;
                if (t > 0.0)
                    q += ts.integrate(k, 0.0, t);
                if (t < 1.0)
                    q += ts.integrate(k, t, 1.0);
                worst = std::max(worst, std::abs(q - slepian_feta(h, t)));
            }
        note("feta quadrature", worst <= 1e-8, "max error " + num(worst, 2));
    }
    return o;
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& criteria()
{
    static const std::map<int, std::pair<std::string, std::function<Outcome()>>> all = {
        {1, {"Slepian H=1/2 closed form", c1_closed_form}},
        {2, {"integrated BM dual exponent", c2_ibm_dual}},
        {3, {"FBM exponents", c3_fbm}},
        {4, {"integrated FBM sweep", c4_ifbm_sweep}},
        {5, {"block rate bracket", c5_bracket}},
        {6, {"inequality certificates", c6_certificates}},
        {7, {"Laplace dual bracket", c7_laplace}},
        {8, {"two-sided FBM exponent", c8_prop5}},
        {9, {"chi_H bounds", c9_chi}},
        {10, {"property suites", c10_properties}},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    int which = 0;
    app.add_option("--criterion", which, "Criterion number 1-10 (default: all)")->check(CLI::Range(0, 10));
    app.add_option("--workers", g_workers, "Worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (const auto& [id, entry] : criteria())
    {
        if (which != 0 && id != which)
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = entry.second();
        }
        catch (const std::exception& e)
        {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "C" << id << " " << (o.pass ? "PASS" : "FAIL") << " " << entry.first << " [" << num(secs, 3)
                  << " s]: " << o.detail << std::endl;
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
