#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "plab/errors.hpp"
#include "plab/persistence.hpp"
#include "plab/polyroots.hpp"

using namespace plab;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

PathBatch gaussian_batch(const Eigen::MatrixXd& cov, std::size_t n, std::uint64_t seed)
{
    const auto grid = Grid::uniform(1.0, 1.0, static_cast<std::size_t>(cov.rows()));
    return sample_paths(Factor(factorize_spd(cov)), grid, n, RngStreamSpec{seed, 0});
}

}  // namespace

TEST_CASE("make_estimate statistics")
{
    const auto e = make_estimate(25, 100);
    CHECK(e.p_hat == 0.25);
    CHECK(e.se == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
    CHECK(e.log_p == doctest::Approx(std::log(0.25)));
    CHECK(e.log_p_se == doctest::Approx(std::sqrt(0.75 / 25)));
    CHECK_FALSE(e.flagged("low-count"));

    const auto z = make_estimate(0, 1000);
    CHECK(std::isnan(z.log_p));
    CHECK(z.upper_bound == doctest::Approx(1.0 - std::pow(0.05, 1e-3)));
    CHECK(z.flagged("low-count"));
}

TEST_CASE("survival_probability on discrete exchangeable laws")
{
    const std::size_t n = 200000;
    SUBCASE("independent coordinates, strict")
    {
        const int N = 5;
        const auto b = gaussian_batch(Eigen::MatrixXd::Identity(N, N), n, 1);
        const auto e = survival_probability(b, BarrierSpec{0.0, Comparison::StrictBelow});
        const double p = discrete_limit_prob(N, DiscreteCase::IidNegative);
        CHECK(std::abs(e.p_hat - p) < 3.0 * std::sqrt(p * (1 - p) / n));
    }
    SUBCASE("single point")
    {
        const auto b = gaussian_batch(Eigen::MatrixXd::Identity(1, 1), n, 2);
        const auto e = survival_probability(b, BarrierSpec{});
        CHECK(std::abs(e.p_hat - 0.5) < 3.0 * std::sqrt(0.25 / n));
    }
    SUBCASE("common shift, nonstrict")
    {
        // xi_k - eta has covariance I + 11^T
        const int N = 4;
        const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(N, N) + Eigen::MatrixXd::Ones(N, N);
        const auto b = gaussian_batch(cov, n, 3);
        const auto e = survival_probability(b, BarrierSpec{0.0, Comparison::NonstrictBelow});
        const double p = discrete_limit_prob(N, DiscreteCase::CommonShift);
        CHECK(std::abs(e.p_hat - p) < 3.0 * std::sqrt(p * (1 - p) / n));
    }
    SUBCASE("window selects columns")
    {
        const auto b = gaussian_batch(Eigen::MatrixXd::Identity(6, 6), 1000, 4);
        BarrierSpec only_two{0.0, Comparison::StrictBelow, 2.0, 3.0};
        const auto e = survival_probability(b, only_two);
        std::size_t s = 0;
        for (Eigen::Index r = 0; r < b.values.rows(); ++r)
            s += b.values(r, 1) < 0 && b.values(r, 2) < 0;
        CHECK(e.survivors == s);
        CHECK_THROWS_AS(survival_probability(b, BarrierSpec{0.0, Comparison::StrictBelow, 10.0, 11.0}),
                        DomainError);
        CHECK_THROWS_AS(survival_probability(b, BarrierSpec{0.0, Comparison::StrictBelow, 3.0, 2.0}), DomainError);
    }
}

TEST_CASE("streamed first-exit estimates equal full-path estimates on the same paths")
{
    const KernelSpec spec(CorrelationFamily::dual_ifbm(0.3));
    const std::vector<double> ladder{1.0, 2.0, 3.0};
    const auto plan = one_sided_plan(spec, 0.1, ladder);
    CHECK(plan.times.size() == 31);
    CHECK(plan.prefix == std::vector<std::size_t>{11, 21, 31});
    const RngStreamSpec stream{99, 4};
    const BarrierSpec barrier{};
    const auto series = run_survival(plan, barrier, McBudget{5000, 1, 0}, stream);

    const auto grid = Grid::custom(plan.times);
    const auto batch = sample_paths(plan.factor, grid, 5000, stream);
    for (std::size_t k = 0; k < ladder.size(); ++k)
    {
        BarrierSpec w = barrier;
        w.window_hi = ladder[k] + 1e-9;
        CHECK(series[k].survivors == survival_probability(batch, w).survivors);
    }
    CHECK(series[0].p_hat >= series[1].p_hat);
    CHECK(series[1].p_hat >= series[2].p_hat);
}

TEST_CASE("survival series are monotone and worker independent")
{
    const KernelSpec spec(CorrelationFamily::dual_ibm_scaled(1.0));
    const std::vector<double> ladder{1, 2, 3, 4, 5, 6};
    const RngStreamSpec stream{5, 5};
    const auto a = survival_series(spec, BarrierSpec{}, ladder, 0.05, McBudget{20000, 1, 0}, stream);
    const auto b = survival_series(spec, BarrierSpec{}, ladder, 0.05, McBudget{20000, 8, 0}, stream);
    for (std::size_t k = 0; k < ladder.size(); ++k)
    {
        CHECK(a[k].survivors == b[k].survivors);
        if (k > 0)
            CHECK(a[k].p_hat <= a[k - 1].p_hat);
        CHECK(a[k].horizon == ladder[k]);
        CHECK(a[k].provenance.kernel_id == spec.id());
    }
    CHECK_THROWS_AS(survival_series(spec, BarrierSpec{}, {2.0, 1.0}, 0.05, McBudget{10, 1, 0}, stream),
                    DomainError);
}

TEST_CASE("Brownian survival below 1 matches the reflection law with barrier shift")
{
    // Discrete monitoring at step h behaves like the continuum with the level
    // raised by 0.5826 sqrt(h) (Riemann zeta(1/2) correction).
    const KernelSpec bm(NonstationaryKernel(KernelKind::FBM, 0.5));
    const double h = 1.0 / 256;
    const std::vector<double> ladder{1.0, 4.0};
    const std::size_t n = 100000;
    const auto s = survival_series(bm, BarrierSpec{1.0, Comparison::StrictBelow}, ladder, h, McBudget{n, 1, 0},
                                   RngStreamSpec{17, 0});
    const double shift = 0.5826 * std::sqrt(h);
    for (std::size_t k = 0; k < ladder.size(); ++k)
    {
        const double exact = 2 * normal_cdf(1.0 / std::sqrt(ladder[k])) - 1;
        const double corrected = 2 * normal_cdf((1.0 + shift) / std::sqrt(ladder[k])) - 1;
        CAPTURE(ladder[k]);
        CHECK(s[k].p_hat > exact);
        CHECK(std::abs(s[k].p_hat - corrected) < 3.0 * s[k].se + 1e-3);
    }
}

TEST_CASE("two-sided plans enter negative times at T^alpha")
{
    const KernelSpec bm(NonstationaryKernel(KernelKind::FBM, 0.5));
    const auto plan = two_sided_plan(bm, 1.0, 0.5, {4.0, 16.0, 64.0});
    CHECK(plan.prefix == std::vector<std::size_t>{4 + 2, 16 + 4, 64 + 8});
    for (std::size_t i = 0; i < plan.prefix[0]; ++i)
    {
        const double t = plan.times[i];
        CHECK(((t > 0 && t <= 4.0) || (t < 0 && t >= -2.0)));
    }
    CHECK(plan.factor.increments() != nullptr);
    const KernelSpec chi(NonstationaryKernel(KernelKind::Chi, 0.25));
    const auto dense = two_sided_plan(chi, 1.0, 1.0, {8.0});
    CHECK(dense.factor.cholesky() != nullptr);
    CHECK(dense.times.size() == 16);
    CHECK_THROWS_AS(two_sided_plan(KernelSpec(CorrelationFamily::dual_fbm(0.5)), 1.0, 1.0, {8.0}), DomainError);
}

TEST_CASE("argmax statistics of Brownian motion")
{
    const KernelSpec bm(NonstationaryKernel(KernelKind::FBM, 0.5));
    const std::size_t n = 40000;
    SUBCASE("symmetric interval")
    {
        const auto grid = Grid::two_sided_uniform(-4.0, 4.0, 1.0 / 16);
        const auto batch = sample_paths(Factor(factorize_spd(build_covariance(bm, grid))), grid, n,
                                        RngStreamSpec{21, 0});
        const auto d = argmax_statistics(batch);
        CHECK(d.t_minus == 4.0);
        CHECK(d.t_plus == 4.0);
        CHECK(std::abs(d.F_star(0.5) - 0.5) < 3.0 * std::sqrt(0.25 / n) + 1.0 / n);
        double total = 0.0;
        for (double h : d.histogram)
            total += h;
        CHECK(total == doctest::Approx(1.0));
        // P(|t*| <= r) is the normalized mass of [(T- - r)/T1, (T- + r)/T1]
        const double t1 = d.t_minus + d.t_plus;
        const double r = 0.5;
        CHECK(d.center_prob
              == doctest::Approx(d.density(d.t_minus / t1, r / t1) * 2 * r / t1).epsilon(1e-12));
    }
    SUBCASE("unit interval follows the arcsine law")
    {
        const auto grid = Grid::uniform(1.0 / 512, 1.0 / 512, 512);
        const std::vector<double> times(grid.points().begin(), grid.points().end());
        const auto batch = sample_paths(Factor(IncrementFactor::brownian(times)), grid, n, RngStreamSpec{22, 0});
        const auto d = argmax_statistics(batch);
        for (double x : {0.05, 0.2, 0.5, 0.8})
        {
            const double exact = 2.0 / M_PI * std::asin(std::sqrt(x));
            CAPTURE(x);
            CHECK(std::abs(d.F_star(x) - exact) < 3.0 * std::sqrt(exact * (1 - exact) / n) + 0.005);
        }
    }
    SUBCASE("ties go to the smallest index")
    {
        PathBatch b{Grid::uniform(1.0, 1.0, 4), RowMatrix(1, 4), {}};
        b.values << -1.0, 2.0, 2.0, 1.0;
        ArgmaxOptions o;
        o.bins = 4;
        const auto d = argmax_statistics(b, o);
        CHECK(d.positions[0] == doctest::Approx(0.5));
        b.values << -1.0, -2.0, -2.0, -1.0;
        CHECK(argmax_statistics(b, o).positions[0] == 0.0);
        o.include_origin = false;
        CHECK(argmax_statistics(b, o).positions[0] == doctest::Approx(0.25));
    }
}

TEST_CASE("discrete limit probabilities")
{
    CHECK(discrete_limit_prob(3, DiscreteCase::IidNegative) == 0.125);
    CHECK(discrete_limit_prob(3, DiscreteCase::CommonShift) == 0.25);
    CHECK_THROWS_AS(discrete_limit_prob(0, DiscreteCase::Khanin), DomainError);

    boost::math::quadrature::tanh_sinh<double> ts;
    const double r2 = std::sqrt(2.0);
    for (int n : {1, 5, 10})
    {
        auto f = [&](double x) {
            return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI)
                   * std::pow(normal_cdf(r2 - x) * normal_cdf(r2 + x), n);
        };
        const double oracle = ts.integrate(f, -std::numeric_limits<double>::infinity(),
                                           std::numeric_limits<double>::infinity());
        CHECK(std::abs(discrete_limit_prob(n, DiscreteCase::Khanin) - oracle) < 1e-10);

        // direct simulation of xi_{-k} - sqrt2 < xi_0 < xi_k + sqrt2
        const std::size_t m = 200000;
        std::size_t hits = 0;
        for (std::size_t p = 0; p < m; ++p)
        {
            NormalSource z(RngStreamSpec{31, static_cast<std::uint64_t>(n)}, p);
            const double x0 = z();
            bool ok = true;
            for (int k = 0; k < n && ok; ++k)
            {
                const double minus = z(), plus = z();
                ok = minus - r2 < x0 && x0 < plus + r2;
            }
            hits += ok;
        }
        const double pm = static_cast<double>(hits) / m;
        CHECK(std::abs(pm - oracle) < 3.0 * std::sqrt(oracle * (1 - oracle) / m));
    }
}

TEST_CASE("real root counting on known polynomials")
{
    auto from_roots = [](std::vector<double> roots, double lead = 1.0) {
        std::vector<double> c{lead};
        for (double r : roots)
        {
            std::vector<double> next(c.size() + 1, 0.0);
            for (std::size_t i = 0; i < c.size(); ++i)
            {
                next[i + 1] += c[i];
                next[i] -= r * c[i];
            }
            c = next;
        }
        return c;
    };
    const std::vector<double> no_roots{1.0, 0.0, 1.0};
    CHECK(count_real_roots(no_roots).count == 0);
    CHECK(count_real_roots(from_roots({1.0, 2.0, -3.0})).count == 3);
    CHECK(sturm_count(from_roots({1.0, 1.0})) == 1);  // distinct roots
    std::vector<double> wilk;
    for (int k = 1; k <= 10; ++k)
        wilk.push_back(k);
    const auto w = from_roots(wilk);
    CHECK(sturm_count(w) == 10);
    CHECK(sturm_count(w, 256) == 10);
    CHECK(scan_sign_changes(w) <= 10);
    CHECK(count_real_roots(w).count == 10);
    // clustered roots near the unit circle and far outside it
    const auto spread = from_roots({-50.0, -0.999, -0.9, 0.01, 0.95, 0.9999, 20.0, 300.0}, 0.3);
    CHECK(count_real_roots(spread).count == 8);
    // (x^2 + 1)^3 (x - 2): one real root
    auto c = from_roots({2.0});
    std::vector<double> q{1.0, 0.0, 1.0};
    for (int k = 0; k < 3; ++k)
    {
        std::vector<double> next(c.size() + 2, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < 3; ++j)
                next[i + j] += c[i] * q[j];
        c = next;
    }
    CHECK(count_real_roots(c).count == 1);
    CHECK(count_real_roots(std::vector<double>{3.0}).count == 0);
}

TEST_CASE("random polynomial without real zeros")
{
    const RngStreamSpec stream{41, 0};
    const auto p0 = random_poly_no_zero_prob(0, McBudget{1000, 1, 0}, stream);
    CHECK(p0.estimate.p_hat == 1.0);

    // quadratic: no real root iff xi_1^2 < 4 xi_0 xi_2
    const auto p1 = random_poly_no_zero_prob(1, McBudget{200000, 1, 0}, stream);
    const std::size_t m = 10000000;
    std::size_t hits = 0;
    for (std::size_t p = 0; p < m; p += 1)
    {
        NormalSource z(RngStreamSpec{42, 0}, p);
        const double a = z(), b = z(), c = z();
        hits += b * b < 4 * a * c;
    }
    const double q = static_cast<double>(hits) / m;
    const double joint = std::sqrt(p1.estimate.se * p1.estimate.se + q * (1 - q) / m);
    CHECK(std::abs(p1.estimate.p_hat - q) < 3.0 * joint);
    CHECK(p1.rejected == 0);

    const auto a = random_poly_no_zero_prob(8, McBudget{3000, 1, 0}, stream);
    const auto b = random_poly_no_zero_prob(8, McBudget{3000, 8, 0}, stream);
    CHECK(a.estimate.survivors == b.estimate.survivors);
}

TEST_CASE("series CSV layout")
{
    std::ostringstream os;
    write_series_csv(os, "dual-fbm", "H=0.5", {make_estimate(5, 10, 2.0, 0.05)});
    const std::string s = os.str();
    CHECK(s.rfind("family,params,T,step,n_paths,p_hat,se,log_p,log_p_se,flags\n", 0) == 0);
    CHECK(s.find("dual-fbm,H=0.5,2,0.05,10,0.5,") != std::string::npos);
    CHECK(s.find("low-count") != std::string::npos);
}
