#include "doctest.h"

#include <cmath>
#include <vector>

#include "plab/exponents.hpp"
#include "plab/persistence.hpp"

using namespace plab;

TEST_CASE("rougher integrated dual survives less")
{
    // Duals of integrated FBM at H and 1 - H share the exponent; the rougher one has the smaller prefactor.
    const McBudget budget{1000000, 1, 0};
    const RngStreamSpec stream{1101, 0};
    const auto lo = survival_series(KernelSpec(CorrelationFamily::dual_ifbm(0.25)), BarrierSpec{}, {10.0}, 0.05,
                                    budget, stream);
    const auto hi = survival_series(KernelSpec(CorrelationFamily::dual_ifbm(0.75)), BarrierSpec{}, {10.0}, 0.05,
                                    budget, stream);
    const double z = (hi[0].p_hat - lo[0].p_hat) / std::hypot(lo[0].se, hi[0].se);
    CAPTURE(lo[0].p_hat);
    CAPTURE(hi[0].p_hat);
    CHECK(z >= 2.0);
}

TEST_CASE("two-sided sign-flipped FBM is squeezed by the one-sided law")
{
    const double h = 0.75;
    const double step = 0.125;
    const McBudget budget{100000, 1, 0};
    const BarrierSpec below_one{1.0, Comparison::StrictBelow};
    const auto chi = two_sided_plan(KernelSpec(NonstationaryKernel(KernelKind::Chi, h)), step, 1.0, {4.0, 16.0});
    const auto fbm = one_sided_plan(KernelSpec(NonstationaryKernel(KernelKind::FBM, h)), step, {4.0, 16.0});
    const auto p = run_survival(chi, below_one, budget, RngStreamSpec{1102, 0});
    const auto q = run_survival(fbm, below_one, budget, RngStreamSpec{1103, 0});
    for (std::size_t k = 0; k < 2; ++k)
    {
        CAPTURE(k);
        const double pp = p[k].p_hat;
        const double qq = q[k].p_hat;
        CHECK(pp <= qq + 3.0 * std::hypot(p[k].se, q[k].se));
        CHECK(pp >= qq * qq - 3.0 * std::hypot(p[k].se, 2 * qq * q[k].se));
        // The squeeze is not vacuous at these horizons.
        CHECK(qq * qq < qq - 0.05);
    }
}

TEST_CASE("argmax position near the origin scales like x^(1-H)")
{
    const std::size_t n = 100000;
    const auto grid = Grid::uniform(1.0 / 1024, 1.0 / 1024, 1024);
    const std::vector<double> times(grid.points().begin(), grid.points().end());
    const auto batch = sample_paths(Factor(IncrementFactor::brownian(times)), grid, n, RngStreamSpec{1104, 0});
    const auto d = argmax_statistics(batch);
    std::vector<double> lx, ly;
    for (int i = 0; i < 10; ++i)
    {
        const double x = 0.01 * std::pow(10.0, i / 9.0);
        lx.push_back(std::log(x));
        ly.push_back(std::log(d.F_star(x)));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        mx += lx[i] / lx.size();
        my += ly[i] / ly.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    CHECK(sxy / sxx == doctest::Approx(0.5).epsilon(0.2));
}
