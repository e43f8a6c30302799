#include "plab/corrfun.hpp"

#include <cmath>
#include <limits>

#include "plab/errors.hpp"

namespace plab {

namespace {

void require_hurst(double h, double hi, bool hi_inclusive, const char* who)
{
    const bool ok = h > 0.0 && (hi_inclusive ? h <= hi : h < hi);
    if (!ok || !std::isfinite(h))
        throw DomainError(std::string(who) + ": Hurst index " + std::to_string(h) + " outside its domain");
}

double param(const ParamMap& params, const char* name, const char* who)
{
    auto it = params.find(name);
    if (it == params.end())
        throw DomainError(std::string(who) + ": missing parameter '" + name + "'");
    return it->second;
}

// (1 - y)^k - 1 + k y, accurate for all y in [0, 1].
double binomial_tail2(double y, double k)
{
    if (y > 0.5)
        return std::pow(1.0 - y, k) - 1.0 + k * y;
    double term = 1.0;
    double sum = 0.0;
    for (int j = 1; j < 200; ++j)
    {
        term *= (k - j + 1) / j * (-y);
        if (j >= 2)
        {
            sum += term;
            if (std::abs(term) <= 1e-17 * std::abs(sum))
                break;
        }
    }
    return sum;
}

double dual_fbm_corr(double h, double t)
{
    t = std::abs(t);
    if (t == 0.0)
        return 1.0;
    if (t < 1.0)
        return std::cosh(h * t) - 0.5 * std::pow(2.0 * std::sinh(0.5 * t), 2.0 * h);
    // cosh(ht) - 0.5 e^{ht} (1 - e^{-t})^{2h}
    //   = 0.5 e^{-ht} + 0.5 e^{ht} [1 - (1 - e^{-t})^{2h}]
    const double y = std::exp(-t);
    double log_gap;  // log of 1 - (1 - y)^{2h}
    if (y > 1e-12)
        log_gap = std::log(-std::expm1(2.0 * h * std::log1p(-y)));
    else
        log_gap = std::log(2.0 * h) - t + std::log1p(0.5 * (1.0 - 2.0 * h) * y);
    return 0.5 * std::exp(-h * t) + 0.5 * std::exp(h * t + log_gap);
}

double dual_ifbm_corr(double h, double t)
{
    t = std::abs(t);
    const double k = 2.0 + 2.0 * h;
    if (t <= 0.5)
    {
        const double v = (2.0 + 2.0 * h) * (std::exp(h * t) + std::exp(-h * t)) - std::exp((1.0 + h) * t)
                         - std::exp(-(1.0 + h) * t) + std::pow(2.0 * std::sinh(0.5 * t), k);
        return v / (2.0 + 4.0 * h);
    }
    // Cancel the e^{(1+h)t} and (2+2h)e^{ht} growth analytically.
    const double y = std::exp(-t);
    const double g = binomial_tail2(y, k);
    double tail = 0.0;
    if (g > 0.0)
        tail = std::exp((1.0 + h) * t + std::log(g));
    const double v = (2.0 + 2.0 * h) * std::exp(-h * t) - std::exp(-(1.0 + h) * t) + tail;
    return v / (2.0 + 4.0 * h);
}

double dual_ibm_scaled_corr(double p, double t)
{
    const double a = p * std::abs(t);
    return 0.5 * (3.0 * std::exp(-0.5 * a) - std::exp(-1.5 * a));
}

double laplace_dual_corr(double t)
{
    const double a = std::abs(t);
    const double y = std::exp(-a);
    return 2.0 * std::exp(-0.5 * a) / (1.0 + y);
}

double frac_slepian_corr(double h, double t)
{
    const double a = std::abs(t);
    if (a >= 1.0)
        return 0.0;
    return 1.0 - std::pow(a, 2.0 * h);
}

double odd_fbm_dual_corr(double h, double t)
{
    const double a = std::abs(t);
    if (a == 0.0)
        return 1.0;
    if (a < 1.0)
        return std::pow(std::cosh(0.5 * a), 2.0 * h) - std::pow(std::sinh(0.5 * a), 2.0 * h);
    // 2^{-2h} e^{ha} [(1+y)^{2h} - (1-y)^{2h}] = 2^{-2h} e^{ha} (1-y)^{2h} expm1(4h atanh y)
    const double y = std::exp(-a);
    const double log_val = -2.0 * h * std::log(2.0) + h * a + 2.0 * h * std::log1p(-y)
                           + std::log(std::expm1(4.0 * h * std::atanh(y)));
    return std::exp(log_val);
}

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

double fbm_cov(double h, double t, double s)
{
    const double e = 2.0 * h;
    return 0.5 * (std::pow(std::abs(t), e) + std::pow(std::abs(s), e) - std::pow(std::abs(t - s), e));
}

// Covariance of I(t) = int_0^t w_H, oriented integrals, any real t, s.
double ifbm_cov(double h, double t, double s)
{
    const double k = 2.0 * h + 2.0;
    auto phi = [&](double x) { return std::pow(std::abs(x), k) / ((k - 1.0) * k); };
    const double lin = (s * sgn(t) * std::pow(std::abs(t), k - 1.0) + t * sgn(s) * std::pow(std::abs(s), k - 1.0))
                       / (2.0 * h + 1.0);
    return 0.5 * lin - 0.5 * (phi(t) + phi(s) - phi(t - s));
}

}  // namespace

CorrelationFamily::CorrelationFamily(CorrKind kind, ParamMap params) : kind_(kind), params_(std::move(params))
{
    switch (kind_)
    {
    case CorrKind::DualFBM:
    case CorrKind::DualIFBM:
        h_ = param(params_, "H", "CorrelationFamily");
        require_hurst(h_, 1.0, false, "CorrelationFamily");
        break;
    case CorrKind::OddFBMDual:
        h_ = param(params_, "H", "odd-fbm-dual");
        require_hurst(h_, 1.0, false, "odd-fbm-dual");
        break;
    case CorrKind::FractionalSlepian:
        h_ = param(params_, "H", "frac-slepian");
        require_hurst(h_, 0.5, true, "frac-slepian");
        break;
    case CorrKind::DualIBMScaled:
        p_ = param(params_, "p", "dual-ibm-scaled");
        if (!(p_ > 0.0) || !std::isfinite(p_))
            throw DomainError("dual-ibm-scaled: time-scale factor p must be positive");
        break;
    case CorrKind::LaplaceDual:
        break;
    }
}

CorrelationFamily CorrelationFamily::dual_fbm(double hurst) { return {CorrKind::DualFBM, {{"H", hurst}}}; }
CorrelationFamily CorrelationFamily::dual_ifbm(double hurst) { return {CorrKind::DualIFBM, {{"H", hurst}}}; }
CorrelationFamily CorrelationFamily::dual_ibm_scaled(double p) { return {CorrKind::DualIBMScaled, {{"p", p}}}; }
CorrelationFamily CorrelationFamily::laplace_dual() { return {CorrKind::LaplaceDual, {}}; }
CorrelationFamily CorrelationFamily::frac_slepian(double hurst) { return {CorrKind::FractionalSlepian, {{"H", hurst}}}; }
CorrelationFamily CorrelationFamily::odd_fbm_dual(double hurst) { return {CorrKind::OddFBMDual, {{"H", hurst}}}; }

double CorrelationFamily::hurst() const
{
    if (kind_ == CorrKind::DualIBMScaled || kind_ == CorrKind::LaplaceDual)
        throw DomainError(std::string(to_string(kind_)) + " has no Hurst parameter");
    return h_;
}

double CorrelationFamily::operator()(double t) const
{
    switch (kind_)
    {
    case CorrKind::DualFBM: return dual_fbm_corr(h_, t);
    case CorrKind::DualIFBM: return dual_ifbm_corr(h_, t);
    case CorrKind::DualIBMScaled: return dual_ibm_scaled_corr(p_, t);
    case CorrKind::LaplaceDual: return laplace_dual_corr(t);
    case CorrKind::FractionalSlepian: return frac_slepian_corr(h_, t);
    case CorrKind::OddFBMDual: return odd_fbm_dual_corr(h_, t);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double CorrelationFamily::range() const noexcept
{
    return kind_ == CorrKind::FractionalSlepian ? 1.0 : std::numeric_limits<double>::infinity();
}

std::string CorrelationFamily::id() const
{
    std::string s(to_string(kind_));
    for (const auto& [k, v] : params_)
        s += ":" + k + "=" + std::to_string(v);
    return s;
}

NonstationaryKernel::NonstationaryKernel(KernelKind kind, double hurst) : kind_(kind), h_(hurst)
{
    require_hurst(h_, 1.0, false, "NonstationaryKernel");
}

double NonstationaryKernel::operator()(double t, double s) const
{
    switch (kind_)
    {
    case KernelKind::FBM: return fbm_cov(h_, t, s);
    case KernelKind::Chi: return sgn(t) * sgn(s) * fbm_cov(h_, t, s);
    case KernelKind::IFBMDirect: return ifbm_cov(h_, t, s);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string NonstationaryKernel::id() const { return std::string(to_string(kind_)) + ":H=" + std::to_string(h_); }

double eval_corr(const CorrelationFamily& family, double t) { return family(t); }
double eval_kernel(const NonstationaryKernel& kernel, double t, double s) { return kernel(t, s); }

double slepian_feta(double hurst, double t)
{
    require_hurst(hurst, 0.5, true, "slepian_feta");
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("slepian_feta: t must lie in [0, 1]");
    const double e = 1.0 + 2.0 * hurst;
    return 1.0 - (std::pow(t, e) + std::pow(1.0 - t, e)) / e;
}

double feta_norm_sq(double hurst)
{
    require_hurst(hurst, 0.5, true, "feta_norm_sq");
    const double h = hurst;
    return h * (3.0 + 2.0 * h) / ((1.0 + h) * (1.0 + 2.0 * h));
}

std::string_view to_string(CorrKind kind) noexcept
{
    switch (kind)
    {
    case CorrKind::DualFBM: return "dual-fbm";
    case CorrKind::DualIFBM: return "dual-ifbm";
    case CorrKind::DualIBMScaled: return "dual-ibm-scaled";
    case CorrKind::LaplaceDual: return "laplace-dual";
    case CorrKind::FractionalSlepian: return "frac-slepian";
    case CorrKind::OddFBMDual: return "odd-fbm-dual";
    }
    return "?";
}

std::string_view to_string(KernelKind kind) noexcept
{
    switch (kind)
    {
    case KernelKind::FBM: return "fbm";
    case KernelKind::Chi: return "chi";
    case KernelKind::IFBMDirect: return "ifbm-direct";
    }
    return "?";
}

}  // namespace plab
