#pragma once

#include <map>
#include <string>
#include <string_view>

namespace plab {

/// Stationary (dual) correlation families.
enum class CorrKind
{
    DualFBM,            ///< Lamperti dual of fractional Brownian motion.
    DualIFBM,           ///< Lamperti dual of integrated FBM.
    DualIBMScaled,      ///< Dual of integrated Brownian motion at time scale p.
    LaplaceDual,        ///< Dual of the Laplace transform of white noise.
    FractionalSlepian,  ///< (1 - |t|^{2H})_+, finite range 1.
    OddFBMDual,         ///< Dual of the odd part (w(t) - w(-t))/2 of FBM.
};

/// Nonstationary covariance kernels evaluated on (t, s).
enum class KernelKind
{
    FBM,         ///< E w(t)w(s) for fractional Brownian motion pinned at 0.
    Chi,         ///< sign(t) w(t).
    IFBMDirect,  ///< Covariance of the running integral of FBM.
};

using ParamMap = std::map<std::string, double>;

/// A cataloged stationary correlation function with its parameters.
///
/// Construction validates the parameter domain and throws DomainError
/// for inadmissible values.
class CorrelationFamily
{
public:
    CorrelationFamily(CorrKind kind, ParamMap params);

    static CorrelationFamily dual_fbm(double hurst);
    static CorrelationFamily dual_ifbm(double hurst);
    static CorrelationFamily dual_ibm_scaled(double p);
    static CorrelationFamily laplace_dual();
    static CorrelationFamily frac_slepian(double hurst);
    static CorrelationFamily odd_fbm_dual(double hurst);

    CorrKind kind() const noexcept { return kind_; }
    const ParamMap& params() const noexcept { return params_; }
    double hurst() const;

    /// Correlation at lag t; even in t and equal to 1 at t = 0.
    double operator()(double t) const;

    /// Lag beyond which the correlation is identically zero, or +inf.
    double range() const noexcept;

    std::string id() const;

private:
    CorrKind kind_;
    ParamMap params_;
    double h_ = 0.0;
    double p_ = 1.0;
};

/// A cataloged nonstationary covariance kernel.
class NonstationaryKernel
{
public:
    NonstationaryKernel(KernelKind kind, double hurst);

    KernelKind kind() const noexcept { return kind_; }
    double hurst() const noexcept { return h_; }

    double operator()(double t, double s) const;

    std::string id() const;

private:
    KernelKind kind_;
    double h_;
};

double eval_corr(const CorrelationFamily& family, double t);
double eval_kernel(const NonstationaryKernel& kernel, double t, double s);

/// E S_H(t) eta with eta the integral of the fractional Slepian process over (0,1).
double slepian_feta(double hurst, double t);

/// E eta^2 for the same eta.
double feta_norm_sq(double hurst);

/// Stable string identifiers used in configuration files.
std::string_view to_string(CorrKind kind) noexcept;
std::string_view to_string(KernelKind kind) noexcept;

}  // namespace plab
