#include "plab/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "plab/errors.hpp"
#include "plab/parallel.hpp"

namespace plab {

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<double> points, GridKind kind, double step)
    : points_(std::move(points)), kind_(kind), step_(step)
{
    if (points_.empty())
        throw DomainError("Grid: at least one point is required");
    for (std::size_t i = 0; i < points_.size(); ++i)
    {
        if (!std::isfinite(points_[i]))
            throw DomainError("Grid: non-finite point");
        if (i > 0 && !(points_[i] > points_[i - 1]))
            throw DomainError("Grid: points must be strictly increasing");
    }
}

Grid Grid::uniform(double start, double step, std::size_t n)
{
    if (!(step > 0.0))
        throw DomainError("Grid::uniform: step must be positive");
    std::vector<double> pts(n);
    for (std::size_t k = 0; k < n; ++k)
        pts[k] = start + static_cast<double>(k) * step;
    return Grid(std::move(pts), GridKind::Uniform, step);
}

Grid Grid::geometric(double start, double ratio, std::size_t n)
{
    if (!(start > 0.0) || !(ratio > 1.0))
        throw DomainError("Grid::geometric: need start > 0 and ratio > 1");
    std::vector<double> pts(n);
    const double log_ratio = std::log(ratio);
    for (std::size_t k = 0; k < n; ++k)
        pts[k] = start * std::exp(static_cast<double>(k) * log_ratio);
    return Grid(std::move(pts), GridKind::Geometric, log_ratio);
}

Grid Grid::two_sided_uniform(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(lo < 0.0) || !(hi > 0.0))
        throw DomainError("Grid::two_sided_uniform: need lo < 0 < hi and step > 0");
    const auto k_lo = static_cast<long long>(std::ceil(lo / step - 1e-9));
    const auto k_hi = static_cast<long long>(std::floor(hi / step + 1e-9));
    std::vector<double> pts;
    for (long long k = k_lo; k <= k_hi; ++k)
        if (k != 0)
            pts.push_back(static_cast<double>(k) * step);
    return Grid(std::move(pts), GridKind::TwoSidedUniform, step);
}

Grid Grid::custom(std::vector<double> points) { return Grid(std::move(points), GridKind::Custom, 0.0); }

// ---------------------------------------------------------------------------
// Kernels

KernelSpec KernelSpec::parse(std::string_view id, const ParamMap& params)
{
    auto hurst = [&] {
        auto it = params.find("H");
        if (it == params.end())
            throw DomainError(std::string(id) + ": missing parameter 'H'");
        return it->second;
    };
    if (id == "dual-fbm")
        return CorrelationFamily(CorrKind::DualFBM, params);
    if (id == "dual-ifbm")
        return CorrelationFamily(CorrKind::DualIFBM, params);
    if (id == "dual-ibm-scaled")
        return CorrelationFamily(CorrKind::DualIBMScaled, params);
    if (id == "laplace-dual")
        return CorrelationFamily(CorrKind::LaplaceDual, params);
    if (id == "frac-slepian")
        return CorrelationFamily(CorrKind::FractionalSlepian, params);
    if (id == "odd-fbm-dual")
        return CorrelationFamily(CorrKind::OddFBMDual, params);
    if (id == "fbm")
        return NonstationaryKernel(KernelKind::FBM, hurst());
    if (id == "chi")
        return NonstationaryKernel(KernelKind::Chi, hurst());
    if (id == "ifbm-direct")
        return NonstationaryKernel(KernelKind::IFBMDirect, hurst());
    throw DomainError("unknown kernel identifier '" + std::string(id) + "'");
}

double KernelSpec::operator()(double t, double s) const
{
    if (const auto* f = family())
        return (*f)(t - s);
    return (*kernel())(t, s);
}

std::string KernelSpec::id() const { return family() ? family()->id() : kernel()->id(); }

Eigen::MatrixXd build_covariance(const KernelSpec& spec, std::span<const double> times)
{
    const auto n = static_cast<Eigen::Index>(times.size());
    if (!spec.stationary())
        for (double t : times)
            if (t == 0.0)
                throw DomainError("build_covariance: kernels pinned at 0 cannot include t = 0");
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
        {
            const double v = spec(times[i], times[j]);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

Eigen::MatrixXd build_covariance(const KernelSpec& spec, const Grid& grid)
{
    if (grid.kind() == GridKind::TwoSidedUniform)
    {
        const auto* k = spec.kernel();
        if (k == nullptr || k->kind() == KernelKind::IFBMDirect)
            throw DomainError("build_covariance: two-sided grids are only valid for fbm and chi");
    }
    return build_covariance(spec, grid.points());
}

// ---------------------------------------------------------------------------
// Factorization

CholeskyFactor::CholeskyFactor(std::size_t n, std::vector<double> packed, double jitter, double residual)
    : n_(n), packed_(std::move(packed)), jitter_(jitter), residual_(residual)
{
}

Eigen::MatrixXd CholeskyFactor::dense() const
{
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            l(i, j) = row(static_cast<std::size_t>(i))[j];
    return l;
}

CholeskyFactor factorize_spd(const Eigen::MatrixXd& m, const JitterPolicy& policy)
{
    const auto n = m.rows();
    if (n != m.cols() || n == 0)
        throw DomainError("factorize_spd: matrix must be square and nonempty");
    if (static_cast<std::size_t>(n) > policy.max_dim)
        throw DomainError("factorize_spd: dimension exceeds the configured cap");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    const double scale = m.cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1.0))
        throw DomainError("factorize_spd: matrix is not symmetric");

    const double mean_diag = m.diagonal().mean();
    for (double rung : policy.ladder)
    {
        const double eps = rung * mean_diag;
        Eigen::MatrixXd a = m;
        a.diagonal().array() += eps;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() != Eigen::Success)
            continue;
        const Eigen::MatrixXd l = llt.matrixL();
        if (!l.allFinite())
            continue;
        const Eigen::MatrixXd rec = l * l.transpose();
        const double residual = (rec - m).cwiseAbs().maxCoeff();
        // The diagonal inflation itself is part of the recorded perturbation.
        if (residual > policy.tolerance * scale + eps * (1.0 + 1e-6))
            continue;
        std::vector<double> packed(static_cast<std::size_t>(n * (n + 1) / 2));
        std::size_t k = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j)
                packed[k++] = l(i, j);
        return CholeskyFactor(static_cast<std::size_t>(n), std::move(packed), eps, residual);
    }
    double min_eig = std::numeric_limits<double>::quiet_NaN();
    if (n <= 2048)
        min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    throw ConditioningError("factorize_spd: factorization failed at maximum jitter (min eigenvalue "
                                + std::to_string(min_eig) + ")",
                            min_eig);
}

IncrementFactor IncrementFactor::brownian(std::span<const double> times)
{
    IncrementFactor f;
    f.parent_.resize(times.size());
    f.scale_.resize(times.size());
    // Running outermost visited point on each side.
    std::int64_t last_pos = -1, last_neg = -1;
    double reach_pos = 0.0, reach_neg = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        const double t = times[i];
        if (t == 0.0 || !std::isfinite(t))
            throw DomainError("IncrementFactor::brownian: times must be finite and nonzero");
        auto& last = t > 0 ? last_pos : last_neg;
        auto& reach = t > 0 ? reach_pos : reach_neg;
        const double a = std::abs(t);
        if (!(a > reach))
            throw DomainError("IncrementFactor::brownian: times on each side must move away from 0");
        f.parent_[i] = last;
        f.scale_[i] = std::sqrt(a - reach);
        last = static_cast<std::int64_t>(i);
        reach = a;
    }
    return f;
}

std::size_t Factor::size() const noexcept
{
    return std::visit([](const auto& f) { return f.size(); }, v_);
}

// ---------------------------------------------------------------------------
// Path generation

PathBatch sample_paths(const Factor& factor, const Grid& grid, std::size_t n_paths, const RngStreamSpec& stream,
                       unsigned workers, std::string kernel_id, std::uint64_t first_path)
{
    if (n_paths == 0)
        throw DomainError("sample_paths: n_paths must be at least 1");
    const std::size_t n = factor.size();
    if (n != grid.size())
        throw DomainError("sample_paths: factor and grid sizes differ");
    PathBatch batch{grid, RowMatrix(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(n)),
                    Provenance{std::move(kernel_id), stream.master_seed, stream.stream_id, first_path}};
    constexpr std::size_t kBlock = 256;
    const std::size_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    parallel_for(n_blocks, workers, [&](std::size_t b) {
        std::vector<double> z(n);
        const std::size_t end = std::min(n_paths, (b + 1) * kBlock);
        for (std::size_t p = b * kBlock; p < end; ++p)
        {
            NormalSource normals(stream, first_path + p);
            double* row = batch.values.row(static_cast<Eigen::Index>(p)).data();
            factor.stream(normals, z.data(), row, [](std::size_t, double) { return true; });
        }
    });
    return batch;
}

PathBatch integrated_paths(const PathBatch& batch)
{
    const auto pts = batch.grid.points();
    const double t0 = pts[0];
    if (!(t0 > 0.0))
        throw DomainError("integrated_paths: grid must start after 0");
    double h = pts.size() > 1 ? pts[1] - pts[0] : t0;
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (std::abs((pts[k] - pts[k - 1]) - h) > 1e-9 * std::max(1.0, std::abs(pts[k])))
            throw DomainError("integrated_paths: grid is not uniform");
    PathBatch out{batch.grid, RowMatrix(batch.values.rows(), batch.values.cols()), batch.provenance};
    out.provenance.kernel_id = "integrated(" + batch.provenance.kernel_id + ")";
    for (Eigen::Index r = 0; r < batch.values.rows(); ++r)
    {
        double acc = 0.5 * t0 * batch.values(r, 0);
        out.values(r, 0) = acc;
        for (Eigen::Index k = 1; k < batch.values.cols(); ++k)
        {
            acc += 0.5 * h * (batch.values(r, k - 1) + batch.values(r, k));
            out.values(r, k) = acc;
        }
    }
    return out;
}

PathBatch lamperti_transform(const PathBatch& batch, double self_similarity)
{
    if (!(self_similarity > 0.0))
        throw DomainError("lamperti_transform: self-similarity index must be positive");
    const auto pts = batch.grid.points();
    if (!(pts[0] > 0.0))
        throw DomainError("lamperti_transform: grid must be strictly positive");
    double log_ratio = pts.size() > 1 ? std::log(pts[1] / pts[0]) : 1.0;
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (std::abs(std::log(pts[k] / pts[k - 1]) - log_ratio) > 1e-9)
            throw DomainError("lamperti_transform: grid is not geometric");
    Grid s_grid = Grid::uniform(std::log(pts[0]), log_ratio, pts.size());
    PathBatch out{s_grid, batch.values, batch.provenance};
    out.provenance.kernel_id = "lamperti(" + batch.provenance.kernel_id + ")";
    for (Eigen::Index k = 0; k < out.values.cols(); ++k)
        out.values.col(k) *= std::exp(-self_similarity * s_grid[static_cast<std::size_t>(k)]);
    return out;
}

// ---------------------------------------------------------------------------
// Raw dump

namespace {

constexpr char kMagic[8] = {'P', 'L', 'A', 'B', 'P', 'A', 'T', 'H'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& out, T v)
{
    unsigned char buf[sizeof(T)];
    std::uint64_t bits;
    if constexpr (std::is_same_v<T, double>)
        bits = std::bit_cast<std::uint64_t>(v);
    else
        bits = static_cast<std::uint64_t>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& in)
{
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw DomainError("read_raw: truncated input");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>)
        return std::bit_cast<double>(bits);
    else
        return static_cast<T>(bits);
}

}  // namespace

void write_raw(std::ostream& out, const RowMatrix& values)
{
    out.write(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint32_t>(out, 0);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(values.rows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(values.cols()));
    for (Eigen::Index r = 0; r < values.rows(); ++r)
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            put_le<double>(out, values(r, c));
}

RowMatrix read_raw(std::istream& in)
{
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DomainError("read_raw: bad magic");
    if (get_le<std::uint32_t>(in) != kVersion)
        throw DomainError("read_raw: unsupported version");
    get_le<std::uint32_t>(in);
    const auto rows = get_le<std::uint64_t>(in);
    const auto cols = get_le<std::uint64_t>(in);
    RowMatrix values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < values.rows(); ++r)
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            values(r, c) = get_le<double>(in);
    return values;
}

}  // namespace plab
