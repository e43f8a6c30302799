#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "plab/corrfun.hpp"
#include "plab/rng.hpp"

namespace plab {

enum class GridKind
{
    Uniform,
    Geometric,
    TwoSidedUniform,
    Custom,
};

/// Strictly increasing finite set of sampling times.
class Grid
{
public:
    /// start, start + step, ..., n points.
    static Grid uniform(double start, double step, std::size_t n);
    /// start * ratio^k, k = 0..n-1; start > 0, ratio > 1.
    static Grid geometric(double start, double ratio, std::size_t n);
    /// Multiples of step in [lo, hi], excluding 0 (the pinned point).
    static Grid two_sided_uniform(double lo, double hi, double step);
    static Grid custom(std::vector<double> points);

    std::span<const double> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    GridKind kind() const noexcept { return kind_; }
    /// Spacing for uniform and two-sided grids, log-ratio for geometric ones.
    double step() const noexcept { return step_; }

private:
    Grid(std::vector<double> points, GridKind kind, double step);

    std::vector<double> points_;
    GridKind kind_;
    double step_;
};

/// Either a stationary correlation family or a nonstationary kernel.
class KernelSpec
{
public:
    KernelSpec(CorrelationFamily family) : v_(std::move(family)) {}
    KernelSpec(NonstationaryKernel kernel) : v_(std::move(kernel)) {}

    /// Parses a stable identifier (dual-fbm, ..., fbm, chi, ifbm-direct).
    static KernelSpec parse(std::string_view id, const ParamMap& params);

    bool stationary() const noexcept { return std::holds_alternative<CorrelationFamily>(v_); }
    const CorrelationFamily* family() const noexcept { return std::get_if<CorrelationFamily>(&v_); }
    const NonstationaryKernel* kernel() const noexcept { return std::get_if<NonstationaryKernel>(&v_); }

    double operator()(double t, double s) const;
    std::string id() const;

private:
    std::variant<CorrelationFamily, NonstationaryKernel> v_;
};

/// Covariance on a validated grid; two-sided grids only for fbm and chi.
Eigen::MatrixXd build_covariance(const KernelSpec& spec, const Grid& grid);

/// Covariance on an arbitrary list of distinct times, in the order given.
Eigen::MatrixXd build_covariance(const KernelSpec& spec, std::span<const double> times);

struct JitterPolicy
{
    /// Diagonal inflation ladder, in units of the mean diagonal.
    std::vector<double> ladder{0.0, 1e-12, 1e-10, 1e-8};
    std::size_t max_dim = 8192;
    /// Required reconstruction accuracy relative to max |M_ij|.
    double tolerance = 1e-8;
};

/// Lower-triangular Cholesky factor stored row-major and packed.
class CholeskyFactor
{
public:
    CholeskyFactor() = default;
    CholeskyFactor(std::size_t n, std::vector<double> packed, double jitter, double residual);

    std::size_t size() const noexcept { return n_; }
    const double* row(std::size_t i) const noexcept { return packed_.data() + i * (i + 1) / 2; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return j <= i ? row(i)[j] : 0.0; }
    /// Absolute diagonal inflation actually applied.
    double jitter() const noexcept { return jitter_; }
    /// max |L L^T - M|, with M the un-jittered input.
    double residual() const noexcept { return residual_; }
    Eigen::MatrixXd dense() const;

private:
    std::size_t n_ = 0;
    std::vector<double> packed_;
    double jitter_ = 0.0;
    double residual_ = 0.0;
};

CholeskyFactor factorize_spd(const Eigen::MatrixXd& m, const JitterPolicy& policy = {});

/// Exact factor for processes with independent increments (Brownian motion):
/// x_i = x_parent(i) + scale_i z_i, with parent(i) < i or -1 for the origin.
class IncrementFactor
{
public:
    /// Brownian motion pinned at 0, for distinct nonzero times in any order
    /// where each time appears after all times between it and 0.
    static IncrementFactor brownian(std::span<const double> times);

    std::size_t size() const noexcept { return scale_.size(); }
    std::span<const std::int64_t> parents() const noexcept { return parent_; }
    std::span<const double> scales() const noexcept { return scale_; }

private:
    std::vector<std::int64_t> parent_;
    std::vector<double> scale_;
};

/// Sampling factor: dense Cholesky or independent-increment structure.
class Factor
{
public:
    Factor(CholeskyFactor f) : v_(std::move(f)) {}
    Factor(IncrementFactor f) : v_(std::move(f)) {}

    std::size_t size() const noexcept;
    const CholeskyFactor* cholesky() const noexcept { return std::get_if<CholeskyFactor>(&v_); }
    const IncrementFactor* increments() const noexcept { return std::get_if<IncrementFactor>(&v_); }

    /// Generates one path coordinate at a time; visit(i, x_i) returns false to
    /// stop early. z and x are scratch buffers of at least size() elements.
    template <class Visit>
    void stream(NormalSource& normals, double* z, double* x, Visit&& visit) const;

private:
    std::variant<CholeskyFactor, IncrementFactor> v_;
};

/// Fixed-order dot product shared by all dense path generators.
inline double ordered_dot(const double* a, const double* b, std::size_t n) noexcept
{
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8)
        for (int k = 0; k < 8; ++k)
            acc[k] += a[j + k] * b[j + k];
    double tail = 0.0;
    for (; j < n; ++j)
        tail += a[j] * b[j];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

template <class Visit>
void Factor::stream(NormalSource& normals, double* z, double* x, Visit&& visit) const
{
    if (const auto* c = cholesky())
    {
        const std::size_t n = c->size();
        for (std::size_t i = 0; i < n; ++i)
        {
            z[i] = normals();
            x[i] = ordered_dot(c->row(i), z, i + 1);
            if (!visit(i, x[i]))
                return;
        }
        return;
    }
    const auto* inc = increments();
    const auto parents = inc->parents();
    const auto scales = inc->scales();
    for (std::size_t i = 0; i < scales.size(); ++i)
    {
        const double base = parents[i] < 0 ? 0.0 : x[parents[i]];
        x[i] = base + scales[i] * normals();
        if (!visit(i, x[i]))
            return;
    }
}

struct Provenance
{
    std::string kernel_id;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t first_path = 0;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Ensemble of sampled paths; row r is path first_path + r of the stream.
struct PathBatch
{
    Grid grid;
    RowMatrix values;
    Provenance provenance;

    std::size_t n_paths() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_points() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Paths are generated in fixed blocks; output is identical for any worker count.
PathBatch sample_paths(const Factor& factor, const Grid& grid, std::size_t n_paths, const RngStreamSpec& stream,
                       unsigned workers = 1, std::string kernel_id = {}, std::uint64_t first_path = 0);

/// Trapezoidal running integral of FBM paths on a uniform grid with points
/// t_k = t_0 + k h; the segment [0, t_0] uses w(0) = 0.
PathBatch integrated_paths(const PathBatch& batch);

/// x~(s) = e^{-h s} x(e^s) for paths on a geometric grid; output grid is s = ln t.
PathBatch lamperti_transform(const PathBatch& batch, double self_similarity);

/// Raw dump: "PLABPATH", u32 version, u32 reserved, u64 n_paths, u64 n_points,
/// then n_paths * n_points little-endian float64 values, row-major.
void write_raw(std::ostream& out, const RowMatrix& values);
RowMatrix read_raw(std::istream& in);

}  // namespace plab
