#include "plab/polyroots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <mpfr.h>

#include "plab/errors.hpp"
#include "plab/parallel.hpp"

namespace plab {

namespace {

// Arithmetic back ends for the Sturm chain. Each exposes a coefficient
// vector type and the handful of in-place operations the chain needs.

struct LongDoubleArith
{
    using Vec = std::vector<long double>;

    explicit LongDoubleArith(int) {}
    Vec make(std::size_t n) const { return Vec(n, 0.0L); }
    void set(Vec& v, std::size_t i, long double x) const { v[i] = x; }
    void copy(Vec& dst, const Vec& src, std::size_t n) const { std::copy_n(src.begin(), n, dst.begin()); }
    int sign(const Vec& v, std::size_t i) const { return (v[i] > 0) - (v[i] < 0); }
    long double mag(const Vec& v, std::size_t i) const { return std::fabs(v[i]); }
    // a[i] -= q * b[j], q = a[top] / b[lead]
    void eliminate(Vec& a, std::size_t top, const Vec& b, std::size_t lead) const
    {
        const long double q = a[top] / b[lead];
        for (std::size_t j = 0; j <= lead; ++j)
            a[top - lead + j] -= q * b[j];
        a[top] = 0.0L;
    }
    void scale(Vec& v, std::size_t n, long double s) const
    {
        for (std::size_t i = 0; i < n; ++i)
            v[i] *= s;
    }
    void negate(Vec& v, std::size_t n) const
    {
        for (std::size_t i = 0; i < n; ++i)
            v[i] = -v[i];
    }
    long double eps() const { return std::numeric_limits<long double>::epsilon(); }
};

class MpVec
{
public:
    MpVec(std::size_t n, mpfr_prec_t prec) : v_(n)
    {
        for (auto& x : v_)
        {
            mpfr_init2(x, prec);
            mpfr_set_zero(x, 1);
        }
    }
    MpVec(const MpVec&) = delete;
    MpVec& operator=(const MpVec&) = delete;
    MpVec(MpVec&& o) noexcept : v_(std::move(o.v_)) { o.v_.clear(); }
    MpVec& operator=(MpVec&& o) noexcept
    {
        v_.swap(o.v_);
        return *this;
    }
    ~MpVec()
    {
        for (auto& x : v_)
            mpfr_clear(x);
    }
    mpfr_ptr operator[](std::size_t i) { return v_[i]; }
    mpfr_srcptr operator[](std::size_t i) const { return v_[i]; }

private:
    std::vector<mpfr_t> v_;
};

struct MpfrArith
{
    using Vec = MpVec;

    explicit MpfrArith(int bits) : prec(bits), q(1, bits), t(1, bits) {}
    Vec make(std::size_t n) const { return Vec(n, prec); }
    void set(Vec& v, std::size_t i, long double x) const { mpfr_set_ld(v[i], x, MPFR_RNDN); }
    void copy(Vec& dst, const Vec& src, std::size_t n) const
    {
        for (std::size_t i = 0; i < n; ++i)
            mpfr_set(dst[i], src[i], MPFR_RNDN);
    }
    int sign(const Vec& v, std::size_t i) const { return mpfr_sgn(v[i]); }
    long double mag(const Vec& v, std::size_t i) const { return std::fabs(mpfr_get_ld(v[i], MPFR_RNDN)); }
    void eliminate(Vec& a, std::size_t top, const Vec& b, std::size_t lead)
    {
        mpfr_div(q[0], a[top], b[lead], MPFR_RNDN);
        for (std::size_t j = 0; j < lead; ++j)
        {
            mpfr_mul(t[0], q[0], b[j], MPFR_RNDN);
            mpfr_sub(a[top - lead + j], a[top - lead + j], t[0], MPFR_RNDN);
        }
        mpfr_set_zero(a[top], 1);
    }
    void scale(Vec& v, std::size_t n, long double s)
    {
        mpfr_set_ld(t[0], s, MPFR_RNDN);
        for (std::size_t i = 0; i < n; ++i)
            mpfr_mul(v[i], v[i], t[0], MPFR_RNDN);
    }
    void negate(Vec& v, std::size_t n) const
    {
        for (std::size_t i = 0; i < n; ++i)
            mpfr_neg(v[i], v[i], MPFR_RNDN);
    }
    long double eps() const { return std::ldexp(1.0L, -static_cast<int>(prec) + 1); }

    mpfr_prec_t prec;
    MpVec q, t;
};

// Sign variations of the Sturm chain at -inf and +inf. Each member is scaled
// to unit max-norm; leading coefficients below eps^(3/4) of that norm are
// treated as cancellation noise and dropped.
template <class Arith>
int sturm_impl(std::span<const double> coeffs, Arith& ar)
{
    std::size_t d = coeffs.size();
    while (d > 0 && coeffs[d - 1] == 0.0)
        --d;
    if (d <= 1)
        return 0;
    const std::size_t deg = d - 1;
    const long double noise = std::pow(ar.eps(), 0.75L);

    auto a = ar.make(deg + 1);  // p_{k-1}
    auto b = ar.make(deg + 1);  // p_k
    for (std::size_t i = 0; i <= deg; ++i)
    {
        ar.set(a, i, static_cast<long double>(coeffs[i]));
        if (i > 0)
            ar.set(b, i - 1, static_cast<long double>(coeffs[i]) * static_cast<long double>(i));
    }
    std::size_t da = deg, db = deg - 1;

    auto normalize = [&](auto& v, std::size_t& dv) -> bool {
        long double m = 0.0L;
        for (std::size_t i = 0; i <= dv; ++i)
            m = std::max(m, ar.mag(v, i));
        if (m == 0.0L)
            return false;
        ar.scale(v, dv + 1, 1.0L / m);
        while (dv > 0 && ar.mag(v, dv) <= noise)
            --dv;
        if (dv == 0 && ar.mag(v, 0) <= noise)
            return false;
        return true;
    };
    normalize(a, da);
    normalize(b, db);

    int var_neg = 0, var_pos = 0;
    int last_neg = 0, last_pos = 0;
    auto record = [&](int lead_sign, std::size_t dv) {
        const int s_pos = lead_sign;
        const int s_neg = (dv % 2 == 0) ? lead_sign : -lead_sign;
        if (last_pos != 0 && s_pos != last_pos)
            ++var_pos;
        if (last_neg != 0 && s_neg != last_neg)
            ++var_neg;
        last_pos = s_pos;
        last_neg = s_neg;
    };
    record(ar.sign(a, da), da);
    record(ar.sign(b, db), db);

    while (db > 0)
    {
        // a <- -(a mod b)
        for (std::size_t top = da + 1; top-- > db;)
            ar.eliminate(a, top, b, db);
        std::size_t dr = db - 1;
        ar.negate(a, dr + 1);
        if (!normalize(a, dr))
            break;  // common factor: chain ends
        record(ar.sign(a, dr), dr);
        std::swap(a, b);
        da = db;
        db = dr;
    }
    return var_neg - var_pos;
}

// Horner value and a running rounding-error bound.
std::pair<double, double> horner(std::span<const double> c, double x)
{
    double v = 0.0, mu = 0.0;
    const double ax = std::abs(x);
    for (std::size_t i = c.size(); i-- > 0;)
    {
        v = v * x + c[i];
        mu = mu * ax + std::abs(v);
    }
    const double u = std::numeric_limits<double>::epsilon() / 2;
    return {v, u * (2.0 * mu - std::abs(v))};
}

int scan_interval(std::span<const double> c, std::size_t m)
{
    int changes = 0;
    int last = 0;
    for (std::size_t j = 0; j <= m; ++j)
    {
        const double x = -std::cos(M_PI * static_cast<double>(j) / static_cast<double>(m));
        const auto [v, err] = horner(c, x);
        if (std::abs(v) <= err)
            continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last)
            ++changes;
        last = s;
    }
    return changes;
}

}  // namespace

int sturm_count(std::span<const double> coeffs, int bits)
{
    if (bits <= 64)
    {
        LongDoubleArith ar(bits);
        return sturm_impl(coeffs, ar);
    }
    MpfrArith ar(bits);
    return sturm_impl(coeffs, ar);
}

int scan_sign_changes(std::span<const double> coeffs)
{
    std::size_t d = coeffs.size();
    while (d > 0 && coeffs[d - 1] == 0.0)
        --d;
    if (d <= 1)
        return 0;
    const std::size_t m = std::max<std::size_t>(64, 8 * d);
    std::span<const double> c = coeffs.first(d);
    std::vector<double> rev(c.rbegin(), c.rend());
    // x = +-1 are shared by both scans; a root there has probability zero
    return scan_interval(c, m) + scan_interval(rev, m);
}

RootCount count_real_roots(std::span<const double> coeffs)
{
    RootCount r;
    r.scan = scan_sign_changes(coeffs);
    std::size_t d = coeffs.size();
    while (d > 0 && coeffs[d - 1] == 0.0)
        --d;
    const int parity = d == 0 ? 0 : static_cast<int>((d - 1) % 2);
    const int ld = sturm_count(coeffs, 64);
    if (ld == r.scan)
    {
        r.count = ld;
        r.accepted = true;
        return r;
    }
    int prev = -1;
    for (int bits : {128, 256, 512, 1024})
    {
        const int c = sturm_count(coeffs, bits);
        if (c == prev && c >= r.scan && c % 2 == parity)
        {
            r.count = c;
            r.bits = bits;
            r.accepted = true;
            return r;
        }
        prev = c;
    }
    r.bits = 1024;
    return r;
}

PolyEstimate random_poly_no_zero_prob(int n, const McBudget& budget, const RngStreamSpec& stream)
{
    if (n < 0)
        throw DomainError("random_poly_no_zero_prob: n must be nonnegative");
    if (budget.n_paths == 0)
        throw DomainError("random_poly_no_zero_prob: empty budget");
    const std::size_t d = 2 * static_cast<std::size_t>(n) + 1;

    constexpr std::size_t kBlock = 1024;
    const std::size_t n_blocks = (budget.n_paths + kBlock - 1) / kBlock;
    struct Partial
    {
        std::size_t none = 0, accepted = 0, escalated = 0;
        std::vector<std::uint64_t> rejected;
    };
    std::vector<Partial> partial(n_blocks);
    parallel_for(n_blocks, budget.workers, [&](std::size_t b) {
        Partial& out = partial[b];
        std::vector<double> c(d);
        const std::size_t end = std::min(budget.n_paths, (b + 1) * kBlock);
        for (std::size_t p = b * kBlock; p < end; ++p)
        {
            const std::uint64_t id = budget.first_path + p;
            NormalSource normals(stream, id);
            for (auto& x : c)
                x = normals();
            const auto rc = count_real_roots(c);
            if (!rc.accepted)
            {
                out.rejected.push_back(id);
                continue;
            }
            ++out.accepted;
            out.escalated += rc.bits > 64;
            out.none += rc.count == 0;
        }
    });

    PolyEstimate pe;
    std::size_t none = 0, accepted = 0;
    for (auto& p : partial)
    {
        none += p.none;
        accepted += p.accepted;
        pe.escalated += p.escalated;
        pe.rejected_samples.insert(pe.rejected_samples.end(), p.rejected.begin(), p.rejected.end());
    }
    pe.rejected = pe.rejected_samples.size();
    if (accepted == 0)
        throw BudgetError("random_poly_no_zero_prob: every sample was rejected");
    pe.estimate = make_estimate(none, accepted, static_cast<double>(2 * n), 0.0);
    pe.estimate.provenance = Provenance{"random-poly:degree=" + std::to_string(2 * n), stream.master_seed,
                                        stream.stream_id, budget.first_path};
    if (static_cast<double>(pe.rejected) > 1e-3 * static_cast<double>(budget.n_paths))
        pe.estimate.flags.push_back("reject-rate");
    return pe;
}

}  // namespace plab
