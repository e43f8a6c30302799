#include "plab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plab/errors.hpp"
#include "plab/parallel.hpp"

namespace plab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxLoggedExclusions = 16;

double need(const ParamMap& params, const char* name, const std::string& who)
{
    auto it = params.find(name);
    if (it == params.end() || !std::isfinite(it->second))
        throw DomainError(who + ": missing parameter '" + name + "'");
    return it->second;
}

// (1 - x)^k - 1 without cancellation for small x.
double pow1m_minus1(double x, double k) { return std::expm1(k * std::log1p(-x)); }

double u_term(double x, double a)
{
    const double b = 3.0 - a;
    return 2.0 * (2.0 + a) * std::pow(x, 0.5 * a)
           * (b * (x + std::pow(x, 2.0 - a)) - std::pow(x, b) + pow1m_minus1(x, b));
}

double rel7_psi(double x, double a) { return u_term(x, a) - u_term(x, -a); }

double rel9_psi(double x, double a)
{
    return (3.0 + a) * (x + std::pow(x, a + 2.0)) - std::pow(x, a + 3.0) + pow1m_minus1(x, a + 3.0)
           - 3.0 * (a + 2.0) * x * x + (a + 2.0) * std::pow(x, 3.0 - a);
}

double rel10_psi(double x, double a)
{
    const double p = std::sqrt((4.0 - a * a) / 3.0);
    return (2.0 + a) * (x + std::pow(x, a + 1.0)) - std::pow(x, a + 2.0) + pow1m_minus1(x, a + 2.0)
           - 3.0 * (a + 1.0) * std::pow(x, 1.0 + 0.5 * (a + p)) + (a + 1.0) * std::pow(x, 1.0 + 0.5 * (a + 3.0 * p));
}

double rel13_psi(double x, double p)
{
    return (3.0 * x - x * x * x) * (1.0 + std::pow(x, 2.0 * p)) - 4.0 * std::pow(x, p);
}

double phi_a(double x, double a)
{
    return x * (1.0 - x) + a * x * x * std::log(x) + (1.0 - x) * (1.0 - x) * std::log1p(-x);
}

double rel24_rate(double h) { return -std::log(2.0 * h) / h; }

double rel24_phi(double t, double h) { return 0.5 * std::pow(2.0 * h, t) + std::pow(t, 2.0 * h) - 1.0; }

double rel24_smallt(double t, double h)
{
    const double p = rel24_rate(h);
    return std::cosh(h * p * t) - 1.0
           + std::pow(t, 2.0 * h) * (1.0 - 0.5 * std::pow(2.0 * std::sinh(0.5 * p * t) / t, 2.0 * h));
}

double rel24_bigt(double t, double h) { return CorrelationFamily::dual_fbm(h)(rel24_rate(h) * t); }

void require_hurst_open(double h, const std::string& who)
{
    if (!(h > 0.0 && h < 0.5))
        throw DomainError(who + ": H must lie in (0, 1/2)");
}

struct Cell
{
    double lo[2] = {0.0, 0.0};
    double h[2] = {0.0, 0.0};
};

struct SweepStats
{
    double worst_violation = -std::numeric_limits<double>::infinity();
    std::vector<double> violation_point;
    double cell_bound = -std::numeric_limits<double>::infinity();
    double margin = 0.0;
    std::size_t evals = 0;
    std::size_t excluded = 0;
    std::size_t refined = 0;
    std::size_t edge = 0;
    std::size_t unresolved = 0;
    std::vector<std::vector<double>> excluded_points;

    void merge(const SweepStats& o)
    {
        if (o.worst_violation > worst_violation)
        {
            worst_violation = o.worst_violation;
            violation_point = o.violation_point;
        }
        cell_bound = std::max(cell_bound, o.cell_bound);
        margin = std::max(margin, o.margin);
        evals += o.evals;
        excluded += o.excluded;
        refined += o.refined;
        edge += o.edge;
        unresolved += o.unresolved;
        for (const auto& p : o.excluded_points)
            if (excluded_points.size() < kMaxLoggedExclusions)
                excluded_points.push_back(p);
    }
};

class Sweep
{
public:
    Sweep(const ScalarField& f, const Rectangle& rect, double sign, const CertifyOptions& opt, double band)
        : f_(f), rect_(rect), d_(rect.dims()), sign_(sign), opt_(opt), band_(band)
    {
    }

    double eval(const std::vector<double>& x, SweepStats& st) const
    {
        ++st.evals;
        const double v = sign_ * f_(x);
        if (!std::isfinite(v))
        {
            ++st.excluded;
            if (st.excluded_points.size() < kMaxLoggedExclusions)
                st.excluded_points.push_back(x);
            return kNaN;
        }
        if (v > opt_.tolerance && v > st.worst_violation)
        {
            st.worst_violation = v;
            st.violation_point = x;
        }
        return v;
    }

    // 5^d samples of the cell, dimension 0 varying slowest.
    std::vector<double> sample(const Cell& c, SweepStats& st) const
    {
        std::vector<double> vals;
        std::vector<double> x(d_);
        if (d_ == 1)
        {
            for (int i = 0; i <= 4; ++i)
            {
                x[0] = c.lo[0] + 0.25 * i * c.h[0];
                vals.push_back(eval(x, st));
            }
            return vals;
        }
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; j <= 4; ++j)
            {
                x[0] = c.lo[0] + 0.25 * i * c.h[0];
                x[1] = c.lo[1] + 0.25 * j * c.h[1];
                vals.push_back(eval(x, st));
            }
        return vals;
    }

    bool near_edge(const Cell& c) const
    {
        for (std::size_t k = 0; k < d_; ++k)
            if (c.lo[k] - rect_.sides[k].lo < band_ || rect_.sides[k].hi - (c.lo[k] + c.h[k]) < band_)
                return true;
        return false;
    }

    // Certifies one cell from its samples, halving on failure.
    void process(const Cell& c, const std::vector<double>& vals, int depth, SweepStats& st) const
    {
        bool finite = true;
        double top = -std::numeric_limits<double>::infinity();
        for (double v : vals)
        {
            if (std::isnan(v))
                finite = false;
            else
                top = std::max(top, v);
        }
        double bound = std::numeric_limits<double>::infinity();
        double slope = 0.0;
        if (finite)
        {
            double l2 = 0.0;
            double r2 = 0.0;
            const std::size_t stride[2] = {d_ == 1 ? 1u : 5u, 1u};
            for (std::size_t k = 0; k < d_; ++k)
            {
                const double dx = 0.25 * c.h[k];
                double lk = 0.0;
                for (std::size_t idx = 0; idx < vals.size(); ++idx)
                {
                    const std::size_t coord = d_ == 1 ? idx : (k == 0 ? idx / 5 : idx % 5);
                    if (coord == 4)
                        continue;
                    lk = std::max(lk, std::abs(vals[idx + stride[k]] - vals[idx]) / dx);
                }
                l2 += lk * lk;
                r2 += 0.25 * dx * dx;
            }
            slope = std::sqrt(l2);
            bound = top + opt_.safety * slope * std::sqrt(r2);
        }
        if (depth == 0)
            st.margin = std::max(st.margin, slope);
        if (bound < 0.0)
        {
            st.cell_bound = std::max(st.cell_bound, bound);
            return;
        }
        if (finite && top > opt_.tolerance)
            return;  // violation already recorded
        if (depth < opt_.max_depth)
        {
            ++st.refined;
            const int parts = d_ == 1 ? 2 : 4;
            for (int q = 0; q < parts; ++q)
            {
                Cell child;
                for (std::size_t k = 0; k < d_; ++k)
                {
                    child.h[k] = 0.5 * c.h[k];
                    const int bit = d_ == 1 ? q : (k == 0 ? q / 2 : q % 2);
                    child.lo[k] = c.lo[k] + bit * child.h[k];
                }
                process(child, sample(child, st), depth + 1, st);
            }
            return;
        }
        if (!finite)
            return;  // counted through the excluded points
        if (near_edge(c))
            ++st.edge;
        else
            ++st.unresolved;
    }

    // Sign-only sweep toward each side on log-spaced offsets.
    void edge_sweep(double tangential_step, SweepStats& st) const
    {
        constexpr int kOffsets = 16;
        const double inner = opt_.boundary_layer;
        const double outer = std::max(band_, inner);
        std::vector<double> offsets;
        for (int i = 0; i < kOffsets; ++i)
            offsets.push_back(inner * std::pow(outer / inner, double(i) / (kOffsets - 1)));
        for (std::size_t k = 0; k < d_; ++k)
            for (int side = 0; side < 2; ++side)
                for (double off : offsets)
                {
                    std::vector<double> x(d_);
                    x[k] = side == 0 ? rect_.sides[k].lo + off : rect_.sides[k].hi - off;
                    if (d_ == 1)
                    {
                        eval(x, st);
                        continue;
                    }
                    const std::size_t o = 1 - k;
                    const double lo = rect_.sides[o].lo + inner;
                    const double hi = rect_.sides[o].hi - inner;
                    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / tangential_step - 1e-6));
                    for (std::size_t j = 0; j <= n; ++j)
                    {
                        x[o] = lo + (hi - lo) * double(j) / double(n);
                        eval(x, st);
                    }
                }
    }

private:
    const ScalarField& f_;
    const Rectangle& rect_;
    std::size_t d_;
    double sign_;
    const CertifyOptions& opt_;
    double band_;
};

}  // namespace

bool Rectangle::contains(const std::vector<double>& point) const
{
    if (point.size() != sides.size())
        return false;
    for (std::size_t k = 0; k < sides.size(); ++k)
        if (!(point[k] >= sides[k].lo && point[k] <= sides[k].hi))
            return false;
    return true;
}

bool Rectangle::within(const Rectangle& outer) const
{
    if (outer.sides.size() != sides.size())
        return false;
    for (std::size_t k = 0; k < sides.size(); ++k)
        if (sides[k].lo < outer.sides[k].lo || sides[k].hi > outer.sides[k].hi)
            return false;
    return true;
}

std::string_view to_string(SignClaim c) noexcept
{
    return c == SignClaim::Nonpositive ? "nonpositive" : "nonnegative";
}

std::string_view to_string(Verdict v) noexcept
{
    switch (v)
    {
    case Verdict::CertifiedHeuristic: return "certified-heuristic";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

const std::vector<std::string>& testfn_ids()
{
    static const std::vector<std::string> ids = {"rel7-psi", "rel9-psi", "rel10-psi", "rel13-psi",
                                                 "phi-a",    "rel24-phi", "rel24-smallt", "rel24-bigt"};
    return ids;
}

Rectangle testfn_domain(const TestFunctionId& id)
{
    const std::string& s = id.id;
    if (s == "rel7-psi" || s == "rel9-psi" || s == "rel10-psi")
        return {{{0.0, 1.0}, {0.0, 1.0}}};
    if (s == "rel13-psi")
    {
        if (!(need(id.params, "p", s) > 0.0))
            throw DomainError("rel13-psi: p must be positive");
        return {{{0.0, 1.0}}};
    }
    if (s == "phi-a")
    {
        if (!(need(id.params, "a", s) > 0.0))
            throw DomainError("phi-a: a must be positive");
        return {{{0.0, 1.0}}};
    }
    if (s == "rel24-phi" || s == "rel24-smallt" || s == "rel24-bigt")
    {
        const double h = need(id.params, "H", s);
        require_hurst_open(h, s);
        if (s == "rel24-phi")
            return {{{2.0 * h, 1.0}}};
        if (s == "rel24-smallt")
            return {{{0.0, 2.0 * h}}};
        return {{{1.0, 50.0}}};
    }
    throw DomainError("unknown test function '" + s + "'");
}

SignClaim testfn_claim(const TestFunctionId& id)
{
    const std::string& s = id.id;
    testfn_domain(id);
    if (s == "rel13-psi")
        return need(id.params, "p", s) <= 1.0 ? SignClaim::Nonpositive : SignClaim::Nonnegative;
    if (s == "rel10-psi" || s.rfind("rel24", 0) == 0)
        return SignClaim::Nonnegative;
    return SignClaim::Nonpositive;
}

double eval_testfn(const TestFunctionId& id, const std::vector<double>& point)
{
    const Rectangle dom = testfn_domain(id);
    if (!dom.contains(point))
        throw DomainError(id.id + ": point outside the domain");
    const std::string& s = id.id;
    const double x = point[0];
    if (s == "rel7-psi")
        return rel7_psi(x, point[1]);
    if (s == "rel9-psi")
        return rel9_psi(x, point[1]);
    if (s == "rel10-psi")
        return rel10_psi(x, point[1]);
    if (s == "rel13-psi")
        return rel13_psi(x, id.params.at("p"));
    if (s == "phi-a")
        return phi_a(x, id.params.at("a"));
    const double h = id.params.at("H");
    if (s == "rel24-phi")
        return rel24_phi(x, h);
    if (s == "rel24-smallt")
        return rel24_smallt(x, h);
    return rel24_bigt(x, h);
}

GridCertificate certify_sign(const ScalarField& f, const Rectangle& rectangle, double step, SignClaim claim,
                             const CertifyOptions& options)
{
    if (!(step > 0.0) || !std::isfinite(step))
        throw DomainError("certify: step must be positive");
    const std::size_t d = rectangle.dims();
    if (d < 1 || d > 2)
        throw DomainError("certify: rectangles must have 1 or 2 sides");
    const double layer = options.boundary_layer;
    for (const auto& s : rectangle.sides)
        if (!(s.hi - s.lo > 2.0 * layer))
            throw DomainError("certify: rectangle thinner than its boundary layers");

    const double sign = claim == SignClaim::Nonpositive ? 1.0 : -1.0;
    const double band = options.edge_band.value_or(step);
    Sweep sweep(f, rectangle, sign, options, band);

    std::size_t n[2] = {1, 1};
    double lo[2] = {0.0, 0.0};
    double h[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < d; ++k)
    {
        lo[k] = rectangle.sides[k].lo + layer;
        const double w = rectangle.sides[k].hi - layer - lo[k];
        n[k] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w / step - 1e-6)));
        h[k] = w / double(n[k]);
    }

    GridCertificate cert;
    cert.rectangle = rectangle;
    cert.step = step;
    cert.claim = claim;
    cert.cells = n[0] * n[1];

    // One task per row of cells along the first side; per-row results merge in order.
    std::vector<SweepStats> rows(n[0]);
    std::vector<double> row_worst(n[0], -std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> row_point(n[0]);
    parallel_for(n[0], options.workers, [&](std::size_t i) {
        SweepStats& st = rows[i];
        for (std::size_t j = 0; j < n[1]; ++j)
        {
            Cell c;
            c.lo[0] = lo[0] + h[0] * double(i);
            c.h[0] = h[0];
            if (d == 2)
            {
                c.lo[1] = lo[1] + h[1] * double(j);
                c.h[1] = h[1];
            }
            const std::vector<double> vals = sweep.sample(c, st);
            // Grid vertices of this cell that no other cell owns first.
            for (std::size_t idx = 0; idx < vals.size(); ++idx)
            {
                const std::size_t a = d == 1 ? idx : idx / 5;
                const std::size_t b = d == 1 ? 0 : idx % 5;
                const bool vertex = (a == 0 || (a == 4 && i + 1 == n[0])) && (d == 1 || b == 0 || (b == 4 && j + 1 == n[1]));
                if (!vertex || std::isnan(vals[idx]))
                    continue;
                if (vals[idx] > row_worst[i])
                {
                    row_worst[i] = vals[idx];
                    std::vector<double> x(d);
                    x[0] = c.lo[0] + 0.25 * double(a) * c.h[0];
                    if (d == 2)
                        x[1] = c.lo[1] + 0.25 * double(b) * c.h[1];
                    row_point[i] = x;
                }
            }
            sweep.process(c, vals, 0, st);
        }
    });

    SweepStats total;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n[0]; ++i)
    {
        total.merge(rows[i]);
        if (row_worst[i] > worst)
        {
            worst = row_worst[i];
            cert.worst_point = row_point[i];
        }
    }
    {
        SweepStats edge;
        sweep.edge_sweep(0.25 * step, edge);
        total.merge(edge);
    }

    const bool violated = total.worst_violation > options.tolerance;
    if (violated && total.worst_violation > worst)
    {
        worst = total.worst_violation;
        cert.worst_point = total.violation_point;
    }
    cert.worst_value = sign * worst;
    cert.derivative_margin = total.margin;
    cert.cell_bound = total.cell_bound;
    cert.n_points = total.evals;
    cert.excluded = total.excluded;
    cert.refined_cells = total.refined;
    cert.edge_cells = total.edge;
    cert.unresolved_cells = total.unresolved;
    cert.excluded_points = total.excluded_points;

    if (violated)
        cert.verdict = Verdict::Violated;
    else if (double(total.excluded) > 1e-3 * double(total.evals) || total.unresolved > 0)
        cert.verdict = Verdict::Inconclusive;
    else
        cert.verdict = Verdict::CertifiedHeuristic;
    return cert;
}

GridCertificate certify_nonpositive(const TestFunctionId& id, const Rectangle& rectangle, double step,
                                    const CertifyOptions& options)
{
    const Rectangle dom = testfn_domain(id);
    if (!rectangle.within(dom))
        throw DomainError(id.id + ": rectangle outside the domain");
    const SignClaim claim = options.claim.value_or(testfn_claim(id));
    const ScalarField f = [&](const std::vector<double>& x) { return eval_testfn(id, x); };
    GridCertificate cert = certify_sign(f, rectangle, step, claim, options);
    cert.relation = id.id;
    cert.params = id.params;
    return cert;
}

std::vector<GridCertificate> refinement_ladder(const TestFunctionId& id, const Rectangle& rectangle,
                                               const std::vector<double>& steps, const CertifyOptions& options)
{
    std::vector<GridCertificate> out;
    for (double s : steps)
        out.push_back(certify_nonpositive(id, rectangle, s, options));
    return out;
}

bool ladder_stable(const std::vector<GridCertificate>& ladder)
{
    for (std::size_t i = 1; i < ladder.size(); ++i)
    {
        const double sign = ladder[i].claim == SignClaim::Nonpositive ? 1.0 : -1.0;
        const double prev = sign * ladder[i - 1].worst_value;
        const double cur = sign * ladder[i].worst_value;
        if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev)))
            return false;
        if (ladder[i].verdict != ladder[0].verdict)
            return false;
    }
    return true;
}

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
    return t;
}

// Ordering check lhs(t) <= rhs(t) over every (H, t) pair.
DirectCheck ordering_check(const std::vector<double>& hs, const std::vector<double>& ts,
                           const std::function<double(double, double)>& lhs,
                           const std::function<double(double, double)>& rhs, std::string inequality)
{
    DirectCheck dc;
    dc.inequality = std::move(inequality);
    dc.worst_gap = -std::numeric_limits<double>::infinity();
    for (double h : hs)
        for (double t : ts)
        {
            const double a = lhs(h, t);
            const double b = rhs(h, t);
            const double gap = a - b;
            ++dc.n_points;
            if (!(gap <= dc.worst_gap) || std::isnan(gap))
            {
                dc.worst_gap = std::isnan(gap) ? std::numeric_limits<double>::infinity() : gap;
                dc.worst_t = t;
                dc.worst_H = h;
            }
        }
    dc.holds = dc.worst_gap <= 1e-12;
    return dc;
}

double ifbm_dual(double h, double t) { return CorrelationFamily::dual_ifbm(h)(t); }
double ibm_scaled(double p, double t) { return CorrelationFamily::dual_ibm_scaled(p)(t); }
double laplace(double t) { return CorrelationFamily::laplace_dual()(t); }

RelationReport not_applicable(int relation, const ParamMap& params, std::string note)
{
    RelationReport r;
    r.relation = relation;
    r.params = params;
    r.verdict = Verdict::NotApplicable;
    r.note = std::move(note);
    return r;
}

}  // namespace

RelationReport verify_relation(int relation, const ParamMap& params, const VerifyOptions& options)
{
    CertifyOptions copt;
    copt.workers = options.workers;
    RelationReport rep;
    rep.relation = relation;
    rep.params = params;

    const auto has = [&](const char* k) { return params.count(k) > 0; };
    const std::vector<double> ts = log_grid(1e-3, 50.0, 400);
    // alpha grid of the two-dimensional relations, mapped to H per relation.
    std::vector<double> alphas;
    for (int j = 1; j <= 19; ++j)
        alphas.push_back(0.05 * j);

    switch (relation)
    {
    case 7:
    case 9:
    case 10:
    {
        std::vector<double> hs;
        const auto to_h = [&](double a) {
            return relation == 7 ? 0.5 * (1.0 - a) : relation == 9 ? 0.5 * (1.0 + a) : 0.5 * a;
        };
        if (has("H"))
        {
            const double h = params.at("H");
            const bool ok = relation == 9 ? (h > 0.5 && h < 1.0) : (h > 0.0 && h < 0.5);
            if (!ok)
                return not_applicable(relation, params, relation == 9 ? "needs 1/2 < H < 1" : "needs 0 < H < 1/2");
            hs = {h};
        }
        else
        {
            for (double a : alphas)
                hs.push_back(to_h(a));
        }
        const std::string id = relation == 7 ? "rel7-psi" : relation == 9 ? "rel9-psi" : "rel10-psi";
        const TestFunctionId fid{id, {}};
        rep.certificates.push_back(certify_nonpositive(fid, testfn_domain(fid), options.step, copt));
        if (relation == 7)
            rep.direct = ordering_check(hs, ts, ifbm_dual, [](double h, double t) { return ifbm_dual(1.0 - h, t); },
                                        "B~_I_H(t) <= B~_I_(1-H)(t)");
        else if (relation == 9)
            rep.direct = ordering_check(
                hs, ts, ifbm_dual, [](double h, double t) { return ibm_scaled(2.0 * (1.0 - h), t); },
                "B~_I_H(t) <= B~_I_1/2(pt), p = 2(1-H)");
        else
            rep.direct = ordering_check(
                hs, ts, [](double h, double t) { return ibm_scaled(2.0 * std::sqrt((1.0 - h * h) / 3.0), t); },
                ifbm_dual, "B~_I_1/2(pt) <= B~_I_H(t), 3(p/2)^2 + H^2 = 1");
        break;
    }
    case 13:
    case 14:
    {
        if (!has("p"))
            return not_applicable(relation, params, "needs parameter p");
        const double p = params.at("p");
        const bool ok = relation == 13 ? (p > 0.0 && p <= 1.0) : (p * p >= 3.0 - 1e-12);
        if (!ok)
            return not_applicable(relation, params, relation == 13 ? "needs 0 < p <= 1" : "needs p^2 >= 3");
        CertifyOptions o = copt;
        o.claim = relation == 13 ? SignClaim::Nonpositive : SignClaim::Nonnegative;
        const TestFunctionId fid{"rel13-psi", {{"p", p}}};
        rep.certificates.push_back(certify_nonpositive(fid, testfn_domain(fid), options.step, o));
        const auto lap = [p](double, double t) { return laplace(p * t); };
        const auto ibm = [](double, double t) { return ibm_scaled(1.0, t); };
        if (relation == 13)
            rep.direct = ordering_check({0.5}, ts, ibm, lap, "B~_I_1/2(t) <= B~_L(pt)");
        else
            rep.direct = ordering_check({0.5}, ts, lap, ibm, "B~_L(pt) <= B~_I_1/2(t)");
        break;
    }
    case 24:
    {
        if (!has("H"))
            return not_applicable(relation, params, "needs parameter H");
        const double h = params.at("H");
        if (!(h > 0.0 && h <= 0.5 * std::exp(-2.0)))
            return not_applicable(relation, params, "needs 0 < H <= e^-2/2");
        for (const char* id : {"rel24-smallt", "rel24-phi", "rel24-bigt"})
        {
            const TestFunctionId fid{id, {{"H", h}}};
            rep.certificates.push_back(certify_nonpositive(fid, testfn_domain(fid), options.step, copt));
        }
        std::vector<double> grid = log_grid(1e-6, 50.0, 400);
        for (double t = 0.0025; t <= 50.0; t += 0.0025)
            grid.push_back(t);
        const double p = rel24_rate(h);
        rep.direct = ordering_check(
            {h}, grid, [](double hh, double t) { return CorrelationFamily::frac_slepian(hh)(t); },
            [p](double hh, double t) { return CorrelationFamily::dual_fbm(hh)(p * t); },
            "B_S_H(t) <= B~_w_H(pt), pH = -ln(2H)");
        break;
    }
    default:
        throw DomainError("verify_relation: relation must be one of 7, 9, 10, 13, 14, 24");
    }

    bool all_certified = true;
    bool any_violated = false;
    for (const auto& c : rep.certificates)
    {
        all_certified = all_certified && c.verdict == Verdict::CertifiedHeuristic;
        any_violated = any_violated || c.verdict == Verdict::Violated;
    }
    if (all_certified && rep.direct.holds)
        rep.verdict = Verdict::CertifiedHeuristic;
    else if (any_violated && !rep.direct.holds)
        rep.verdict = Verdict::Violated;
    else
        rep.verdict = Verdict::Inconclusive;
    rep.agree = !(any_violated && rep.direct.holds) && !(all_certified && !rep.direct.holds);
    if (!rep.agree)
        rep.note = "transformed and direct checks disagree";
    return rep;
}

nlohmann::json to_json(const GridCertificate& cert)
{
    nlohmann::json rect = nlohmann::json::array();
    for (const auto& s : cert.rectangle.sides)
        rect.push_back({s.lo, s.hi});
    nlohmann::json j;
    j["relation"] = cert.relation;
    j["params"] = cert.params;
    j["rectangle"] = rect;
    j["step"] = cert.step;
    j["claim"] = to_string(cert.claim);
    j["worst_value"] = cert.worst_value;
    j["worst_point"] = cert.worst_point;
    j["derivative_margin"] = cert.derivative_margin;
    j["cell_bound"] = cert.cell_bound;
    j["verdict"] = to_string(cert.verdict);
    j["n_points"] = cert.n_points;
    j["excluded"] = cert.excluded;
    j["cells"] = cert.cells;
    j["refined_cells"] = cert.refined_cells;
    j["edge_cells"] = cert.edge_cells;
    j["unresolved_cells"] = cert.unresolved_cells;
    return j;
}

nlohmann::json to_json(const RelationReport& report)
{
    nlohmann::json j;
    j["relation"] = report.relation;
    j["params"] = report.params;
    j["verdict"] = to_string(report.verdict);
    j["agree"] = report.agree;
    j["note"] = report.note;
    j["certificates"] = nlohmann::json::array();
    for (const auto& c : report.certificates)
        j["certificates"].push_back(to_json(c));
    j["direct"] = {{"holds", report.direct.holds},
                   {"inequality", report.direct.inequality},
                   {"worst_gap", report.direct.worst_gap},
                   {"worst_t", report.direct.worst_t},
                   {"worst_H", report.direct.worst_H},
                   {"n_points", report.direct.n_points}};
    return j;
}

}  // namespace plab
