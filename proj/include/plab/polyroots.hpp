#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "plab/persistence.hpp"

namespace plab {

/// Number of distinct real roots from a Sturm sequence; coefficients are
/// a_0..a_d. bits = 64 runs in long double, larger values in MPFR.
int sturm_count(std::span<const double> coeffs, int bits = 64);

/// Lower bound on the number of real roots: sign changes between grid points
/// whose Horner value clears its rounding-error bound. Covers |x| <= 1 for the
/// polynomial and |x| >= 1 through the reversed polynomial.
int scan_sign_changes(std::span<const double> coeffs);

struct RootCount
{
    int count = -1;
    bool accepted = false;
    int scan = 0;
    /// Precision of the accepted Sturm count (64 = long double).
    int bits = 64;
};

/// Sturm count cross-checked against the scan; on disagreement the Sturm chain
/// is recomputed at 128, 256, 512, 1024 bits and accepted once two consecutive
/// precisions agree on a count >= scan with the parity of the degree.
RootCount count_real_roots(std::span<const double> coeffs);

struct PolyEstimate
{
    SurvivalEstimate estimate;
    std::size_t rejected = 0;
    std::size_t escalated = 0;
    std::vector<std::uint64_t> rejected_samples;
};

/// Fraction of degree-2n polynomials with i.i.d. standard normal coefficients
/// that have no real root. Rejected samples are excluded and logged; the
/// estimate is flagged "reject-rate" when they exceed 0.1% of the budget.
PolyEstimate random_poly_no_zero_prob(int n, const McBudget& budget, const RngStreamSpec& stream);

}  // namespace plab
