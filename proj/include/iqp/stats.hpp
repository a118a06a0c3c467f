#pragma once

// Success-probability theory and the exact binomial test used to compare
// experiments against it.

#include <cstddef>

namespace iqp {

/// 1 - prod_{i > w} (1 - 2^-i): probability that a random k x (k + w) matrix
/// has rank below k, in the limit of large k. The product stops once a factor
/// is within tol of one.
double rho(double w, double tol = 1e-17);

/// (1 - rho(w)) (1 - 2^-w)^m1 (1 - 2^-d)^m1
double success_theory(long w, std::size_t m1, std::size_t d);
/// (1 - 2^-w)^(g + m - n)
double success_theory_simple(double w, std::size_t n, std::size_t m, std::size_t g);
/// Width at which the simple form equals one half.
double half_success_width(std::size_t n, std::size_t m, std::size_t g);

struct KInfinity {
    double k1 = 0.0;
    double k_limit = 0.0;
    double lambda = 0.0;
    std::size_t iterations = 0;
};

/// Lower bound on the minimal weight in the range of a random m x (m - h)
/// matrix, by the fixed-point iteration k <- k1 + (k - 1) ln k / (ln m + 2).
KInfinity k_infty(double m, double h);

struct CountInterval {
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool contains(std::size_t c) const { return lo <= c && c <= hi; }
    friend bool operator==(const CountInterval&, const CountInterval&) = default;
};

/// Acceptance region of the two-sided unbiased binomial test of p = p0 at
/// level alpha. Boundary points that the randomized test would reject only
/// partially are accepted.
CountInterval umpu_binomial_region(std::size_t trials, double p0, double alpha = 0.05);

double binomial_pmf(std::size_t k, std::size_t n, double p);
double normal_cdf(double x);

/// Expected rounds of the lazy linearity attack: 2^g / Phi((A - (n - m/2)) / (sqrt(m) / 2)).
double endurance_estimate(std::size_t n, std::size_t m, std::size_t g, double ambition);

}  // namespace iqp
