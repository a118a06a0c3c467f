#include "iqp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace iqp {

double rho(double w, double tol) {
    if (w < 0) throw std::invalid_argument("rho: w must be nonnegative");
    double log_prod = 0.0;
    for (double i = std::floor(w) + 1.0;; i += 1.0) {
        const double term = std::exp2(-i);
        log_prod += std::log1p(-term);
        if (term < tol) break;
    }
    return -std::expm1(log_prod);
}

double success_theory(long w, std::size_t m1, std::size_t d) {
    if (w <= 0) return 0.0;
    const double wd = static_cast<double>(w);
    const double m = static_cast<double>(m1);
    return (1.0 - rho(wd)) * std::pow(1.0 - std::exp2(-wd), m) * std::pow(1.0 - std::exp2(-static_cast<double>(d)), m);
}

double success_theory_simple(double w, std::size_t n, std::size_t m, std::size_t g) {
    if (w <= 0) return 0.0;
    const double exponent = static_cast<double>(g + m) - static_cast<double>(n);
    return std::pow(1.0 - std::exp2(-w), exponent);
}

double half_success_width(std::size_t n, std::size_t m, std::size_t g) {
    const double exponent = static_cast<double>(g + m) - static_cast<double>(n);
    return -std::log2(1.0 - std::exp2(-1.0 / exponent));
}

KInfinity k_infty(double m, double h) {
    if (m <= 0 || h < 0 || h > m) throw std::invalid_argument("k_infty: need 0 <= h <= m and m > 0");
    const double denom = std::log(m) + 2.0;
    KInfinity out;
    out.k1 = h * std::log(2.0) / denom;
    auto step = [&](double k) { return out.k1 + (k <= 1.0 ? 0.0 : (k - 1.0) * std::log(k) / denom); };
    double k = out.k1;
    for (out.iterations = 1; out.iterations < 100000; ++out.iterations) {
        const double next = step(k);
        const bool done = std::abs(next - k) <= 1e-12 * std::max(1.0, next);
        k = next;
        if (done) break;
    }
    out.k_limit = k;
    out.lambda = k > 0 ? 1.0 / k + std::log(m / k) : std::numeric_limits<double>::infinity();
    return out;
}

double binomial_pmf(std::size_t k, std::size_t n, double p) {
    if (k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    const double kn = static_cast<double>(k), nn = static_cast<double>(n);
    const double log_choose = std::lgamma(nn + 1) - std::lgamma(kn + 1) - std::lgamma(nn - kn + 1);
    return std::exp(log_choose + kn * std::log(p) + (nn - kn) * std::log1p(-p));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Randomized two-sided test with f-mass t in the lower tail and alpha - t in
// the upper tail; reports its boundary points and its rejection mass under g.
struct TailSplit {
    std::size_t lower = 0;
    std::size_t upper = 0;
    double g_mass = 0.0;
};

TailSplit split_tails(const std::vector<double>& f, const std::vector<double>& g, double t, double alpha) {
    const std::size_t n = f.size() - 1;
    TailSplit out;

    double cum_f = 0.0, cum_g = 0.0;
    std::size_t c1 = 0;
    while (c1 < n && cum_f + f[c1] <= t) {
        cum_f += f[c1];
        cum_g += g[c1];
        ++c1;
    }
    const double gamma1 = f[c1] > 0 ? std::clamp((t - cum_f) / f[c1], 0.0, 1.0) : 0.0;
    out.lower = c1;
    out.g_mass = cum_g + gamma1 * g[c1];

    const double u = alpha - t;
    double suf_f = 0.0, suf_g = 0.0;
    std::size_t c2 = n;
    while (c2 > 0 && suf_f + f[c2] <= u) {
        suf_f += f[c2];
        suf_g += g[c2];
        --c2;
    }
    const double gamma2 = f[c2] > 0 ? std::clamp((u - suf_f) / f[c2], 0.0, 1.0) : 0.0;
    out.upper = c2;
    out.g_mass += suf_g + gamma2 * g[c2];
    return out;
}

}  // namespace

CountInterval umpu_binomial_region(std::size_t trials, double p0, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("umpu_binomial_region: alpha must lie in (0, 1)");
    if (p0 <= 0.0 || trials == 0) return {0, 0};
    if (p0 >= 1.0) return {trials, trials};

    const std::size_t n = trials;
    std::vector<double> f(n + 1), g(n + 1);
    for (std::size_t x = 0; x <= n; ++x) {
        f[x] = binomial_pmf(x, n, p0);
        // x f(x) / (n p0) is the pmf of 1 + Bin(n - 1, p0).
        g[x] = static_cast<double>(x) * f[x] / (static_cast<double>(n) * p0);
    }

    // Unbiasedness: rejection mass alpha under both f and g. Moving f-mass
    // to the lower tail lowers the g-mass, so bisect on the lower share.
    double lo = 0.0, hi = alpha;
    TailSplit best = split_tails(f, g, lo, alpha);
    if (best.g_mass > alpha) {
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const TailSplit s = split_tails(f, g, mid, alpha);
            if (s.g_mass > alpha)
                lo = mid;
            else
                hi = mid;
        }
        best = split_tails(f, g, 0.5 * (lo + hi), alpha);
    }
    return {best.lower, std::max(best.lower, best.upper)};
}

double endurance_estimate(std::size_t n, std::size_t m, std::size_t g, double ambition) {
    const double mean = static_cast<double>(n) - static_cast<double>(m) / 2.0;
    const double sd = std::sqrt(static_cast<double>(m)) / 2.0;
    return std::exp2(static_cast<double>(g)) / normal_cdf((ambition - mean) / sd);
}

}  // namespace iqp
