#include "iqp/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <string>

namespace iqp {

namespace {

std::size_t row_mask(const BitVector& row) {
    std::size_t mask = 0;
    for (auto j : row.support()) mask |= std::size_t{1} << j;
    return mask;
}

}  // namespace

IqpDistribution simulate(const BitMatrix& h) {
    const std::size_t n = h.cols();
    if (n > max_sim_qubits) throw TooLarge("simulate: at most " + std::to_string(max_sim_qubits) + " qubits");
    const std::size_t dim = std::size_t{1} << n;
    std::vector<std::complex<double>> psi(dim), next(dim);
    psi[0] = 1.0;
    // omega^((1 - X^a) / 2) with omega = e^{i pi/4} is exp(-i pi/8 X^a) up to a global phase;
    // the sign of the angle does not change any Born probability, so use +pi/8.
    const double c = std::cos(M_PI / 8), s = std::sin(M_PI / 8);
    const std::complex<double> is(0.0, s);
    for (std::size_t i = 0; i < h.rows(); ++i) {
        const std::size_t flip = row_mask(h.row(i));
        for (std::size_t x = 0; x < dim; ++x) next[x] = c * psi[x] + is * psi[x ^ flip];
        psi.swap(next);
    }
    IqpDistribution out;
    out.n = n;
    out.probs.resize(dim);
    for (std::size_t x = 0; x < dim; ++x) out.probs[x] = std::norm(psi[x]);
    return out;
}

double bias_of(const IqpDistribution& dist, const BitVector& s) {
    if (s.size() != dist.n) throw ShapeError("bias_of: secret length must equal the qubit count");
    const std::size_t mask = row_mask(s);
    double total = 0.0;
    for (std::size_t x = 0; x < dist.probs.size(); ++x)
        if (std::popcount(x & mask) % 2 == 0) total += dist.probs[x];
    return total;
}

BitVector basis_state(std::size_t n, std::size_t index) {
    BitVector v(n);
    for (std::size_t j = 0; j < n; ++j)
        if ((index >> j) & 1U) v.set(j);
    return v;
}

std::vector<BitVector> sample(const IqpDistribution& dist, std::size_t count, Rng& rng) {
    std::vector<double> cdf(dist.probs.size());
    double acc = 0.0;
    for (std::size_t x = 0; x < dist.probs.size(); ++x) cdf[x] = (acc += dist.probs[x]);
    std::vector<BitVector> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.uniform01() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t x = static_cast<std::size_t>(it - cdf.begin());
        if (x >= cdf.size()) x = cdf.size() - 1;
        out.push_back(basis_state(dist.n, x));
    }
    return out;
}

}  // namespace iqp
