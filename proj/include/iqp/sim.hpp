#pragma once

// Exact state-vector simulation of small IQP circuits.

#include <stdexcept>
#include <vector>

#include "iqp/f2la.hpp"
#include "iqp/rng.hpp"

namespace iqp {

struct TooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t max_sim_qubits = 16;

struct IqpDistribution {
    std::size_t n = 0;
    std::vector<double> probs;  // indexed by x with bit j of the index = x_j
};

/// Born probabilities of prod_i exp(i pi/8 X^{H_i}) |0...0>, i.e. omega^H |0...0>
/// with omega = e^{i pi/4} and each term counted as the projector (1 - X^{H_i}) / 2.
IqpDistribution simulate(const BitMatrix& h);

/// Sum of D_H(x) over x with <x, s> = 0.
double bias_of(const IqpDistribution& dist, const BitVector& s);

std::vector<BitVector> sample(const IqpDistribution& dist, std::size_t count, Rng& rng);

/// Bit-vector view of a basis-state index.
BitVector basis_state(std::size_t n, std::size_t index);

}  // namespace iqp
