#pragma once

// Quadratic-residue-code instances and their extension by redundant columns.

#include <stdexcept>

#include "iqp/f2la.hpp"
#include "iqp/rng.hpp"
#include "iqp/scheme.hpp"

namespace iqp {

struct InvalidPrime : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QrcParams {
    std::size_t q = 0;
    std::size_t n = 0;

    std::size_t r() const { return (q + 1) / 2; }
    std::size_t m() const { return 2 * q; }
};

bool is_prime(std::size_t q);
/// Throws InvalidPrime unless q is prime with q + 1 = 0 mod 8.
void check_qrc_prime(std::size_t q);
/// Throws on an invalid prime or n outside [r, q + r].
void check_qrc_params(const QrcParams& p);

/// q x r generator of the binary QR code of length q. Column 0 is the
/// all-ones vector and the remaining columns span the doubly even subcode.
BitMatrix qrc_generator(std::size_t q);

/// Instance with m = 2q rows and width n; pre-obfuscation secret e^0.
IqpInstance build_qrc_instance(const QrcParams& params, Rng& rng);

}  // namespace iqp
