#pragma once

// IQP Stabilizer Scheme instances: block construction, obfuscation and
// secret validation.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iqp/f2la.hpp"
#include "iqp/rng.hpp"

namespace iqp {

struct ParameterExhaustion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplingExhaustion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Family { Stabilizer, Qrc, ExtendedQrc };

enum class RedundancyMode { Randomized, Published, ChallengeLegacy };

std::string to_string(Family f);
std::string to_string(RedundancyMode mode);
std::optional<Family> parse_family(const std::string& s);
std::optional<RedundancyMode> parse_redundancy_mode(const std::string& s);

struct InstanceParams {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t g = 0;
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    std::size_t d = 0;

    /// Excess width n - g - m2 (negative for narrow instances).
    long w() const { return static_cast<long>(n) - static_cast<long>(g) - static_cast<long>(m2); }
    /// (m2 - m1) / 2
    double imbalance() const { return (static_cast<double>(m2) - static_cast<double>(m1)) / 2.0; }
};

/// Pre-obfuscation blocks and the obfuscating transform.
struct Construction {
    BitMatrix h_pre;                     // m x n, secret rows first
    BitVector secret_pre;                // e^0
    std::vector<std::size_t> row_perm;   // row i of H is row row_perm[i] of h_pre * Q
    BitMatrix q;                         // n x n column transform
    BitMatrix f_block;                   // m1 x g
    BitMatrix d_block;                   // m1 x d
    std::vector<std::size_t> secret_rows;  // rows of H with <H_i, s> = 1, ascending
};

struct IqpInstance {
    BitMatrix h;
    std::optional<BitVector> secret;
    InstanceParams params;
    Family family = Family::Stabilizer;
    std::uint64_t seed = 0;
    std::optional<Construction> construction;
};

/// Limits for the parameter sampler. Desk-scale test instances relax the
/// minimum sizes.
struct ParameterLimits {
    std::size_t min_m1 = 4;
    std::size_t min_d = 1;
    std::size_t max_retries = 100000;
};

/// m1 = g + 2 Bin(floor(m/2), 0.3), d = Bin(floor((m1 - g)/2), 0.75), redrawn
/// until w <= d <= (m1 - g)/2 and the limits hold.
std::pair<std::size_t, std::size_t> sample_parameters(std::size_t n, std::size_t m, std::size_t g, Rng& rng,
                                                      const ParameterLimits& limits = {});

/// m1 x d matrix whose columns span a doubly even isotropic subspace. Instance
/// assembly sets exclude_ones, since 1 in range D would make F degenerate.
BitMatrix sample_D(std::size_t m1, std::size_t d, Rng& rng, bool exclude_ones = false);

/// Whether some F of this shape gives the secret the bias (1 + 2^{-g/2}) / 2
/// rather than (1 - 2^{-g/2}) / 2. For g = 1 this is m1 = +-1 mod 8.
bool phase_admissible(std::size_t m1, std::size_t g);

/// Sign of the secret's correlation for an F block (the radical does not affect it).
bool bias_phase_positive(const BitMatrix& f);

/// m1 x g matrix with first column all-ones, D^T F = 0, gram(F) invertible and
/// positive bias phase.
BitMatrix sample_F(std::size_t m1, std::size_t g, const BitMatrix& d_block, Rng& rng);

/// Instance with sampled (m1, d).
IqpInstance assemble_instance(std::size_t n, std::size_t m, std::size_t g, Rng& rng,
                              RedundancyMode mode = RedundancyMode::Randomized, const ParameterLimits& limits = {});

/// Instance with fixed (m1, d).
IqpInstance assemble_instance_with(std::size_t n, std::size_t m, std::size_t g, std::size_t m1, std::size_t d,
                                   Rng& rng, RedundancyMode mode = RedundancyMode::Randomized);

/// Builds an obfuscated instance from a pre-obfuscation matrix whose secret is
/// e^0 and whose first m1 rows are the secret rows.
IqpInstance finish_instance(BitMatrix h_pre, BitMatrix f_block, BitMatrix d_block, InstanceParams params,
                            Family family, Rng& rng);

struct Obfuscated {
    BitMatrix h;
    BitVector secret;
    std::vector<std::size_t> row_perm;
    BitMatrix q;
};

Obfuscated obfuscate(const BitMatrix& h, const BitVector& s, Rng& rng);
Obfuscated obfuscate_with(const BitMatrix& h, const BitVector& s, std::vector<std::size_t> row_perm, BitMatrix q);

/// H_s: row i kept iff <H_i, s> = 1, otherwise zeroed.
BitMatrix scale_rows(const BitMatrix& h, const BitVector& s);

struct SecretCertificate {
    std::size_t g_actual = 0;
    std::size_t rad_dim = 0;
    std::size_t code_dim = 0;
    std::size_t m1_observed = 0;
    bool rad_doubly_even = false;

    friend bool operator==(const SecretCertificate&, const SecretCertificate&) = default;
};

enum class Rejection { None, TrivialCode, CodimensionTooLarge, TrivialRadical, NotDoublyEven };

std::string to_string(Rejection r);

struct SecretVerdict {
    Rejection reason = Rejection::None;
    SecretCertificate certificate;

    bool accepted() const { return reason == Rejection::None; }
};

inline constexpr std::size_t unlimited = std::numeric_limits<std::size_t>::max();

/// Full certificate of s regardless of acceptance.
SecretCertificate certify(const BitMatrix& h, const BitVector& s);

/// Accepts iff C_s is nontrivial, g <= g_max, and rad C_s is nontrivial and
/// doubly even.
SecretVerdict validate_secret(const BitMatrix& h, const BitVector& s, std::size_t g_max = unlimited);

/// Pr[<x, s> = 0] for samples of a valid instance: (2^(-g/2) + 1) / 2.
double bias(double g);

}  // namespace iqp
