#pragma once

// Secret-extraction attacks on IQP tableaux.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iqp/f2la.hpp"
#include "iqp/rng.hpp"
#include "iqp/scheme.hpp"

namespace iqp {

struct AttackConfig {
    std::size_t ambition = 8;     // enumerate kernels only below this dimension
    std::size_t endurance = 1000; // outer rounds
    std::size_t g_th = 1;         // accept candidates with rank(gram(H_x)) <= g_th
    std::size_t k = 6;            // stacked Gram matrices per round
    double p = 0.25;              // row deletion probability of the razor
    std::uint64_t seed = 0;
};

struct AttackReport {
    std::string attack;
    bool found = false;
    std::optional<BitVector> secret;
    SecretCertificate certificate;
    std::string failure;  // empty when found
    std::size_t iterations_used = 0;
    std::vector<std::size_t> kernel_dims;
    std::size_t candidates_tested = 0;
    double wall_seconds = 0.0;
};

/// Gram matrices of row-masked copies of H, sharing one transpose.
class GramContext {
public:
    explicit GramContext(const BitMatrix& h);

    const BitMatrix& h() const noexcept { return h_; }
    /// gram(mask_rows(H, rows)).
    BitMatrix gram_masked(const BitVector& rows) const;
    /// gram(scale_rows(H, d)).
    BitMatrix probe(const BitVector& d) const { return gram_masked(mat_vec(h_, d)); }

private:
    BitMatrix h_;
    BitMatrix t_;
};

AttackReport radical_attack(const BitMatrix& h);
/// Radical attack that ignores generators of H(ker G) whose weight is not a
/// multiple of four.
AttackReport radical_attack_doubly_even(const BitMatrix& h);

AttackReport lazy_linearity_attack(const BitMatrix& h, const AttackConfig& cfg);

/// Seeds are elements of F_2^n whose probes are stacked in front of the k
/// random ones every round.
AttackReport double_meyer(const BitMatrix& h, const AttackConfig& cfg, std::span<const BitVector> seeds = {});

/// Random elements of ker gram(H), usable as Double Meyer seeds.
std::vector<BitVector> radical_seeds(const BitMatrix& h, std::size_t count, Rng& rng);

/// Reruns the attack with g_th = 1, 2, ..., g_max and stops at the first find.
AttackReport escalate_threshold(const std::function<AttackReport(const AttackConfig&)>& attack, AttackConfig cfg,
                                std::size_t g_max);

struct SingletonResult {
    std::vector<std::size_t> singletons;  // i with e^i in range H
    std::vector<std::size_t> kept_rows;
    BitMatrix trimmed;
};

SingletonResult singleton_razor(const BitMatrix& h);

/// Each round deletes every row independently with probability p; supports
/// of H(ker) of the remaining rows are collected as redundant rows. With a
/// finite g_th the attack stops at the first round whose complement set
/// yields a valid secret; otherwise all rounds run before the final solve.
AttackReport hamming_razor(const BitMatrix& h, const AttackConfig& cfg);

struct EmptyInterval : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProbabilityInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double p) const { return lo < p && p < hi; }
};

/// Deletion probabilities p with p m2 > m2 - (n - g - d) and p m1 < k_inf.
ProbabilityInterval suggest_p(const InstanceParams& params);

}  // namespace iqp
