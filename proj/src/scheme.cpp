#include "iqp/scheme.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <complex>

namespace iqp {

namespace {

constexpr int dimension_retries = 50;

// Empty m x 0 matrices still need their row count.
BitMatrix columns_to_matrix(std::size_t rows, const std::vector<BitVector>& columns) {
    return BitMatrix::from_columns(rows, columns);
}

std::vector<BitVector> null_space_basis_of_e0(std::size_t n) {
    std::vector<BitVector> basis;
    basis.reserve(n - 1);
    for (std::size_t j = 1; j < n; ++j) basis.push_back(BitVector::unit(n, j));
    return basis;
}

BitVector random_orthogonal_to_e0(std::size_t n, Rng& rng) {
    BitVector v = BitVector::random(n, rng);
    v.set(0, false);
    return v;
}

std::vector<BitVector> redundant_rows(const BitMatrix& top, std::size_t m2, RedundancyMode mode, Rng& rng) {
    const std::size_t n = top.cols();
    std::vector<BitVector> candidates = null_space_basis_of_e0(n);
    if (mode == RedundancyMode::Randomized) {
        const BitMatrix mix = random_invertible(n - 1, rng);
        std::vector<BitVector> mixed;
        mixed.reserve(n - 1);
        for (std::size_t i = 0; i < n - 1; ++i) {
            BitVector v(n);
            for (auto j : mix.row(i).support()) v ^= candidates[j];
            mixed.push_back(std::move(v));
        }
        candidates = std::move(mixed);
    }

    Subspace span = Subspace::row_span(top);
    std::vector<BitVector> rows;
    for (auto& p : candidates)
        if (span.insert(p)) rows.push_back(std::move(p));
    if (span.dim() != n) throw SamplingExhaustion("redundant rows: could not reach full column rank");
    if (rows.size() > m2) throw SamplingExhaustion("redundant rows: m2 too small to complete the rank");

    const Subspace appended = Subspace::span(n, rows);
    while (rows.size() < m2) {
        if (mode == RedundancyMode::ChallengeLegacy)
            rows.push_back(appended.random_element(rng));
        else
            rows.push_back(random_orthogonal_to_e0(n, rng));
    }
    return rows;
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::Stabilizer: return "stabilizer";
        case Family::Qrc: return "qrc";
        case Family::ExtendedQrc: return "extended-qrc";
    }
    return "unknown";
}

std::string to_string(RedundancyMode mode) {
    switch (mode) {
        case RedundancyMode::Randomized: return "randomized";
        case RedundancyMode::Published: return "published";
        case RedundancyMode::ChallengeLegacy: return "challenge-legacy";
    }
    return "unknown";
}

std::optional<Family> parse_family(const std::string& s) {
    if (s == "stabilizer") return Family::Stabilizer;
    if (s == "qrc") return Family::Qrc;
    if (s == "extended-qrc") return Family::ExtendedQrc;
    return std::nullopt;
}

std::optional<RedundancyMode> parse_redundancy_mode(const std::string& s) {
    if (s == "randomized") return RedundancyMode::Randomized;
    if (s == "published") return RedundancyMode::Published;
    if (s == "challenge-legacy") return RedundancyMode::ChallengeLegacy;
    return std::nullopt;
}

std::string to_string(Rejection r) {
    switch (r) {
        case Rejection::None: return "none";
        case Rejection::TrivialCode: return "trivial-code";
        case Rejection::CodimensionTooLarge: return "codimension-too-large";
        case Rejection::TrivialRadical: return "trivial-radical";
        case Rejection::NotDoublyEven: return "not-doubly-even";
    }
    return "unknown";
}

std::pair<std::size_t, std::size_t> sample_parameters(std::size_t n, std::size_t m, std::size_t g, Rng& rng,
                                                      const ParameterLimits& limits) {
    if (g == 0 || n <= g || m <= n) throw std::invalid_argument("sample_parameters: need g >= 1, n > g and m > n");
    const std::size_t min_m1 = std::max(g + 2, limits.min_m1);
    for (std::size_t attempt = 0; attempt < limits.max_retries; ++attempt) {
        const std::size_t m1 = g + 2 * rng.binomial(m / 2, 0.3);
        const std::size_t d_max = (m1 - g) / 2;
        const std::size_t d = rng.binomial(d_max, 0.75);
        if (m1 < min_m1 || m1 > m) continue;
        const long w = static_cast<long>(n) - static_cast<long>(g) - static_cast<long>(m - m1);
        if (static_cast<long>(d) < w || d < limits.min_d || g + d > n) continue;
        return {m1, d};
    }
    throw ParameterExhaustion("sample_parameters: no admissible (m1, d) within the retry budget");
}

BitMatrix sample_D(std::size_t m1, std::size_t d, Rng& rng, bool exclude_ones) {
    if (2 * d > m1) throw std::invalid_argument("sample_D: isotropic dimension exceeds m1 / 2");
    std::vector<BitVector> cols;
    Subspace chosen(m1);
    // 1 is orthogonal to every even vector, so adding it does not shrink the candidates.
    Subspace constraints(m1);
    constraints.insert(BitVector::ones(m1));
    const std::size_t budget = 100 * std::max<std::size_t>(d, 1) * m1;
    std::size_t draws = 0;
    while (cols.size() < d) {
        const Subspace allowed = orthogonal_complement(constraints);
        for (;;) {
            if (++draws > budget) throw SamplingExhaustion("sample_D: retry budget exhausted");
            BitVector v = allowed.random_element(rng);
            if (v.weight() % 4 != 0 || (exclude_ones ? constraints : chosen).contains(v)) continue;
            chosen.insert(v);
            constraints.insert(v);
            cols.push_back(std::move(v));
            break;
        }
    }
    return columns_to_matrix(m1, cols);
}

bool phase_admissible(std::size_t m1, std::size_t g) {
    if (g == 0 || m1 % 2 != g % 2) return false;
    // range F / rad is an odd form, so its Brown invariant is one of g, g - 2, ..., -g mod 8
    for (std::size_t k = 0; k <= g; ++k) {
        const long brown = static_cast<long>(g) - 2 * static_cast<long>(k);
        if (((brown - static_cast<long>(m1)) % 8 + 8) % 8 == 0) return true;
    }
    return false;
}

bool bias_phase_positive(const BitMatrix& f) {
    const std::size_t m1 = f.rows(), g = f.cols();
    if (g == 0 || g > 24) throw std::invalid_argument("bias_phase_positive: need 1 <= g <= 24");
    // sum over range F of (-i)^|c|, rotated by e^{i pi m1 / 4}; only the real sign survives
    std::array<long, 4> count{};
    BitVector c(m1);
    for (std::uint32_t x = 0; x < (std::uint32_t{1} << g); ++x) {
        if (x) c ^= f.column(static_cast<std::size_t>(std::countr_zero(x)));
        ++count[c.weight() % 4];
    }
    const std::complex<double> sum(static_cast<double>(count[0] - count[2]), static_cast<double>(count[3] - count[1]));
    return (std::polar(1.0, M_PI * static_cast<double>(m1 % 8) / 4.0) * sum).real() > 0.5;
}

BitMatrix sample_F(std::size_t m1, std::size_t g, const BitMatrix& d_block, Rng& rng) {
    if (g == 0) throw std::invalid_argument("sample_F: g must be positive");
    if (d_block.rows() != m1) throw ShapeError("sample_F: D must have m1 rows");
    // The all-ones column is the characteristic vector of the form on range F,
    // so a non-degenerate form forces m1 = g mod 2.
    if (m1 % 2 != g % 2) throw SamplingExhaustion("sample_F: m1 and g must have equal parity");
    if (!phase_admissible(m1, g)) throw SamplingExhaustion("sample_F: no F with positive bias phase for this m1 and g");
    const Subspace d_perp = kernel_basis(transpose(d_block));
    for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
        std::vector<BitVector> cols{BitVector::ones(m1)};
        for (std::size_t j = 1; j < g; ++j) cols.push_back(d_perp.random_element(rng));
        BitMatrix f = columns_to_matrix(m1, cols);
        if (rank(gram(f)) == g && bias_phase_positive(f)) return f;
    }
    throw SamplingExhaustion("sample_F: no non-degenerate F within the retry budget");
}

IqpInstance assemble_instance(std::size_t n, std::size_t m, std::size_t g, Rng& rng, RedundancyMode mode,
                              const ParameterLimits& limits) {
    // Tiny m1 can admit no doubly even D of the drawn dimension; redraw the shape then.
    for (int attempt = 0;; ++attempt) {
        const auto [m1, d] = sample_parameters(n, m, g, rng, limits);
        try {
            return assemble_instance_with(n, m, g, m1, d, rng, mode);
        } catch (const SamplingExhaustion&) {
            if (attempt + 1 >= dimension_retries) throw;
        }
    }
}

IqpInstance assemble_instance_with(std::size_t n, std::size_t m, std::size_t g, std::size_t m1, std::size_t d,
                                   Rng& rng, RedundancyMode mode) {
    if (g == 0 || m1 > m || g + d > n || m1 < g) throw std::invalid_argument("assemble_instance: inadmissible shape");
    const std::size_t m2 = m - m1;
    if (n - g - d > m2) throw std::invalid_argument("assemble_instance: need d >= w");

    if (!phase_admissible(m1, g)) throw SamplingExhaustion("assemble_instance: m1 and g admit no positive bias phase");

    InstanceParams params{n, m, g, m1, m2, d};
    for (int attempt = 0;; ++attempt) {
        try {
            BitMatrix d_block = sample_D(m1, d, rng, true);
            BitMatrix f_block = sample_F(m1, g, d_block, rng);
            BitMatrix top(m1, n);
            for (std::size_t i = 0; i < m1; ++i) {
                BitVector row(n);
                for (auto j : f_block.row(i).support()) row.set(j);
                for (auto j : d_block.row(i).support()) row.set(g + j);
                top.set_row(i, std::move(row));
            }
            const auto rows = redundant_rows(top, m2, mode, rng);
            BitMatrix h_pre = vstack(top, BitMatrix(n, rows));
            return finish_instance(std::move(h_pre), std::move(f_block), std::move(d_block), params,
                                   Family::Stabilizer, rng);
        } catch (const SamplingExhaustion&) {
            if (attempt + 1 >= dimension_retries) throw;
        }
    }
}

IqpInstance finish_instance(BitMatrix h_pre, BitMatrix f_block, BitMatrix d_block, InstanceParams params,
                            Family family, Rng& rng) {
    const BitVector s_pre = BitVector::unit(h_pre.cols(), 0);
    Obfuscated ob = obfuscate(h_pre, s_pre, rng);

    Construction c;
    c.secret_pre = s_pre;
    c.f_block = std::move(f_block);
    c.d_block = std::move(d_block);
    for (std::size_t i = 0; i < ob.row_perm.size(); ++i)
        if (ob.row_perm[i] < params.m1) c.secret_rows.push_back(i);
    c.row_perm = std::move(ob.row_perm);
    c.q = std::move(ob.q);
    c.h_pre = std::move(h_pre);

    IqpInstance inst;
    inst.h = std::move(ob.h);
    inst.secret = std::move(ob.secret);
    inst.params = params;
    inst.family = family;
    inst.seed = rng.seed();
    inst.construction = std::move(c);
    return inst;
}

Obfuscated obfuscate(const BitMatrix& h, const BitVector& s, Rng& rng) {
    auto perm = random_permutation(h.rows(), rng);
    BitMatrix q = random_invertible(h.cols(), rng);
    return obfuscate_with(h, s, std::move(perm), std::move(q));
}

Obfuscated obfuscate_with(const BitMatrix& h, const BitVector& s, std::vector<std::size_t> row_perm, BitMatrix q) {
    if (row_perm.size() != h.rows() || q.rows() != h.cols() || q.cols() != h.cols())
        throw ShapeError("obfuscate: transform shapes do not match H");
    const auto q_inv = inverse(q);
    if (!q_inv) throw std::invalid_argument("obfuscate: Q is singular");
    const BitMatrix hq = mat_mul(h, q);
    Obfuscated out;
    out.h = select_rows(hq, row_perm);
    out.secret = mat_vec(*q_inv, s);
    out.row_perm = std::move(row_perm);
    out.q = std::move(q);
    return out;
}

BitMatrix scale_rows(const BitMatrix& h, const BitVector& s) { return mask_rows(h, mat_vec(h, s)); }

SecretCertificate certify(const BitMatrix& h, const BitVector& s) {
    const BitVector mask = mat_vec(h, s);
    const BitMatrix hs = mask_rows(h, mask);
    const Subspace ker = kernel_basis(gram(hs));
    Subspace rad(h.rows());
    for (const auto& k : ker.basis()) rad.insert(mat_vec(hs, k));

    SecretCertificate cert;
    cert.m1_observed = mask.weight();
    cert.code_dim = rank(hs);
    cert.rad_dim = rad.dim();
    cert.g_actual = cert.code_dim - cert.rad_dim;
    cert.rad_doubly_even = is_doubly_even_space(rad);
    return cert;
}

SecretVerdict validate_secret(const BitMatrix& h, const BitVector& s, std::size_t g_max) {
    SecretVerdict verdict;
    const BitVector mask = mat_vec(h, s);
    if (mask.is_zero()) {
        verdict.reason = Rejection::TrivialCode;
        return verdict;
    }
    if (g_max != unlimited) {
        const std::size_t g = rank(gram(mask_rows(h, mask)));
        if (g > g_max) {
            verdict.reason = Rejection::CodimensionTooLarge;
            verdict.certificate.g_actual = g;
            verdict.certificate.m1_observed = mask.weight();
            return verdict;
        }
    }
    verdict.certificate = certify(h, s);
    if (verdict.certificate.g_actual > g_max)
        verdict.reason = Rejection::CodimensionTooLarge;
    else if (verdict.certificate.rad_dim == 0)
        verdict.reason = Rejection::TrivialRadical;
    else if (!verdict.certificate.rad_doubly_even)
        verdict.reason = Rejection::NotDoublyEven;
    return verdict;
}

double bias(double g) { return 0.5 * (std::pow(2.0, -g / 2.0) + 1.0); }

}  // namespace iqp
