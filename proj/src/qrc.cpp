#include "iqp/qrc.hpp"

#include <string>

namespace iqp {

bool is_prime(std::size_t q) {
    if (q < 2) return false;
    for (std::size_t f = 2; f * f <= q; ++f)
        if (q % f == 0) return false;
    return true;
}

void check_qrc_prime(std::size_t q) {
    if (!is_prime(q) || (q + 1) % 8 != 0)
        throw InvalidPrime("q = " + std::to_string(q) + " is not a prime with q + 1 = 0 mod 8");
}

void check_qrc_params(const QrcParams& p) {
    check_qrc_prime(p.q);
    if (p.n < p.r() || p.n > p.q + p.r())
        throw std::invalid_argument("qrc: n must lie in [r, q + r] = [" + std::to_string(p.r()) + ", " +
                                    std::to_string(p.q + p.r()) + "]");
}

BitMatrix qrc_generator(std::size_t q) {
    check_qrc_prime(q);
    BitVector residues(q);
    for (std::size_t x = 1; x < q; ++x) residues.set((x * x) % q);

    Subspace code(q);
    for (std::size_t shift = 0; shift < q; ++shift) {
        BitVector v(q);
        for (auto i : residues.support()) v.set((i + shift) % q);
        code.insert(std::move(v));
    }
    const BitVector ones = BitVector::ones(q);
    const Subspace even_subcode = subspace_intersection(code, orthogonal_complement(Subspace::span(q, {&ones, 1})));

    std::vector<BitVector> cols{ones};
    cols.insert(cols.end(), even_subcode.basis().begin(), even_subcode.basis().end());
    return BitMatrix::from_columns(q, cols);
}

IqpInstance build_qrc_instance(const QrcParams& params, Rng& rng) {
    check_qrc_params(params);
    const std::size_t q = params.q, r = params.r(), n = params.n;
    const BitMatrix gen = qrc_generator(q);

    std::vector<BitVector> rows;
    rows.reserve(2 * q);
    for (std::size_t i = 0; i < q; ++i) {
        BitVector row(n);
        for (auto j : gen.row(i).support()) row.set(j);
        rows.push_back(std::move(row));
    }
    Subspace span = Subspace::span(n, rows);
    for (std::size_t i = 0; i < q; ++i) {
        for (;;) {
            BitVector row = BitVector::random(n, rng);
            row.set(0, false);
            if (span.dim() < n && !span.insert(row)) continue;
            rows.push_back(std::move(row));
            break;
        }
    }

    std::vector<BitVector> f_cols{gen.column(0)}, d_cols;
    for (std::size_t j = 1; j < r; ++j) d_cols.push_back(gen.column(j));

    InstanceParams p{n, 2 * q, 1, q, q, r - 1};
    return finish_instance(BitMatrix(n, std::move(rows)), BitMatrix::from_columns(q, f_cols),
                           BitMatrix::from_columns(q, d_cols), p, n == r ? Family::Qrc : Family::ExtendedQrc, rng);
}

}  // namespace iqp
