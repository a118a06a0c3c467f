#pragma once

// Dense linear algebra over GF(2) with 64-bit packed rows.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iqp/rng.hpp"

namespace iqp {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Element of F_2^len. Bits past len-1 in the last word are always zero.
class BitVector {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(word_count(len), 0) {}

    static std::size_t word_count(std::size_t len) { return (len + word_bits - 1) / word_bits; }

    static BitVector unit(std::size_t len, std::size_t i);
    static BitVector ones(std::size_t len);
    static BitVector indicator(std::size_t len, std::span<const std::size_t> indices);
    static BitVector random(std::size_t len, Rng& rng);
    /// Parses a string of '0'/'1' characters; index 0 is the first character.
    static BitVector from_string(std::string_view bits);

    std::size_t size() const noexcept { return len_; }
    bool empty() const noexcept { return len_ == 0; }

    bool get(std::size_t i) const { return (words_[i / word_bits] >> (i % word_bits)) & 1U; }
    bool operator[](std::size_t i) const { return get(i); }
    void set(std::size_t i, bool value = true) {
        const word_type mask = word_type{1} << (i % word_bits);
        if (value)
            words_[i / word_bits] |= mask;
        else
            words_[i / word_bits] &= ~mask;
    }
    void flip(std::size_t i) { words_[i / word_bits] ^= word_type{1} << (i % word_bits); }
    void clear();

    std::size_t weight() const noexcept;
    bool is_zero() const noexcept;
    /// Standard form <u, v> over F_2.
    bool dot(const BitVector& other) const;
    /// Index of the lowest set bit, if any.
    std::optional<std::size_t> first_set() const noexcept;
    std::vector<std::size_t> support() const;

    BitVector& operator^=(const BitVector& other);
    BitVector& operator&=(const BitVector& other);
    BitVector& operator|=(const BitVector& other);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
    friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
    friend bool operator==(const BitVector&, const BitVector&) = default;

    std::span<const word_type> words() const noexcept { return words_; }
    std::span<word_type> words() noexcept { return words_; }

    /// '0'/'1' string, index 0 first.
    std::string to_string() const;

private:
    void check_same_size(const BitVector& other) const;

    std::size_t len_ = 0;
    std::vector<word_type> words_;
};

/// Dense rows x cols matrix over F_2 stored as packed rows.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}
    /// Builds from rows; all must share the given width.
    BitMatrix(std::size_t cols, std::vector<BitVector> rows);

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_columns(std::size_t rows, std::span<const BitVector> columns);
    /// Rows given as '0'/'1' strings.
    static BitMatrix from_strings(std::span<const std::string> rows);

    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return cols_; }

    bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool value = true) { rows_[i].set(j, value); }
    void flip(std::size_t i, std::size_t j) { rows_[i].flip(j); }

    const BitVector& row(std::size_t i) const { return rows_[i]; }
    const std::vector<BitVector>& row_vectors() const noexcept { return rows_; }
    void set_row(std::size_t i, BitVector v);
    void append_row(BitVector v);
    BitVector column(std::size_t j) const;

    bool is_zero() const noexcept;
    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

/// Subspace of F_2^ambient held as a fully reduced row-echelon basis.
///
/// The reduced basis is canonical, so two subspaces are equal exactly when
/// their bases are equal.
class Subspace {
public:
    explicit Subspace(std::size_t ambient = 0) : ambient_(ambient) {}

    static Subspace span(std::size_t ambient, std::span<const BitVector> generators);
    /// Column span of M, a subspace of F_2^{M.rows}.
    static Subspace column_span(const BitMatrix& m);
    static Subspace row_span(const BitMatrix& m);

    std::size_t ambient_dim() const noexcept { return ambient_; }
    std::size_t dim() const noexcept { return basis_.size(); }

    /// Reduced basis vectors (each has a distinct leading bit).
    const std::vector<BitVector>& basis() const noexcept { return basis_; }
    const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }
    /// ambient x dim matrix whose columns are the basis.
    BitMatrix basis_matrix() const;

    /// Adds v to the span; returns true iff the dimension grew.
    bool insert(BitVector v);
    bool contains(const BitVector& v) const;
    /// v reduced against the basis; zero iff v is a member.
    BitVector reduce(BitVector v) const;
    BitVector random_element(Rng& rng) const;

    friend bool operator==(const Subspace&, const Subspace&) = default;

private:
    std::size_t ambient_;
    std::vector<BitVector> basis_;
    std::vector<std::size_t> pivots_;
};

std::size_t rank(const BitMatrix& m);
/// Null space {v : M v = 0} in F_2^{M.cols}.
Subspace kernel_basis(const BitMatrix& m);
/// Some v with M v = b (free variables zero), or nullopt if b is not in range M.
std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b);
std::optional<BitMatrix> inverse(const BitMatrix& m);

BitMatrix transpose(const BitMatrix& m);
BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b);
BitVector mat_vec(const BitMatrix& m, const BitVector& v);
/// Gram matrix H^T H.
BitMatrix gram(const BitMatrix& h);

BitMatrix hstack(const BitMatrix& left, const BitMatrix& right);
BitMatrix vstack(const BitMatrix& top, const BitMatrix& bottom);
BitMatrix select_rows(const BitMatrix& m, std::span<const std::size_t> indices);
/// Rows i with keep[i] set; other rows become zero. Shape is unchanged.
BitMatrix mask_rows(const BitMatrix& m, const BitVector& keep);

BitMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng);
BitMatrix random_invertible(std::size_t n, Rng& rng);
/// Uniform random permutation; result[i] is the source index of row i.
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);
BitMatrix permutation_matrix(std::span<const std::size_t> perm);
BitMatrix random_permutation_matrix(std::size_t n, Rng& rng);

/// Indices of rows of M with at least one set bit, i.e. the union of the
/// supports of the columns of M.
std::vector<std::size_t> support_of_columns(const BitMatrix& m);
BitVector support_indicator(const BitMatrix& m);

/// True iff every vector of the span has weight divisible by four.
bool is_doubly_even_space(const Subspace& s);

Subspace subspace_sum(const Subspace& u, const Subspace& v);
Subspace subspace_intersection(const Subspace& u, const Subspace& v);
/// Orthogonal complement under the standard form.
Subspace orthogonal_complement(const Subspace& u);

}  // namespace iqp
