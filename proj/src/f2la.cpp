#include "iqp/f2la.hpp"

#include <algorithm>
#include <bit>

namespace iqp {

namespace {

using word_type = BitVector::word_type;
constexpr std::size_t word_bits = BitVector::word_bits;

word_type tail_mask(std::size_t len) {
    const std::size_t r = len % word_bits;
    return r == 0 ? ~word_type{0} : (word_type{1} << r) - 1;
}

template <typename F>
void for_each_set_bit(const BitVector& v, F&& f) {
    const auto w = v.words();
    for (std::size_t k = 0; k < w.size(); ++k) {
        word_type x = w[k];
        while (x) {
            f(k * word_bits + static_cast<std::size_t>(std::countr_zero(x)));
            x &= x - 1;
        }
    }
}

// Copy of v with length len (len >= v.size()); new bits zero.
BitVector widen(const BitVector& v, std::size_t len) {
    BitVector out(len);
    auto dst = out.words();
    const auto src = v.words();
    std::copy(src.begin(), src.end(), dst.begin());
    return out;
}

// Gauss-Jordan elimination over the first `cols` columns. Rows are reordered so
// that row r carries pivot column pivots[r]; every pivot column is zero in all
// other rows.
std::vector<std::size_t> rref(std::vector<BitVector>& rows, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[r], rows[p]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

void check_conformable(bool ok, const char* what) {
    if (!ok) throw ShapeError(what);
}

}  // namespace

// ---------------------------------------------------------------- BitVector

BitVector BitVector::unit(std::size_t len, std::size_t i) {
    BitVector v(len);
    v.set(i);
    return v;
}

BitVector BitVector::ones(std::size_t len) {
    BitVector v(len);
    for (auto& w : v.words_) w = ~word_type{0};
    if (!v.words_.empty()) v.words_.back() &= tail_mask(len);
    return v;
}

BitVector BitVector::indicator(std::size_t len, std::span<const std::size_t> indices) {
    BitVector v(len);
    for (auto i : indices) {
        if (i >= len) throw ShapeError("BitVector::indicator: index out of range");
        v.set(i);
    }
    return v;
}

BitVector BitVector::random(std::size_t len, Rng& rng) {
    BitVector v(len);
    for (auto& w : v.words_) w = rng.next_u64();
    if (!v.words_.empty()) v.words_.back() &= tail_mask(len);
    return v;
}

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            v.set(i);
        else if (bits[i] != '0')
            throw std::invalid_argument("BitVector::from_string: expected only '0' and '1'");
    }
    return v;
}

void BitVector::clear() { std::fill(words_.begin(), words_.end(), 0); }

std::size_t BitVector::weight() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool BitVector::is_zero() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](word_type w) { return w == 0; });
}

bool BitVector::dot(const BitVector& other) const {
    check_same_size(other);
    word_type acc = 0;
    for (std::size_t k = 0; k < words_.size(); ++k) acc ^= words_[k] & other.words_[k];
    return std::popcount(acc) & 1;
}

std::optional<std::size_t> BitVector::first_set() const noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k)
        if (words_[k]) return k * word_bits + static_cast<std::size_t>(std::countr_zero(words_[k]));
    return std::nullopt;
}

std::vector<std::size_t> BitVector::support() const {
    std::vector<std::size_t> out;
    for_each_set_bit(*this, [&](std::size_t i) { out.push_back(i); });
    return out;
}

BitVector& BitVector::operator^=(const BitVector& other) {
    check_same_size(other);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= other.words_[k];
    return *this;
}

BitVector& BitVector::operator&=(const BitVector& other) {
    check_same_size(other);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= other.words_[k];
    return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) {
    check_same_size(other);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
    return *this;
}

std::string BitVector::to_string() const {
    std::string s(len_, '0');
    for_each_set_bit(*this, [&](std::size_t i) { s[i] = '1'; });
    return s;
}

void BitVector::check_same_size(const BitVector& other) const {
    if (len_ != other.len_) throw ShapeError("BitVector: length mismatch");
}

// ---------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(std::size_t cols, std::vector<BitVector> rows) : cols_(cols), rows_(std::move(rows)) {
    for (const auto& r : rows_)
        if (r.size() != cols_) throw ShapeError("BitMatrix: row length mismatch");
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
}

BitMatrix BitMatrix::from_columns(std::size_t rows, std::span<const BitVector> columns) {
    BitMatrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows) throw ShapeError("BitMatrix::from_columns: column length mismatch");
        for_each_set_bit(columns[j], [&](std::size_t i) { m.set(i, j); });
    }
    return m;
}

BitMatrix BitMatrix::from_strings(std::span<const std::string> rows) {
    if (rows.empty()) return {};
    std::vector<BitVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(BitVector::from_string(r));
    const std::size_t cols = out.front().size();
    return BitMatrix(cols, std::move(out));
}

void BitMatrix::set_row(std::size_t i, BitVector v) {
    if (v.size() != cols_) throw ShapeError("BitMatrix::set_row: length mismatch");
    rows_[i] = std::move(v);
}

void BitMatrix::append_row(BitVector v) {
    if (v.size() != cols_) throw ShapeError("BitMatrix::append_row: length mismatch");
    rows_.push_back(std::move(v));
}

BitVector BitMatrix::column(std::size_t j) const {
    BitVector c(rows());
    for (std::size_t i = 0; i < rows(); ++i)
        if (rows_[i].get(j)) c.set(i);
    return c;
}

bool BitMatrix::is_zero() const noexcept {
    return std::all_of(rows_.begin(), rows_.end(), [](const BitVector& r) { return r.is_zero(); });
}

// ---------------------------------------------------------------- Subspace

Subspace Subspace::span(std::size_t ambient, std::span<const BitVector> generators) {
    Subspace s(ambient);
    for (const auto& g : generators) s.insert(g);
    return s;
}

Subspace Subspace::column_span(const BitMatrix& m) {
    const BitMatrix t = transpose(m);
    return span(m.rows(), t.row_vectors());
}

Subspace Subspace::row_span(const BitMatrix& m) { return span(m.cols(), m.row_vectors()); }

BitMatrix Subspace::basis_matrix() const { return BitMatrix::from_columns(ambient_, basis_); }

BitVector Subspace::reduce(BitVector v) const {
    if (v.size() != ambient_) throw ShapeError("Subspace: ambient dimension mismatch");
    for (std::size_t k = 0; k < basis_.size(); ++k)
        if (v.get(pivots_[k])) v ^= basis_[k];
    return v;
}

bool Subspace::insert(BitVector v) {
    v = reduce(std::move(v));
    const auto lead = v.first_set();
    if (!lead) return false;
    const std::size_t p = *lead;
    for (auto& b : basis_)
        if (b.get(p)) b ^= v;
    const auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), p) - pivots_.begin();
    pivots_.insert(pivots_.begin() + pos, p);
    basis_.insert(basis_.begin() + pos, std::move(v));
    return true;
}

bool Subspace::contains(const BitVector& v) const { return reduce(v).is_zero(); }

BitVector Subspace::random_element(Rng& rng) const {
    BitVector v(ambient_);
    const BitVector coeffs = BitVector::random(basis_.size(), rng);
    for_each_set_bit(coeffs, [&](std::size_t k) { v ^= basis_[k]; });
    return v;
}

// ---------------------------------------------------------------- operations

std::size_t rank(const BitMatrix& m) {
    auto rows = m.row_vectors();
    return rref(rows, m.cols()).size();
}

Subspace kernel_basis(const BitMatrix& m) {
    const std::size_t n = m.cols();
    auto rows = m.row_vectors();
    const auto pivots = rref(rows, n);
    std::vector<bool> is_pivot(n, false);
    for (auto p : pivots) is_pivot[p] = true;

    Subspace ker(n);
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        BitVector v(n);
        v.set(f);
        for (std::size_t r = 0; r < pivots.size(); ++r)
            if (rows[r].get(f)) v.set(pivots[r]);
        ker.insert(std::move(v));
    }
    return ker;
}

std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b) {
    check_conformable(b.size() == m.rows(), "solve: right-hand side length must equal row count");
    const std::size_t n = m.cols();
    std::vector<BitVector> rows;
    rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        BitVector r = widen(m.row(i), n + 1);
        if (b.get(i)) r.set(n);
        rows.push_back(std::move(r));
    }
    const auto pivots = rref(rows, n);
    for (std::size_t i = pivots.size(); i < rows.size(); ++i)
        if (rows[i].get(n)) return std::nullopt;
    BitVector x(n);
    for (std::size_t r = 0; r < pivots.size(); ++r)
        if (rows[r].get(n)) x.set(pivots[r]);
    return x;
}

std::optional<BitMatrix> inverse(const BitMatrix& m) {
    check_conformable(m.rows() == m.cols(), "inverse: matrix must be square");
    const std::size_t n = m.rows();
    std::vector<BitVector> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        BitVector r = widen(m.row(i), 2 * n);
        r.set(n + i);
        rows.push_back(std::move(r));
    }
    if (rref(rows, n).size() < n) return std::nullopt;
    BitMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (rows[i].get(n + j)) inv.set(i, j);
    return inv;
}

BitMatrix transpose(const BitMatrix& m) {
    BitMatrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) for_each_set_bit(m.row(i), [&](std::size_t j) { t.set(j, i); });
    return t;
}

BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b) {
    check_conformable(a.cols() == b.rows(), "mat_mul: inner dimensions differ");
    BitMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        BitVector acc(b.cols());
        for_each_set_bit(a.row(i), [&](std::size_t k) { acc ^= b.row(k); });
        c.set_row(i, std::move(acc));
    }
    return c;
}

BitVector mat_vec(const BitMatrix& m, const BitVector& v) {
    check_conformable(v.size() == m.cols(), "mat_vec: vector length must equal column count");
    BitVector out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (m.row(i).dot(v)) out.set(i);
    return out;
}

BitMatrix gram(const BitMatrix& h) {
    const BitMatrix t = transpose(h);
    const std::size_t n = h.cols();
    BitMatrix g(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        if (t.row(a).dot(t.row(a))) g.set(a, a);
        for (std::size_t b = a + 1; b < n; ++b)
            if (t.row(a).dot(t.row(b))) {
                g.set(a, b);
                g.set(b, a);
            }
    }
    return g;
}

BitMatrix hstack(const BitMatrix& left, const BitMatrix& right) {
    check_conformable(left.rows() == right.rows(), "hstack: row counts differ");
    const std::size_t lc = left.cols();
    BitMatrix out(left.rows(), lc + right.cols());
    for (std::size_t i = 0; i < left.rows(); ++i) {
        BitVector r = widen(left.row(i), lc + right.cols());
        for_each_set_bit(right.row(i), [&](std::size_t j) { r.set(lc + j); });
        out.set_row(i, std::move(r));
    }
    return out;
}

BitMatrix vstack(const BitMatrix& top, const BitMatrix& bottom) {
    check_conformable(top.cols() == bottom.cols(), "vstack: column counts differ");
    auto rows = top.row_vectors();
    rows.insert(rows.end(), bottom.row_vectors().begin(), bottom.row_vectors().end());
    return BitMatrix(top.cols(), std::move(rows));
}

BitMatrix select_rows(const BitMatrix& m, std::span<const std::size_t> indices) {
    std::vector<BitVector> rows;
    rows.reserve(indices.size());
    for (auto i : indices) {
        if (i >= m.rows()) throw ShapeError("select_rows: index out of range");
        rows.push_back(m.row(i));
    }
    return BitMatrix(m.cols(), std::move(rows));
}

BitMatrix mask_rows(const BitMatrix& m, const BitVector& keep) {
    check_conformable(keep.size() == m.rows(), "mask_rows: mask length must equal row count");
    BitMatrix out(m.rows(), m.cols());
    for_each_set_bit(keep, [&](std::size_t i) { out.set_row(i, m.row(i)); });
    return out;
}

BitMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    BitMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) m.set_row(i, BitVector::random(cols, rng));
    return m;
}

BitMatrix random_invertible(std::size_t n, Rng& rng) {
    // A uniform square matrix is invertible with probability > 0.288.
    for (;;) {
        BitMatrix m = random_matrix(n, n, rng);
        if (rank(m) == n) return m;
    }
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    return perm;
}

BitMatrix permutation_matrix(std::span<const std::size_t> perm) {
    BitMatrix p(perm.size(), perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) p.set(i, perm[i]);
    return p;
}

BitMatrix random_permutation_matrix(std::size_t n, Rng& rng) { return permutation_matrix(random_permutation(n, rng)); }

std::vector<std::size_t> support_of_columns(const BitMatrix& m) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (!m.row(i).is_zero()) out.push_back(i);
    return out;
}

BitVector support_indicator(const BitMatrix& m) {
    BitVector s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (!m.row(i).is_zero()) s.set(i);
    return s;
}

bool is_doubly_even_space(const Subspace& s) {
    // Doubly even generators that are pairwise orthogonal span a doubly even
    // space: |u + v| = |u| + |v| - 2|u & v| and |u & v| is even.
    const auto& b = s.basis();
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i].weight() % 4 != 0) return false;
        for (std::size_t j = i + 1; j < b.size(); ++j)
            if (b[i].dot(b[j])) return false;
    }
    return true;
}

Subspace subspace_sum(const Subspace& u, const Subspace& v) {
    check_conformable(u.ambient_dim() == v.ambient_dim(), "subspace_sum: ambient dimensions differ");
    Subspace s = u;
    for (const auto& b : v.basis()) s.insert(b);
    return s;
}

Subspace orthogonal_complement(const Subspace& u) {
    return kernel_basis(BitMatrix(u.ambient_dim(), u.basis()));
}

Subspace subspace_intersection(const Subspace& u, const Subspace& v) {
    check_conformable(u.ambient_dim() == v.ambient_dim(), "subspace_intersection: ambient dimensions differ");
    return orthogonal_complement(subspace_sum(orthogonal_complement(u), orthogonal_complement(v)));
}

}  // namespace iqp
